// Copyright 2026 The ecrs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ecrs/subsolver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace ecrs {

int VariableLayout::add_complex(std::string name, int rows, int cols) {
  blocks_.push_back(Block{std::move(name), size_, rows, cols, true});
  size_ += 2 * rows * cols;
  return num_blocks() - 1;
}

int VariableLayout::add_real(std::string name, int n) {
  blocks_.push_back(Block{std::move(name), size_, n, 1, false});
  size_ += n;
  return num_blocks() - 1;
}

int VariableLayout::complex_index(int id, int i, int j) const {
  const Block& b = blocks_.at(id);
  return b.offset + 2 * (j * b.rows + i);
}

int VariableLayout::real_index(int id, int i) const { return blocks_.at(id).offset + i; }

CMat VariableLayout::complex_block(int id, const RVec& x) const {
  const Block& b = blocks_.at(id);
  CMat out(b.rows, b.cols);
  for (int j = 0; j < b.cols; ++j) {
    for (int i = 0; i < b.rows; ++i) {
      const int idx = complex_index(id, i, j);
      out(i, j) = cd(x(idx), x(idx + 1));
    }
  }
  return out;
}

void VariableLayout::set_complex_block(int id, const CMat& value, RVec& x) const {
  const Block& b = blocks_.at(id);
  for (int j = 0; j < b.cols; ++j) {
    for (int i = 0; i < b.rows; ++i) {
      const int idx = complex_index(id, i, j);
      x(idx) = value(i, j).real();
      x(idx + 1) = value(i, j).imag();
    }
  }
}

double QuadConstraint::value(const RVec& x) const {
  double v = b.dot(x) - d;
  if (A.rows() > 0) v += (A * x + c).squaredNorm();
  return v;
}

ConstraintBuilder::ConstraintBuilder(int num_vars) : n_(num_vars), b_(RVec::Zero(num_vars)) {}

void ConstraintBuilder::add_complex_square(const std::vector<std::pair<int, cd>>& terms, cd constant) {
  // s = sum a z + k, z = xr + i xi:  Re s = ar xr - ai xi + kr,  Im s = ai xr + ar xi + ki
  const int re_row = rows_++;
  const int im_row = rows_++;
  for (const auto& [idx, a] : terms) {
    triplets_.emplace_back(re_row, idx, a.real());
    triplets_.emplace_back(re_row, idx + 1, -a.imag());
    triplets_.emplace_back(im_row, idx, a.imag());
    triplets_.emplace_back(im_row, idx + 1, a.real());
  }
  c_.push_back(constant.real());
  c_.push_back(constant.imag());
}

void ConstraintBuilder::add_real_square(const std::vector<std::pair<int, double>>& terms, double constant) {
  const int row = rows_++;
  for (const auto& [idx, a] : terms) triplets_.emplace_back(row, idx, a);
  c_.push_back(constant);
}

void ConstraintBuilder::add_linear(int index, double coeff) { b_(index) += coeff; }

QuadConstraint ConstraintBuilder::build(std::string label) const {
  QuadConstraint q;
  q.A.resize(rows_, n_);
  q.A.setFromTriplets(triplets_.begin(), triplets_.end());
  q.A.makeCompressed();
  q.c = Eigen::Map<const RVec>(c_.data(), static_cast<Eigen::Index>(c_.size()));
  q.b = b_;
  q.d = rhs_;
  q.label = std::move(label);
  return q;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::MaxIter: return "MaxIter";
    case SolveStatus::Infeasible: return "Infeasible";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Problem {
  int n = 0;
  RVec objective;
  const std::vector<LogTerm>* logs = nullptr;
  const std::vector<QuadConstraint>* cons = nullptr;
};

double f0_value(const Problem& p, const RVec& x) {
  double v = p.objective.dot(x);
  for (const LogTerm& l : *p.logs) {
    const double arg = l.alpha + l.a.dot(x);
    if (!(arg > 0.0)) return kInf;
    v -= l.weight * std::log(arg);
  }
  return v;
}

// t * f0 + barrier; +inf outside the domain.
double phi_value(const Problem& p, const RVec& x, double t, double* f0_out = nullptr) {
  const double f0 = f0_value(p, x);
  if (!std::isfinite(f0)) return kInf;
  double v = t * f0;
  for (const QuadConstraint& q : *p.cons) {
    const double g = q.value(x);
    if (!(g < 0.0)) return kInf;
    v -= std::log(-g);
  }
  if (f0_out) *f0_out = f0;
  return v;
}

void f0_gradient(const Problem& p, const RVec& x, RVec& grad) {
  grad = p.objective;
  for (const LogTerm& l : *p.logs) grad -= (l.weight / (l.alpha + l.a.dot(x))) * l.a;
}

// Gradient and lower-triangular Hessian of the barrier part only.
void barrier_derivatives(const Problem& p, const RVec& x, RVec& grad, RMat& hess) {
  const int n = p.n;
  const int m = static_cast<int>(p.cons->size());
  grad = RVec::Zero(n);
  hess = RMat::Zero(n, n);
  RMat G(n, m);
  for (int j = 0; j < m; ++j) {
    const QuadConstraint& q = (*p.cons)[j];
    RVec gj = q.b;
    double val = q.b.dot(x) - q.d;
    const double* r_ptr = nullptr;
    RVec r;
    if (q.A.rows() > 0) {
      r = q.A * x + q.c;
      val += r.squaredNorm();
      gj += 2.0 * (q.A.transpose() * r);
      r_ptr = r.data();
    }
    const double slack = -val;
    grad += gj / slack;
    G.col(j) = gj / slack;
    if (r_ptr) {
      const double w = 2.0 / slack;
      for (int row = 0; row < q.A.outerSize(); ++row) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator a(q.A, row); a; ++a) {
          for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator b(q.A, row); b; ++b) {
            if (b.col() <= a.col()) hess(a.col(), b.col()) += w * a.value() * b.value();
          }
        }
      }
    }
  }
  if (m > 0) hess.selfadjointView<Eigen::Lower>().rankUpdate(G);
}

void add_f0_hessian(const Problem& p, const RVec& x, double t, RMat& hess) {
  for (const LogTerm& l : *p.logs) {
    const double arg = l.alpha + l.a.dot(x);
    const RVec v = (std::sqrt(t * l.weight) / arg) * l.a;
    hess.selfadjointView<Eigen::Lower>().rankUpdate(v);
  }
}

// Solves hess * dx = rhs with symmetric diagonal scaling and a growing ridge
// when the factorization fails.
RVec newton_solve(RMat hess, const RVec& rhs) {
  const int n = static_cast<int>(rhs.size());
  RVec scale(n);
  for (int i = 0; i < n; ++i) scale(i) = hess(i, i) > 0.0 ? 1.0 / std::sqrt(hess(i, i)) : 1.0;
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) hess(i, j) *= scale(i) * scale(j);
  }
  const RVec srhs = scale.cwiseProduct(rhs);
  double ridge = 0.0;
  for (int attempt = 0; attempt < 12; ++attempt) {
    RMat h = hess;
    if (ridge > 0.0) h.diagonal().array() += ridge;
    Eigen::LLT<RMat, Eigen::Lower> llt(h);
    if (llt.info() == Eigen::Success) {
      RVec y = llt.solve(srhs);
      if (y.allFinite()) return scale.cwiseProduct(y);
    }
    ridge = ridge == 0.0 ? 1e-12 : ridge * 100.0;
  }
  throw std::runtime_error("subsolver: Newton system could not be factorized");
}

struct CoreResult {
  RVec x;
  SolveStatus status = SolveStatus::MaxIter;
  int newton = 0;
  double t = 1.0;
  std::vector<double> trace;
  bool stopped = false;
};

// Picks t so that t * grad f0 + grad barrier is as small as possible in the
// Hessian norm, clipped to a sane range.
double initial_barrier_weight(const Problem& p, const RVec& x, int m, const SolverOptions& opt) {
  RVec gb, gf;
  RMat hb;
  barrier_derivatives(p, x, gb, hb);
  f0_gradient(p, x, gf);
  hb.diagonal().array() += 1e-12 * std::max(1.0, hb.diagonal().maxCoeff());
  Eigen::LLT<RMat, Eigen::Lower> llt(hb);
  if (llt.info() != Eigen::Success) return 1.0;
  const RVec hf = llt.solve(gf);
  const double den = gf.dot(hf);
  const double num = -gb.dot(hf);
  if (!(den > 0.0) || !std::isfinite(num / den)) return 1.0;
  const double t_max = std::max(1.0, m / opt.opt_tol / opt.barrier_growth);
  return std::clamp(num / den, 1e-3, t_max);
}

CoreResult run_barrier(const Problem& p, RVec x, const SolverOptions& opt,
                       const std::function<bool(const RVec&)>& stop) {
  CoreResult res;
  const int m = static_cast<int>(p.cons->size());
  double t = m > 0 ? initial_barrier_weight(p, x, m, opt) : 1.0;
  constexpr double kArmijo = 0.25;
  constexpr double kShrink = 0.5;

  RVec gb, gf;
  RMat hess;
  while (true) {
    for (int it = 0; it < 200; ++it) {
      barrier_derivatives(p, x, gb, hess);
      f0_gradient(p, x, gf);
      add_f0_hessian(p, x, t, hess);
      const RVec grad = t * gf + gb;
      const RVec dx = newton_solve(hess, -grad);
      const double slope = grad.dot(dx);
      const double lambda2 = -slope;
      // lambda^2 / (2 t) bounds the centering error in the objective.
      if (!(lambda2 > 0.0) || lambda2 / 2.0 <= opt.centering_tol * std::max(1.0, t)) break;

      const double phi0 = phi_value(p, x, t);
      double step = 1.0;
      bool accepted = false;
      bool roundoff = false;
      for (int ls = 0; ls < 80; ++ls, step *= kShrink) {
        const RVec xn = x + step * dx;
        const double phi1 = phi_value(p, xn, t);
        if (!std::isfinite(phi1)) continue;
        const bool armijo = phi1 <= phi0 + kArmijo * step * slope;
        // Near the center the decrease is below the rounding level of phi.
        const bool tiny = lambda2 < 1e-6 && phi1 <= phi0 + 1e-13 * std::abs(phi0) + 1e-300;
        if (armijo || tiny) {
          x = xn;
          accepted = true;
          roundoff = !armijo;
          break;
        }
      }
      ++res.newton;
      if (!accepted || roundoff) break;
      if (stop && stop(x)) {
        res.x = x;
        res.t = t;
        res.stopped = true;
        res.status = SolveStatus::Optimal;
        return res;
      }
      if (res.newton >= opt.max_newton) {
        res.x = x;
        res.t = t;
        res.status = SolveStatus::MaxIter;
        return res;
      }
    }
    res.trace.push_back(f0_value(p, x));
    if (m == 0 || m / t <= opt.opt_tol) {
      res.status = SolveStatus::Optimal;
      break;
    }
    t *= opt.barrier_growth;
  }
  res.x = x;
  res.t = t;
  return res;
}

bool strictly_feasible(const SubproblemSpec& spec, const RVec& x) {
  for (const QuadConstraint& q : spec.constraints) {
    if (!(q.value(x) < 0.0)) return false;
  }
  for (const LogTerm& l : spec.log_terms) {
    if (!(l.alpha + l.a.dot(x) > 0.0)) return false;
  }
  return true;
}

// Minimizes s subject to g_j(x) <= s; stops as soon as s < 0.
bool phase1(const SubproblemSpec& spec, RVec& x, int& newton) {
  const int n = spec.layout.size();
  std::vector<QuadConstraint> cons;
  double s0 = -kInf;
  for (const QuadConstraint& q : spec.constraints) {
    QuadConstraint e;
    e.A.resize(q.A.rows(), n + 1);
    std::vector<Eigen::Triplet<double>> trip;
    for (int row = 0; row < q.A.outerSize(); ++row) {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(q.A, row); it; ++it) {
        trip.emplace_back(row, it.col(), it.value());
      }
    }
    e.A.setFromTriplets(trip.begin(), trip.end());
    e.c = q.c;
    e.b = RVec::Zero(n + 1);
    e.b.head(n) = q.b;
    e.b(n) = -1.0;
    e.d = q.d;
    cons.push_back(std::move(e));
    s0 = std::max(s0, q.value(x));
  }
  for (const LogTerm& l : spec.log_terms) {
    QuadConstraint e;
    e.A.resize(0, n + 1);
    e.b = RVec::Zero(n + 1);
    e.b.head(n) = -l.a;
    e.b(n) = -1.0;
    e.d = l.alpha;
    cons.push_back(std::move(e));
    s0 = std::max(s0, -(l.alpha + l.a.dot(x)));
  }
  s0 += std::max(1.0, 0.1 * std::abs(s0));
  {
    // Keeps the phase-1 barrier bounded below.
    const double radius = 1e4 + 10.0 * x.norm();
    QuadConstraint ball;
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < n; ++i) trip.emplace_back(i, i, 1.0);
    ball.A.resize(n, n + 1);
    ball.A.setFromTriplets(trip.begin(), trip.end());
    ball.c = RVec::Zero(n);
    ball.b = RVec::Zero(n + 1);
    ball.d = radius * radius;
    cons.push_back(std::move(ball));
  }
  {
    QuadConstraint lb;
    lb.A.resize(0, n + 1);
    lb.b = RVec::Zero(n + 1);
    lb.b(n) = -1.0;
    lb.d = 1.0;
    cons.push_back(std::move(lb));
  }
  const std::vector<LogTerm> no_logs;
  Problem p;
  p.n = n + 1;
  p.objective = RVec::Zero(n + 1);
  p.objective(n) = 1.0;
  p.logs = &no_logs;
  p.cons = &cons;

  RVec xs(n + 1);
  xs.head(n) = x;
  xs(n) = s0;
  SolverOptions opt = spec.options;
  opt.opt_tol = 1e-10;
  CoreResult r = run_barrier(p, xs, opt, [n](const RVec& v) { return v(n) < 0.0; });
  newton += r.newton;
  x = r.x.head(n);
  return r.stopped && strictly_feasible(spec, x);
}

}  // namespace

double objective_value(const SubproblemSpec& spec, const RVec& x) {
  Problem p;
  p.n = spec.layout.size();
  p.objective = spec.objective;
  p.logs = &spec.log_terms;
  p.cons = &spec.constraints;
  return f0_value(p, x);
}

SubproblemResult solve(const SubproblemSpec& spec) {
  const int n = spec.layout.size();
  if (spec.objective.size() != n) throw std::invalid_argument("subsolver: objective size mismatch");
  for (const QuadConstraint& q : spec.constraints) {
    if (q.b.size() != n || q.A.cols() != n || q.c.size() != q.A.rows()) {
      throw std::invalid_argument("subsolver: constraint '" + q.label + "' has inconsistent dimensions");
    }
  }
  for (const LogTerm& l : spec.log_terms) {
    if (l.a.size() != n) throw std::invalid_argument("subsolver: log term size mismatch");
  }

  SubproblemResult out;
  RVec x = spec.initial.size() == n ? spec.initial : RVec::Zero(n);
  if (!strictly_feasible(spec, x)) {
    out.used_phase1 = true;
    if (!phase1(spec, x, out.newton_steps)) {
      out.x = x;
      out.status = SolveStatus::Infeasible;
      out.objective = objective_value(spec, x);
      out.residuals = RVec(spec.constraints.size());
      for (std::size_t j = 0; j < spec.constraints.size(); ++j) {
        out.residuals(j) = std::max(0.0, spec.constraints[j].value(x));
      }
      out.max_residual = out.residuals.size() ? out.residuals.maxCoeff() : 0.0;
      return out;
    }
  }

  Problem p;
  p.n = n;
  p.objective = spec.objective;
  p.logs = &spec.log_terms;
  p.cons = &spec.constraints;
  SolverOptions opt = spec.options;
  opt.max_newton = std::max(1, opt.max_newton - out.newton_steps);
  CoreResult r = run_barrier(p, x, opt, nullptr);

  out.x = r.x;
  out.status = r.status;
  out.newton_steps += r.newton;
  out.trace = std::move(r.trace);
  out.gap = spec.constraints.empty() ? 0.0 : spec.constraints.size() / r.t;
  out.objective = objective_value(spec, out.x);
  out.residuals = RVec(spec.constraints.size());
  for (std::size_t j = 0; j < spec.constraints.size(); ++j) {
    out.residuals(j) = std::max(0.0, spec.constraints[j].value(out.x));
  }
  out.max_residual = out.residuals.size() ? out.residuals.maxCoeff() : 0.0;
  if (out.status == SolveStatus::Optimal && out.max_residual > spec.options.feas_tol) {
    out.status = SolveStatus::MaxIter;
  }
  return out;
}

void write_trace_csv(std::ostream& os, const SubproblemResult& result) {
  os << "step,objective\n";
  for (std::size_t i = 0; i < result.trace.size(); ++i) os << i << ',' << result.trace[i] << '\n';
}

}  // namespace ecrs
