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

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "ecrs/types.hpp"

namespace ecrs {

/// Maps named complex and real variable blocks onto one real vector.
/// Complex entries are stored as adjacent (re, im) pairs, column-major.
class VariableLayout {
 public:
  struct Block {
    std::string name;
    int offset = 0;
    int rows = 0;
    int cols = 0;
    bool complex = false;
    int size() const { return rows * cols * (complex ? 2 : 1); }
  };

  int add_complex(std::string name, int rows, int cols);
  int add_real(std::string name, int n);

  const Block& block(int id) const { return blocks_.at(id); }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int size() const { return size_; }

  /// Index of the real part of complex entry (i, j); the imaginary part follows.
  int complex_index(int id, int i, int j = 0) const;
  int real_index(int id, int i) const;

  CMat complex_block(int id, const RVec& x) const;
  void set_complex_block(int id, const CMat& value, RVec& x) const;

 private:
  std::vector<Block> blocks_;
  int size_ = 0;
};

/// Convex constraint in sum-of-squares form: ||A x + c||^2 + b^T x <= d.
/// A linear constraint has A with zero rows.
struct QuadConstraint {
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;
  RVec c;
  RVec b;
  double d = 0.0;
  std::string label;

  double value(const RVec& x) const;  ///< left side minus d
};

/// Assembles one QuadConstraint from complex and real affine pieces.
class ConstraintBuilder {
 public:
  explicit ConstraintBuilder(int num_vars);

  /// Adds |sum_i coeff_i z_i + constant|^2 where z_i is the complex variable
  /// whose real part sits at index terms[i].first.
  void add_complex_square(const std::vector<std::pair<int, cd>>& terms, cd constant);
  /// Adds (sum_i coeff_i x_i + constant)^2 over real variables.
  void add_real_square(const std::vector<std::pair<int, double>>& terms, double constant);
  void add_linear(int index, double coeff);
  void add_rhs(double value) { rhs_ += value; }

  QuadConstraint build(std::string label) const;

 private:
  int n_;
  int rows_ = 0;
  std::vector<Eigen::Triplet<double>> triplets_;
  std::vector<double> c_;
  RVec b_;
  double rhs_ = 0.0;
};

/// Concave utility term weight * log(alpha + a^T x), subtracted from the
/// linear objective that is minimized.
struct LogTerm {
  RVec a;
  double alpha = 0.0;
  double weight = 1.0;
};

struct SolverOptions {
  double feas_tol = 1e-8;  ///< residual bound certified for Optimal
  double opt_tol = 1e-6;   ///< duality-gap bound m/t at termination
  int max_newton = 2000;
  double barrier_growth = 20.0;
  double centering_tol = 1e-10;
};

struct SubproblemSpec {
  VariableLayout layout;
  RVec objective;  ///< linear part, minimized
  std::vector<LogTerm> log_terms;
  std::vector<QuadConstraint> constraints;
  RVec initial;  ///< starting point; need not be strictly feasible
  SolverOptions options;
};

enum class SolveStatus { Optimal, MaxIter, Infeasible };

const char* to_string(SolveStatus s);

struct SubproblemResult {
  RVec x;
  double objective = 0.0;
  SolveStatus status = SolveStatus::MaxIter;
  RVec residuals;  ///< max(0, constraint value) per constraint
  double max_residual = 0.0;
  double gap = 0.0;  ///< final m/t
  int newton_steps = 0;
  bool used_phase1 = false;
  std::vector<double> trace;  ///< objective after every centering step
};

/// Log-barrier interior-point method with a phase-1 search when the initial
/// point is not strictly feasible. Deterministic for a given spec.
SubproblemResult solve(const SubproblemSpec& spec);

double objective_value(const SubproblemSpec& spec, const RVec& x);

/// Writes "step,objective" rows of the centering trace.
void write_trace_csv(std::ostream& os, const SubproblemResult& result);

}  // namespace ecrs
