#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsfem/assembly.hpp"

namespace nsfem {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public SolverError {
 public:
  SingularMatrixError(const std::string& what, int row_)
      : SolverError(what), row(row_) {}
  int row;
};

struct NewtonConfig {
  double abs_tol = 1e-8;
  int max_iters = 50;
  int max_halvings = 10;
  double continuation_start = 2.0;
  double continuation_step = 0.1;
  std::ostream* verbose = nullptr;
};

struct NewtonStepStats {
  double p = 0.0;
  int iterations = 0;
  double final_residual = 0.0;
  int damping_events = 0;
  double fill_ratio = 0.0;
  std::vector<double> residual_history;
};

struct SolveStats {
  std::vector<NewtonStepStats> steps;
  int total_iterations() const;
};

class NewtonFailure : public SolverError {
 public:
  NewtonFailure(const std::string& what, SolveStats stats_, double p_)
      : SolverError(what), stats(std::move(stats_)), p(p_) {}
  SolveStats stats;
  double p;
};

// Direct sparse solve with relative residual at most 1e-11.
Eigen::VectorXd sparse_lu_solve(const Eigen::SparseMatrix<double>& A,
                                const Eigen::VectorXd& b);

// Continuation exponents from start down to target in uniform steps, ending
// exactly at target; the singleton {target} when target >= start.
std::vector<double> continuation_list(double target, double start = 2.0,
                                      double step = 0.1);

// Damped Newton on the assembled residual from the given initial state.
// Throws NewtonFailure when the iteration budget or backtracking is exhausted.
Eigen::VectorXd newton_solve(const Problem& problem, const NewtonConfig& config,
                             const Eigen::VectorXd& initial,
                             NewtonStepStats& stats, int step_index = 0);

// Configures the problem for a given exponent p; must keep mesh and dof
// layout fixed and return a reference valid until the next call.
using ProblemFamily = std::function<const Problem&(double p)>;

// Solves the target problem, warm-starting through the continuation list from
// a zero state, or directly at the target p when warm_start is given.
Eigen::VectorXd continuation_drive(const ProblemFamily& family, double target_p,
                                   const NewtonConfig& config, SolveStats& stats,
                                   const Eigen::VectorXd* warm_start = nullptr);

}  // namespace nsfem
