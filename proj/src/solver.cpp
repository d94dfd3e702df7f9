#include "nsfem/solver.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <ostream>
#include <sstream>

namespace nsfem {

int SolveStats::total_iterations() const {
  int n = 0;
  for (const NewtonStepStats& s : steps) n += s.iterations;
  return n;
}

namespace {

void check_structure(const Eigen::SparseMatrix<double>& A) {
  if (A.rows() != A.cols())
    throw SolverError("sparse_lu_solve: matrix is not square");
  std::vector<bool> row_hit(A.rows(), false);
  for (int c = 0; c < A.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it)
      if (it.value() != 0.0) row_hit[it.row()] = true;
  for (int r = 0; r < A.rows(); ++r)
    if (!row_hit[r]) {
      std::ostringstream os;
      os << "sparse_lu_solve: structurally singular, row " << r
         << " has no nonzero entries";
      throw SingularMatrixError(os.str(), r);
    }
}

struct Factorization {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  double fill_ratio = 0.0;

  void compute(const Eigen::SparseMatrix<double>& A) {
    check_structure(A);
    lu.compute(A);
    if (lu.info() != Eigen::Success)
      throw SolverError("sparse_lu_solve: factorization failed: " +
                        lu.lastErrorMessage());
    fill_ratio = A.nonZeros() > 0
                     ? double(lu.nnzL() + lu.nnzU()) / double(A.nonZeros())
                     : 0.0;
  }

  Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& A,
                        const Eigen::VectorXd& b) const {
    const double bnorm = b.norm();
    if (bnorm == 0.0) return Eigen::VectorXd::Zero(A.rows());
    Eigen::VectorXd x = lu.solve(b);
    for (int pass = 0; pass < 3; ++pass) {
      const Eigen::VectorXd r = b - A * x;
      if (r.norm() <= 1e-13 * bnorm) break;
      x += lu.solve(r);
    }
    const double rel = (b - A * x).norm() / bnorm;
    if (!(rel <= 1e-11)) {
      std::ostringstream os;
      os << "sparse_lu_solve: relative residual " << rel
         << " exceeds 1e-11 after refinement";
      throw SolverError(os.str());
    }
    return x;
  }
};

}  // namespace

Eigen::VectorXd sparse_lu_solve(const Eigen::SparseMatrix<double>& A,
                                const Eigen::VectorXd& b) {
  if (A.rows() != b.size())
    throw SolverError("sparse_lu_solve: dimension mismatch");
  Factorization f;
  f.compute(A);
  return f.solve(A, b);
}

std::vector<double> continuation_list(double target, double start, double step) {
  if (!(step > 0.0)) throw SolverError("continuation_list: step must be > 0");
  std::vector<double> list;
  for (int k = 0;; ++k) {
    const double p = start - k * step;
    if (p <= target + 1e-12) break;
    list.push_back(p);
  }
  list.push_back(target);
  return list;
}

Eigen::VectorXd newton_solve(const Problem& problem, const NewtonConfig& config,
                             const Eigen::VectorXd& initial,
                             NewtonStepStats& stats, int step_index) {
  stats = NewtonStepStats{};
  stats.p = problem.law.p;

  Eigen::VectorXd x = initial;
  Eigen::VectorXd R = assemble_residual(problem, x);
  double rnorm = R.norm();
  stats.residual_history.push_back(rnorm);

  for (int iter = 0; iter < config.max_iters; ++iter) {
    if (rnorm <= config.abs_tol) {
      stats.final_residual = rnorm;
      return x;
    }
    const Eigen::SparseMatrix<double> J = assemble_jacobian(problem, x);
    Factorization f;
    f.compute(J);
    stats.fill_ratio = f.fill_ratio;
    const Eigen::VectorXd d = f.solve(J, -R);

    double alpha = 1.0;
    bool accepted = false;
    for (int h = 0; h <= config.max_halvings; ++h) {
      const Eigen::VectorXd xt = x + alpha * d;
      const Eigen::VectorXd Rt = assemble_residual(problem, xt);
      const double rt = Rt.norm();
      if (rt < rnorm) {
        x = xt;
        R = Rt;
        rnorm = rt;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      stats.iterations = iter + 1;
      stats.final_residual = rnorm;
      SolveStats all;
      all.steps.push_back(stats);
      std::ostringstream os;
      os << "newton_solve: backtracking exhausted at p=" << problem.law.p
         << " iter=" << iter + 1 << " residual=" << rnorm;
      throw NewtonFailure(os.str(), all, problem.law.p);
    }
    stats.iterations = iter + 1;
    stats.residual_history.push_back(rnorm);
    if (alpha < 1.0) ++stats.damping_events;
    if (config.verbose)
      *config.verbose << "step=" << step_index << " p=" << problem.law.p
                      << " iter=" << iter + 1 << " res=" << rnorm
                      << " alpha=" << alpha << "\n";
  }
  if (rnorm <= config.abs_tol) {
    stats.final_residual = rnorm;
    return x;
  }
  stats.final_residual = rnorm;
  SolveStats all;
  all.steps.push_back(stats);
  std::ostringstream os;
  os << "newton_solve: no convergence in " << config.max_iters
     << " iterations at p=" << problem.law.p << " residual=" << rnorm;
  throw NewtonFailure(os.str(), all, problem.law.p);
}

Eigen::VectorXd continuation_drive(const ProblemFamily& family, double target_p,
                                   const NewtonConfig& config, SolveStats& stats,
                                   const Eigen::VectorXd* warm_start) {
  stats = SolveStats{};
  std::vector<double> list;
  if (warm_start)
    list = {target_p};
  else
    list = continuation_list(target_p, config.continuation_start,
                             config.continuation_step);

  Eigen::VectorXd x;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const Problem& problem = family(list[k]);
    if (k == 0) x = warm_start ? *warm_start : zero_state(problem);
    NewtonStepStats step;
    try {
      x = newton_solve(problem, config, x, step, static_cast<int>(k));
    } catch (NewtonFailure& failure) {
      stats.steps.push_back(failure.stats.steps.front());
      failure.stats = stats;
      throw;
    }
    stats.steps.push_back(step);
  }
  return x;
}

}  // namespace nsfem
