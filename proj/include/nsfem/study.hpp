#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nsfem/solver.hpp"

namespace nsfem {

// Singular benchmark solution on the unit square: v = |x|^beta (-x2, x1),
// q = |x|^gamma - q_mean with gamma = 1 - 2/p' + beta.
struct ManufacturedSolution {
  double p = 2.0;
  double beta = 0.01;
  double gamma = 0.0;
  double q_mean = 0.0;
};

ManufacturedSolution manufactured_solution(double p, double beta = 0.01);

// Domain average of |x|^gamma over the unit square, adaptive to 1e-10
// absolute; cached per gamma.
double q_mean_constant(double gamma);

// Pointwise fields; every evaluation throws std::domain_error at the origin.
ExactFields exact_fields(const ManufacturedSolution& ms);

// Velocity with its continuous extension by zero at the origin, for boundary
// interpolation (the corner is a Dirichlet node).
VectorField boundary_velocity(const ManufacturedSolution& ms);

// Natural-map velocity error sqrt(sum_K int |F(Dv_h) - F(Dv)|^2).
double error_F(const Mesh& mesh, const MeshTopology& topo, const DofMap& dofmap,
               const FlowLaw& law, const Eigen::VectorXd& state,
               const ExactFields& exact, int degree = 10);

// s-norm of the difference of the re-centered discrete and exact pressures.
double error_pressure(const Mesh& mesh, const MeshTopology& topo,
                      const DofMap& dofmap, const Eigen::VectorXd& state,
                      const std::function<double(const Eigen::Vector2d&)>& qexact,
                      double s, int degree = 10);

// Log-ratio convergence orders; throws std::invalid_argument on non-positive
// errors or mismatched lengths.
std::vector<double> eoc(const std::vector<double>& errors,
                        const std::vector<double>& hs);

struct StudyParams {
  double p = 1.5;
  double delta = 1e-5;
  double nu0 = 100.0;
  double beta = 0.01;
  ElementPairTag pair = ElementPairTag::CCRP1dg;
  ConvectiveMode mode = ConvectiveMode::Reconstruction;
  int levels = 6;
  NewtonConfig newton;
};

struct LevelResult {
  int level = 0;
  double h = 0.0;
  int ndof = 0;
  int newton_iters = 0;
  double eF = 0.0;
  double eq_lp = 0.0;
  double eq_l2 = 0.0;
};

struct StudyReport {
  StudyParams params;
  std::vector<LevelResult> levels;
  std::vector<double> eocF;
  std::vector<double> eoc_lp;
  std::vector<double> eoc_l2;
  double theory_v = 1.0;
  double theory_lp = 1.0;
  double theory_l2 = 1.0;
};

class StudyFailure : public SolverError {
 public:
  StudyFailure(const std::string& what, int level_) : SolverError(what), level(level_) {}
  int level;
};

StudyReport run_study(const StudyParams& params);

void write_csv(const StudyReport& report, std::ostream& os);
void write_markdown(const StudyReport& report, std::ostream& os);

// Warm-start transfer of a converged state onto the once-refined mesh.
Eigen::VectorXd prolong_state(const Mesh& coarse_mesh,
                              const MeshTopology& coarse_topo,
                              const DofMap& coarse_dm,
                              const Eigen::VectorXd& coarse_state,
                              const Mesh& fine_mesh,
                              const MeshTopology& fine_topo,
                              const DofMap& fine_dm);

}  // namespace nsfem
