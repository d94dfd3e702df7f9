#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <iosfwd>

#include "nsfem/flow_law.hpp"
#include "nsfem/spaces.hpp"

namespace nsfem {

/// Treatment of the convective term in the momentum rows:
///   Reconstruction: -(v (x) z, grad w) with the H(div) reconstruction z as
///                   an unknown tied to v by flux-moment rows;
///   Temam:          skew form 1/2 (w (x) v, grad v) - 1/2 (v (x) v, grad w)
///                   plus the compatibility term 1/2 (g1 v, w), z pinned;
///   None:           convection off, z pinned (testing mode).
enum class ConvectiveMode { Reconstruction, Temam, None };

/// Pointwise exact fields backing the weak-residual forcing.
struct ExactFields {
  VectorField velocity;
  std::function<Eigen::Matrix2d(const Eigen::Vector2d&)> gradient;
  std::function<double(const Eigen::Vector2d&)> pressure;
};

/// One discrete problem: mesh, spaces, law, convective mode, forcing, and
/// boundary data. Unknown ordering is velocity, reconstruction, pressure,
/// then the scalar pressure-mean multiplier.
struct Problem {
  const Mesh* mesh = nullptr;
  const MeshTopology* topo = nullptr;
  const DofMap* dofmap = nullptr;
  FlowLaw law;
  ConvectiveMode mode = ConvectiveMode::None;
  Eigen::VectorXd load;             // momentum functional, size n_velocity
  Eigen::VectorXd boundary_values;  // size n_velocity; Dirichlet entries used
  double g1 = 0.0;                  // mean of div of the boundary datum
  int volume_degree = 8;
  int edge_degree = 8;
};

/// Zero state with Dirichlet velocity entries set from the boundary data.
Eigen::VectorXd zero_state(const Problem& problem);

/// Blocked residual:
///   momentum rows (interior velocity tests), Dirichlet rows as
///   coefficient minus datum; reconstruction moment rows (or identity
///   pinning); divergence rows with the g1 datum and the multiplier column;
///   one pressure-mean row.
Eigen::VectorXd assemble_residual(const Problem& problem,
                                  const Eigen::VectorXd& state);

/// Exact derivative of assemble_residual. The sparsity pattern depends only
/// on the problem, not on the state.
Eigen::SparseMatrix<double> assemble_jacobian(const Problem& problem,
                                              const Eigen::VectorXd& state);

/// Weak-residual forcing of an exact solution: L(w) = (S(D v), D w)
/// [- (v (x) v, grad w)] - (q, div w), evaluated pointwise by quadrature.
/// The convective part is included only when the discrete operator carries a
/// convective term.
Eigen::VectorXd manufactured_rhs(const Mesh& mesh, const MeshTopology& topo,
                                 const DofMap& dofmap, const FlowLaw& law,
                                 const ExactFields& exact,
                                 bool include_convection, int degree = 8);

/// Skew convective trilinear form with compatibility term:
///   1/2 (w (x) u, grad v) - 1/2 (v (x) u, grad w) + 1/2 (g1 u, w).
double temam_form(const Mesh& mesh, const MeshTopology& topo,
                  const DofMap& dofmap, const Eigen::VectorXd& u,
                  const Eigen::VectorXd& v, const Eigen::VectorXd& w, double g1,
                  int degree = 8);

/// Reconstruction convective form -(a (x) z, grad w) with a, w in the
/// velocity space and z in the reconstruction space.
double recon_convective_form(const Mesh& mesh, const MeshTopology& topo,
                             const DofMap& dofmap, const Eigen::VectorXd& a,
                             const Eigen::VectorXd& z, const Eigen::VectorXd& w,
                             int degree = 8);

/// Coordinate text dump, one "row col value" line per stored entry, 17
/// significant digits.
void write_matrix_text(const Eigen::SparseMatrix<double>& A, std::ostream& os);

}  // namespace nsfem
