#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "nsfem/mesh.hpp"
#include "nsfem/quadrature.hpp"
#include "nsfem/reference_elements.hpp"

namespace nsfem {

/// The three velocity/pressure pairs, each with its reconstruction target:
///   br1:   (P1 + edge bubbles)^2  x P0,   reconstructed in RT0
///   p2p0:  (P2)^2                 x P0,   reconstructed in RT0
///   ccr:   (P2 + cell bubble)^2   x P1dg, reconstructed in RT1
enum class ElementPairTag { BR1P0, P2P0, CCRP1dg };

struct ElementPair {
  ElementPairTag tag = ElementPairTag::CCRP1dg;
  RTFamily recon = RTFamily::RT1;
  ScalarFamily pressure = ScalarFamily::P1dg;
  const char* name = "ccr";
};
ElementPair element_pair(ElementPairTag tag);

/// Global unknown layout, blocked by field: velocity, reconstruction,
/// pressure, then the single scalar multiplier that pins the pressure mean.
struct DofMap {
  ElementPair pair;
  int n_velocity = 0;
  int n_recon = 0;
  int n_pressure = 0;

  int vel_local = 0;
  int recon_local = 0;
  int pressure_local = 0;

  // Flattened per-cell tables, stride = the corresponding *_local.
  // Velocity and pressure entries index within their own block; recon signs
  // make the signed local shape the restriction of the global basis.
  std::vector<int> cell_vdof;
  std::vector<int> cell_zdof;
  std::vector<double> cell_zsign;
  std::vector<int> cell_qdof;

  std::vector<char> vel_is_dirichlet;  // size n_velocity
  std::vector<int> dirichlet_dofs;     // ascending

  int total() const { return n_velocity + n_recon + n_pressure + 1; }
  int recon_offset() const { return n_velocity; }
  int pressure_offset() const { return n_velocity + n_recon; }
  int multiplier_index() const { return n_velocity + n_recon + n_pressure; }

  int vdof(int cell, int i) const { return cell_vdof[cell * vel_local + i]; }
  int zdof(int cell, int i) const { return cell_zdof[cell * recon_local + i]; }
  double zsign(int cell, int i) const { return cell_zsign[cell * recon_local + i]; }
  int qdof(int cell, int i) const { return cell_qdof[cell * pressure_local + i]; }
};

DofMap build_dofmap(const Mesh& mesh, const MeshTopology& topo, ElementPair pair);

/// Physical-space velocity shapes on one cell at the points of a rule.
/// grad(q, i) holds d(component r)/d(x_c) at entry (r, c).
struct VelocityBasis {
  int nloc = 0, nq = 0;
  std::vector<Eigen::Vector2d> value;
  std::vector<Eigen::Matrix2d> grad;
  const Eigen::Vector2d& val(int q, int i) const { return value[q * nloc + i]; }
  const Eigen::Matrix2d& grd(int q, int i) const { return grad[q * nloc + i]; }
};
void velocity_basis_on_cell(const Mesh& mesh, const MeshTopology& topo,
                            const DofMap& dofmap, int cell, const AffineMap& map,
                            const TriangleQuadrature& rule, VelocityBasis& out);

/// Piola-pushed, sign-adjusted reconstruction shapes on one cell.
struct ReconBasis {
  int nloc = 0, nq = 0;
  std::vector<Eigen::Vector2d> value;
  std::vector<double> divergence;
  const Eigen::Vector2d& val(int q, int i) const { return value[q * nloc + i]; }
  double div(int q, int i) const { return divergence[q * nloc + i]; }
};
void recon_basis_on_cell(const Mesh& mesh, const MeshTopology& topo,
                         const DofMap& dofmap, int cell, const AffineMap& map,
                         const TriangleQuadrature& rule, ReconBasis& out);

/// Pressure shapes are purely reference-side (values only).
struct PressureBasis {
  int nloc = 0, nq = 0;
  std::vector<double> value;
  double val(int q, int i) const { return value[q * nloc + i]; }
};
void pressure_basis(const DofMap& dofmap, const TriangleQuadrature& rule,
                    PressureBasis& out);

AffineMap cell_map(const Mesh& mesh, int cell);

/// Pointwise field evaluation from block-local coefficient vectors.
void eval_velocity(const Mesh& mesh, const MeshTopology& topo,
                   const DofMap& dofmap, const Eigen::VectorXd& coeffs,
                   int cell, const Eigen::Vector2d& xhat, Eigen::Vector2d* value,
                   Eigen::Matrix2d* gradient);
double eval_pressure(const Mesh& mesh, const DofMap& dofmap,
                     const Eigen::VectorXd& coeffs, int cell,
                     const Eigen::Vector2d& xhat);
void eval_recon(const Mesh& mesh, const MeshTopology& topo, const DofMap& dofmap,
                const Eigen::VectorXd& coeffs, int cell,
                const Eigen::Vector2d& xhat, Eigen::Vector2d* value,
                double* divergence);

/// Per-shape values at a single reference point, for edge and pointwise
/// assembly paths. Buffers are resized as needed.
void velocity_shapes(const Mesh& mesh, const MeshTopology& topo,
                     const DofMap& dofmap, int cell, const AffineMap& map,
                     const Eigen::Vector2d& xhat,
                     std::vector<Eigen::Vector2d>& values,
                     std::vector<Eigen::Matrix2d>* gradients);
void recon_shapes(const Mesh& mesh, const DofMap& dofmap, int cell,
                  const AffineMap& map, const Eigen::Vector2d& xhat,
                  std::vector<Eigen::Vector2d>& values,
                  std::vector<double>* divergences);

using VectorField = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

/// Canonical interpolation into the velocity space: vertex (and, for the P2
/// families, edge midpoint) values; edge bubble coefficients chosen to match
/// per-component edge means; cell bubble coefficients to match center values.
Eigen::VectorXd interpolate_velocity(const Mesh& mesh, const MeshTopology& topo,
                                     const DofMap& dofmap, const VectorField& g);

/// Same functionals, applied only to boundary degrees of freedom; interior
/// entries are zero.
Eigen::VectorXd interpolate_boundary(const Mesh& mesh, const MeshTopology& topo,
                                     const DofMap& dofmap, const VectorField& g);

/// Mean of div v_h over the unit square for a velocity coefficient vector.
double compatible_divergence_datum(const Mesh& mesh, const MeshTopology& topo,
                                   const DofMap& dofmap,
                                   const Eigen::VectorXd& vel_coeffs);

/// Interpolation into the reconstruction space by its defining moments:
/// edge flux moments of g, plus componentwise cell integrals for the
/// richer family. Reproduces reconstruction-space fields exactly.
Eigen::VectorXd fortin_interpolate(const Mesh& mesh, const MeshTopology& topo,
                                   const DofMap& dofmap, const VectorField& g);

}  // namespace nsfem
