#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace elastobayes {

// Stress/strain components in 2D, ordered xx, yy, xy (engineering shear).
inline constexpr int kStressComponents = 3;

enum class ElementKind {
  ConstantStrainQuad,  // bilinear quad, strain operator evaluated at the centroid
  TrianglePair,        // each grid cell split into two linear triangles
};

// Returns the prescribed value of displacement component `component` (0 = x,
// 1 = y) at a node, or nullopt when the DOF is free.
using DirichletRule =
    std::function<std::optional<double>(const Eigen::Vector2d& x, int component)>;

// Normal displacements on the four walls of the unit square: u_x = 0 on the
// left, u_x = right_ux on the right, u_y = 0 on the bottom, u_y = top_uy on the
// top. Tangential DOFs stay free. A nullopt wall value leaves that wall free.
DirichletRule wall_normal_dirichlet(std::optional<double> right_ux = 1.0,
                                    std::optional<double> top_uy = 1.0);

// Both components prescribed on every boundary node from u(x) = A x + c.
DirichletRule affine_boundary_dirichlet(const Eigen::Matrix2d& A, const Eigen::Vector2d& c);

DirichletRule no_dirichlet();

struct DofPartition {
  std::vector<int> free_index;      // global dof -> free slot, -1 if prescribed
  std::vector<int> free_to_global;  // free slot -> global dof
  std::vector<int> prescribed;      // global dofs with Dirichlet data
  Eigen::VectorXd prescribed_value; // indexed by global dof, zero on free dofs

  int n_free() const { return static_cast<int>(free_to_global.size()); }
  bool is_free(int global_dof) const { return free_index[global_dof] >= 0; }
};

struct Mesh {
  int nx = 0;
  int ny = 0;
  ElementKind kind = ElementKind::ConstantStrainQuad;

  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::vector<int>> elements;  // counter-clockwise node ids
  std::vector<double> volume;              // area times unit thickness
  std::vector<Eigen::Vector2d> centroid;
  std::vector<Eigen::MatrixXd> B;          // 3 x (2 * nodes per element)

  DofPartition dofs;
  // Equilibrium operator: Bhat^T sigma = f on the free DOFs, with
  // Bhat^T = sum_e V_e L_e^T B_e^T. Rows are stacked element stresses.
  Eigen::SparseMatrix<double> Bhat;

  int n_elements() const { return static_cast<int>(elements.size()); }
  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_dofs() const { return 2 * n_nodes(); }
  int n_free() const { return dofs.n_free(); }
  int n_stress() const { return kStressComponents * n_elements(); }

  // Gather map L_e as the list of global DOFs of element e.
  std::vector<int> local_dofs(int e) const;

  // Global displacement vector from free values plus prescribed data.
  Eigen::VectorXd full_displacement(const Eigen::VectorXd& u_free) const;
  Eigen::VectorXd free_part(const Eigen::VectorXd& u_full) const;

  // u_e = L_e u for a full (global) displacement vector.
  Eigen::VectorXd gather(int e, const Eigen::VectorXd& u_full) const;

  // Element whose closure contains p; points outside the domain snap to the
  // nearest element.
  int locate(const Eigen::Vector2d& p) const;

  // Interpolates a full nodal displacement field at an arbitrary point.
  Eigen::Vector2d interpolate(const Eigen::VectorXd& u_full, const Eigen::Vector2d& p) const;
};

// Regular grid on [0,1]^2 with nx by ny cells.
Mesh build_structured_mesh(int nx, int ny, ElementKind kind,
                           const DirichletRule& rule = wall_normal_dirichlet());

// Constant strain operator of a linear triangle (3 vertices) or the centroid
// operator of a bilinear quad (4 vertices), engineering shear convention.
Eigen::MatrixXd strain_displacement(std::span<const Eigen::Vector2d> vertices);

// Bilinear quad strain operator at a reference point (xi, eta) in [-1,1]^2.
// Writes the Jacobian determinant when det_j is non-null.
Eigen::MatrixXd quad_strain_displacement_at(std::span<const Eigen::Vector2d> vertices,
                                            double xi, double eta, double* det_j = nullptr);

double polygon_area(std::span<const Eigen::Vector2d> vertices);

// Assembles Bhat from per-element volumes, strain operators and the DOF map.
Eigen::SparseMatrix<double> assemble_equilibrium(const Mesh& mesh);

}  // namespace elastobayes
