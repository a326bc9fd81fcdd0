#pragma once

#include <Eigen/Dense>

#include <vector>

#include "elastobayes/mesh.hpp"

namespace elastobayes {

enum class Wall { Left, Right, Bottom, Top };

// Constant traction (force per length) on the boundary edge a-b.
struct EdgeTraction {
  int node_a = 0;
  int node_b = 0;
  Eigen::Vector2d traction = Eigen::Vector2d::Zero();
};

// External loading. Dirichlet values live in the mesh DOF partition; `f` is the
// consistent nodal force on free DOFs produced by tractions and body forces and
// is the right-hand side of the equilibrium constraint Bhat^T sigma = f.
struct BoundaryData {
  std::vector<EdgeTraction> tractions;
  std::vector<Eigen::Vector2d> body_force;  // per element, empty means zero
  Eigen::VectorXd f;
};

// Uniform traction on every edge of one wall of a structured mesh.
std::vector<EdgeTraction> wall_traction(const Mesh& mesh, Wall wall, const Eigen::Vector2d& t);

// Nodal force on all global DOFs (prescribed included).
Eigen::VectorXd assemble_external_force_full(const Mesh& mesh,
                                             const std::vector<EdgeTraction>& tractions,
                                             const std::vector<Eigen::Vector2d>& body_force);

BoundaryData make_boundary_data(const Mesh& mesh, std::vector<EdgeTraction> tractions = {},
                                std::vector<Eigen::Vector2d> body_force = {});

}  // namespace elastobayes
