#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <span>

#include "elastobayes/boundary.hpp"
#include "elastobayes/mesh.hpp"

namespace elastobayes {

enum class Integration {
  OnePoint,           // strain operator stored on the mesh (centroid / CST)
  SelectiveReduced,   // quads: 1-point volumetric, 2x2 deviatoric
  Full,               // quads: 2x2 Gauss on the whole D
};

// Element stiffness for element e under the chosen rule.
Eigen::MatrixXd element_stiffness(const Mesh& mesh, int e, const Eigen::Matrix3d& D,
                                  Integration rule);

// Global stiffness on all DOFs.
Eigen::SparseMatrix<double> assemble_stiffness(const Mesh& mesh, std::span<const Eigen::Matrix3d> D,
                                               Integration rule = Integration::OnePoint);

struct ForwardSolution {
  Eigen::VectorXd u;   // global displacements, prescribed DOFs included
  double residual = 0; // ||K_ff u_f - (f - K_fp u_p)||
};

// Solves K_ff u_f = f - K_fp u_p. Throws IllPosedProblem when K_ff is singular.
ForwardSolution forward_solve(const Mesh& mesh, std::span<const Eigen::Matrix3d> D,
                              const BoundaryData& bc, Integration rule = Integration::OnePoint);

ForwardSolution forward_solve(const Mesh& mesh, const Eigen::VectorXd& E,
                              const Eigen::Matrix3d& dhat, const BoundaryData& bc,
                              Integration rule = Integration::OnePoint);

// Element-constant stress D_e B_e u_e (centroid operator), stacked.
Eigen::VectorXd element_stresses(const Mesh& mesh, std::span<const Eigen::Matrix3d> D,
                                 const Eigen::VectorXd& u_full);

}  // namespace elastobayes
