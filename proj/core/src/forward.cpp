#include "elastobayes/forward.hpp"

#include <Eigen/SparseCholesky>

#include <vector>

#include "elastobayes/constitutive.hpp"
#include "elastobayes/errors.hpp"

namespace elastobayes {

namespace {

std::vector<Eigen::Vector2d> element_vertices(const Mesh& mesh, int e) {
  std::vector<Eigen::Vector2d> v;
  for (int n : mesh.elements[e]) v.push_back(mesh.nodes[n]);
  return v;
}

Eigen::MatrixXd gauss_2x2_stiffness(std::span<const Eigen::Vector2d> v, const Eigen::Matrix3d& D) {
  static const double g = 1.0 / std::sqrt(3.0);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(8, 8);
  for (double xi : {-g, g}) {
    for (double eta : {-g, g}) {
      double det = 0.0;
      const Eigen::MatrixXd B = quad_strain_displacement_at(v, xi, eta, &det);
      K.noalias() += det * B.transpose() * D * B;
    }
  }
  return K;
}

}  // namespace

Eigen::MatrixXd element_stiffness(const Mesh& mesh, int e, const Eigen::Matrix3d& D,
                                  Integration rule) {
  const auto& B0 = mesh.B[e];
  const bool quad = mesh.elements[e].size() == 4;
  if (!quad || rule == Integration::OnePoint) {
    return mesh.volume[e] * B0.transpose() * D * B0;
  }
  const auto v = element_vertices(mesh, e);
  double lambda_bar = 0.0, mu = 0.0;
  if (rule == Integration::Full || !split_isotropic(D, lambda_bar, mu)) {
    return gauss_2x2_stiffness(v, D);
  }
  Eigen::Matrix3d Dvol = Eigen::Matrix3d::Zero();
  Dvol.topLeftCorner<2, 2>().setConstant(lambda_bar);
  const Eigen::Matrix3d Ddev = mu * Eigen::Vector3d(2.0, 2.0, 1.0).asDiagonal().toDenseMatrix();
  Eigen::MatrixXd K = gauss_2x2_stiffness(v, Ddev);
  K.noalias() += mesh.volume[e] * B0.transpose() * Dvol * B0;
  return K;
}

Eigen::SparseMatrix<double> assemble_stiffness(const Mesh& mesh, std::span<const Eigen::Matrix3d> D,
                                               Integration rule) {
  if (static_cast<int>(D.size()) != mesh.n_elements())
    throw InvalidArgument("need one constitutive matrix per element");
  std::vector<Eigen::Triplet<double>> trip;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Eigen::MatrixXd Ke = element_stiffness(mesh, e, D[e], rule);
    const auto ld = mesh.local_dofs(e);
    for (int a = 0; a < Ke.rows(); ++a)
      for (int b = 0; b < Ke.cols(); ++b) trip.emplace_back(ld[a], ld[b], Ke(a, b));
  }
  Eigen::SparseMatrix<double> K(mesh.n_dofs(), mesh.n_dofs());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

ForwardSolution forward_solve(const Mesh& mesh, std::span<const Eigen::Matrix3d> D,
                              const BoundaryData& bc, Integration rule) {
  const Eigen::SparseMatrix<double> K = assemble_stiffness(mesh, D, rule);
  const int nf = mesh.n_free();
  const auto& fi = mesh.dofs.free_index;
  const Eigen::VectorXd& up = mesh.dofs.prescribed_value;

  Eigen::VectorXd rhs = bc.f.size() == nf ? bc.f : Eigen::VectorXd::Zero(nf);
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < K.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it) {
      const int r = fi[it.row()];
      if (r < 0) continue;
      const int c = fi[it.col()];
      if (c >= 0) {
        trip.emplace_back(r, c, it.value());
      } else {
        rhs(r) -= it.value() * up(it.col());
      }
    }
  }

  ForwardSolution sol;
  Eigen::VectorXd uf = Eigen::VectorXd::Zero(nf);
  if (nf > 0) {
    Eigen::SparseMatrix<double> Kff(nf, nf);
    Kff.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Kff);
    if (ldlt.info() != Eigen::Success)
      throw IllPosedProblem("stiffness factorization failed: constrain the rigid-body modes");
    const double dmax = ldlt.vectorD().cwiseAbs().maxCoeff();
    if (!(ldlt.vectorD().minCoeff() > 1e-12 * dmax))
      throw IllPosedProblem("stiffness matrix is singular: constrain the rigid-body modes");
    uf = ldlt.solve(rhs);
    sol.residual = (Kff * uf - rhs).norm();
  }
  sol.u = mesh.full_displacement(uf);
  return sol;
}

ForwardSolution forward_solve(const Mesh& mesh, const Eigen::VectorXd& E,
                              const Eigen::Matrix3d& dhat, const BoundaryData& bc,
                              Integration rule) {
  if (E.size() != mesh.n_elements()) throw InvalidArgument("need one modulus per element");
  std::vector<Eigen::Matrix3d> D(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) D[e] = E(e) * dhat;
  return forward_solve(mesh, D, bc, rule);
}

Eigen::VectorXd element_stresses(const Mesh& mesh, std::span<const Eigen::Matrix3d> D,
                                 const Eigen::VectorXd& u_full) {
  Eigen::VectorXd s(mesh.n_stress());
  for (int e = 0; e < mesh.n_elements(); ++e)
    s.segment<kStressComponents>(kStressComponents * e) = D[e] * (mesh.B[e] * mesh.gather(e, u_full));
  return s;
}

}  // namespace elastobayes
