#include <gtest/gtest.h>

#include <random>

#include "elastobayes/errors.hpp"
#include "elastobayes/mesh.hpp"

using namespace elastobayes;

namespace {

double shape_value(int a, const Eigen::Vector2d& p) {
  // linear triangle (0,0), (1,0), (0,1)
  switch (a) {
    case 0: return 1.0 - p.x() - p.y();
    case 1: return p.x();
    default: return p.y();
  }
}

}  // namespace

TEST(Mesh, ElementCountsAndVolumes) {
  for (auto kind : {ElementKind::ConstantStrainQuad, ElementKind::TrianglePair}) {
    const Mesh m = build_structured_mesh(4, 3, kind);
    EXPECT_EQ(m.n_elements(), kind == ElementKind::TrianglePair ? 24 : 12);
    EXPECT_EQ(m.n_nodes(), 20);
    double area = 0.0;
    for (double v : m.volume) area += v;
    EXPECT_NEAR(area, 1.0, 1e-12);
  }
}

TEST(Mesh, RejectsEmptyGrid) {
  EXPECT_THROW(build_structured_mesh(0, 3, ElementKind::ConstantStrainQuad), InvalidArgument);
  EXPECT_THROW(build_structured_mesh(3, -1, ElementKind::TrianglePair), InvalidArgument);
}

TEST(Mesh, TriangleStrainOperatorMatchesFiniteDifferences) {
  const std::vector<Eigen::Vector2d> v = {{0, 0}, {1, 0}, {0, 1}};
  const Eigen::MatrixXd B = strain_displacement(v);
  const double h = 1e-6;
  const Eigen::Vector2d p(0.3, 0.2);
  for (int a = 0; a < 3; ++a) {
    const double dx = (shape_value(a, p + Eigen::Vector2d(h, 0)) -
                       shape_value(a, p - Eigen::Vector2d(h, 0))) / (2 * h);
    const double dy = (shape_value(a, p + Eigen::Vector2d(0, h)) -
                       shape_value(a, p - Eigen::Vector2d(0, h))) / (2 * h);
    EXPECT_NEAR(B(0, 2 * a), dx, 1e-8);
    EXPECT_NEAR(B(1, 2 * a + 1), dy, 1e-8);
    EXPECT_NEAR(B(2, 2 * a), dy, 1e-8);
    EXPECT_NEAR(B(2, 2 * a + 1), dx, 1e-8);
    EXPECT_NEAR(B(0, 2 * a + 1), 0.0, 1e-14);
    EXPECT_NEAR(B(1, 2 * a), 0.0, 1e-14);
  }
}

TEST(Mesh, QuadCentroidOperatorOfUnitSquare) {
  const std::vector<Eigen::Vector2d> v = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Eigen::MatrixXd B = strain_displacement(v);
  // dN/dx at the centroid: (-1/2, 1/2, 1/2, -1/2); dN/dy: (-1/2, -1/2, 1/2, 1/2)
  const double dx[4] = {-0.5, 0.5, 0.5, -0.5};
  const double dy[4] = {-0.5, -0.5, 0.5, 0.5};
  for (int a = 0; a < 4; ++a) {
    EXPECT_NEAR(B(0, 2 * a), dx[a], 1e-14);
    EXPECT_NEAR(B(1, 2 * a + 1), dy[a], 1e-14);
    EXPECT_NEAR(B(2, 2 * a), dy[a], 1e-14);
    EXPECT_NEAR(B(2, 2 * a + 1), dx[a], 1e-14);
  }
}

TEST(Mesh, DegenerateElementsThrow) {
  const std::vector<Eigen::Vector2d> line = {{0, 0}, {1, 0}, {2, 0}};
  EXPECT_THROW(strain_displacement(line), DegenerateElement);
  const std::vector<Eigen::Vector2d> clockwise = {{0, 0}, {0, 1}, {1, 0}};
  EXPECT_THROW(strain_displacement(clockwise), DegenerateElement);
}

TEST(Mesh, WallDirichletPartition) {
  const Mesh m = build_structured_mesh(3, 3, ElementKind::ConstantStrainQuad);
  // 16 nodes; x prescribed on 2 walls of 4 nodes, y likewise
  EXPECT_EQ(static_cast<int>(m.dofs.prescribed.size()), 16);
  EXPECT_EQ(m.n_free(), 16);
  for (int n = 0; n < m.n_nodes(); ++n) {
    const auto& x = m.nodes[n];
    if (std::abs(x.x() - 1.0) < 1e-12) EXPECT_DOUBLE_EQ(m.dofs.prescribed_value(2 * n), 1.0);
    if (std::abs(x.y() - 1.0) < 1e-12) EXPECT_DOUBLE_EQ(m.dofs.prescribed_value(2 * n + 1), 1.0);
  }
  const Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(m.n_free(), 0.0, 1.0);
  EXPECT_TRUE(m.free_part(m.full_displacement(u)).isApprox(u));
}

TEST(Mesh, UniformStressIsSelfEquilibratedInTheInterior) {
  for (auto kind : {ElementKind::ConstantStrainQuad, ElementKind::TrianglePair}) {
    const Mesh m = build_structured_mesh(4, 4, kind, no_dirichlet());
    Eigen::VectorXd sigma(m.n_stress());
    for (int e = 0; e < m.n_elements(); ++e) sigma.segment<3>(3 * e) << 1.3, -0.4, 0.7;
    const Eigen::VectorXd r = m.Bhat.transpose() * sigma;
    for (int n = 0; n < m.n_nodes(); ++n) {
      const auto& x = m.nodes[n];
      const bool interior = x.x() > 1e-9 && x.x() < 1 - 1e-9 && x.y() > 1e-9 && x.y() < 1 - 1e-9;
      if (!interior) continue;
      EXPECT_NEAR(r(2 * n), 0.0, 1e-13);
      EXPECT_NEAR(r(2 * n + 1), 0.0, 1e-13);
    }
  }
}

TEST(Mesh, EquilibriumOperatorAgainstDirectAssembly) {
  const Mesh m = build_structured_mesh(2, 3, ElementKind::TrianglePair);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(m.n_stress(), m.n_free());
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto dofs = m.local_dofs(e);
    for (std::size_t a = 0; a < dofs.size(); ++a) {
      const int slot = m.dofs.free_index[dofs[a]];
      if (slot < 0) continue;
      dense.block(3 * e, slot, 3, 1) += m.volume[e] * m.B[e].col(static_cast<Eigen::Index>(a));
    }
  }
  EXPECT_LT((Eigen::MatrixXd(m.Bhat) - dense).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Mesh, LocateAndInterpolateAffineField) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (auto kind : {ElementKind::ConstantStrainQuad, ElementKind::TrianglePair}) {
    const Mesh m = build_structured_mesh(5, 4, kind);
    Eigen::VectorXd u(m.n_dofs());
    for (int n = 0; n < m.n_nodes(); ++n)
      u.segment<2>(2 * n) << 0.2 + 1.5 * m.nodes[n].x() - 0.3 * m.nodes[n].y(),
          -0.1 + 0.4 * m.nodes[n].x() + 0.8 * m.nodes[n].y();
    for (int k = 0; k < 200; ++k) {
      const Eigen::Vector2d p(u01(rng), u01(rng));
      const Eigen::Vector2d v = m.interpolate(u, p);
      EXPECT_NEAR(v.x(), 0.2 + 1.5 * p.x() - 0.3 * p.y(), 1e-12);
      EXPECT_NEAR(v.y(), -0.1 + 0.4 * p.x() + 0.8 * p.y(), 1e-12);
    }
    for (int e = 0; e < m.n_elements(); ++e) EXPECT_EQ(m.locate(m.centroid[e]), e);
    EXPECT_EQ(m.locate({-1.0, -1.0}), m.locate({1e-9, 1e-9}));
  }
}
