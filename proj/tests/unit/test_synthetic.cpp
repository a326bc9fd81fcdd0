#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "elastobayes/constitutive.hpp"
#include "elastobayes/errors.hpp"
#include "elastobayes/synthetic.hpp"

using namespace elastobayes;

namespace {

const Eigen::Matrix3d kDhat = isotropic_dhat(Regime::PlaneStress, 0.5);

// Area covered by the ellipses, estimated on a k x k midpoint raster.
double raster_area(const std::vector<Ellipse>& ellipses, int k) {
  long hits = 0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      const double x = (i + 0.5) / k, y = (j + 0.5) / k;
      for (const auto& el : ellipses) {
        const double dx = (x - el.center.x()) / el.semi_axes.x();
        const double dy = (y - el.center.y()) / el.semi_axes.y();
        if (dx * dx + dy * dy < 1.0) {
          ++hits;
          break;
        }
      }
    }
  return static_cast<double>(hits) / (static_cast<double>(k) * k);
}

double ellipse_perimeter(const Ellipse& e) {
  const double a = e.semi_axes.x(), b = e.semi_axes.y();
  return std::numbers::pi * (3 * (a + b) - std::sqrt((3 * a + b) * (a + 3 * b)));
}

}  // namespace

TEST(Synthetic, Example1CentroidMembership) {
  const Mesh m = build_structured_mesh(10, 10, ElementKind::ConstantStrainQuad);
  const GroundTruth t = example1_field(m, kDhat);
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto& c = m.centroid[e];
    const double d1 = std::pow((c.x() - 0.25) / 0.1, 2) + std::pow((c.y() - 0.25) / 0.2, 2);
    const double d2 = std::pow((c.x() - 0.75) / 0.1, 2) + std::pow((c.y() - 0.75) / 0.2, 2);
    const bool inside = d1 < 1.0 - 1e-9 || d2 < 1.0 - 1e-9;
    EXPECT_EQ(t.E(e), inside ? 5.0 : 1.0) << e;
    EXPECT_LT((t.D[e] - t.E(e) * kDhat).norm(), 1e-14);
  }
}

TEST(Synthetic, InclusionAreaMatchesRasterization) {
  const auto ellipses = example1_inclusions();
  const double area = raster_area(ellipses, 1000);
  EXPECT_NEAR(area, 2 * std::numbers::pi * 0.1 * 0.2, 2e-3);
  for (int n : {20, 40}) {
    const Mesh m = build_structured_mesh(n, n, ElementKind::ConstantStrainQuad);
    const GroundTruth t = example1_field(m, kDhat);
    const double cells = static_cast<double>((t.E.array() == kInclusionModulus).count()) / (n * n);
    const double perimeter = 2 * ellipse_perimeter(ellipses[0]);
    EXPECT_LT(std::abs(cells - area), perimeter / n) << n;
  }
}

TEST(Synthetic, Example2CornerAndCircle) {
  const Mesh m = build_structured_mesh(20, 20, ElementKind::ConstantStrainQuad);
  const GroundTruth t = example2_field(m, kDhat);
  int corner = 0, inclusion = 0;
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto& c = m.centroid[e];
    const bool in_corner = c.x() <= 0.2 && c.y() >= 0.8;
    if (in_corner) {
      ++corner;
      EXPECT_FALSE(t.isotropic(e));
      EXPECT_EQ(t.D[e], example2_corner_matrix());
    } else {
      const bool in_circle = (c - Eigen::Vector2d(0.5, 0.5)).squaredNorm() < 0.04 * (1 - 1e-9);
      inclusion += in_circle;
      EXPECT_EQ(t.E(e), in_circle ? 5.0 : 1.0);
    }
  }
  EXPECT_EQ(corner, 16);
  EXPECT_NEAR(inclusion / 400.0, raster_area({example2_inclusion()}, 1000), 2 * std::numbers::pi * 0.2 / 20);
  const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(example2_corner_matrix()).eigenvalues();
  EXPECT_GT(ev.minCoeff(), 0.0);
  EXPECT_THROW(example_field(3, m, kDhat), InvalidArgument);
}

TEST(Synthetic, LoadCases) {
  EXPECT_FALSE(load_case("displacement").measured_top_reaction);
  EXPECT_TRUE(load_case("reaction").measured_top_reaction);
  EXPECT_FALSE(load_case("traction").top_uy.has_value());
  EXPECT_THROW(load_case("bogus"), InvalidArgument);
  const LoadCase r = reaction_loading();
  const Mesh data = build_structured_mesh(4, 4, ElementKind::ConstantStrainQuad, r.data_rule());
  const Mesh inv = build_structured_mesh(4, 4, ElementKind::ConstantStrainQuad, r.inversion_rule());
  EXPECT_GT(inv.n_free(), data.n_free());
}

TEST(Synthetic, HomogeneousDatasetIsExactAndCarriesTheTopReaction) {
  const LoadCase load = reaction_loading();
  const Mesh fine = build_structured_mesh(20, 20, ElementKind::ConstantStrainQuad, load.data_rule());
  const Mesh inv = build_structured_mesh(5, 5, ElementKind::ConstantStrainQuad, load.inversion_rule());
  GroundTruth t;
  t.E = Eigen::VectorXd::Ones(fine.n_elements());
  t.D.assign(fine.n_elements(), kDhat);
  Rng rng(1);
  const Dataset d = make_dataset(t, fine, inv, load, std::numeric_limits<double>::infinity(), rng);
  ASSERT_EQ(d.observations.size(), inv.n_free());
  ASSERT_EQ(d.f.size(), inv.n_free());
  ASSERT_EQ(d.stress.size(), inv.n_stress());
  // u = (x, y) solves the homogeneous problem exactly
  for (int k = 0; k < inv.n_free(); ++k) {
    const int g = inv.dofs.free_to_global[k];
    EXPECT_NEAR(d.u_clean(k), inv.nodes[g / 2](g % 2), 1e-10);
  }
  EXPECT_EQ(d.observations.values, d.u_clean);
  for (int g : fine.dofs.prescribed)
    EXPECT_DOUBLE_EQ(d.fine_u(g), fine.dofs.prescribed_value(g));
  // sigma_yy = 1 / (1 - nu) = 2 across the unit-width top wall
  EXPECT_NEAR(d.f.sum(), 2.0, 1e-9);
  for (int e = 0; e < inv.n_elements(); ++e)
    EXPECT_LT((d.stress.segment<3>(3 * e) - Eigen::Vector3d(2, 2, 0)).norm(), 1e-9);
  // the inversion stress constraint is consistent with the data stress
  EXPECT_LT((inv.Bhat.transpose() * d.stress - d.f).norm(), 1e-9);
}

TEST(Synthetic, LumpingConservesTheTotalReaction) {
  const Mesh fine = build_structured_mesh(12, 12, ElementKind::TrianglePair);
  const Mesh coarse = build_structured_mesh(5, 5, ElementKind::TrianglePair);
  Eigen::VectorXd react = Eigen::VectorXd::Zero(fine.n_dofs());
  double total = 0.0;
  for (int n = 0; n < fine.n_nodes(); ++n)
    if (std::abs(fine.nodes[n].y() - 1.0) < 1e-12) {
      react(2 * n + 1) = std::sin(7.0 * fine.nodes[n].x()) + 2.0;
      total += react(2 * n + 1);
    }
  const Eigen::VectorXd lumped = lump_top_reaction(fine, react, coarse);
  EXPECT_NEAR(lumped.sum(), total, 1e-12);
  for (int n = 0; n < coarse.n_nodes(); ++n) {
    EXPECT_EQ(lumped(2 * n), 0.0);
    if (std::abs(coarse.nodes[n].y() - 1.0) > 1e-12) EXPECT_EQ(lumped(2 * n + 1), 0.0);
  }
}

TEST(Synthetic, NoisyDatasetsAreReproducible) {
  const LoadCase load = reaction_loading();
  const Mesh fine = build_structured_mesh(20, 20, ElementKind::ConstantStrainQuad, load.data_rule());
  const Mesh inv = build_structured_mesh(10, 10, ElementKind::ConstantStrainQuad, load.inversion_rule());
  const GroundTruth t = example1_field(fine, kDhat);
  Rng a(42), b(42), c(43);
  const Dataset da = make_dataset(t, fine, inv, load, 40.0, a);
  const Dataset db = make_dataset(t, fine, inv, load, 40.0, b);
  const Dataset dc = make_dataset(t, fine, inv, load, 40.0, c);
  EXPECT_EQ(da.observations.values, db.observations.values);
  EXPECT_NE(da.observations.values, dc.observations.values);
  EXPECT_NEAR(da.noise_std, rms(da.u_clean) * 1e-2, 1e-15);
  const double realized = rms(da.observations.values - da.u_clean);
  EXPECT_NEAR(realized / da.noise_std, 1.0, 0.2);
}

TEST(Synthetic, DatasetArgumentChecks) {
  const LoadCase load = displacement_loading();
  const Mesh fine = build_structured_mesh(4, 4, ElementKind::ConstantStrainQuad, load.data_rule());
  const Mesh inv = build_structured_mesh(8, 8, ElementKind::ConstantStrainQuad, load.inversion_rule());
  const GroundTruth t = example1_field(fine, kDhat);
  Rng rng(0);
  EXPECT_THROW(make_dataset(t, fine, inv, load, 40.0, rng), InvalidArgument);
  EXPECT_THROW(make_dataset(example1_field(inv, kDhat), fine, fine, load, 40.0, rng), InvalidArgument);
}
