#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "elastobayes/errors.hpp"
#include "elastobayes/samplers.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace elastobayes;
using fixtures::homogeneous_problem;
using fixtures::moments;
using fixtures::perturbed_state;
using oracles::displacement_oracle;
using oracles::stress_oracle;
using oracles::DenseGaussian;
using oracles::StressOracle;

namespace {

Eigen::VectorXd random_lambda2(int n, unsigned seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  Eigen::VectorXd l(n);
  for (auto& v : l) v = 0.01 * u(rng);
  return l;
}

}  // namespace

TEST(NoiseConditional, ShapeAndRate) {
  const InverseProblem p = homogeneous_problem(2);
  Eigen::VectorXd u = p.observations().values;
  u(0) += 0.3;
  u(1) -= 0.4;
  const GammaParams g = noise_precision_conditional(u, p.observations(), NoiseHyperprior{3.0, 0.5});
  EXPECT_DOUBLE_EQ(g.shape, 3.0 + 0.5 * p.observations().size());
  EXPECT_NEAR(g.rate, 0.5 + 0.5 * 0.25, 1e-14);
}

TEST(NoiseConditional, DrawsFollowInverseGamma) {
  const InverseProblem p = homogeneous_problem(2);
  Eigen::VectorXd u = p.observations().values;
  u.array() += 0.1;
  const NoiseHyperprior prior{2.0, 0.0};
  const GammaParams g = noise_precision_conditional(u, p.observations(), prior);
  Rng rng(1);
  const int n = 20000;
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double prec = 1.0 / sample_noise_variance(u, p.observations(), prior, rng);
    sum += prec;
    sum2 += prec * prec;
  }
  const double mean = g.shape / g.rate, var = g.shape / (g.rate * g.rate);
  EXPECT_LT(std::abs(sum / n - mean) / std::sqrt(var / n), 3.5);
  const double emp_var = sum2 / n - (sum / n) * (sum / n);
  EXPECT_NEAR(emp_var / var, 1.0, 0.05);
}

TEST(NoiseConditional, ExactFitWithZeroRateThrows) {
  const InverseProblem p = homogeneous_problem(2);
  Rng rng(0);
  EXPECT_THROW(sample_noise_variance(p.observations().values, p.observations(), {2.0, 0.0}, rng),
               DegeneratePosterior);
  EXPECT_NO_THROW(sample_noise_variance(p.observations().values, p.observations(), {2.0, 0.0}, rng,
                                        kNoiseResidualFloor));
}

TEST(DisplacementConditional, CanonicalFormMatchesDenseAssembly) {
  for (ElementKind kind : {ElementKind::ConstantStrainQuad, ElementKind::TrianglePair}) {
    const InverseProblem p = homogeneous_problem(3, kind);
    const LatentState s = perturbed_state(p, 4);
    const Eigen::VectorXd l2 = random_lambda2(p.n_elements(), 8);
    const GaussianCanonical c = displacement_conditional(p, s, l2);
    const DenseGaussian o = displacement_oracle(p, s, l2);
    EXPECT_LT((c.precision - o.precision).cwiseAbs().maxCoeff(), 1e-9 * o.precision.norm());
    EXPECT_LT((c.precision.ldlt().solve(c.linear) - o.mean).norm(), 1e-9 * (1.0 + o.mean.norm()));
  }
}

TEST(DisplacementConditional, FullDrawMoments) {
  const InverseProblem p = homogeneous_problem(2);
  LatentState s = perturbed_state(p, 2);
  const Eigen::VectorXd l2 = random_lambda2(p.n_elements(), 3);
  const DenseGaussian o = displacement_oracle(p, s, l2);
  const Eigen::MatrixXd cov = o.precision.inverse();
  Rng rng(10);
  std::vector<Eigen::VectorXd> draws;
  for (int k = 0; k < 10000; ++k) draws.push_back(sample_displacement_full(p, s, l2, rng));
  EXPECT_LT(fixtures::gaussian_z_score(moments(draws), o.mean, cov, 10000), 4.0);
}

TEST(DisplacementConditional, BlockConditionalMatchesDenseOracle) {
  const InverseProblem p = homogeneous_problem(3, ElementKind::TrianglePair);
  const LatentState s = perturbed_state(p, 6);
  const Eigen::VectorXd l2 = random_lambda2(p.n_elements(), 1);
  const DenseGaussian o = displacement_oracle(p, s, l2);
  const Eigen::VectorXd b = o.precision * o.mean;
  for (int i = 0; i < p.n_free(); ++i) {
    const ScalarGaussian g = displacement_block_conditional(p, s, l2, i);
    const double pii = o.precision(i, i);
    const double mean = (b(i) - o.precision.row(i).dot(s.u) + pii * s.u(i)) / pii;
    EXPECT_NEAR(g.variance, 1.0 / pii, 1e-10 / pii);
    EXPECT_NEAR(g.mean, mean, 1e-9 * (1.0 + std::abs(mean)));
  }
}

TEST(DisplacementConditional, BlockScanLeavesTheConditionalInvariant) {
  const InverseProblem p = homogeneous_problem(2);
  LatentState s = perturbed_state(p, 12);
  const Eigen::VectorXd l2 = random_lambda2(p.n_elements(), 5);
  const DenseGaussian o = displacement_oracle(p, s, l2);
  Rng rng(13);
  const int n = 40000;
  std::vector<Eigen::VectorXd> draws;
  for (int k = 0; k < n; ++k) {
    sweep_displacement_blocks(p, s, l2, rng);
    draws.push_back(s.u);
  }
  const auto m = moments(draws);
  const Eigen::MatrixXd cov = o.precision.inverse();
  // correlated chain: loose tolerance relative to the marginal scale
  for (int i = 0; i < p.n_free(); ++i)
    EXPECT_LT(std::abs(m.mean(i) - o.mean(i)), 0.05 * std::sqrt(cov(i, i)) + 1e-12);
  EXPECT_LT((m.cov - cov).norm(), 0.1 * cov.norm());
}

TEST(StressConditional, MeanAndCovarianceMatchNullSpaceOracle) {
  for (ElementKind kind : {ElementKind::ConstantStrainQuad, ElementKind::TrianglePair}) {
    const InverseProblem p = homogeneous_problem(3, kind);
    const LatentState s = perturbed_state(p, 1);
    const Eigen::VectorXd l2 = random_lambda2(p.n_elements(), 2);
    const Eigen::VectorXd model = p.model_stress(s.u, s.E);
    const ConstrainedStressSampler sampler(p, l2);
    const StressOracle o = stress_oracle(p, model, l2);
    EXPECT_LT((sampler.mean(model) - o.mean).norm(), 1e-9 * (1.0 + o.mean.norm()));
    EXPECT_LT((sampler.covariance() - o.cov).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(StressConditional, DrawsSatisfyConstraintAndMoments) {
  const InverseProblem p = homogeneous_problem(2);
  const LatentState s = perturbed_state(p, 3);
  const Eigen::VectorXd l2 = random_lambda2(p.n_elements(), 4);
  const Eigen::VectorXd model = p.model_stress(s.u, s.E);
  const ConstrainedStressSampler sampler(p, l2);
  const StressOracle o = stress_oracle(p, model, l2);
  Rng rng(5);
  std::vector<Eigen::VectorXd> draws;
  for (int k = 0; k < 10000; ++k) {
    draws.push_back(sampler.sample(model, rng));
    ASSERT_LT(p.constraint_residual(draws.back()), 1e-10);
  }
  EXPECT_LT(fixtures::gaussian_z_score(moments(draws), o.mean, o.cov, 10000), 4.0);
}

TEST(StressConditional, RejectsBadDiscrepancy) {
  const InverseProblem p = homogeneous_problem(2);
  EXPECT_THROW(ConstrainedStressSampler(p, Eigen::VectorXd::Ones(3)), InvalidArgument);
  EXPECT_THROW(BlockStressSampler(p, Eigen::VectorXd::Ones(3)), InvalidArgument);
  GibbsSampler g(p, GibbsMode::Full);
  EXPECT_THROW(g.set_discrepancy(Eigen::VectorXd::Zero(p.n_elements())), InvalidArgument);
  Rng rng(0);
  EXPECT_THROW(g.sweep(perturbed_state(p, 0), rng), InvalidArgument);
}

TEST(StressPatches, SpanTheWholeNullSpace) {
  for (ElementKind kind : {ElementKind::ConstantStrainQuad, ElementKind::TrianglePair}) {
    const std::vector<std::pair<int, bool>> cases{{2, true}, {3, true}, {5, true}, {6, true}, {5, false}, {8, false}};
    for (auto [n, top] : cases) {
      const Mesh m = build_structured_mesh(
          n, n, kind, wall_normal_dirichlet(1.0, top ? std::optional<double>(1.0) : std::nullopt));
      const auto patches = build_stress_patches(m, 1);
      EXPECT_EQ(patch_span_rank(m, patches), stress_null_dimension(m)) << n;
      const Eigen::MatrixXd Bt = Eigen::MatrixXd(m.Bhat).transpose();
      for (const auto& patch : patches) {
        if (patch.basis.cols() == 0) continue;
        Eigen::MatrixXd full = Eigen::MatrixXd::Zero(m.n_stress(), patch.basis.cols());
        for (std::size_t k = 0; k < patch.stress_index.size(); ++k)
          full.row(patch.stress_index[k]) = patch.basis.row(static_cast<Eigen::Index>(k));
        EXPECT_LT((Bt * full).cwiseAbs().maxCoeff(), 1e-10);
      }
    }
  }
  EXPECT_THROW(build_stress_patches(build_structured_mesh(2, 2, ElementKind::TrianglePair), -1),
               InvalidArgument);
}

TEST(StressPatches, BlockUpdatesStayOnTheConstraint) {
  const InverseProblem p = homogeneous_problem(4);
  const LatentState s = perturbed_state(p, 7);
  const Eigen::VectorXd l2 = random_lambda2(p.n_elements(), 9);
  const Eigen::VectorXd model = p.model_stress(s.u, s.E);
  const ConstrainedStressSampler full(p, l2);
  const BlockStressSampler block(p, l2);
  Rng rng(2);
  Eigen::VectorXd sigma = full.sample(model, rng);
  for (int k = 0; k < 50; ++k) {
    block.sweep(sigma, model, rng);
    ASSERT_LT(p.constraint_residual(sigma), 1e-10);
  }
}

TEST(StressPatches, BlockChainTargetsTheConstrainedGaussian) {
  const InverseProblem p = homogeneous_problem(2);
  const LatentState s = perturbed_state(p, 8);
  const Eigen::VectorXd l2 = random_lambda2(p.n_elements(), 10);
  const Eigen::VectorXd model = p.model_stress(s.u, s.E);
  const BlockStressSampler block(p, l2);
  const StressOracle o = stress_oracle(p, model, l2);
  Rng rng(4);
  Eigen::VectorXd sigma = o.mean;
  std::vector<Eigen::VectorXd> draws;
  for (int k = 0; k < 20000; ++k) {
    block.sweep(sigma, model, rng);
    draws.push_back(sigma);
  }
  const auto m = moments(draws);
  const double scale = std::sqrt(o.cov.diagonal().maxCoeff());
  EXPECT_LT((m.mean - o.mean).cwiseAbs().maxCoeff(), 0.05 * scale);
  EXPECT_LT((m.cov - o.cov).cwiseAbs().maxCoeff(), 0.1 * scale * scale);
}

TEST(ModulusConditional, MatchesQuadraticCompletion) {
  const Eigen::Matrix3d dhat = isotropic_dhat(Regime::PlaneStress, 0.5);
  const Eigen::Vector3d eps(0.01, -0.02, 0.005), sigma(0.03, -0.01, 0.02);
  const double l2 = 0.004;
  const ScalarGaussian g = modulus_conditional(sigma, eps, dhat, l2);
  // log density at three points fixes the quadratic
  auto logp = [&](double E) { return -(sigma - E * dhat * eps).squaredNorm() / (2.0 * l2); };
  const double a = logp(-1.0), b = logp(0.0), c = logp(1.0);
  const double curv = (a - 2.0 * b + c);
  const double slope = (c - a) / 2.0;
  EXPECT_NEAR(g.variance, -1.0 / curv, 1e-10 * std::abs(1.0 / curv));
  EXPECT_NEAR(g.mean, -slope / curv, 1e-10);
}

TEST(ModulusConditional, DrawMomentsAndZeroStrain) {
  const Eigen::Matrix3d dhat = isotropic_dhat(Regime::PlaneStress, 0.3);
  const Eigen::Vector3d eps(0.02, 0.01, -0.01), sigma(0.01, 0.02, 0.0);
  const ScalarGaussian g = modulus_conditional(sigma, eps, dhat, 1e-4);
  Rng rng(6);
  const int n = 20000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += sample_modulus(sigma, eps, dhat, 1e-4, rng);
  EXPECT_LT(std::abs(sum / n - g.mean) / std::sqrt(g.variance / n), 3.5);
  EXPECT_THROW(modulus_conditional(sigma, Eigen::Vector3d::Zero(), dhat, 1e-4), SingularConditional);
}

TEST(GibbsSampler, SweepKeepsStressFeasibleInBothModes) {
  const InverseProblem p = homogeneous_problem(3, ElementKind::TrianglePair);
  for (GibbsMode mode : {GibbsMode::Full, GibbsMode::Block}) {
    GibbsSampler g(p, mode);
    g.set_discrepancy(Eigen::VectorXd::Constant(p.n_elements(), 1e-3));
    Rng rng(1);
    LatentState s = perturbed_state(p, 1);
    s.sigma = ConstrainedStressSampler(p, g.discrepancy()).mean(p.model_stress(s.u, s.E));
    for (int k = 0; k < 20; ++k) {
      s = g.sweep(std::move(s), rng);
      ASSERT_LT(p.constraint_residual(s.sigma), 1e-10);
      ASSERT_TRUE(s.E.allFinite());
      ASSERT_GT(s.nu2, 0.0);
    }
    EXPECT_EQ(g.mode(), mode);
  }
}
