#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "elastobayes/priors.hpp"
#include "elastobayes/problem.hpp"
#include "elastobayes/samplers.hpp"

namespace fixtures {

using namespace elastobayes;

// Noiseless homogeneous-modulus data on an n x n mesh, every free DOF observed.
inline InverseProblem homogeneous_problem(int n, ElementKind kind = ElementKind::ConstantStrainQuad,
                                          bool with_u_prior = true) {
  Mesh m = build_structured_mesh(n, n, kind);
  Eigen::VectorXd u_full(m.n_dofs());
  for (int i = 0; i < m.n_nodes(); ++i) u_full.segment<2>(2 * i) = m.nodes[i];
  ObservationSet obs = ObservationSet::observe_all_free(m, u_full);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(m.n_free());
  DisplacementPrior up = with_u_prior ? build_displacement_prior(m, 0.1, 1.0)
                                      : flat_displacement_prior(m);
  return InverseProblem(std::move(m), ConstitutiveBase{}, std::move(obs), std::move(f),
                        NoiseHyperprior{}, std::move(up));
}

// A plausible, non-degenerate state for conditional checks.
inline LatentState perturbed_state(const InverseProblem& p, unsigned seed) {
  Rng rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  LatentState s;
  s.nu2 = 0.01;
  s.u = p.observations().values;
  for (Eigen::Index i = 0; i < s.u.size(); ++i) s.u(i) += 0.05 * n01(rng);
  s.E = Eigen::VectorXd::Ones(p.n_elements());
  for (Eigen::Index e = 0; e < s.E.size(); ++e) s.E(e) += 0.2 * std::abs(n01(rng));
  s.sigma = p.model_stress(s.u, s.E);
  for (Eigen::Index k = 0; k < s.sigma.size(); ++k) s.sigma(k) += 0.1 * n01(rng);
  return s;
}

struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

inline Moments moments(const std::vector<Eigen::VectorXd>& draws) {
  const auto n = static_cast<double>(draws.size());
  Moments m;
  m.mean = Eigen::VectorXd::Zero(draws.front().size());
  for (const auto& d : draws) m.mean += d;
  m.mean /= n;
  m.cov = Eigen::MatrixXd::Zero(m.mean.size(), m.mean.size());
  for (const auto& d : draws) m.cov += (d - m.mean) * (d - m.mean).transpose();
  m.cov /= n - 1.0;
  return m;
}

// Largest |empirical - exact| / standard error over means and variances of
// independent draws from a Gaussian with covariance `exact_cov`.
inline double gaussian_z_score(const Moments& m, const Eigen::VectorXd& exact_mean,
                               const Eigen::MatrixXd& exact_cov, double n) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < exact_mean.size(); ++i) {
    const double var = exact_cov(i, i);
    if (var <= 1e-14 * (1.0 + exact_cov.diagonal().maxCoeff())) continue;
    worst = std::max(worst, std::abs(m.mean(i) - exact_mean(i)) / std::sqrt(var / n));
    worst = std::max(worst, std::abs(m.cov(i, i) - var) / (var * std::sqrt(2.0 / (n - 1.0))));
  }
  return worst;
}

}  // namespace fixtures
