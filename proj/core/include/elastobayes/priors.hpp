#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>

#include "elastobayes/mesh.hpp"

namespace elastobayes {

// Intrinsic autoregressive precision built from pairwise proximities
// h_ij = exp(-d_ij / d0). H has -h_ij off the diagonal and zero row sums;
// W = H / scale. An infinite scale yields W = 0 (no prior).
struct GmrfSpec {
  Eigen::MatrixXd H;
  Eigen::MatrixXd W;
  double d0 = 0.1;
  double scale = 1.0;

  int size() const { return static_cast<int>(W.rows()); }
  bool active() const { return std::isfinite(scale); }
};

inline constexpr double kDefaultCorrelationLength = 0.1;
inline constexpr double kDefaultSigmaZ2 = 100.0;
inline constexpr double kDefaultSigmaU2 = 1.0;

// Proximities below `truncate_below` are dropped; the diagonal is rebuilt from
// the kept entries so rows still sum to zero.
GmrfSpec build_gmrf(std::span<const Eigen::Vector2d> sites, double d0, double scale,
                    double truncate_below = 0.0);

// Z^T W Z.
double gmrf_penalty(const Eigen::VectorXd& Z, const GmrfSpec& spec);

// Conjugate inverse-Gamma hyperprior on the noise variance.
struct NoiseHyperprior {
  double alpha = 2.0;
  double beta = 0.0;

  void validate() const;
};

// Displacement prior exp(-u^T V u / 2) over all DOFs, V = J / sigma_u^2 with
// node-distance proximities coupling like components only. Conditioned on
// the prescribed DOFs it contributes 0.5 u_f^T Vff u_f - shift^T u_f.
struct DisplacementPrior {
  Eigen::MatrixXd Vff;
  Eigen::VectorXd shift;
  double sigma_u2 = kDefaultSigmaU2;
  double d0 = kDefaultCorrelationLength;

  bool active() const { return Vff.size() > 0; }
};

DisplacementPrior build_displacement_prior(const Mesh& mesh, double d0, double sigma_u2);

// Zero-contribution prior of the right size (sigma_u^2 -> infinity).
DisplacementPrior flat_displacement_prior(const Mesh& mesh);

}  // namespace elastobayes
