#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "elastobayes/noise.hpp"
#include "elastobayes/problem.hpp"

namespace elastobayes {

enum class GibbsMode { Full, Block };

struct ScalarGaussian {
  double mean = 0.0;
  double variance = 0.0;
};

// Gamma parameters of nu^{-2} | u (shape, rate).
struct GammaParams {
  double shape = 0.0;
  double rate = 0.0;
};

GammaParams noise_precision_conditional(const Eigen::VectorXd& u_free, const ObservationSet& obs,
                                        const NoiseHyperprior& prior);

// Draws nu^{-2} ~ Gamma(alpha + n_Q/2, beta + ||u_Q - Q u||^2 / 2) and returns
// nu^2. `residual_floor` clamps ||u_Q - Q u||^2 from below; with the default 0 a
// zero rate throws DegeneratePosterior.
double sample_noise_variance(const Eigen::VectorXd& u_free, const ObservationSet& obs,
                             const NoiseHyperprior& prior, Rng& rng, double residual_floor = 0.0);

struct GaussianCanonical {
  Eigen::MatrixXd precision;
  Eigen::VectorXd linear;  // precision * mean
};

// u | nu^2, sigma, E, Lambda in canonical form:
//   precision = C^T Lambda^-1 C + Q^T Q / nu^2 + V
//   linear    = C^T Lambda^-1 (sigma - C_p u_p) + Q^T u_Q / nu^2 + prior shift
GaussianCanonical displacement_conditional(const InverseProblem& problem, const LatentState& state,
                                           const Eigen::VectorXd& lambda2);

// One joint draw of all free displacements (one dense Cholesky per call).
Eigen::VectorXd sample_displacement_full(const InverseProblem& problem, const LatentState& state,
                                         const Eigen::VectorXd& lambda2, Rng& rng);

// Conditional of the single free DOF i given every other component.
ScalarGaussian displacement_block_conditional(const InverseProblem& problem,
                                              const LatentState& state,
                                              const Eigen::VectorXd& lambda2, int i);

// Draws u_i from its conditional and returns the new value.
double sample_displacement_block(const InverseProblem& problem, const LatentState& state,
                                 const Eigen::VectorXd& lambda2, int i, Rng& rng);

// Sequential scan over all free DOFs, updating state.u in place.
void sweep_displacement_blocks(const InverseProblem& problem, LatentState& state,
                               const Eigen::VectorXd& lambda2, Rng& rng);

// Stacked per-component discrepancy variances: lambda_e^2 repeated n_sigma times.
Eigen::VectorXd stress_variances(const Eigen::VectorXd& lambda2);

// sigma ~ N(C u, Lambda) conditioned on Bhat^T sigma = f. The factorization of
// M = Bhat^T Lambda Bhat depends on Lambda only and is reused across draws.
class ConstrainedStressSampler {
 public:
  ConstrainedStressSampler(const InverseProblem& problem, const Eigen::VectorXd& lambda2);

  Eigen::VectorXd mean(const Eigen::VectorXd& model_stress) const;
  // Lambda - Lambda Bhat M^-1 Bhat^T Lambda
  Eigen::MatrixXd covariance() const;
  Eigen::VectorXd sample(const Eigen::VectorXd& model_stress, Rng& rng) const;

 private:
  // Lambda Bhat M^-1 r
  Eigen::VectorXd correction(const Eigen::VectorXd& r) const;

  const InverseProblem* problem_;
  Eigen::VectorXd var_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

// Gibbs moves along self-equilibrated stress directions supported on each
// stress patch, so the constraint is never left.
class BlockStressSampler {
 public:
  BlockStressSampler(const InverseProblem& problem, const Eigen::VectorXd& lambda2);

  void update_block(int patch, Eigen::VectorXd& sigma, const Eigen::VectorXd& model_stress,
                    Rng& rng) const;
  void sweep(Eigen::VectorXd& sigma, const Eigen::VectorXd& model_stress, Rng& rng) const;

 private:
  struct Local {
    Eigen::LLT<Eigen::MatrixXd> llt;  // N^T Lambda^-1 N
    Eigen::MatrixXd weighted;         // N^T Lambda^-1
  };
  const InverseProblem* problem_;
  std::vector<Local> local_;
};

// E_e | sigma_e, eps_e ~ N(eps^T Dhat^T sigma / |Dhat eps|^2, lambda^2 / |Dhat eps|^2).
// Throws SingularConditional when Dhat eps vanishes.
ScalarGaussian modulus_conditional(const Eigen::Vector3d& sigma_e, const Eigen::Vector3d& eps_e,
                                   const Eigen::Matrix3d& dhat, double lambda2);

double sample_modulus(const Eigen::Vector3d& sigma_e, const Eigen::Vector3d& eps_e,
                      const Eigen::Matrix3d& dhat, double lambda2, Rng& rng);

inline constexpr double kNoiseResidualFloor = 1e-30;

// Sweeps theta in the fixed order nu^2 -> u -> sigma -> E for a given Lambda.
class GibbsSampler {
 public:
  GibbsSampler(const InverseProblem& problem, GibbsMode mode);

  // Refactors the stress operators; call whenever Lambda changes.
  void set_discrepancy(const Eigen::VectorXd& lambda2);
  const Eigen::VectorXd& discrepancy() const { return lambda2_; }

  LatentState sweep(LatentState state, Rng& rng);
  GibbsMode mode() const { return mode_; }
  // Modulus updates skipped because the element strain vanished.
  long skipped_modulus_updates() const { return skipped_; }

 private:
  const InverseProblem* problem_;
  GibbsMode mode_;
  Eigen::VectorXd lambda2_;
  std::optional<ConstrainedStressSampler> full_;
  std::optional<BlockStressSampler> block_;
  long skipped_ = 0;
};

}  // namespace elastobayes
