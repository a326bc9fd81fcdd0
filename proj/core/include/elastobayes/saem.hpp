#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "elastobayes/errors.hpp"
#include "elastobayes/priors.hpp"
#include "elastobayes/problem.hpp"
#include "elastobayes/samplers.hpp"

namespace elastobayes {

// Clamp window for z_e = log lambda_e^2.
struct ZBounds {
  double lo = std::log(1e-12);
  double hi = std::log(1e12);
};

struct DiscrepancyParams {
  Eigen::VectorXd z;

  Eigen::VectorXd lambda2() const { return z.array().exp().matrix(); }
  static DiscrepancyParams from_lambda2(const Eigen::VectorXd& lambda2);
};

// Throws InvalidArgument unless 1/2 < p <= 1.
void validate_saem_exponent(double p);

// gamma_j = j^-p.
double saem_weight(int j, double p);

// (1 - gamma_j) prev + gamma_j next; j = 1 ignores prev.
Eigen::VectorXd saem_blend(const Eigen::VectorXd& prev, const Eigen::VectorXd& next, int j,
                           double p);

struct SufficientStats {
  Eigen::VectorXd phi_tilde;
  int iteration = 0;
  double p = 0.51;

  void update(const Eigen::VectorXd& phi);
};

// Per element ||sigma_e - E_e Dhat B_e u_e||^2.
Eigen::VectorXd constitutive_residual(const InverseProblem& problem, const LatentState& state);

// Surrogate objective with the Gaussian 1/2 convention:
//   sum_e [-(n_sigma/2) z_e - phi_e exp(-z_e) / 2] - Z^T W Z / 2
double q_objective(const Eigen::VectorXd& z, const Eigen::VectorXd& phi, const GmrfSpec& prior,
                   int n_sigma = kStressComponents);

// Maximizes q_objective over z_e with the other components fixed. The
// one-dimensional objective is strictly concave; the maximizer is clamped to
// `bounds`.
double m_step_component(int e, const Eigen::VectorXd& z, const Eigen::VectorXd& phi,
                        const GmrfSpec& prior, int n_sigma = kStressComponents,
                        ZBounds bounds = {});

// Incremental M-step: one ordered scan over all components, in place.
void m_step_scan(Eigen::VectorXd& z, const Eigen::VectorXd& phi, const GmrfSpec& prior,
                 int n_sigma = kStressComponents, ZBounds bounds = {});

struct EmConfig {
  int sweeps_per_iteration = 10;
  double p = 0.51;
  double epsilon = 1e-3;
  int max_iterations = 500;
  int final_samples = 500;
  GibbsMode mode = GibbsMode::Full;
  bool update_discrepancy = true;
  ZBounds z_bounds;
  // Invoked after every Gibbs sweep (E-step and final batch).
  std::function<void(const LatentState&)> on_sweep;
};

struct EmTrace {
  std::vector<double> q;
  std::vector<double> rel_increase;  // NaN for the first iteration
  std::vector<Eigen::VectorXd> lambda2;

  int iterations() const { return static_cast<int>(q.size()); }
};

struct SampleStore {
  std::vector<Eigen::VectorXd> E;
  std::vector<Eigen::VectorXd> sigma;
  std::vector<Eigen::VectorXd> u;
  std::vector<double> nu2;

  int size() const { return static_cast<int>(E.size()); }
  void append(const LatentState& s);
};

struct EmResult {
  DiscrepancyParams discrepancy;
  EmTrace trace;
  SampleStore samples;
  LatentState state;
  bool converged = false;
};

class EmDivergence : public NumericalError {
 public:
  EmDivergence(const std::string& what, EmTrace trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const EmTrace& trace() const { return trace_; }

 private:
  EmTrace trace_;
};

// Least-squares fit of the observations regularized by the displacement prior.
Eigen::VectorXd prior_regularized_fit(const InverseProblem& problem);

// sqrt(mean_e ||E_e Dhat eps_e||^2 / n_sigma)
double background_stress_scale(const InverseProblem& problem, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& E);

// E = 1, u from prior_regularized_fit, sigma at its constrained mean, nu^2
// drawn from its conditional.
LatentState initial_state(const InverseProblem& problem, const Eigen::VectorXd& lambda2, Rng& rng);

// Uniform lambda^2 = 1e-2 * background_stress_scale^2.
DiscrepancyParams initial_discrepancy(const InverseProblem& problem, const LatentState& state);

EmResult run_em(const InverseProblem& problem, const GmrfSpec& lambda_prior,
                const EmConfig& config, LatentState state, DiscrepancyParams params, Rng& rng);

struct CascadeLevel {
  const InverseProblem* problem;
  const GmrfSpec* lambda_prior;
};

// Element field transfer by centroid containment (nearest element outside).
Eigen::VectorXd transfer_element_field(const Mesh& from, const Eigen::VectorXd& field,
                                       const Mesh& to);

// Nodal interpolation of a free-DOF field; returns the free part on `to`.
Eigen::VectorXd transfer_displacement(const Mesh& from, const Eigen::VectorXd& u_free,
                                      const Mesh& to);

// Runs EM level by level, warm-starting Lambda, u and E from the previous
// level and re-initializing sigma at its constrained mean.
std::vector<EmResult> refine_cascade(std::span<const CascadeLevel> levels, const EmConfig& config,
                                     Rng& rng);
// Same, appending each finished level to `results` so that completed levels
// survive an EmDivergence thrown by a later one.
void refine_cascade(std::span<const CascadeLevel> levels, const EmConfig& config, Rng& rng,
                    std::vector<EmResult>& results);

}  // namespace elastobayes
