#include "elastobayes/saem.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace elastobayes {

DiscrepancyParams DiscrepancyParams::from_lambda2(const Eigen::VectorXd& lambda2) {
  if (!(lambda2.size() > 0 && lambda2.minCoeff() > 0.0))
    throw InvalidArgument("discrepancy variances must be positive");
  return {lambda2.array().log().matrix()};
}

void validate_saem_exponent(double p) {
  if (!(p > 0.5 && p <= 1.0))
    throw InvalidArgument("SAEM exponent must satisfy 1/2 < p <= 1, got " + std::to_string(p));
}

double saem_weight(int j, double p) {
  validate_saem_exponent(p);
  if (j < 1) throw InvalidArgument("SAEM iteration index starts at 1");
  return std::pow(static_cast<double>(j), -p);
}

Eigen::VectorXd saem_blend(const Eigen::VectorXd& prev, const Eigen::VectorXd& next, int j,
                           double p) {
  const double g = saem_weight(j, p);
  if (j == 1) return next;
  if (prev.size() != next.size()) throw InvalidArgument("SAEM blend: length mismatch");
  return (1.0 - g) * prev + g * next;
}

void SufficientStats::update(const Eigen::VectorXd& phi) {
  ++iteration;
  phi_tilde = saem_blend(phi_tilde, phi, iteration, p);
}

Eigen::VectorXd constitutive_residual(const InverseProblem& problem, const LatentState& state) {
  Eigen::VectorXd r(problem.n_elements());
  for (int e = 0; e < problem.n_elements(); ++e) {
    const Eigen::Vector3d model = state.E(e) * (problem.dhat() * problem.strain(e, state.u));
    r(e) = (state.sigma.segment<kStressComponents>(kStressComponents * e) - model).squaredNorm();
  }
  return r;
}

double q_objective(const Eigen::VectorXd& z, const Eigen::VectorXd& phi, const GmrfSpec& prior,
                   int n_sigma) {
  if (z.size() != phi.size()) throw InvalidArgument("Q objective: length mismatch");
  double q = 0.0;
  for (Eigen::Index e = 0; e < z.size(); ++e)
    q += -0.5 * n_sigma * z(e) - 0.5 * phi(e) * std::exp(-z(e));
  if (prior.active()) q -= 0.5 * gmrf_penalty(z, prior);
  return q;
}

double m_step_component(int e, const Eigen::VectorXd& z, const Eigen::VectorXd& phi,
                        const GmrfSpec& prior, int n_sigma, ZBounds bounds) {
  if (phi(e) < 0.0) throw InvalidArgument("sufficient statistic must be non-negative");
  double wee = 0.0, coupling = 0.0;
  if (prior.active()) {
    wee = prior.W(e, e);
    coupling = prior.W.row(e).dot(z) - wee * z(e);
  }
  const double half_n = 0.5 * n_sigma;
  const double ph = phi(e);
  auto grad = [&](double x) { return -half_n + 0.5 * ph * std::exp(-x) - wee * x - coupling; };
  auto curv = [&](double x) { return -0.5 * ph * std::exp(-x) - wee; };

  double a = bounds.lo, b = bounds.hi;
  if (grad(a) <= 0.0) return a;
  if (grad(b) >= 0.0) return b;

  double x = ph > 0.0 ? std::clamp(std::log(ph / n_sigma), a, b) : 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    const double g = grad(x);
    if (std::abs(g) <= 1e-10) break;
    if (g > 0.0) a = x; else b = x;
    if (b - a <= 1e-15 * (1.0 + std::abs(x))) break;
    double next = x - g / curv(x);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    x = next;
  }
  return x;
}

void m_step_scan(Eigen::VectorXd& z, const Eigen::VectorXd& phi, const GmrfSpec& prior,
                 int n_sigma, ZBounds bounds) {
  for (Eigen::Index e = 0; e < z.size(); ++e)
    z(e) = m_step_component(static_cast<int>(e), z, phi, prior, n_sigma, bounds);
}

void SampleStore::append(const LatentState& s) {
  E.push_back(s.E);
  sigma.push_back(s.sigma);
  u.push_back(s.u);
  nu2.push_back(s.nu2);
}

Eigen::VectorXd prior_regularized_fit(const InverseProblem& problem) {
  const auto& prior = problem.displacement_prior();
  const auto& obs = problem.observations();
  Eigen::MatrixXd P = prior.Vff;
  Eigen::VectorXd rhs = prior.shift;
  for (int k = 0; k < obs.size(); ++k) {
    P(obs.dof[k], obs.dof[k]) += 1.0;
    rhs(obs.dof[k]) += obs.values(k);
  }
  if (P.rows() == 0) return {};
  Eigen::LDLT<Eigen::MatrixXd> ldlt(P);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0))
    throw FactorizationError("observations plus displacement prior do not determine u");
  return ldlt.solve(rhs);
}

double background_stress_scale(const InverseProblem& problem, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& E) {
  double acc = 0.0;
  for (int e = 0; e < problem.n_elements(); ++e)
    acc += (E(e) * (problem.dhat() * problem.strain(e, u))).squaredNorm();
  return std::sqrt(acc / (kStressComponents * problem.n_elements()));
}

LatentState initial_state(const InverseProblem& problem, const Eigen::VectorXd& lambda2, Rng& rng) {
  LatentState s;
  s.E = Eigen::VectorXd::Ones(problem.n_elements());
  s.u = prior_regularized_fit(problem);
  if (s.u.size() == 0) s.u = Eigen::VectorXd::Zero(problem.n_free());
  const Eigen::VectorXd lam =
      lambda2.size() == 0 ? Eigen::VectorXd::Ones(problem.n_elements()) : lambda2;
  s.sigma = ConstrainedStressSampler(problem, lam).mean(problem.model_stress(s.u, s.E));
  if (problem.observations().size() > 0) {
    s.nu2 = sample_noise_variance(s.u, problem.observations(), problem.noise_prior(), rng,
                                  kNoiseResidualFloor);
  }
  return s;
}

DiscrepancyParams initial_discrepancy(const InverseProblem& problem, const LatentState& state) {
  double scale = background_stress_scale(problem, state.u, state.E);
  if (!(scale > 0.0)) scale = 1.0;
  return {Eigen::VectorXd::Constant(problem.n_elements(), std::log(1e-2 * scale * scale))};
}

namespace {

std::string dump_trace(const EmTrace& t) {
  std::ostringstream os;
  os << "EM trace (" << t.iterations() << " iterations):";
  const int from = std::max(0, t.iterations() - 10);
  for (int j = from; j < t.iterations(); ++j) os << " [" << j + 1 << "] Q=" << t.q[j];
  return os.str();
}

}  // namespace

EmResult run_em(const InverseProblem& problem, const GmrfSpec& lambda_prior,
                const EmConfig& config, LatentState state, DiscrepancyParams params, Rng& rng) {
  validate_saem_exponent(config.p);
  if (config.sweeps_per_iteration < 1) throw InvalidArgument("need at least one sweep per iteration");
  if (config.max_iterations < 1) throw InvalidArgument("need at least one EM iteration");
  if (params.z.size() != problem.n_elements())
    throw InvalidArgument("discrepancy field does not match the mesh");
  if (lambda_prior.active() && lambda_prior.size() != problem.n_elements())
    throw InvalidArgument("discrepancy prior does not match the mesh");

  params.z = params.z.cwiseMax(config.z_bounds.lo).cwiseMin(config.z_bounds.hi);
  GibbsSampler sampler(problem, config.mode);
  sampler.set_discrepancy(params.lambda2());

  EmResult out;
  SufficientStats stats;
  stats.p = config.p;
  for (int j = 1; j <= config.max_iterations; ++j) {
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(problem.n_elements());
    for (int i = 0; i < config.sweeps_per_iteration; ++i) {
      state = sampler.sweep(std::move(state), rng);
      phi += constitutive_residual(problem, state);
      if (config.on_sweep) config.on_sweep(state);
    }
    phi /= config.sweeps_per_iteration;
    stats.update(phi);

    if (config.update_discrepancy)
      m_step_scan(params.z, stats.phi_tilde, lambda_prior, kStressComponents, config.z_bounds);
    const double q = q_objective(params.z, stats.phi_tilde, lambda_prior);
    out.trace.q.push_back(q);
    out.trace.lambda2.push_back(params.lambda2());
    if (!std::isfinite(q)) throw EmDivergence("non-finite EM objective", out.trace);

    double rel = std::numeric_limits<double>::quiet_NaN();
    if (j >= 2) {
      const double prev = out.trace.q[j - 2];
      rel = std::abs(q - prev) / std::abs(prev);
    }
    out.trace.rel_increase.push_back(rel);
    if (config.update_discrepancy) sampler.set_discrepancy(params.lambda2());
    if (j >= 2 && rel <= config.epsilon) {
      out.converged = true;
      break;
    }
  }
  if (!std::isfinite(out.trace.q.back()))
    throw EmDivergence(dump_trace(out.trace), out.trace);

  for (int i = 0; i < config.final_samples; ++i) {
    state = sampler.sweep(std::move(state), rng);
    out.samples.append(state);
    if (config.on_sweep) config.on_sweep(state);
  }
  out.discrepancy = std::move(params);
  out.state = std::move(state);
  return out;
}

Eigen::VectorXd transfer_element_field(const Mesh& from, const Eigen::VectorXd& field,
                                       const Mesh& to) {
  if (field.size() != from.n_elements()) throw InvalidArgument("element field size mismatch");
  Eigen::VectorXd out(to.n_elements());
  for (int e = 0; e < to.n_elements(); ++e) out(e) = field(from.locate(to.centroid[e]));
  return out;
}

Eigen::VectorXd transfer_displacement(const Mesh& from, const Eigen::VectorXd& u_free,
                                      const Mesh& to) {
  const Eigen::VectorXd full = from.full_displacement(u_free);
  Eigen::VectorXd out(to.n_free());
  for (int k = 0; k < to.n_free(); ++k) {
    const int g = to.dofs.free_to_global[k];
    out(k) = from.interpolate(full, to.nodes[g / 2])(g % 2);
  }
  return out;
}

std::vector<EmResult> refine_cascade(std::span<const CascadeLevel> levels, const EmConfig& config,
                                     Rng& rng) {
  std::vector<EmResult> results;
  refine_cascade(levels, config, rng, results);
  return results;
}

void refine_cascade(std::span<const CascadeLevel> levels, const EmConfig& config, Rng& rng,
                    std::vector<EmResult>& results) {
  results.clear();
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const InverseProblem& p = *levels[k].problem;
    LatentState s;
    DiscrepancyParams params;
    if (k == 0) {
      s = initial_state(p, {}, rng);
      params = initial_discrepancy(p, s);
    } else {
      const Mesh& prev = levels[k - 1].problem->mesh();
      const EmResult& r = results.back();
      params.z = transfer_element_field(prev, r.discrepancy.z, p.mesh());
      s.E = transfer_element_field(prev, r.state.E, p.mesh());
      s.u = transfer_displacement(prev, r.state.u, p.mesh());
      s.nu2 = r.state.nu2;
      s.sigma = ConstrainedStressSampler(p, params.lambda2()).mean(p.model_stress(s.u, s.E));
    }
    results.push_back(run_em(p, *levels[k].lambda_prior, config, std::move(s), std::move(params), rng));
  }
}

}  // namespace elastobayes
