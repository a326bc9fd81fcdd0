#include "elastobayes/samplers.hpp"

#include <cmath>
#include <string>

#include "elastobayes/errors.hpp"

namespace elastobayes {

namespace {

Eigen::VectorXd standard_normal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
  return z;
}

}  // namespace

GammaParams noise_precision_conditional(const Eigen::VectorXd& u_free, const ObservationSet& obs,
                                        const NoiseHyperprior& prior) {
  if (obs.size() < 1) throw InvalidArgument("noise conditional needs at least one observation");
  const double r2 = obs.residual(u_free).squaredNorm();
  return {prior.alpha + 0.5 * obs.size(), prior.beta + 0.5 * r2};
}

double sample_noise_variance(const Eigen::VectorXd& u_free, const ObservationSet& obs,
                             const NoiseHyperprior& prior, Rng& rng, double residual_floor) {
  GammaParams g = noise_precision_conditional(u_free, obs, prior);
  const double floor_rate = prior.beta + 0.5 * residual_floor;
  if (g.rate < floor_rate) g.rate = floor_rate;
  if (!(g.rate > 0.0))
    throw DegeneratePosterior("noise precision rate is zero (exact fit with beta = 0)");
  std::gamma_distribution<double> gamma(g.shape, 1.0 / g.rate);
  return 1.0 / gamma(rng);
}

GaussianCanonical displacement_conditional(const InverseProblem& problem, const LatentState& state,
                                           const Eigen::VectorXd& lambda2) {
  const auto& prior = problem.displacement_prior();
  GaussianCanonical out;
  out.precision = prior.Vff;
  out.linear = prior.shift;

  for (int e = 0; e < problem.n_elements(); ++e) {
    const auto& op = problem.element(e);
    const double E = state.E(e);
    const double inv_lam = 1.0 / lambda2(e);
    const Eigen::Vector3d target =
        state.sigma.segment<kStressComponents>(kStressComponents * e) - E * op.prescribed_stress;
    const int nl = static_cast<int>(op.free_slot.size());
    for (int a = 0; a < nl; ++a) {
      const int sa = op.free_slot[a];
      if (sa < 0) continue;
      const auto ga = op.G.col(a);
      out.linear(sa) += E * inv_lam * ga.dot(target);
      for (int b = 0; b < nl; ++b) {
        const int sb = op.free_slot[b];
        if (sb < 0) continue;
        out.precision(sa, sb) += E * E * inv_lam * ga.dot(op.G.col(b));
      }
    }
  }

  const auto& obs = problem.observations();
  const double inv_nu = 1.0 / state.nu2;
  for (int k = 0; k < obs.size(); ++k) {
    out.precision(obs.dof[k], obs.dof[k]) += inv_nu;
    out.linear(obs.dof[k]) += inv_nu * obs.values(k);
  }
  return out;
}

Eigen::VectorXd sample_displacement_full(const InverseProblem& problem, const LatentState& state,
                                         const Eigen::VectorXd& lambda2, Rng& rng) {
  const GaussianCanonical g = displacement_conditional(problem, state, lambda2);
  Eigen::LLT<Eigen::MatrixXd> llt(g.precision);
  if (llt.info() != Eigen::Success) {
    throw FactorizationError(
        "displacement precision is not positive definite; check that every free DOF is "
        "observed or regularized");
  }
  Eigen::VectorXd u = llt.solve(g.linear);
  u += llt.matrixU().solve(standard_normal(u.size(), rng));
  return u;
}

ScalarGaussian displacement_block_conditional(const InverseProblem& problem,
                                              const LatentState& state,
                                              const Eigen::VectorXd& lambda2, int i) {
  const auto& prior = problem.displacement_prior();
  const double ui = state.u(i);
  const double vii = prior.Vff(i, i);
  double prec = vii;
  double lin = prior.shift(i) - (prior.Vff.row(i).dot(state.u) - vii * ui);

  for (const auto& inc : problem.incidence(i)) {
    const int e = inc.element;
    const auto& op = problem.element(e);
    const double E = state.E(e);
    const double inv_lam = 1.0 / lambda2(e);
    const auto g = op.G.col(inc.local);
    const Eigen::Vector3d r = state.sigma.segment<kStressComponents>(kStressComponents * e) -
                              E * (problem.dhat() * problem.strain(e, state.u)) + E * ui * g;
    prec += E * E * inv_lam * g.squaredNorm();
    lin += E * inv_lam * g.dot(r);
  }
  const auto& obs = problem.observations();
  for (int k : problem.observations_of(i)) {
    prec += 1.0 / state.nu2;
    lin += obs.values(k) / state.nu2;
  }
  if (!(prec > 0.0))
    throw DegenerateConditional("free DOF " + std::to_string(i) +
                                " is neither observed, constrained nor regularized");
  return {lin / prec, 1.0 / prec};
}

double sample_displacement_block(const InverseProblem& problem, const LatentState& state,
                                 const Eigen::VectorXd& lambda2, int i, Rng& rng) {
  const ScalarGaussian c = displacement_block_conditional(problem, state, lambda2, i);
  std::normal_distribution<double> normal(0.0, 1.0);
  return c.mean + std::sqrt(c.variance) * normal(rng);
}

void sweep_displacement_blocks(const InverseProblem& problem, LatentState& state,
                               const Eigen::VectorXd& lambda2, Rng& rng) {
  for (int i = 0; i < problem.n_free(); ++i)
    state.u(i) = sample_displacement_block(problem, state, lambda2, i, rng);
}

Eigen::VectorXd stress_variances(const Eigen::VectorXd& lambda2) {
  Eigen::VectorXd v(kStressComponents * lambda2.size());
  for (Eigen::Index e = 0; e < lambda2.size(); ++e)
    v.segment<kStressComponents>(kStressComponents * e).setConstant(lambda2(e));
  return v;
}

ConstrainedStressSampler::ConstrainedStressSampler(const InverseProblem& problem,
                                                   const Eigen::VectorXd& lambda2)
    : problem_(&problem), var_(stress_variances(lambda2)) {
  if (lambda2.size() != problem.n_elements())
    throw InvalidArgument("need one discrepancy variance per element");
  if (problem.n_free() == 0) return;
  const auto& Bhat = problem.mesh().Bhat;
  const Eigen::SparseMatrix<double> Bt = Bhat.transpose();
  const Eigen::SparseMatrix<double> M = Bt * var_.asDiagonal() * Bhat;
  llt_.compute(Eigen::MatrixXd(M));
  bool ok = llt_.info() == Eigen::Success;
  if (ok) {
    const Eigen::VectorXd d = llt_.matrixLLT().diagonal();
    const double mmax = Eigen::MatrixXd(M).diagonal().maxCoeff();
    ok = d.minCoeff() * d.minCoeff() > 1e-14 * mmax;
  }
  if (!ok) throw ConstraintDegeneracy("Bhat^T Lambda Bhat is singular");
}

Eigen::VectorXd ConstrainedStressSampler::correction(const Eigen::VectorXd& r) const {
  if (problem_->n_free() == 0) return Eigen::VectorXd::Zero(var_.size());
  return var_.cwiseProduct(problem_->mesh().Bhat * llt_.solve(r));
}

Eigen::VectorXd ConstrainedStressSampler::mean(const Eigen::VectorXd& model_stress) const {
  if (problem_->n_free() == 0) return model_stress;
  const auto& Bhat = problem_->mesh().Bhat;
  return model_stress + correction(problem_->force() - Bhat.transpose() * model_stress);
}

Eigen::MatrixXd ConstrainedStressSampler::covariance() const {
  Eigen::MatrixXd cov = var_.asDiagonal();
  if (problem_->n_free() == 0) return cov;
  const Eigen::MatrixXd LB = var_.asDiagonal() * Eigen::MatrixXd(problem_->mesh().Bhat);
  cov -= LB * llt_.solve(LB.transpose());
  return cov;
}

Eigen::VectorXd ConstrainedStressSampler::sample(const Eigen::VectorXd& model_stress,
                                                 Rng& rng) const {
  Eigen::VectorXd s =
      model_stress + var_.cwiseSqrt().cwiseProduct(standard_normal(var_.size(), rng));
  if (problem_->n_free() == 0) return s;
  const auto& Bhat = problem_->mesh().Bhat;
  const auto& f = problem_->force();
  s += correction(f - Bhat.transpose() * s);
  // one refinement pass keeps the equilibrium residual at round-off level
  s += correction(f - Bhat.transpose() * s);
  return s;
}

BlockStressSampler::BlockStressSampler(const InverseProblem& problem,
                                       const Eigen::VectorXd& lambda2)
    : problem_(&problem) {
  if (lambda2.size() != problem.n_elements())
    throw InvalidArgument("need one discrepancy variance per element");
  const Eigen::VectorXd var = stress_variances(lambda2);
  const auto& patches = problem.stress_patches();
  local_.resize(patches.size());
  for (std::size_t p = 0; p < patches.size(); ++p) {
    const auto& patch = patches[p];
    if (patch.basis.cols() == 0) continue;
    Eigen::VectorXd inv(static_cast<Eigen::Index>(patch.stress_index.size()));
    for (std::size_t r = 0; r < patch.stress_index.size(); ++r)
      inv(static_cast<Eigen::Index>(r)) = 1.0 / var(patch.stress_index[r]);
    local_[p].weighted = patch.basis.transpose() * inv.asDiagonal();
    local_[p].llt.compute(local_[p].weighted * patch.basis);
    if (local_[p].llt.info() != Eigen::Success)
      throw ConstraintDegeneracy("local stress precision is singular");
  }
}

void BlockStressSampler::update_block(int k, Eigen::VectorXd& sigma,
                                      const Eigen::VectorXd& model_stress, Rng& rng) const {
  const auto& patch = problem_->stress_patches()[k];
  const auto dim = patch.basis.cols();
  if (dim == 0) return;
  const auto n = static_cast<Eigen::Index>(patch.stress_index.size());
  Eigen::VectorXd d(n);
  for (Eigen::Index r = 0; r < n; ++r)
    d(r) = model_stress(patch.stress_index[r]) - sigma(patch.stress_index[r]);
  const auto& loc = local_[k];
  Eigen::VectorXd a = loc.llt.solve(loc.weighted * d);
  a += loc.llt.matrixU().solve(standard_normal(dim, rng));
  const Eigen::VectorXd step = patch.basis * a;
  for (Eigen::Index r = 0; r < n; ++r) sigma(patch.stress_index[r]) += step(r);
}

void BlockStressSampler::sweep(Eigen::VectorXd& sigma, const Eigen::VectorXd& model_stress,
                               Rng& rng) const {
  const int n = static_cast<int>(problem_->stress_patches().size());
  for (int k = 0; k < n; ++k) update_block(k, sigma, model_stress, rng);
}

ScalarGaussian modulus_conditional(const Eigen::Vector3d& sigma_e, const Eigen::Vector3d& eps_e,
                                   const Eigen::Matrix3d& dhat, double lambda2) {
  const Eigen::Vector3d a = dhat * eps_e;
  const double n2 = a.squaredNorm();
  if (!(n2 > 0.0) || !std::isfinite(n2))
    throw SingularConditional("element strain vanishes; modulus conditional undefined");
  return {a.dot(sigma_e) / n2, lambda2 / n2};
}

double sample_modulus(const Eigen::Vector3d& sigma_e, const Eigen::Vector3d& eps_e,
                      const Eigen::Matrix3d& dhat, double lambda2, Rng& rng) {
  const ScalarGaussian c = modulus_conditional(sigma_e, eps_e, dhat, lambda2);
  if (c.variance == 0.0) return c.mean;
  std::normal_distribution<double> normal(0.0, 1.0);
  return c.mean + std::sqrt(c.variance) * normal(rng);
}

GibbsSampler::GibbsSampler(const InverseProblem& problem, GibbsMode mode)
    : problem_(&problem), mode_(mode) {}

void GibbsSampler::set_discrepancy(const Eigen::VectorXd& lambda2) {
  if (lambda2.size() != problem_->n_elements())
    throw InvalidArgument("need one discrepancy variance per element");
  if (!(lambda2.minCoeff() > 0.0)) throw InvalidArgument("discrepancy variances must be positive");
  lambda2_ = lambda2;
  full_.reset();
  block_.reset();
  if (mode_ == GibbsMode::Full) {
    full_.emplace(*problem_, lambda2_);
  } else {
    block_.emplace(*problem_, lambda2_);
  }
}

LatentState GibbsSampler::sweep(LatentState s, Rng& rng) {
  if (lambda2_.size() == 0) throw InvalidArgument("set_discrepancy must be called before sweep");
  const auto& p = *problem_;
  if (p.observations().size() > 0)
    s.nu2 = sample_noise_variance(s.u, p.observations(), p.noise_prior(), rng, kNoiseResidualFloor);

  if (p.n_free() > 0) {
    if (mode_ == GibbsMode::Full) {
      s.u = sample_displacement_full(p, s, lambda2_, rng);
    } else {
      sweep_displacement_blocks(p, s, lambda2_, rng);
    }
  }

  const Eigen::VectorXd m0 = p.model_stress(s.u, s.E);
  if (mode_ == GibbsMode::Full) {
    s.sigma = full_->sample(m0, rng);
  } else {
    block_->sweep(s.sigma, m0, rng);
  }

  for (int e = 0; e < p.n_elements(); ++e) {
    const Eigen::Vector3d eps = p.strain(e, s.u);
    try {
      s.E(e) = sample_modulus(s.sigma.segment<kStressComponents>(kStressComponents * e), eps,
                              p.dhat(), lambda2_(e), rng);
    } catch (const SingularConditional&) {
      ++skipped_;
    }
  }
  return s;
}

}  // namespace elastobayes
