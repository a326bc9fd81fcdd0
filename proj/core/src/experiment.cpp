#include "elastobayes/experiment.hpp"

#include "elastobayes/errors.hpp"

namespace elastobayes {

void ExperimentConfig::validate() const {
  if (levels.empty()) throw InvalidArgument("the mesh cascade needs at least one level");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (levels[k] < 1) throw InvalidArgument("mesh sizes must be positive");
    if (k > 0 && levels[k] < levels[k - 1])
      throw InvalidArgument("mesh cascade must not coarsen");
  }
  base.validate();
  noise.validate();
  if (!(d0 > 0.0)) throw InvalidArgument("d0 must be positive");
  if (!(sigma_z2 > 0.0) || !(sigma_u2 > 0.0))
    throw InvalidArgument("prior variances must be positive");
  if (patch_rings < 1) throw InvalidArgument("stress patches need at least one ring");
  if (example != 1 && example != 2) throw InvalidArgument("example must be 1 or 2");
  if (fine < levels.back()) throw InvalidArgument("data mesh must be at least as fine as the last level");
  if (std::isnan(snr_db)) throw InvalidArgument("SNR must be a number or +inf");
}

Mesh inversion_mesh(const ExperimentConfig& config, int n) {
  return build_structured_mesh(n, n, config.kind, config.load.inversion_rule());
}

Experiment::Experiment(const ExperimentConfig& config, Rng& rng) : config_(config) {
  config_.validate();
  fine_ = std::make_unique<Mesh>(build_structured_mesh(
      config_.fine, config_.fine, ElementKind::ConstantStrainQuad, config_.load.data_rule()));
  const GroundTruth fine_truth = example_field(config_.example, *fine_, config_.base.dhat());
  for (int n : config_.levels) {
    const Mesh m = inversion_mesh(config_, n);
    build_level(n, make_dataset(fine_truth, *fine_, m, config_.load, config_.snr_db, rng));
  }
}

Experiment::Experiment(const ExperimentConfig& config, std::vector<ObservationSet> obs,
                       std::vector<Eigen::VectorXd> f)
    : config_(config) {
  config_.validate();
  if (obs.size() != config_.levels.size() || f.size() != config_.levels.size())
    throw InvalidArgument("need one observation set and one force vector per level");
  fine_ = std::make_unique<Mesh>(build_structured_mesh(
      config_.fine, config_.fine, ElementKind::ConstantStrainQuad, config_.load.data_rule()));
  for (std::size_t k = 0; k < obs.size(); ++k) {
    Dataset d;
    d.observations = std::move(obs[k]);
    d.f = std::move(f[k]);
    build_level(config_.levels[k], std::move(d));
  }
}

void Experiment::build_level(int n, Dataset data) {
  Mesh m = inversion_mesh(config_, n);
  if (data.f.size() != m.n_free()) throw InvalidArgument("force vector does not match the mesh");
  data.observations.validate(m.n_free());
  truth_.push_back(example_field(config_.example, m, config_.base.dhat()));
  priors_.push_back(build_gmrf(m.centroid, config_.d0, config_.sigma_z2));
  DisplacementPrior up = build_displacement_prior(m, config_.d0, config_.sigma_u2);
  problems_.push_back(std::make_unique<InverseProblem>(std::move(m), config_.base,
                                                       data.observations, data.f, config_.noise,
                                                       std::move(up), config_.patch_rings));
  data_.push_back(std::move(data));
}

std::vector<CascadeLevel> Experiment::cascade() const {
  std::vector<CascadeLevel> out;
  for (int k = 0; k < n_levels(); ++k) out.push_back({problems_[k].get(), &priors_[k]});
  return out;
}

std::vector<EmResult> Experiment::run(const EmConfig& em, Rng& rng) const {
  const auto levels = cascade();
  return refine_cascade(levels, em, rng);
}

void Experiment::run(const EmConfig& em, Rng& rng, std::vector<EmResult>& results) const {
  const auto levels = cascade();
  refine_cascade(levels, em, rng, results);
}

}  // namespace elastobayes
