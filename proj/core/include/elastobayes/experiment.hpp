#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "elastobayes/constitutive.hpp"
#include "elastobayes/priors.hpp"
#include "elastobayes/saem.hpp"
#include "elastobayes/synthetic.hpp"

namespace elastobayes {

// Everything needed to set up a synthetic inversion on a mesh cascade.
struct ExperimentConfig {
  std::vector<int> levels{5, 10, 20};
  ElementKind kind = ElementKind::ConstantStrainQuad;
  ConstitutiveBase base;
  double d0 = kDefaultCorrelationLength;
  double sigma_z2 = kDefaultSigmaZ2;
  double sigma_u2 = kDefaultSigmaU2;
  NoiseHyperprior noise;
  int patch_rings = 1;
  int example = 1;
  double snr_db = std::numeric_limits<double>::infinity();
  int fine = 100;
  LoadCase load = reaction_loading();

  void validate() const;
};

// Mesh, data, priors and ground truth for every level of a cascade. Datasets
// are drawn level by level from one random stream.
class Experiment {
 public:
  Experiment(const ExperimentConfig& config, Rng& rng);
  // Externally supplied observations and forces, one per level.
  Experiment(const ExperimentConfig& config, std::vector<ObservationSet> obs,
             std::vector<Eigen::VectorXd> f);

  const ExperimentConfig& config() const { return config_; }
  int n_levels() const { return static_cast<int>(problems_.size()); }
  const InverseProblem& problem(int k) const { return *problems_[k]; }
  const GmrfSpec& lambda_prior(int k) const { return priors_[k]; }
  const Dataset& data(int k) const { return data_[k]; }
  // Ground truth on the level-k mesh (element membership by centroid).
  const GroundTruth& truth(int k) const { return truth_[k]; }
  const Mesh& fine_mesh() const { return *fine_; }

  std::vector<CascadeLevel> cascade() const;
  std::vector<EmResult> run(const EmConfig& em, Rng& rng) const;
  void run(const EmConfig& em, Rng& rng, std::vector<EmResult>& results) const;

 private:
  void build_level(int n, Dataset data);

  ExperimentConfig config_;
  std::unique_ptr<Mesh> fine_;
  std::vector<Dataset> data_;
  std::vector<GroundTruth> truth_;
  std::vector<std::unique_ptr<InverseProblem>> problems_;
  std::vector<GmrfSpec> priors_;
};

Mesh inversion_mesh(const ExperimentConfig& config, int n);

}  // namespace elastobayes
