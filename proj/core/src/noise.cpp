#include "elastobayes/noise.hpp"

#include <cmath>

namespace elastobayes {

double rms(const Eigen::VectorXd& v) {
  if (v.size() == 0) return 0.0;
  return std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

double noise_std_for_snr(const Eigen::VectorXd& clean, double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  return rms(clean) * std::pow(10.0, -snr_db / 20.0);
}

Eigen::VectorXd add_noise(const Eigen::VectorXd& clean, double snr_db, Rng& rng) {
  const double s = noise_std_for_snr(clean, snr_db);
  if (s == 0.0) return clean;
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd out = clean;
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += s * normal(rng);
  return out;
}

}  // namespace elastobayes
