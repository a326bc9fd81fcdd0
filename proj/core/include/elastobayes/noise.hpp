#pragma once

#include <Eigen/Dense>

#include <random>

namespace elastobayes {

using Rng = std::mt19937_64;

double rms(const Eigen::VectorXd& v);

// Standard deviation of additive noise at the given amplitude SNR (dB).
double noise_std_for_snr(const Eigen::VectorXd& clean, double snr_db);

// u + eta, eta ~ N(0, s^2 I) with s = rms(u) * 10^(-snr_db / 20). An infinite
// SNR returns the input unchanged and consumes no random numbers.
Eigen::VectorXd add_noise(const Eigen::VectorXd& clean, double snr_db, Rng& rng);

}  // namespace elastobayes
