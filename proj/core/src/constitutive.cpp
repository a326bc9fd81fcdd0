#include "elastobayes/constitutive.hpp"

#include <cmath>
#include <string>

#include "elastobayes/errors.hpp"

namespace elastobayes {

void ConstitutiveBase::validate() const {
  const double hi = regime == Regime::PlaneStress ? 0.5 : 0.49;
  if (!(poisson_ratio >= 0.0 && poisson_ratio <= hi)) {
    throw InvalidArgument("poisson ratio " + std::to_string(poisson_ratio) +
                          " outside [0, " + std::to_string(hi) + "] for this regime");
  }
}

Eigen::Matrix3d ConstitutiveBase::dhat() const {
  validate();
  return isotropic_dhat(regime, poisson_ratio);
}

Eigen::Matrix3d isotropic_dhat(Regime regime, double nu) {
  Eigen::Matrix3d D = Eigen::Matrix3d::Zero();
  if (regime == Regime::PlaneStress) {
    const double s = 1.0 / (1.0 - nu * nu);
    D(0, 0) = D(1, 1) = s;
    D(0, 1) = D(1, 0) = s * nu;
    D(2, 2) = s * 0.5 * (1.0 - nu);
  } else {
    const double s = 1.0 / ((1.0 + nu) * (1.0 - 2.0 * nu));
    D(0, 0) = D(1, 1) = s * (1.0 - nu);
    D(0, 1) = D(1, 0) = s * nu;
    D(2, 2) = s * 0.5 * (1.0 - 2.0 * nu);
  }
  return D;
}

bool split_isotropic(const Eigen::Matrix3d& D, double& lambda_bar, double& mu) {
  const double scale = D.cwiseAbs().maxCoeff();
  const double tol = 1e-10 * (scale > 0 ? scale : 1.0);
  lambda_bar = D(0, 1);
  mu = D(2, 2);
  return std::abs(D(0, 0) - D(1, 1)) <= tol && std::abs(D(0, 1) - D(1, 0)) <= tol &&
         std::abs(D(0, 2)) <= tol && std::abs(D(1, 2)) <= tol && std::abs(D(2, 0)) <= tol &&
         std::abs(D(2, 1)) <= tol && std::abs(D(0, 0) - lambda_bar - 2.0 * mu) <= tol;
}

}  // namespace elastobayes
