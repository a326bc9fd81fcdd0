#pragma once

#include <Eigen/Dense>

namespace elastobayes {

enum class Regime { PlaneStress, PlaneStrain };

// Isotropic elasticity with unit modulus: D_e = E_e * dhat().
struct ConstitutiveBase {
  Regime regime = Regime::PlaneStress;
  double poisson_ratio = 0.5;

  // Throws InvalidArgument when the Poisson ratio is outside the admissible
  // range for the regime ([0, 0.5] plane stress, [0, 0.49] plane strain).
  void validate() const;
  Eigen::Matrix3d dhat() const;
};

Eigen::Matrix3d isotropic_dhat(Regime regime, double poisson_ratio);

// Splits an isotropic plane-elasticity matrix into lambda_bar * m m^T and
// mu * diag(2, 2, 1), m = (1, 1, 0). Returns false when D is not isotropic.
bool split_isotropic(const Eigen::Matrix3d& D, double& lambda_bar, double& mu);

}  // namespace elastobayes
