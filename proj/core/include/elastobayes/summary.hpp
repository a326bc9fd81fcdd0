#pragma once

#include <Eigen/Dense>

#include <vector>

#include "elastobayes/mesh.hpp"
#include "elastobayes/saem.hpp"

namespace elastobayes {

// Linear interpolation between order statistics (Hyndman-Fan type 7).
double quantile(std::vector<double> values, double q);

struct PosteriorSummary {
  double q_lo = 0.05;
  double q_hi = 0.95;
  Eigen::VectorXd E_mean, E_lo, E_hi;
  Eigen::VectorXd lambda2;
  Eigen::VectorXd stress_mean;  // stacked (xx, yy, xy)
  Eigen::VectorXd pressure;     // (xx + yy) / 2
  Eigen::VectorXd shear;        // xy
  Eigen::VectorXd u_mean;       // full nodal field, prescribed values included
  double nu2_mean = 0.0;
};

// Throws InvalidArgument on an empty store or inconsistent sizes.
PosteriorSummary summarize(const Mesh& mesh, const SampleStore& store,
                           const Eigen::VectorXd& lambda2, double q_lo = 0.05,
                           double q_hi = 0.95);

// Elements under `samples` equispaced points of the segment a-b, in order and
// without repeats.
std::vector<int> transect(const Mesh& mesh, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                          int samples = 0);
std::vector<int> main_diagonal(const Mesh& mesh);  // (0,0) -> (1,1)
std::vector<int> anti_diagonal(const Mesh& mesh);  // (0,1) -> (1,0)

}  // namespace elastobayes
