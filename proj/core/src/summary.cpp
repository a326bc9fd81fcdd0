#include "elastobayes/summary.hpp"

#include <algorithm>
#include <cmath>

#include "elastobayes/errors.hpp"

namespace elastobayes {

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

PosteriorSummary summarize(const Mesh& mesh, const SampleStore& store,
                           const Eigen::VectorXd& lambda2, double q_lo, double q_hi) {
  const int S = store.size();
  if (S == 0) throw InvalidArgument("cannot summarize an empty sample store");
  if (!(q_lo <= q_hi)) throw InvalidArgument("lower quantile exceeds the upper one");
  const int n_el = mesh.n_elements();
  if (lambda2.size() != n_el) throw InvalidArgument("discrepancy field does not match the mesh");
  if (static_cast<int>(store.sigma.size()) != S || static_cast<int>(store.u.size()) != S ||
      static_cast<int>(store.nu2.size()) != S)
    throw InvalidArgument("sample store columns have different lengths");

  PosteriorSummary s;
  s.q_lo = q_lo;
  s.q_hi = q_hi;
  s.lambda2 = lambda2;
  s.E_mean = Eigen::VectorXd::Zero(n_el);
  s.stress_mean = Eigen::VectorXd::Zero(mesh.n_stress());
  Eigen::VectorXd u_free = Eigen::VectorXd::Zero(mesh.n_free());
  for (int k = 0; k < S; ++k) {
    if (store.E[k].size() != n_el || store.sigma[k].size() != mesh.n_stress() ||
        store.u[k].size() != mesh.n_free())
      throw InvalidArgument("sample does not match the mesh");
    s.E_mean += store.E[k];
    s.stress_mean += store.sigma[k];
    u_free += store.u[k];
    s.nu2_mean += store.nu2[k];
  }
  s.E_mean /= S;
  s.stress_mean /= S;
  u_free /= S;
  s.nu2_mean /= S;
  s.u_mean = mesh.full_displacement(u_free);

  s.E_lo.resize(n_el);
  s.E_hi.resize(n_el);
  std::vector<double> column(S);
  for (int e = 0; e < n_el; ++e) {
    for (int k = 0; k < S; ++k) column[k] = store.E[k](e);
    s.E_lo(e) = quantile(column, q_lo);
    s.E_hi(e) = quantile(column, q_hi);
  }
  s.pressure.resize(n_el);
  s.shear.resize(n_el);
  for (int e = 0; e < n_el; ++e) {
    s.pressure(e) = 0.5 * (s.stress_mean(3 * e) + s.stress_mean(3 * e + 1));
    s.shear(e) = s.stress_mean(3 * e + 2);
  }
  return s;
}

std::vector<int> transect(const Mesh& mesh, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                          int samples) {
  if (samples <= 0) samples = 4 * std::max(mesh.nx, mesh.ny);
  std::vector<int> out;
  for (int k = 0; k < samples; ++k) {
    const double t = (k + 0.5) / samples;
    const int e = mesh.locate(a + t * (b - a));
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  }
  return out;
}

std::vector<int> main_diagonal(const Mesh& mesh) {
  return transect(mesh, {0.0, 0.0}, {1.0, 1.0}, std::max(mesh.nx, mesh.ny));
}

std::vector<int> anti_diagonal(const Mesh& mesh) {
  return transect(mesh, {0.0, 1.0}, {1.0, 0.0}, std::max(mesh.nx, mesh.ny));
}

}  // namespace elastobayes
