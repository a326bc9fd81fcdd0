#include "elastobayes/priors.hpp"

#include <cmath>
#include <limits>

#include "elastobayes/errors.hpp"

namespace elastobayes {

GmrfSpec build_gmrf(std::span<const Eigen::Vector2d> sites, double d0, double scale,
                    double truncate_below) {
  if (sites.size() < 2) throw InvalidArgument("GMRF needs at least two sites");
  if (!(d0 > 0.0)) throw InvalidArgument("GMRF correlation length must be positive");
  if (!(scale > 0.0)) throw InvalidArgument("GMRF scale must be positive");

  const int n = static_cast<int>(sites.size());
  GmrfSpec g;
  g.d0 = d0;
  g.scale = scale;
  g.H = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double h = std::exp(-(sites[i] - sites[j]).norm() / d0);
      if (h < truncate_below) continue;
      g.H(i, j) = g.H(j, i) = -h;
    }
  }
  for (int i = 0; i < n; ++i) g.H(i, i) = -g.H.row(i).sum();
  g.W = std::isfinite(scale) ? Eigen::MatrixXd(g.H / scale) : Eigen::MatrixXd::Zero(n, n);
  return g;
}

double gmrf_penalty(const Eigen::VectorXd& Z, const GmrfSpec& spec) {
  if (Z.size() != spec.size()) throw InvalidArgument("GMRF penalty: length mismatch");
  return Z.dot(spec.W.selfadjointView<Eigen::Upper>() * Z);
}

void NoiseHyperprior::validate() const {
  if (!(alpha > 0.0)) throw InvalidArgument("noise hyperprior shape must be positive");
  if (!(beta >= 0.0)) throw InvalidArgument("noise hyperprior rate must be non-negative");
}

DisplacementPrior build_displacement_prior(const Mesh& mesh, double d0, double sigma_u2) {
  if (!(sigma_u2 > 0.0)) throw InvalidArgument("displacement prior variance must be positive");
  const GmrfSpec J = build_gmrf(mesh.nodes, d0, 1.0);
  const auto& fi = mesh.dofs.free_index;
  const Eigen::VectorXd& up = mesh.dofs.prescribed_value;
  const int nf = mesh.n_free();

  DisplacementPrior p;
  p.sigma_u2 = sigma_u2;
  p.d0 = d0;
  p.Vff = Eigen::MatrixXd::Zero(nf, nf);
  p.shift = Eigen::VectorXd::Zero(nf);
  for (int a = 0; a < mesh.n_nodes(); ++a) {
    for (int b = 0; b < mesh.n_nodes(); ++b) {
      const double v = J.H(a, b) / sigma_u2;
      for (int c = 0; c < 2; ++c) {
        const int ra = fi[2 * a + c];
        if (ra < 0) continue;
        const int rb = fi[2 * b + c];
        if (rb >= 0) {
          p.Vff(ra, rb) = v;
        } else {
          p.shift(ra) -= v * up(2 * b + c);
        }
      }
    }
  }
  return p;
}

DisplacementPrior flat_displacement_prior(const Mesh& mesh) {
  DisplacementPrior p;
  p.sigma_u2 = std::numeric_limits<double>::infinity();
  p.Vff = Eigen::MatrixXd::Zero(mesh.n_free(), mesh.n_free());
  p.shift = Eigen::VectorXd::Zero(mesh.n_free());
  return p;
}

}  // namespace elastobayes
