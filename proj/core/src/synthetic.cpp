#include "elastobayes/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "elastobayes/errors.hpp"

namespace elastobayes {

bool Ellipse::contains(const Eigen::Vector2d& p) const {
  const Eigen::Vector2d d = (p - center).cwiseQuotient(semi_axes);
  return d.squaredNorm() < 1.0 - 1e-9;
}

bool Rectangle::contains(const Eigen::Vector2d& p) const {
  return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
}

std::vector<Ellipse> example1_inclusions() {
  return {{{0.25, 0.25}, {0.1, 0.2}}, {{0.75, 0.75}, {0.1, 0.2}}};
}

Ellipse example2_inclusion() { return {{0.5, 0.5}, {0.2, 0.2}}; }

Rectangle example2_corner() { return {{0.0, 0.8}, {0.2, 1.0}}; }

Eigen::Matrix3d example2_corner_matrix() {
  Eigen::Matrix3d D;
  D << 10, -5, -5,
       -5, 20, -5,
       -5, -5, 100;
  return D;
}

GroundTruth example1_field(const Mesh& mesh, const Eigen::Matrix3d& dhat) {
  GroundTruth t;
  t.ellipses = example1_inclusions();
  t.E.resize(mesh.n_elements());
  t.D.resize(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    bool inside = false;
    for (const auto& el : t.ellipses) inside = inside || el.contains(mesh.centroid[e]);
    t.E(e) = inside ? kInclusionModulus : kBackgroundModulus;
    t.D[e] = t.E(e) * dhat;
  }
  return t;
}

GroundTruth example2_field(const Mesh& mesh, const Eigen::Matrix3d& dhat) {
  GroundTruth t;
  t.ellipses = {example2_inclusion()};
  t.rectangles = {example2_corner()};
  t.E.resize(mesh.n_elements());
  t.D.resize(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& c = mesh.centroid[e];
    if (t.rectangles[0].contains(c)) {
      t.E(e) = std::numeric_limits<double>::quiet_NaN();
      t.D[e] = example2_corner_matrix();
    } else {
      t.E(e) = t.ellipses[0].contains(c) ? kInclusionModulus : kBackgroundModulus;
      t.D[e] = t.E(e) * dhat;
    }
  }
  return t;
}

GroundTruth example_field(int example, const Mesh& mesh, const Eigen::Matrix3d& dhat) {
  switch (example) {
    case 1: return example1_field(mesh, dhat);
    case 2: return example2_field(mesh, dhat);
    default: throw InvalidArgument("unknown example " + std::to_string(example));
  }
}

BoundaryData wall_boundary_data(const Mesh& mesh, const WallLoads& loads) {
  std::vector<EdgeTraction> edges;
  for (const auto& [wall, t] : loads) {
    auto w = wall_traction(mesh, wall, t);
    edges.insert(edges.end(), w.begin(), w.end());
  }
  return make_boundary_data(mesh, std::move(edges));
}

LoadCase displacement_loading() { return {}; }

LoadCase reaction_loading() {
  LoadCase c;
  c.measured_top_reaction = true;
  return c;
}

LoadCase traction_loading() {
  LoadCase c;
  c.top_uy.reset();
  c.loads.push_back({Wall::Top, Eigen::Vector2d(0.0, 2.0)});
  return c;
}

LoadCase load_case(const std::string& name) {
  if (name == "displacement") return displacement_loading();
  if (name == "reaction") return reaction_loading();
  if (name == "traction") return traction_loading();
  throw InvalidArgument("unknown loading '" + name +
                        "' (expected displacement, reaction or traction)");
}

Eigen::VectorXd nodal_reactions(const Mesh& mesh, std::span<const Eigen::Matrix3d> D,
                                const Eigen::VectorXd& u_full, const Eigen::VectorXd& f_ext_full,
                                Integration rule) {
  return assemble_stiffness(mesh, D, rule) * u_full - f_ext_full;
}

Eigen::VectorXd lump_top_reaction(const Mesh& fine, const Eigen::VectorXd& reaction_full,
                                  const Mesh& coarse) {
  constexpr double tol = 1e-12;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(coarse.n_dofs());
  const int row = coarse.ny * (coarse.nx + 1);
  for (int n = 0; n < fine.n_nodes(); ++n) {
    const auto& x = fine.nodes[n];
    if (std::abs(x.y() - 1.0) > tol) continue;
    const double s = x.x() * coarse.nx;
    const int k = std::clamp(static_cast<int>(std::floor(s)), 0, coarse.nx - 1);
    const double t = s - k;
    out(2 * (row + k) + 1) += (1.0 - t) * reaction_full(2 * n + 1);
    out(2 * (row + k + 1) + 1) += t * reaction_full(2 * n + 1);
  }
  return out;
}

Eigen::VectorXd restrict_element_stress(const Mesh& fine, const Eigen::VectorXd& fine_stress,
                                        const Mesh& coarse) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(coarse.n_stress());
  Eigen::VectorXd weight = Eigen::VectorXd::Zero(coarse.n_elements());
  for (int e = 0; e < fine.n_elements(); ++e) {
    const int c = coarse.locate(fine.centroid[e]);
    acc.segment<kStressComponents>(kStressComponents * c) +=
        fine.volume[e] * fine_stress.segment<kStressComponents>(kStressComponents * e);
    weight(c) += fine.volume[e];
  }
  for (int c = 0; c < coarse.n_elements(); ++c) {
    if (!(weight(c) > 0.0)) throw InvalidArgument("fine mesh does not cover every coarse element");
    acc.segment<kStressComponents>(kStressComponents * c) /= weight(c);
  }
  return acc;
}

Dataset make_dataset(const GroundTruth& truth_on_fine, const Mesh& fine, const Mesh& inversion,
                     const LoadCase& load, double snr_db, Rng& rng, Integration rule) {
  if (static_cast<int>(truth_on_fine.D.size()) != fine.n_elements())
    throw InvalidArgument("ground truth does not match the data mesh");
  if (fine.n_elements() < inversion.n_elements())
    throw InvalidArgument("data mesh must be at least as fine as the inversion mesh");

  const BoundaryData fine_bc = wall_boundary_data(fine, load.loads);
  const ForwardSolution sol = forward_solve(fine, truth_on_fine.D, fine_bc, rule);

  Dataset d;
  d.fine_u = sol.u;
  d.u_clean.resize(inversion.n_free());
  for (int k = 0; k < inversion.n_free(); ++k) {
    const int g = inversion.dofs.free_to_global[k];
    d.u_clean(k) = fine.interpolate(sol.u, inversion.nodes[g / 2])(g % 2);
  }
  d.noise_std = noise_std_for_snr(d.u_clean, snr_db);
  d.observations.values = add_noise(d.u_clean, snr_db, rng);
  d.observations.dof.resize(inversion.n_free());
  for (int k = 0; k < inversion.n_free(); ++k) d.observations.dof[k] = k;
  d.f = wall_boundary_data(inversion, load.loads).f;
  if (load.measured_top_reaction) {
    const Eigen::VectorXd react = nodal_reactions(
        fine, truth_on_fine.D, sol.u,
        assemble_external_force_full(fine, fine_bc.tractions, fine_bc.body_force), rule);
    d.f += inversion.free_part(lump_top_reaction(fine, react, inversion));
  }
  d.stress = restrict_element_stress(fine, element_stresses(fine, truth_on_fine.D, sol.u), inversion);
  return d;
}

}  // namespace elastobayes
