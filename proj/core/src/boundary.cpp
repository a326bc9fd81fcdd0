#include "elastobayes/boundary.hpp"

#include <cmath>

#include "elastobayes/errors.hpp"

namespace elastobayes {

std::vector<EdgeTraction> wall_traction(const Mesh& mesh, Wall wall, const Eigen::Vector2d& t) {
  const int nx = mesh.nx, ny = mesh.ny;
  auto nid = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<EdgeTraction> out;
  switch (wall) {
    case Wall::Bottom:
      for (int i = 0; i < nx; ++i) out.push_back({nid(i, 0), nid(i + 1, 0), t});
      break;
    case Wall::Top:
      for (int i = 0; i < nx; ++i) out.push_back({nid(i + 1, ny), nid(i, ny), t});
      break;
    case Wall::Left:
      for (int j = 0; j < ny; ++j) out.push_back({nid(0, j + 1), nid(0, j), t});
      break;
    case Wall::Right:
      for (int j = 0; j < ny; ++j) out.push_back({nid(nx, j), nid(nx, j + 1), t});
      break;
  }
  return out;
}

Eigen::VectorXd assemble_external_force_full(const Mesh& mesh,
                                             const std::vector<EdgeTraction>& tractions,
                                             const std::vector<Eigen::Vector2d>& body_force) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.n_dofs());
  for (const auto& et : tractions) {
    if (et.node_a < 0 || et.node_b < 0 || et.node_a >= mesh.n_nodes() ||
        et.node_b >= mesh.n_nodes()) {
      throw InvalidArgument("traction edge references an unknown node");
    }
    const double len = (mesh.nodes[et.node_b] - mesh.nodes[et.node_a]).norm();
    for (int c = 0; c < 2; ++c) {
      f(2 * et.node_a + c) += 0.5 * len * et.traction(c);
      f(2 * et.node_b + c) += 0.5 * len * et.traction(c);
    }
  }
  if (!body_force.empty()) {
    if (static_cast<int>(body_force.size()) != mesh.n_elements())
      throw InvalidArgument("body force must have one entry per element");
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const auto& conn = mesh.elements[e];
      const double w = mesh.volume[e] / static_cast<double>(conn.size());
      for (int n : conn)
        for (int c = 0; c < 2; ++c) f(2 * n + c) += w * body_force[e](c);
    }
  }
  return f;
}

BoundaryData make_boundary_data(const Mesh& mesh, std::vector<EdgeTraction> tractions,
                                std::vector<Eigen::Vector2d> body_force) {
  BoundaryData bc;
  bc.tractions = std::move(tractions);
  bc.body_force = std::move(body_force);
  bc.f = mesh.free_part(assemble_external_force_full(mesh, bc.tractions, bc.body_force));
  return bc;
}

}  // namespace elastobayes
