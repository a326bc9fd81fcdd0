#include "elastobayes/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "elastobayes/errors.hpp"

namespace elastobayes {

namespace {

constexpr double kWallTol = 1e-12;

bool on_wall(double v, double wall) { return std::abs(v - wall) <= kWallTol; }

bool on_boundary(const Eigen::Vector2d& x) {
  return on_wall(x.x(), 0.0) || on_wall(x.x(), 1.0) || on_wall(x.y(), 0.0) ||
         on_wall(x.y(), 1.0);
}

int clamp_cell(double v, int n) {
  const int c = static_cast<int>(std::floor(v * n));
  return std::clamp(c, 0, n - 1);
}

}  // namespace

DirichletRule wall_normal_dirichlet(std::optional<double> right_ux, std::optional<double> top_uy) {
  return [right_ux, top_uy](const Eigen::Vector2d& x, int component) -> std::optional<double> {
    if (component == 0) {
      if (on_wall(x.x(), 0.0)) return 0.0;
      if (right_ux && on_wall(x.x(), 1.0)) return right_ux;
    } else {
      if (on_wall(x.y(), 0.0)) return 0.0;
      if (top_uy && on_wall(x.y(), 1.0)) return top_uy;
    }
    return std::nullopt;
  };
}

DirichletRule affine_boundary_dirichlet(const Eigen::Matrix2d& A, const Eigen::Vector2d& c) {
  return [A, c](const Eigen::Vector2d& x, int component) -> std::optional<double> {
    if (!on_boundary(x)) return std::nullopt;
    return (A * x + c)(component);
  };
}

DirichletRule no_dirichlet() {
  return [](const Eigen::Vector2d&, int) -> std::optional<double> { return std::nullopt; };
}

double polygon_area(std::span<const Eigen::Vector2d> v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

Eigen::MatrixXd quad_strain_displacement_at(std::span<const Eigen::Vector2d> v, double xi,
                                            double eta, double* det_j) {
  if (v.size() != 4) throw InvalidArgument("quad strain operator needs 4 vertices");
  static constexpr double kXi[4] = {-1.0, 1.0, 1.0, -1.0};
  static constexpr double kEta[4] = {-1.0, -1.0, 1.0, 1.0};

  Eigen::Matrix<double, 2, 4> dref;
  for (int a = 0; a < 4; ++a) {
    dref(0, a) = 0.25 * kXi[a] * (1.0 + eta * kEta[a]);
    dref(1, a) = 0.25 * kEta[a] * (1.0 + xi * kXi[a]);
  }
  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  for (int a = 0; a < 4; ++a) {
    J(0, 0) += dref(0, a) * v[a].x();
    J(0, 1) += dref(0, a) * v[a].y();
    J(1, 0) += dref(1, a) * v[a].x();
    J(1, 1) += dref(1, a) * v[a].y();
  }
  const double det = J.determinant();
  if (!(det > 0.0)) throw DegenerateElement("non-positive quad Jacobian");
  if (det_j) *det_j = det;
  const Eigen::Matrix<double, 2, 4> dxy = J.inverse() * dref;

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 8);
  for (int a = 0; a < 4; ++a) {
    B(0, 2 * a) = dxy(0, a);
    B(1, 2 * a + 1) = dxy(1, a);
    B(2, 2 * a) = dxy(1, a);
    B(2, 2 * a + 1) = dxy(0, a);
  }
  return B;
}

Eigen::MatrixXd strain_displacement(std::span<const Eigen::Vector2d> v) {
  if (v.size() == 4) return quad_strain_displacement_at(v, 0.0, 0.0);
  if (v.size() != 3) throw InvalidArgument("strain operator needs 3 or 4 vertices");

  const double two_a = (v[1].x() - v[0].x()) * (v[2].y() - v[0].y()) -
                       (v[2].x() - v[0].x()) * (v[1].y() - v[0].y());
  if (!(two_a > 0.0)) throw DegenerateElement("non-positive triangle area");

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 6);
  for (int i = 0; i < 3; ++i) {
    const auto& pj = v[(i + 1) % 3];
    const auto& pk = v[(i + 2) % 3];
    const double dndx = (pj.y() - pk.y()) / two_a;
    const double dndy = (pk.x() - pj.x()) / two_a;
    B(0, 2 * i) = dndx;
    B(1, 2 * i + 1) = dndy;
    B(2, 2 * i) = dndy;
    B(2, 2 * i + 1) = dndx;
  }
  return B;
}

std::vector<int> Mesh::local_dofs(int e) const {
  const auto& conn = elements[e];
  std::vector<int> dofs_out(2 * conn.size());
  for (std::size_t a = 0; a < conn.size(); ++a) {
    dofs_out[2 * a] = 2 * conn[a];
    dofs_out[2 * a + 1] = 2 * conn[a] + 1;
  }
  return dofs_out;
}

Eigen::VectorXd Mesh::full_displacement(const Eigen::VectorXd& u_free) const {
  if (u_free.size() != n_free()) throw InvalidArgument("free displacement size mismatch");
  Eigen::VectorXd u = dofs.prescribed_value;
  for (int k = 0; k < n_free(); ++k) u(dofs.free_to_global[k]) = u_free(k);
  return u;
}

Eigen::VectorXd Mesh::free_part(const Eigen::VectorXd& u_full) const {
  if (u_full.size() != n_dofs()) throw InvalidArgument("full displacement size mismatch");
  Eigen::VectorXd u(n_free());
  for (int k = 0; k < n_free(); ++k) u(k) = u_full(dofs.free_to_global[k]);
  return u;
}

Eigen::VectorXd Mesh::gather(int e, const Eigen::VectorXd& u_full) const {
  const auto& conn = elements[e];
  Eigen::VectorXd ue(2 * conn.size());
  for (std::size_t a = 0; a < conn.size(); ++a) {
    ue(2 * a) = u_full(2 * conn[a]);
    ue(2 * a + 1) = u_full(2 * conn[a] + 1);
  }
  return ue;
}

int Mesh::locate(const Eigen::Vector2d& p) const {
  const int i = clamp_cell(p.x(), nx);
  const int j = clamp_cell(p.y(), ny);
  const int cell = j * nx + i;
  if (kind == ElementKind::ConstantStrainQuad) return cell;
  const double s = std::clamp(p.x() * nx - i, 0.0, 1.0);
  const double t = std::clamp(p.y() * ny - j, 0.0, 1.0);
  return 2 * cell + (s >= t ? 0 : 1);
}

Eigen::Vector2d Mesh::interpolate(const Eigen::VectorXd& u_full, const Eigen::Vector2d& p) const {
  const int e = locate(p);
  const auto& conn = elements[e];
  Eigen::Vector2d out = Eigen::Vector2d::Zero();
  if (kind == ElementKind::ConstantStrainQuad) {
    const auto& p0 = nodes[conn[0]];
    const auto& p2 = nodes[conn[2]];
    const double s = std::clamp((p.x() - p0.x()) / (p2.x() - p0.x()), 0.0, 1.0);
    const double t = std::clamp((p.y() - p0.y()) / (p2.y() - p0.y()), 0.0, 1.0);
    const double w[4] = {(1 - s) * (1 - t), s * (1 - t), s * t, (1 - s) * t};
    for (int a = 0; a < 4; ++a) {
      out.x() += w[a] * u_full(2 * conn[a]);
      out.y() += w[a] * u_full(2 * conn[a] + 1);
    }
    return out;
  }
  const auto& a = nodes[conn[0]];
  const auto& b = nodes[conn[1]];
  const auto& c = nodes[conn[2]];
  const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
  double l1 = ((p.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (p.y() - a.y())) / det;
  double l2 = ((b.x() - a.x()) * (p.y() - a.y()) - (p.x() - a.x()) * (b.y() - a.y())) / det;
  l1 = std::clamp(l1, 0.0, 1.0);
  l2 = std::clamp(l2, 0.0, 1.0 - l1);
  const double w[3] = {1.0 - l1 - l2, l1, l2};
  for (int k = 0; k < 3; ++k) {
    out.x() += w[k] * u_full(2 * conn[k]);
    out.y() += w[k] * u_full(2 * conn[k] + 1);
  }
  return out;
}

Eigen::SparseMatrix<double> assemble_equilibrium(const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> trip;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto ldofs = mesh.local_dofs(e);
    for (std::size_t l = 0; l < ldofs.size(); ++l) {
      const int col = mesh.dofs.free_index[ldofs[l]];
      if (col < 0) continue;
      for (int k = 0; k < kStressComponents; ++k) {
        const double v = mesh.volume[e] * mesh.B[e](k, static_cast<int>(l));
        if (v != 0.0) trip.emplace_back(kStressComponents * e + k, col, v);
      }
    }
  }
  Eigen::SparseMatrix<double> Bhat(mesh.n_stress(), mesh.n_free());
  Bhat.setFromTriplets(trip.begin(), trip.end());
  return Bhat;
}

Mesh build_structured_mesh(int nx, int ny, ElementKind kind, const DirichletRule& rule) {
  if (nx < 1 || ny < 1) {
    throw InvalidArgument("mesh dimensions must be positive, got " + std::to_string(nx) + "x" +
                          std::to_string(ny));
  }
  Mesh m;
  m.nx = nx;
  m.ny = ny;
  m.kind = kind;

  m.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.nodes.emplace_back(static_cast<double>(i) / nx, static_cast<double>(j) / ny);

  auto nid = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = nid(i, j), n10 = nid(i + 1, j), n11 = nid(i + 1, j + 1),
                n01 = nid(i, j + 1);
      if (kind == ElementKind::ConstantStrainQuad) {
        m.elements.push_back({n00, n10, n11, n01});
      } else {
        m.elements.push_back({n00, n10, n11});
        m.elements.push_back({n00, n11, n01});
      }
    }
  }

  for (const auto& conn : m.elements) {
    std::vector<Eigen::Vector2d> v;
    v.reserve(conn.size());
    for (int n : conn) v.push_back(m.nodes[n]);
    m.volume.push_back(polygon_area(v));
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (const auto& p : v) c += p;
    m.centroid.push_back(c / static_cast<double>(v.size()));
    m.B.push_back(strain_displacement(v));
  }

  auto& d = m.dofs;
  d.free_index.assign(m.n_dofs(), -1);
  d.prescribed_value = Eigen::VectorXd::Zero(m.n_dofs());
  for (int n = 0; n < m.n_nodes(); ++n) {
    for (int c = 0; c < 2; ++c) {
      const int g = 2 * n + c;
      if (auto val = rule ? rule(m.nodes[n], c) : std::nullopt) {
        d.prescribed.push_back(g);
        d.prescribed_value(g) = *val;
      } else {
        d.free_index[g] = static_cast<int>(d.free_to_global.size());
        d.free_to_global.push_back(g);
      }
    }
  }

  m.Bhat = assemble_equilibrium(m);
  return m;
}

}  // namespace elastobayes
