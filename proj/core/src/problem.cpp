#include "elastobayes/problem.hpp"

#include <algorithm>
#include <set>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "elastobayes/errors.hpp"

namespace elastobayes {

void ObservationSet::validate(int n_free) const {
  if (values.size() != static_cast<Eigen::Index>(dof.size()))
    throw InvalidArgument("observation values and selector differ in length");
  for (int d : dof)
    if (d < 0 || d >= n_free) throw InvalidArgument("observation refers to a non-free DOF");
}

Eigen::VectorXd ObservationSet::residual(const Eigen::VectorXd& u_free) const {
  Eigen::VectorXd r = values;
  for (int k = 0; k < size(); ++k) r(k) -= u_free(dof[k]);
  return r;
}

ObservationSet ObservationSet::observe_all_free(const Mesh& mesh, const Eigen::VectorXd& u_full) {
  ObservationSet obs;
  obs.values = mesh.free_part(u_full);
  obs.dof.resize(mesh.n_free());
  for (int k = 0; k < mesh.n_free(); ++k) obs.dof[k] = k;
  return obs;
}

namespace {

// Rank-revealing null space of A (columns orthonormal).
Eigen::MatrixXd null_space(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.cols());
  if (A.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double tol = 1e-10 * (s.size() > 0 ? s(0) : 0.0) * std::max(A.rows(), A.cols());
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

}  // namespace

namespace {

StressPatch make_patch(const Eigen::SparseMatrix<double, Eigen::RowMajor>& Brow,
                       std::vector<int> elements) {
  StressPatch p;
  p.elements = std::move(elements);
  for (int m : p.elements)
    for (int k = 0; k < kStressComponents; ++k) p.stress_index.push_back(kStressComponents * m + k);

  std::vector<int> dofs;
  for (int row : p.stress_index)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Brow, row); it; ++it)
      dofs.push_back(static_cast<int>(it.col()));
  std::sort(dofs.begin(), dofs.end());
  dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dofs.size()),
                                            static_cast<Eigen::Index>(p.stress_index.size()));
  for (std::size_t c = 0; c < p.stress_index.size(); ++c) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Brow, p.stress_index[c]);
         it; ++it) {
      const auto r = std::lower_bound(dofs.begin(), dofs.end(), static_cast<int>(it.col())) -
                     dofs.begin();
      A(r, static_cast<Eigen::Index>(c)) = it.value();
    }
  }
  p.basis = null_space(A);
  return p;
}

}  // namespace

std::vector<StressPatch> build_stress_patches(const Mesh& mesh, int rings) {
  if (rings < 0) throw InvalidArgument("patch rings must be non-negative");
  const int ne = mesh.n_elements();
  std::vector<std::vector<int>> node_elems(mesh.n_nodes());
  for (int e = 0; e < ne; ++e)
    for (int n : mesh.elements[e]) node_elems[n].push_back(e);

  const Eigen::SparseMatrix<double, Eigen::RowMajor> Brow = mesh.Bhat;

  std::vector<StressPatch> patches;
  patches.reserve(ne + mesh.nx + mesh.ny);
  for (int e = 0; e < ne; ++e) {
    std::set<int> members{e};
    for (int r = 0; r < rings; ++r) {
      std::set<int> grown = members;
      for (int m : members)
        for (int n : mesh.elements[m])
          for (int k : node_elems[n]) grown.insert(k);
      members.swap(grown);
    }
    patches.push_back(make_patch(Brow, {members.begin(), members.end()}));
  }

  // Strips of one cell row or column carry the wall-to-wall force paths that
  // no bounded patch can represent.
  const double hx = 1.0 / mesh.nx, hy = 1.0 / mesh.ny;
  std::vector<std::vector<int>> rows(mesh.ny), cols(mesh.nx);
  for (int e = 0; e < ne; ++e) {
    const auto& c = mesh.centroid[e];
    rows[std::clamp(static_cast<int>(c.y() / hy), 0, mesh.ny - 1)].push_back(e);
    cols[std::clamp(static_cast<int>(c.x() / hx), 0, mesh.nx - 1)].push_back(e);
  }
  for (auto* strips : {&rows, &cols})
    for (auto& strip : *strips) {
      StressPatch p = make_patch(Brow, std::move(strip));
      if (p.basis.cols() > 0) patches.push_back(std::move(p));
    }

  // Uniform and checkerboard fields that happen to be self-equilibrated (the
  // checkerboard shear of centroid quads under full wall data, for instance).
  const int ns = mesh.n_stress();
  std::vector<Eigen::VectorXd> global;
  const double bnorm = std::max(1.0, mesh.Bhat.norm());
  for (int c = 0; c < kStressComponents; ++c)
    for (bool checker : {false, true}) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(ns);
      for (int e = 0; e < ne; ++e) {
        const auto& x = mesh.centroid[e];
        const int i = static_cast<int>(x.x() / hx), j = static_cast<int>(x.y() / hy);
        v(kStressComponents * e + c) = checker && (i + j) % 2 ? -1.0 : 1.0;
      }
      if (mesh.n_free() == 0 || (mesh.Bhat.transpose() * v).norm() <= 1e-12 * bnorm * v.norm())
        global.push_back(v);
    }
  if (!global.empty()) {
    Eigen::MatrixXd G(ns, static_cast<Eigen::Index>(global.size()));
    for (std::size_t k = 0; k < global.size(); ++k) G.col(static_cast<Eigen::Index>(k)) = global[k];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(G);
    StressPatch p;
    p.elements.resize(ne);
    for (int e = 0; e < ne; ++e) p.elements[e] = e;
    p.stress_index.resize(ns);
    for (int k = 0; k < ns; ++k) p.stress_index[k] = k;
    p.basis = (qr.householderQ() * Eigen::MatrixXd::Identity(ns, qr.rank()));
    patches.push_back(std::move(p));
  }
  return patches;
}

int stress_null_dimension(const Mesh& mesh) {
  if (mesh.n_free() == 0) return mesh.n_stress();
  const Eigen::MatrixXd Bd = mesh.Bhat;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Bd);
  svd.setThreshold(1e-10);
  return mesh.n_stress() - static_cast<int>(svd.rank());
}

int patch_span_rank(const Mesh& mesh, const std::vector<StressPatch>& patches) {
  int cols = 0;
  for (const auto& p : patches) cols += static_cast<int>(p.basis.cols());
  if (cols == 0) return 0;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(mesh.n_stress(), cols);
  int c = 0;
  for (const auto& p : patches) {
    for (Eigen::Index k = 0; k < p.basis.cols(); ++k, ++c)
      for (std::size_t r = 0; r < p.stress_index.size(); ++r)
        S(p.stress_index[r], c) = p.basis(static_cast<Eigen::Index>(r), k);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
  svd.setThreshold(1e-9);
  return static_cast<int>(svd.rank());
}

InverseProblem::InverseProblem(Mesh mesh, const ConstitutiveBase& base, ObservationSet obs,
                               Eigen::VectorXd f, NoiseHyperprior noise,
                               DisplacementPrior u_prior, int patch_rings)
    : mesh_(std::move(mesh)),
      base_(base),
      dhat_(base.dhat()),
      obs_(std::move(obs)),
      f_(std::move(f)),
      noise_(noise),
      u_prior_(std::move(u_prior)) {
  noise_.validate();
  obs_.validate(mesh_.n_free());
  if (f_.size() == 0) f_ = Eigen::VectorXd::Zero(mesh_.n_free());
  if (f_.size() != mesh_.n_free()) throw InvalidArgument("force vector must match the free DOFs");
  if (!u_prior_.active()) u_prior_ = flat_displacement_prior(mesh_);
  if (u_prior_.Vff.rows() != mesh_.n_free())
    throw InvalidArgument("displacement prior does not match the mesh");

  const auto& fi = mesh_.dofs.free_index;
  const auto& up = mesh_.dofs.prescribed_value;
  incidence_.resize(mesh_.n_free());
  ops_.resize(mesh_.n_elements());
  for (int e = 0; e < mesh_.n_elements(); ++e) {
    auto& op = ops_[e];
    const auto ld = mesh_.local_dofs(e);
    op.B = mesh_.B[e];
    op.G = dhat_ * op.B;
    op.free_slot.resize(ld.size());
    Eigen::VectorXd u_pres = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ld.size()));
    for (std::size_t l = 0; l < ld.size(); ++l) {
      op.free_slot[l] = fi[ld[l]];
      if (op.free_slot[l] < 0) {
        u_pres(static_cast<Eigen::Index>(l)) = up(ld[l]);
      } else {
        incidence_[op.free_slot[l]].push_back({e, static_cast<int>(l)});
      }
    }
    op.prescribed_strain = op.B * u_pres;
    op.prescribed_stress = dhat_ * op.prescribed_strain;
  }
  obs_of_dof_.resize(mesh_.n_free());
  for (int k = 0; k < obs_.size(); ++k) obs_of_dof_[obs_.dof[k]].push_back(k);
  patches_ = build_stress_patches(mesh_, patch_rings);
}

Eigen::Vector3d InverseProblem::strain(int e, const Eigen::VectorXd& u_free) const {
  const auto& op = ops_[e];
  Eigen::Vector3d eps = op.prescribed_strain;
  for (std::size_t l = 0; l < op.free_slot.size(); ++l) {
    const int s = op.free_slot[l];
    if (s >= 0) eps += op.B.col(static_cast<Eigen::Index>(l)) * u_free(s);
  }
  return eps;
}

Eigen::VectorXd InverseProblem::model_stress(const Eigen::VectorXd& u_free,
                                             const Eigen::VectorXd& E) const {
  Eigen::VectorXd s(n_stress());
  for (int e = 0; e < n_elements(); ++e)
    s.segment<kStressComponents>(kStressComponents * e) = E(e) * (dhat_ * strain(e, u_free));
  return s;
}

double InverseProblem::constraint_residual(const Eigen::VectorXd& sigma) const {
  if (n_free() == 0) return 0.0;
  return (mesh_.Bhat.transpose() * sigma - f_).norm() / (1.0 + f_.norm());
}

}  // namespace elastobayes
