#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "elastobayes/constitutive.hpp"
#include "elastobayes/mesh.hpp"
#include "elastobayes/priors.hpp"

namespace elastobayes {

// Noisy displacement data u_Q = Q u + noise, with Q a Boolean selector: entry
// k observes free DOF dof[k].
struct ObservationSet {
  Eigen::VectorXd values;
  std::vector<int> dof;

  int size() const { return static_cast<int>(dof.size()); }
  void validate(int n_free) const;
  // u_Q - Q u
  Eigen::VectorXd residual(const Eigen::VectorXd& u_free) const;

  // Q = I over the free DOFs of `mesh`, values taken from a full field.
  static ObservationSet observe_all_free(const Mesh& mesh, const Eigen::VectorXd& u_full);
};

// theta = (nu^2, u, sigma, E).
struct LatentState {
  double nu2 = 1.0;
  Eigen::VectorXd u;      // free DOFs only
  Eigen::VectorXd sigma;  // stacked element stresses (xx, yy, xy)
  Eigen::VectorXd E;      // element moduli
};

// Self-equilibrated stress directions supported on a patch of elements: every
// column of `basis` (restricted to `stress_index`) lies in the null space of
// Bhat^T.
struct StressPatch {
  std::vector<int> elements;
  std::vector<int> stress_index;
  Eigen::MatrixXd basis;  // orthonormal columns
};

// One patch per element (all elements within `rings` node-neighbour layers),
// followed by the non-trivial single-row and single-column strips and one
// global patch of uniform and checkerboard self-equilibrated fields.
std::vector<StressPatch> build_stress_patches(const Mesh& mesh, int rings);

// dim null(Bhat^T) and the rank spanned by the union of patch bases.
int stress_null_dimension(const Mesh& mesh);
int patch_span_rank(const Mesh& mesh, const std::vector<StressPatch>& patches);

// Immutable inversion context: mesh, constitutive base, data and priors, plus
// per-element operators precomputed once.
class InverseProblem {
 public:
  struct ElementOperators {
    std::vector<int> free_slot;     // per local DOF, -1 when prescribed
    Eigen::MatrixXd B;              // 3 x local DOFs
    Eigen::MatrixXd G;              // Dhat * B
    Eigen::Vector3d prescribed_strain;  // B_e applied to the prescribed values
    Eigen::Vector3d prescribed_stress;  // Dhat * prescribed_strain
  };
  struct Incidence {
    int element;
    int local;
  };

  InverseProblem(Mesh mesh, const ConstitutiveBase& base, ObservationSet obs, Eigen::VectorXd f,
                 NoiseHyperprior noise, DisplacementPrior u_prior, int patch_rings = 1);

  const Mesh& mesh() const { return mesh_; }
  const ConstitutiveBase& constitutive() const { return base_; }
  const Eigen::Matrix3d& dhat() const { return dhat_; }
  const ObservationSet& observations() const { return obs_; }
  const Eigen::VectorXd& force() const { return f_; }
  const NoiseHyperprior& noise_prior() const { return noise_; }
  const DisplacementPrior& displacement_prior() const { return u_prior_; }
  const std::vector<StressPatch>& stress_patches() const { return patches_; }

  int n_elements() const { return mesh_.n_elements(); }
  int n_free() const { return mesh_.n_free(); }
  int n_stress() const { return mesh_.n_stress(); }

  const ElementOperators& element(int e) const { return ops_[e]; }
  std::span<const Incidence> incidence(int free_dof) const { return incidence_[free_dof]; }
  std::span<const int> observations_of(int free_dof) const { return obs_of_dof_[free_dof]; }

  // epsilon_e = B_e L_e u with prescribed values substituted.
  Eigen::Vector3d strain(int e, const Eigen::VectorXd& u_free) const;
  // C u: stacked E_e Dhat epsilon_e.
  Eigen::VectorXd model_stress(const Eigen::VectorXd& u_free, const Eigen::VectorXd& E) const;
  // ||Bhat^T sigma - f|| / (1 + ||f||)
  double constraint_residual(const Eigen::VectorXd& sigma) const;

 private:
  Mesh mesh_;
  ConstitutiveBase base_;
  Eigen::Matrix3d dhat_;
  ObservationSet obs_;
  Eigen::VectorXd f_;
  NoiseHyperprior noise_;
  DisplacementPrior u_prior_;
  std::vector<ElementOperators> ops_;
  std::vector<std::vector<Incidence>> incidence_;
  std::vector<std::vector<int>> obs_of_dof_;
  std::vector<StressPatch> patches_;
};

}  // namespace elastobayes
