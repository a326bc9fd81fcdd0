#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "elastobayes/boundary.hpp"
#include "elastobayes/forward.hpp"
#include "elastobayes/mesh.hpp"
#include "elastobayes/noise.hpp"
#include "elastobayes/problem.hpp"

namespace elastobayes {

struct Ellipse {
  Eigen::Vector2d center;
  Eigen::Vector2d semi_axes;  // along x, along y

  bool contains(const Eigen::Vector2d& p) const;
};

struct Rectangle {
  Eigen::Vector2d lo;
  Eigen::Vector2d hi;

  bool contains(const Eigen::Vector2d& p) const;
};

// Per-element constitutive truth. E is NaN on anisotropic elements.
struct GroundTruth {
  std::vector<Eigen::Matrix3d> D;
  Eigen::VectorXd E;
  std::vector<Ellipse> ellipses;    // circles have equal semi-axes
  std::vector<Rectangle> rectangles;

  bool isotropic(int e) const { return std::isfinite(E(e)); }
};

inline constexpr double kInclusionModulus = 5.0;
inline constexpr double kBackgroundModulus = 1.0;

// Two axis-aligned elliptical inclusions centred at (0.25, 0.25) and (0.75, 0.75).
std::vector<Ellipse> example1_inclusions();
// Circular inclusion of radius 0.2 around (0.5, 0.5).
Ellipse example2_inclusion();
Rectangle example2_corner();
Eigen::Matrix3d example2_corner_matrix();

GroundTruth example1_field(const Mesh& mesh, const Eigen::Matrix3d& dhat);
GroundTruth example2_field(const Mesh& mesh, const Eigen::Matrix3d& dhat);
GroundTruth example_field(int example, const Mesh& mesh, const Eigen::Matrix3d& dhat);

// Tractions applied wall by wall; rebuilt on every mesh that needs them.
using WallLoads = std::vector<std::pair<Wall, Eigen::Vector2d>>;
BoundaryData wall_boundary_data(const Mesh& mesh, const WallLoads& loads);

// Wall loading of the unit square: normal displacements on the walls that have
// a value, plus wall tractions. With `measured_top_reaction` the data mesh keeps
// u_y = top_uy on the top wall while the inversion mesh leaves it free, observes
// it, and carries the data-mesh reaction there as an applied force.
struct LoadCase {
  std::optional<double> right_ux = 1.0;
  std::optional<double> top_uy = 1.0;
  WallLoads loads;
  bool measured_top_reaction = false;

  DirichletRule data_rule() const { return wall_normal_dirichlet(right_ux, top_uy); }
  DirichletRule inversion_rule() const {
    return wall_normal_dirichlet(right_ux, measured_top_reaction ? std::nullopt : top_uy);
  }
};

// u_x = 1 on the right and u_y = 1 on the top; f = 0.
LoadCase displacement_loading();
// displacement_loading() for the data, with the top-wall reaction measured.
LoadCase reaction_loading();
// u_x = 1 on the right, top wall under the uniform traction t_y = 2 that a
// homogeneous unit-modulus body needs to reach u_y = 1 there.
LoadCase traction_loading();
// "displacement", "reaction" or "traction".
LoadCase load_case(const std::string& name);

// Nodal reactions K u - f_ext on every DOF of `mesh` (zero on free DOFs up to
// the solver residual).
Eigen::VectorXd nodal_reactions(const Mesh& mesh, std::span<const Eigen::Matrix3d> D,
                                const Eigen::VectorXd& u_full, const Eigen::VectorXd& f_ext_full,
                                Integration rule);

// Lumps the y-reactions of the top-wall nodes of `fine` onto the top-wall nodes
// of `coarse` with piecewise-linear weights along the wall. Returns a full
// coarse DOF vector.
Eigen::VectorXd lump_top_reaction(const Mesh& fine, const Eigen::VectorXd& reaction_full,
                                  const Mesh& coarse);

struct Dataset {
  ObservationSet observations;
  Eigen::VectorXd f;             // inversion-mesh free force
  Eigen::VectorXd u_clean;       // inversion-mesh free DOFs before noise
  Eigen::VectorXd fine_u;        // full fine-mesh displacement
  Eigen::VectorXd stress;        // fine stresses averaged per inversion element
  double noise_std = 0.0;
};

// Forward solve on `fine`, interpolation to the free DOFs of `inversion`, and
// additive noise at `snr_db`. All free DOFs are observed.
// `fine` must be built with load.data_rule() and `inversion` with
// load.inversion_rule().
Dataset make_dataset(const GroundTruth& truth_on_fine, const Mesh& fine, const Mesh& inversion,
                     const LoadCase& load, double snr_db, Rng& rng,
                     Integration rule = Integration::SelectiveReduced);

// Mean of fine element stresses over the fine centroids contained in each
// coarse element.
Eigen::VectorXd restrict_element_stress(const Mesh& fine, const Eigen::VectorXd& fine_stress,
                                        const Mesh& coarse);

}  // namespace elastobayes
