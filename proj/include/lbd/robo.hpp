#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "lbd/ode.hpp"
#include "lbd/rng.hpp"

namespace lbd::robo {

enum class RobotKind { Rotational2, Rotational3, Prismatic2 };

std::string kind_name(RobotKind k);
RobotKind kind_from_name(const std::string& name);

/// Physical description of one arm. Rotational joints: angles are measured
/// from the vertical axis, gravity acts along -y, and the zero configuration
/// points straight up. Prismatic joints: link 1 extends along +y from the
/// base, link 2 along +x from the top of link 1; theta is the extension
/// beyond the rest length.
struct RobotSpec {
  RobotKind kind = RobotKind::Rotational2;
  Eigen::VectorXd mass;       // m_i (kg)
  Eigen::VectorXd inertia;    // J_i (kg m^2), rotational kinds
  Eigen::VectorXd length;     // L_i (m); prismatic: rest lengths q_i
  Eigen::VectorXd com;        // l_i (m), rotational kinds
  Eigen::VectorXd friction;   // c_i
  double gravity = 9.81;

  int joints() const;
  void validate() const;
};

/// Lumped coefficients the dynamics actually use. True systems derive them
/// from a RobotSpec; fitted models construct them directly, which is why the
/// control law and the simulator share this type.
struct ArmParams {
  RobotKind kind = RobotKind::Rotational2;
  Eigen::MatrixXd mass_coeff;     // rot: symmetric Mc with M(i,j) = Mc(i,j) cos(th_j - th_i); prismatic: diag(m1+m2, m2)
  Eigen::VectorXd gravity_coeff;  // rot: Nc with N_i = Nc_i sin(th_i); prismatic: unused
  Eigen::VectorXd friction;
  Eigen::VectorXd lengths;        // rot: link lengths (FK); prismatic: rest lengths (FK offsets)
  double gravity_accel = 9.81;    // prismatic only: joint-1 acceleration offset

  int joints() const { return static_cast<int>(mass_coeff.rows()); }
};

ArmParams lump_parameters(const RobotSpec& spec);

/// Reachable tip positions, used for target synthesis.
struct Workspace {
  bool annulus = true;  // rotational: annulus around the base; prismatic: box
  double r_min = 0.0, r_max = 0.0;
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;

  bool contains(const Eigen::Vector2d& p, double slack = 1e-9) const;
  Eigen::Vector2d clamp(const Eigen::Vector2d& p) const;
  Eigen::Vector2d sample_interior(Rng& rng, double margin) const;
};

/// Second-order arm dynamics over state x = [joint coords; joint velocities].
class ArmDynamics {
 public:
  explicit ArmDynamics(ArmParams params);

  const ArmParams& params() const { return params_; }
  RobotKind kind() const { return params_.kind; }
  int joints() const { return nq_; }
  int state_dim() const { return 2 * nq_; }
  /// Number of interior joints reported in observations (d).
  int interior_joints() const { return nq_ - 1; }

  Eigen::MatrixXd inertia(const Eigen::VectorXd& theta) const;
  /// C(theta, omega) omega + N(theta, omega): the torque that tau must match
  /// for zero acceleration.
  Eigen::VectorXd bias(const Eigen::VectorXd& state) const;

  Eigen::VectorXd acceleration(const Eigen::VectorXd& state, const Eigen::VectorXd& tau) const;
  /// First-order derivative [omega; alpha].
  void deriv(const Eigen::VectorXd& state, const Eigen::VectorXd& tau,
             Eigen::Ref<Eigen::VectorXd> dx) const;

  /// Analytic linearization of the first-order system at (state, tau):
  /// d(dx)/d(state) and d(dx)/d(tau).
  void linearize(const Eigen::VectorXd& state, const Eigen::VectorXd& tau,
                 Eigen::MatrixXd& state_jac, Eigen::MatrixXd& control_jac) const;

  /// Joint positions: W holds interior joints, Z the tip.
  void forward_kinematics(const Eigen::VectorXd& state, Eigen::VectorXd& w, Eigen::Vector2d& z,
                          Eigen::VectorXd& dw, Eigen::Vector2d& dz) const;
  Eigen::Vector2d tip_position(const Eigen::VectorXd& theta) const;
  Eigen::MatrixXd tip_jacobian(const Eigen::VectorXd& theta) const;

  /// Joint state recovered exactly from a Cartesian observation.
  Eigen::VectorXd state_from_observation(const Eigen::Vector2d& z, const Eigen::VectorXd& w,
                                         const Eigen::Vector2d& dz,
                                         const Eigen::VectorXd& dw) const;

  /// Total mechanical energy (kinetic + potential).
  double energy(const Eigen::VectorXd& state) const;

  Workspace workspace() const;
  /// Rest pose episodes start from: rotational arms hang straight down
  /// (theta_i = pi under the from-vertical angle convention, the stable
  /// equilibrium), prismatic arms sit at zero extension.
  Eigen::VectorXd home_state() const;

 private:
  ArmParams params_;
  int nq_;
};

/// Linear interface C = A U from abstract controls to latent actuation.
struct InterfaceMap {
  Eigen::MatrixXd A;  // q x p, full rank q, p >= q

  int latent_dim() const { return static_cast<int>(A.rows()); }
  int control_dim() const { return static_cast<int>(A.cols()); }
  void validate() const;

  static InterfaceMap identity(int q);
  static InterfaceMap random(int q, int p, Rng& rng);
};

struct RobotSystem {
  int id = 0;  // 1-based position in the table
  std::string name;
  RobotSpec spec;
  InterfaceMap interface;
};

/// The 24-system table: three dynamics families, each crossed as
/// 2 parameter vectors x 4 interfaces (identity, square, and two wide ones).
std::vector<RobotSystem> build_system_table(std::uint64_t seed);

/// Control grid shared by episodes and training data: t_l = l / 100.
inline constexpr int kGridPoints = 201;
inline constexpr int kSteps = 200;
inline constexpr double kDt = 0.01;
inline constexpr double kHorizon = 2.0;

std::vector<double> episode_grid();

/// Target tip positions on the episode grid.
struct TargetProcess {
  std::vector<Eigen::Vector2d> points;  // kGridPoints entries

  const Eigen::Vector2d& at(int step) const { return points[static_cast<std::size_t>(step)]; }
};

/// Smooth in-workspace curve starting at the arm's initial tip position.
/// `variant` selects an independent draw for the same (seed, index), which is
/// how degenerate targets get regenerated.
TargetProcess generate_target(const ArmDynamics& dyn, std::uint64_t seed, int system_id,
                              int target_index, int variant = 0);

}  // namespace lbd::robo
