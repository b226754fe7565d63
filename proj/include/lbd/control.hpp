#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>

#include "lbd/robo.hpp"

namespace lbd::control {

/// Discrete-time LQR gain plus the data it was designed from.
struct LqrGain {
  Eigen::MatrixXd K;   // u = -K (x - x_ref)
  Eigen::MatrixXd P;   // Riccati fixed point
  Eigen::MatrixXd Ad;  // discretized dynamics
  Eigen::MatrixXd Bd;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
};

/// Discretizes (A, B) exactly over one step of length dt and iterates the
/// discrete Riccati recursion to its fixed point (relative change < 1e-10,
/// at most 10^4 sweeps). warm_start, when given, seeds the iteration.
LqrGain lqr_design(const Eigen::MatrixXd& state_jac, const Eigen::MatrixXd& control_jac,
                   const Eigen::MatrixXd& q_weight, const Eigen::MatrixXd& r_weight, double dt,
                   const Eigen::MatrixXd* warm_start = nullptr);

/// Residual of the discrete algebraic Riccati equation at P.
double dare_residual(const LqrGain& gain);

/// Episode metadata shared with controllers (the handshake payload).
struct EpisodeContext {
  int system_id = 0;
  int control_dim = 0;    // p
  int interior_joints = 0;  // d
  int steps = robo::kSteps;
  double dt = robo::kDt;
};

struct ControllerQuery {
  int step = 0;
  double t = 0.0;
  Eigen::Vector2d z;
  Eigen::VectorXd w;
  Eigen::Vector2d dz;
  Eigen::VectorXd dw;
  Eigen::Vector2d target_next;
};

struct ControllerReply {
  bool ok = false;  // false: timeout or malformed; the harness substitutes U = 0
  Eigen::VectorXd u;
};

/// A closed-loop controller driven one query per grid step. Implementations
/// are single-threaded per episode; distinct instances may run concurrently.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual void begin_episode(const EpisodeContext& ctx) { (void)ctx; }
  virtual ControllerReply query(const ControllerQuery& q, double budget_ms) = 0;
  virtual void end_episode() {}
};

class ZeroController final : public Controller {
 public:
  void begin_episode(const EpisodeContext& ctx) override { dim_ = ctx.control_dim; }
  ControllerReply query(const ControllerQuery&, double) override {
    return {true, Eigen::VectorXd::Zero(dim_)};
  }

 private:
  int dim_ = 0;
};

struct LqrWeights {
  double position = 1.0;
  double velocity = 0.05;
  double effort = 1e-3;       // R = effort * I
  double regularizer = 1e-6;  // keeps the pulled-back metric positive definite
  double ik_damping = 1e-3;   // damped least squares near singular Jacobians
};

/// Tracks the target with gain-scheduled LQR: at every step it compensates the
/// model's bias torque, re-linearizes, designs a discrete gain under the
/// Jacobian-pulled-back Cartesian metric, and maps the latent torque through
/// the pseudo-inverse of the interface. With the true model this is the
/// oracle; with a fitted model it is the system-id baseline.
class ModelLqrController final : public Controller {
 public:
  ModelLqrController(robo::ArmParams model, Eigen::MatrixXd interface,
                     LqrWeights weights = LqrWeights{});

  void begin_episode(const EpisodeContext& ctx) override;
  ControllerReply query(const ControllerQuery& q, double budget_ms) override;

 private:
  robo::ArmDynamics model_;
  Eigen::MatrixXd interface_;
  Eigen::MatrixXd interface_pinv_;
  LqrWeights weights_;
  std::optional<Eigen::MatrixXd> riccati_warm_;
  std::optional<Eigen::Vector2d> prev_target_;
  int control_dim_ = 0;
};

/// Oracle: the true dynamics and the true interface map.
std::unique_ptr<Controller> make_oracle_lqr(const robo::RobotSystem& system,
                                            LqrWeights weights = LqrWeights{});

std::unique_ptr<Controller> make_zero_controller();

/// Minimum-norm right inverse (Moore-Penrose for full row rank).
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, double tol = 1e-12);

}  // namespace lbd::control
