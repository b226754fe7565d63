#include "lbd/control.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "lbd/errors.hpp"

namespace lbd::control {

LqrGain lqr_design(const Eigen::MatrixXd& state_jac, const Eigen::MatrixXd& control_jac,
                   const Eigen::MatrixXd& q_weight, const Eigen::MatrixXd& r_weight, double dt,
                   const Eigen::MatrixXd* warm_start) {
  const int n = static_cast<int>(state_jac.rows());
  const int m = static_cast<int>(control_jac.cols());
  if (state_jac.cols() != n || control_jac.rows() != n)
    throw ValidationError("lqr_design: inconsistent state/control Jacobian shapes");
  if (!(dt > 0)) throw ValidationError("lqr_design: dt must be positive");

  // Exact zero-order-hold discretization through the augmented exponential.
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = state_jac;
  aug.topRightCorner(n, m) = control_jac;
  const Eigen::MatrixXd expm = (aug * dt).exp();

  LqrGain g;
  g.Ad = expm.topLeftCorner(n, n);
  g.Bd = expm.topRightCorner(n, m);
  g.Q = q_weight;
  g.R = r_weight;

  Eigen::MatrixXd p = warm_start ? *warm_start : q_weight;
  constexpr int kMaxIters = 10000;
  bool converged = false;
  for (int it = 0; it < kMaxIters; ++it) {
    const Eigen::MatrixXd btp = g.Bd.transpose() * p;
    const Eigen::MatrixXd s = g.R + btp * g.Bd;
    const Eigen::MatrixXd k = s.ldlt().solve(btp * g.Ad);
    Eigen::MatrixXd p_next =
        g.Q + g.Ad.transpose() * p * g.Ad - (btp * g.Ad).transpose() * k;
    p_next = 0.5 * (p_next + p_next.transpose());  // the recursion drifts without this
    const double change = (p_next - p).norm();
    const double scale = std::max(1.0, p_next.norm());
    p = p_next;
    if (!p.allFinite() || p.norm() > 1e14)
      throw DesignError("lqr_design: Riccati recursion diverged (uncontrollable pair?)");
    if (change < 1e-10 * scale) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw DesignError("lqr_design: Riccati recursion did not converge within 10^4 sweeps");

  g.P = p;
  const Eigen::MatrixXd btp = g.Bd.transpose() * g.P;
  g.K = (g.R + btp * g.Bd).ldlt().solve(btp * g.Ad);
  return g;
}

double dare_residual(const LqrGain& g) {
  const Eigen::MatrixXd btp = g.Bd.transpose() * g.P;
  const Eigen::MatrixXd s = g.R + btp * g.Bd;
  const Eigen::MatrixXd res = g.Ad.transpose() * g.P * g.Ad - g.P -
                              (btp * g.Ad).transpose() * s.ldlt().solve(btp * g.Ad) + g.Q;
  return res.operatorNorm();
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Eigen::VectorXd inv = sv;
  const double cutoff = tol * std::max(1.0, sv[0]);
  for (Eigen::Index i = 0; i < sv.size(); ++i) inv[i] = sv[i] > cutoff ? 1.0 / sv[i] : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

ModelLqrController::ModelLqrController(robo::ArmParams model, Eigen::MatrixXd interface,
                                       LqrWeights weights)
    : model_(std::move(model)),
      interface_(std::move(interface)),
      interface_pinv_(pseudo_inverse(interface_)),
      weights_(weights) {}

void ModelLqrController::begin_episode(const EpisodeContext& ctx) {
  control_dim_ = ctx.control_dim;
  riccati_warm_.reset();
  prev_target_.reset();
}

ControllerReply ModelLqrController::query(const ControllerQuery& q, double) {
  const int nq = model_.joints();
  const Eigen::VectorXd x = model_.state_from_observation(q.z, q.w, q.dz, q.dw);
  const Eigen::VectorXd theta = x.head(nq);

  const Eigen::VectorXd tau_ff = model_.bias(x);

  Eigen::MatrixXd a, b;
  model_.linearize(x, tau_ff, a, b);

  const Eigen::MatrixXd jac = model_.tip_jacobian(theta);
  const Eigen::MatrixXd metric =
      jac.transpose() * jac + weights_.regularizer * Eigen::MatrixXd::Identity(nq, nq);
  Eigen::MatrixXd q_weight = Eigen::MatrixXd::Zero(2 * nq, 2 * nq);
  q_weight.topLeftCorner(nq, nq) = weights_.position * metric;
  q_weight.bottomRightCorner(nq, nq) = weights_.velocity * metric;
  const Eigen::MatrixXd r_weight = weights_.effort * Eigen::MatrixXd::Identity(nq, nq);

  LqrGain gain;
  try {
    gain = lqr_design(a, b, q_weight, r_weight, robo::kDt,
                      riccati_warm_ ? &*riccati_warm_ : nullptr);
  } catch (const DesignError&) {
    return {true, Eigen::VectorXd::Zero(control_dim_)};  // logged as a zero step by the harness
  }
  riccati_warm_ = gain.P;

  // Joint-space reference from the Cartesian target via damped least squares.
  const Eigen::Vector2d tip = model_.tip_position(theta);
  const Eigen::MatrixXd jjt = jac * jac.transpose() +
                              weights_.ik_damping * weights_.ik_damping *
                                  Eigen::MatrixXd::Identity(2, 2);
  const Eigen::LLT<Eigen::MatrixXd> jjt_llt(jjt);
  const Eigen::VectorXd dtheta = jac.transpose() * jjt_llt.solve(q.target_next - tip);
  const Eigen::Vector2d target_prev = prev_target_ ? *prev_target_ : tip;
  const Eigen::VectorXd omega_ref =
      jac.transpose() * jjt_llt.solve((q.target_next - target_prev) / robo::kDt);
  prev_target_ = q.target_next;

  Eigen::VectorXd x_ref(2 * nq);
  x_ref.head(nq) = theta + dtheta;
  x_ref.tail(nq) = omega_ref;

  const Eigen::VectorXd tau = tau_ff + gain.K * (x_ref - x);
  return {true, interface_pinv_ * tau};
}

std::unique_ptr<Controller> make_oracle_lqr(const robo::RobotSystem& system, LqrWeights weights) {
  return std::make_unique<ModelLqrController>(robo::lump_parameters(system.spec),
                                              system.interface.A, weights);
}

std::unique_ptr<Controller> make_zero_controller() { return std::make_unique<ZeroController>(); }

}  // namespace lbd::control
