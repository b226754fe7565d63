#pragma once

// Independent derivation of the rotational arm dynamics from the Lagrangian:
// the inertia matrix is assembled from link Jacobians, Coriolis terms come
// from Christoffel symbols of the analytically differentiated inertia, and
// gravity from the potential's gradient. No formula is shared with
// lbd::robo::ArmDynamics, which encodes the closed-form coefficient tables.

#include <Eigen/Dense>
#include <cmath>

#include "lbd/robo.hpp"

namespace oracle {

class LagrangianArm {
 public:
  explicit LagrangianArm(const lbd::robo::RobotSpec& spec) : spec_(spec), q_(spec.joints()) {}

  Eigen::MatrixXd com_jacobian(int link, const Eigen::VectorXd& theta) const {
    Eigen::MatrixXd jv = Eigen::MatrixXd::Zero(2, q_);
    for (int j = 0; j <= link; ++j) {
      const double len = (j == link) ? spec_.com[j] : spec_.length[j];
      jv(0, j) = len * std::cos(theta[j]);
      jv(1, j) = -len * std::sin(theta[j]);
    }
    return jv;
  }

  Eigen::MatrixXd com_jacobian_dtheta(int link, const Eigen::VectorXd& theta, int k) const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, q_);
    if (k <= link) {
      const double len = (k == link) ? spec_.com[k] : spec_.length[k];
      d(0, k) = -len * std::sin(theta[k]);
      d(1, k) = -len * std::cos(theta[k]);
    }
    return d;
  }

  Eigen::MatrixXd inertia(const Eigen::VectorXd& theta) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(q_, q_);
    for (int link = 0; link < q_; ++link) {
      const Eigen::MatrixXd jv = com_jacobian(link, theta);
      m += spec_.mass[link] * jv.transpose() * jv;
      m(link, link) += spec_.inertia[link];
    }
    return m;
  }

  Eigen::MatrixXd inertia_dtheta(const Eigen::VectorXd& theta, int k) const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(q_, q_);
    for (int link = 0; link < q_; ++link) {
      const Eigen::MatrixXd jv = com_jacobian(link, theta);
      const Eigen::MatrixXd djv = com_jacobian_dtheta(link, theta, k);
      d += spec_.mass[link] * (djv.transpose() * jv + jv.transpose() * djv);
    }
    return d;
  }

  Eigen::VectorXd gravity(const Eigen::VectorXd& theta) const {
    // V = sum_l m_l g y_com(l); returns dV/dtheta.
    Eigen::VectorXd g = Eigen::VectorXd::Zero(q_);
    for (int link = 0; link < q_; ++link)
      for (int j = 0; j <= link; ++j) {
        const double len = (j == link) ? spec_.com[j] : spec_.length[j];
        g[j] -= spec_.mass[link] * spec_.gravity * len * std::sin(theta[j]);
      }
    return g;
  }

  Eigen::VectorXd acceleration(const Eigen::VectorXd& state, const Eigen::VectorXd& tau) const {
    const Eigen::VectorXd theta = state.head(q_);
    const Eigen::VectorXd omega = state.tail(q_);

    std::vector<Eigen::MatrixXd> dm(q_);
    for (int k = 0; k < q_; ++k) dm[k] = inertia_dtheta(theta, k);

    // Christoffel symbols of the first kind.
    Eigen::VectorXd coriolis = Eigen::VectorXd::Zero(q_);
    for (int i = 0; i < q_; ++i)
      for (int j = 0; j < q_; ++j)
        for (int k = 0; k < q_; ++k) {
          const double c = 0.5 * (dm[k](i, j) + dm[j](i, k) - dm[i](j, k));
          coriolis[i] += c * omega[j] * omega[k];
        }

    const Eigen::VectorXd friction = spec_.friction.cwiseProduct(omega);
    const Eigen::MatrixXd m = inertia(theta);
    return m.ldlt().solve(tau - coriolis - gravity(theta) - friction);
  }

 private:
  lbd::robo::RobotSpec spec_;
  int q_;
};

}  // namespace oracle
