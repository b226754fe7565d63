#include <doctest.h>

#include <cmath>
#include <set>

#include "lbd/errors.hpp"
#include "lbd/ode.hpp"
#include "lbd/robo.hpp"
#include "lbd/rng.hpp"
#include "oracles/lagrangian_oracle.hpp"

using namespace lbd;
using namespace lbd::robo;

namespace {

RobotSpec sample_rot(RobotKind kind, Rng& rng) {
  RobotSpec s;
  s.kind = kind;
  const int q = s.joints();
  s.mass.resize(q);
  s.length.resize(q);
  s.inertia.resize(q);
  s.com.resize(q);
  s.friction.resize(q);
  for (int i = 0; i < q; ++i) {
    s.mass[i] = rng.uniform(0.5, 2.0);
    s.length[i] = rng.uniform(0.5, 1.0);
    s.com[i] = 0.5 * s.length[i];
    s.inertia[i] = s.mass[i] * s.length[i] * s.length[i] / 12.0;
    s.friction[i] = rng.uniform(0.05, 0.2);
  }
  s.gravity = 9.81;
  return s;
}

RobotSpec sample_prismatic(Rng& rng) {
  RobotSpec s;
  s.kind = RobotKind::Prismatic2;
  s.mass.resize(2);
  s.length.resize(2);
  s.friction = Eigen::VectorXd::Zero(2);
  for (int i = 0; i < 2; ++i) {
    s.mass[i] = rng.uniform(0.5, 2.0);
    s.length[i] = rng.uniform(0.5, 1.0);
  }
  s.gravity = 9.81;
  return s;
}

Eigen::VectorXd random_state(int q, Rng& rng) {
  Eigen::VectorXd x(2 * q);
  for (int i = 0; i < q; ++i) x[i] = rng.uniform(-2.5, 2.5);
  for (int i = 0; i < q; ++i) x[q + i] = rng.uniform(-2.0, 2.0);
  return x;
}

}  // namespace

TEST_SUITE_BEGIN("robo");

TEST_CASE("rotational accelerations match the Lagrangian oracle") {
  for (auto kind : {RobotKind::Rotational2, RobotKind::Rotational3}) {
    Rng rng(kind == RobotKind::Rotational2 ? 21 : 22);
    const RobotSpec spec = sample_rot(kind, rng);
    const ArmDynamics dyn(lump_parameters(spec));
    const oracle::LagrangianArm lag(spec);
    const int q = spec.joints();
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd x = random_state(q, rng);
      Eigen::VectorXd tau(q);
      for (int i = 0; i < q; ++i) tau[i] = rng.uniform(-3.0, 3.0);
      const Eigen::VectorXd a1 = dyn.acceleration(x, tau);
      const Eigen::VectorXd a2 = lag.acceleration(x, tau);
      const double scale = std::max(1.0, a2.cwiseAbs().maxCoeff());
      CHECK((a1 - a2).cwiseAbs().maxCoeff() / scale < 1e-8);
    }
  }
}

TEST_CASE("upright rest is an equilibrium of the rotational models") {
  Rng rng(31);
  for (auto kind : {RobotKind::Rotational2, RobotKind::Rotational3}) {
    const RobotSpec spec = sample_rot(kind, rng);
    const ArmDynamics dyn(lump_parameters(spec));
    const Eigen::VectorXd x = dyn.home_state();
    const Eigen::VectorXd tau = Eigen::VectorXd::Zero(spec.joints());
    CHECK(dyn.acceleration(x, tau).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("inertia matrix is symmetric positive definite at random states") {
  Rng rng(33);
  for (auto kind : {RobotKind::Rotational2, RobotKind::Rotational3}) {
    const RobotSpec spec = sample_rot(kind, rng);
    const ArmDynamics dyn(lump_parameters(spec));
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd x = random_state(spec.joints(), rng);
      const Eigen::MatrixXd m = dyn.inertia(x.head(spec.joints()));
      CHECK((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("prismatic accelerations are the printed closed form") {
  Rng rng(35);
  const RobotSpec spec = sample_prismatic(rng);
  const ArmDynamics dyn(lump_parameters(spec));
  const Eigen::VectorXd x = random_state(2, rng);

  SUBCASE("free fall is exactly (-g, 0)") {
    const Eigen::VectorXd a = dyn.acceleration(x, Eigen::VectorXd::Zero(2));
    CHECK(a[0] == -spec.gravity);
    CHECK(a[1] == 0.0);
  }
  SUBCASE("force balance holds the arm") {
    Eigen::VectorXd tau(2);
    tau << spec.gravity * (spec.mass[0] + spec.mass[1]), 0.0;
    const Eigen::VectorXd a = dyn.acceleration(x, tau);
    CHECK(std::abs(a[0]) < 1e-12);
    CHECK(a[1] == 0.0);
  }
  SUBCASE("second joint sees tau2 / m2") {
    Eigen::VectorXd tau(2);
    tau << 0.0, 1.0;
    RobotSpec s2 = spec;
    s2.mass[1] = 2.0;
    const ArmDynamics d2(lump_parameters(s2));
    CHECK(d2.acceleration(x, tau)[1] == doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("forward kinematics hits the landmark configurations") {
  Rng rng(37);
  const RobotSpec spec = sample_rot(RobotKind::Rotational2, rng);
  const ArmDynamics dyn(lump_parameters(spec));

  Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  CHECK((dyn.tip_position(x.head(2)) -
         Eigen::Vector2d(0.0, spec.length[0] + spec.length[1]))
            .norm() < 1e-14);

  x[0] = x[1] = M_PI / 2.0;
  CHECK((dyn.tip_position(x.head(2)) -
         Eigen::Vector2d(spec.length[0] + spec.length[1], 0.0))
            .norm() < 1e-12);

  const RobotSpec pspec = sample_prismatic(rng);
  const ArmDynamics pdyn(lump_parameters(pspec));
  CHECK((pdyn.tip_position(Eigen::Vector2d::Zero()) -
         Eigen::Vector2d(pspec.length[1], pspec.length[0]))
            .norm() == 0.0);
}

TEST_CASE("observation inversion recovers the joint state exactly") {
  Rng rng(39);
  for (auto kind : {RobotKind::Rotational2, RobotKind::Rotational3, RobotKind::Prismatic2}) {
    const RobotSpec spec =
        kind == RobotKind::Prismatic2 ? sample_prismatic(rng) : sample_rot(kind, rng);
    const ArmDynamics dyn(lump_parameters(spec));
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd x = random_state(spec.joints(), rng);
      if (kind != RobotKind::Prismatic2)
        for (int i = 0; i < spec.joints(); ++i) x[i] = rng.uniform(-M_PI * 0.95, M_PI * 0.95);
      Eigen::VectorXd w, dw;
      Eigen::Vector2d z, dz;
      dyn.forward_kinematics(x, w, z, dw, dz);
      const Eigen::VectorXd back = dyn.state_from_observation(z, w, dz, dw);
      CHECK((back - x).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("tip velocities agree with finite differences of tip positions") {
  Rng rng(41);
  const RobotSpec spec = sample_rot(RobotKind::Rotational3, rng);
  const ArmDynamics dyn(lump_parameters(spec));
  const Eigen::VectorXd x = random_state(3, rng);
  Eigen::VectorXd w, dw;
  Eigen::Vector2d z, dz;
  dyn.forward_kinematics(x, w, z, dw, dz);

  const double h = 1e-6;
  Eigen::VectorXd xp = x;
  xp.head(3) += h * x.tail(3);
  const Eigen::Vector2d z2 = dyn.tip_position(xp.head(3));
  CHECK(((z2 - z) / h - dz).norm() < 1e-4);

  // Jacobian route gives the same velocity.
  CHECK((dyn.tip_jacobian(x.head(3)) * x.tail(3) - dz).norm() < 1e-12);
}

TEST_CASE("analytic linearization matches central differences") {
  Rng rng(43);
  for (auto kind : {RobotKind::Rotational2, RobotKind::Rotational3, RobotKind::Prismatic2}) {
    const RobotSpec spec =
        kind == RobotKind::Prismatic2 ? sample_prismatic(rng) : sample_rot(kind, rng);
    const ArmDynamics dyn(lump_parameters(spec));
    const int q = spec.joints();
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::VectorXd x = random_state(q, rng);
      Eigen::VectorXd tau(q);
      for (int i = 0; i < q; ++i) tau[i] = rng.uniform(-2.0, 2.0);

      Eigen::MatrixXd a, b;
      dyn.linearize(x, tau, a, b);

      auto f_state = [&](const Eigen::VectorXd& xs) {
        Eigen::VectorXd dx(2 * q);
        dyn.deriv(xs, tau, dx);
        return dx;
      };
      auto f_control = [&](const Eigen::VectorXd& ts) {
        Eigen::VectorXd dx(2 * q);
        dyn.deriv(x, ts, dx);
        return dx;
      };
      const Eigen::MatrixXd a_fd = ode::fd_jacobian(f_state, x);
      const Eigen::MatrixXd b_fd = ode::fd_jacobian(f_control, tau);
      const double sa = std::max(1.0, a_fd.cwiseAbs().maxCoeff());
      const double sb = std::max(1.0, b_fd.cwiseAbs().maxCoeff());
      CHECK((a - a_fd).cwiseAbs().maxCoeff() / sa < 1e-5);
      CHECK((b - b_fd).cwiseAbs().maxCoeff() / sb < 1e-5);
    }
  }
}

TEST_CASE("frictionless swings conserve energy; friction dissipates it") {
  Rng rng(45);
  RobotSpec spec = sample_rot(RobotKind::Rotational2, rng);
  spec.friction.setZero();
  const ArmDynamics dyn(lump_parameters(spec));

  Eigen::VectorXd x0(4);
  x0 << 2.2, -0.8, 0.0, 0.0;  // released from rest away from equilibrium
  auto rhs = [&](double, const Eigen::VectorXd& x, const Eigen::VectorXd&, Eigen::VectorXd& dx) {
    dyn.deriv(x, Eigen::VectorXd::Zero(2), dx);
  };
  ode::IntegrateOptions opt;
  opt.rtol = 1e-10;
  opt.atol = 1e-12;
  const auto grid = episode_grid();
  const auto traj = ode::integrate_grid(rhs, ode::ControlSignal::zero(0), nullptr, x0, grid, opt);

  const double e0 = dyn.energy(x0);
  for (const auto& x : traj.states)
    CHECK(std::abs(dyn.energy(x) - e0) < 1e-6 * std::max(1.0, std::abs(e0)));

  // With friction the energy is non-increasing at every grid step.
  RobotSpec damped = spec;
  damped.friction = Eigen::VectorXd::Constant(2, 0.15);
  const ArmDynamics ddyn(lump_parameters(damped));
  auto rhs_d = [&](double, const Eigen::VectorXd& x, const Eigen::VectorXd&, Eigen::VectorXd& dx) {
    ddyn.deriv(x, Eigen::VectorXd::Zero(2), dx);
  };
  const auto dtraj =
      ode::integrate_grid(rhs_d, ode::ControlSignal::zero(0), nullptr, x0, grid, opt);
  double prev = ddyn.energy(x0);
  for (std::size_t i = 1; i < dtraj.states.size(); ++i) {
    const double e = ddyn.energy(dtraj.states[i]);
    CHECK(e <= prev + 1e-6 * std::abs(prev));
    prev = e;
  }
}

TEST_CASE("system table has the published sharing structure") {
  const auto table = build_system_table(2024);
  REQUIRE(table.size() == 24);

  int rot2 = 0, rot3 = 0, prism = 0;
  for (const auto& sys : table) {
    if (sys.spec.kind == RobotKind::Rotational2) ++rot2;
    if (sys.spec.kind == RobotKind::Rotational3) ++rot3;
    if (sys.spec.kind == RobotKind::Prismatic2) ++prism;
  }
  CHECK(rot2 == 8);
  CHECK(rot3 == 8);
  CHECK(prism == 8);

  // Interface shared across the two theta groups of a family.
  CHECK((table[0].interface.A - table[4].interface.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((table[0].spec.mass - table[4].spec.mass).cwiseAbs().maxCoeff() > 0.0);
  // Same theta within a group.
  CHECK((table[0].spec.mass - table[1].spec.mass).cwiseAbs().maxCoeff() == 0.0);

  // Identity interfaces sit first in each family block.
  CHECK(table[0].interface.A.isIdentity(0.0));
  CHECK(table[8].interface.A.isIdentity(0.0));
  CHECK(table[16].interface.A.isIdentity(0.0));

  // Control dimensions per family: (q, q, q+1, 2q) pattern from the table.
  CHECK(table[1].interface.A.cols() == 2);
  CHECK(table[2].interface.A.cols() == 3);
  CHECK(table[3].interface.A.cols() == 4);
  CHECK(table[9].interface.A.cols() == 3);
  CHECK(table[10].interface.A.cols() == 4);
  CHECK(table[11].interface.A.cols() == 6);

  // Names encode the sharing structure.
  CHECK(table[0].name == "great-devious-beetle");
  CHECK(table[4].name == "rebel-devious-beetle");
  CHECK(table[23].name == "lush-proficient-bumblebee");

  // Row norms of each non-identity interface span one order of magnitude.
  for (const auto& sys : table) {
    if (sys.interface.A.isIdentity(0.0)) continue;
    Eigen::VectorXd norms = sys.interface.A.rowwise().norm();
    const double ratio = norms.maxCoeff() / norms.minCoeff();
    CHECK(ratio > 3.0);
    CHECK(ratio < 30.0);
    sys.interface.validate();
  }

  // Determinism.
  const auto again = build_system_table(2024);
  for (int i = 0; i < 24; ++i) {
    CHECK((again[i].interface.A - table[i].interface.A).cwiseAbs().maxCoeff() == 0.0);
    CHECK((again[i].spec.mass - table[i].spec.mass).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("targets live in the workspace and start at the tip") {
  const auto table = build_system_table(99);
  for (int idx : {0, 8, 16}) {
    const ArmDynamics dyn(lump_parameters(table[idx].spec));
    const Workspace ws = dyn.workspace();
    const auto target = generate_target(dyn, 99, table[idx].id, 0);
    REQUIRE(static_cast<int>(target.points.size()) == kGridPoints);
    CHECK((target.points[0] -
           dyn.tip_position(dyn.home_state().head(dyn.joints())))
              .norm() == 0.0);
    for (const auto& p : target.points) CHECK(ws.contains(p, 1e-9));

    const auto target2 = generate_target(dyn, 99, table[idx].id, 0);
    for (int i = 0; i < kGridPoints; ++i)
      CHECK((target.points[i] - target2.points[i]).norm() == 0.0);

    const auto variant = generate_target(dyn, 99, table[idx].id, 0, 1);
    double diff = 0.0;
    for (int i = 0; i < kGridPoints; ++i) diff += (target.points[i] - variant.points[i]).norm();
    CHECK(diff > 1e-6);
  }
}

TEST_CASE("invalid specs are rejected") {
  Rng rng(47);
  RobotSpec spec = sample_rot(RobotKind::Rotational2, rng);
  spec.mass[0] = -1.0;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec = sample_rot(RobotKind::Rotational2, rng);
  spec.com[1] = 2.0 * spec.length[1];
  CHECK_THROWS_AS(spec.validate(), ValidationError);
}

TEST_SUITE_END();
