#include <doctest.h>

#include <array>
#include <cmath>

#include "lbd/errors.hpp"
#include "lbd/kinetics.hpp"
#include "lbd/ode.hpp"
#include "lbd/rng.hpp"
#include "oracles/euler_oracle.hpp"

using namespace lbd;
using namespace lbd::ode;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
  return g;
}

}  // namespace

TEST_SUITE_BEGIN("ode");

TEST_CASE("impulse on a zero field integrates to the closed form") {
  const Eigen::VectorXd u = (Eigen::VectorXd(2) << 1.5, -0.5).finished();
  auto rhs = [](double, const Eigen::VectorXd&, const Eigen::VectorXd& c, Eigen::VectorXd& dx) {
    dx = c;
  };
  const Eigen::VectorXd x0 = (Eigen::VectorXd(2) << 1.0, 2.0).finished();
  const auto grid = linspace(0.0, 6.0, 13);
  const auto traj = integrate_grid(rhs, ControlSignal::impulse(u, 0.0, 3.0), nullptr, x0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Eigen::VectorXd expect = x0 + u * std::min(grid[i], 3.0);
    CHECK((traj.states[i] - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("scalar decay hits the analytic solution") {
  auto rhs = [](double, const Eigen::VectorXd& x, const Eigen::VectorXd&, Eigen::VectorXd& dx) {
    dx = -x;
  };
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(1);
  IntegrateOptions opt;
  opt.rtol = 1e-10;
  const auto traj =
      integrate_grid(rhs, ControlSignal::zero(0), nullptr, x0, {0.0, 1.0}, opt);
  CHECK(traj.states[1][0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("CRN integration matches the fixed-step Euler oracle") {
  Rng rng(101);
  std::array<double, 10> k{};
  for (double& v : k) v = rng.log_uniform(0.1, 2.0);
  const auto net = kinetics::competition_network(k);
  const auto field = kinetics::mass_action_compile(net);

  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(15);
  auto rhs = [&](double, const Eigen::VectorXd& x, const Eigen::VectorXd&, Eigen::VectorXd& dx) {
    field.eval(x, dx);
  };
  IntegrateOptions opt;
  opt.rtol = 1e-9;
  const auto grid = linspace(0.0, 80.0, 81);
  const auto traj = integrate_grid(rhs, ControlSignal::zero(0), nullptr, x0, grid, opt);

  const double dt = 1e-5;
  const auto euler = oracle::euler_network(net, x0, dt, 8'000'000, 100'000);
  REQUIRE(euler.size() == 81);
  double max_rel = 0.0;
  for (int i = 0; i < 81; ++i)
    for (int s = 0; s < 15; ++s) {
      const double scale = std::max({std::abs(euler[i][s]), std::abs(traj.states[i][s]), 1e-3});
      max_rel = std::max(max_rel, std::abs(euler[i][s] - traj.states[i][s]) / scale);
    }
  CHECK(max_rel < 1e-4);
}

TEST_CASE("conservation is transported along zero-control CRN runs") {
  Rng rng(77);
  std::array<double, 10> k{};
  for (double& v : k) v = rng.log_uniform(0.1, 2.0);
  const auto net = kinetics::competition_network(k);
  const auto field = kinetics::mass_action_compile(net);
  const auto laws = kinetics::conservation_laws(net);
  REQUIRE(!laws.empty());

  Eigen::VectorXd x0(15);
  for (int s = 0; s < 15; ++s) x0[s] = rng.uniform(0.5, 2.0);
  auto rhs = [&](double, const Eigen::VectorXd& x, const Eigen::VectorXd&, Eigen::VectorXd& dx) {
    field.eval(x, dx);
  };
  IntegrateOptions opt;
  opt.rtol = 1e-9;
  const auto traj =
      integrate_grid(rhs, ControlSignal::zero(0), nullptr, x0, linspace(0.0, 80.0, 81), opt);
  for (const auto& v : laws) {
    const double v0 = v.cast<double>().dot(x0);
    const double scale = std::max(1.0, v.cast<double>().cwiseAbs().dot(x0));
    for (const auto& x : traj.states)
      CHECK(std::abs(v.cast<double>().dot(x) - v0) < 1e-6 * scale);
  }
}

TEST_CASE("halving the tolerance moves the solution by at most 10x tol") {
  std::array<double, 10> k{};
  k.fill(0.9);
  const auto field = kinetics::mass_action_compile(kinetics::competition_network(k));
  auto rhs = [&](double, const Eigen::VectorXd& x, const Eigen::VectorXd&, Eigen::VectorXd& dx) {
    field.eval(x, dx);
  };
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(15);
  const auto grid = linspace(0.0, 40.0, 41);
  for (double tol : {1e-6, 1e-8}) {
    IntegrateOptions a, b;
    a.rtol = tol;
    b.rtol = tol / 2.0;
    const auto ta = integrate_grid(rhs, ControlSignal::zero(0), nullptr, x0, grid, a);
    const auto tb = integrate_grid(rhs, ControlSignal::zero(0), nullptr, x0, grid, b);
    for (int i = 0; i < 41; ++i) {
      const double scale = std::max(1.0, tb.states[i].cwiseAbs().maxCoeff());
      CHECK((ta.states[i] - tb.states[i]).cwiseAbs().maxCoeff() < 10.0 * tol * scale);
    }
  }
}

TEST_CASE("integration is additive in the control when the field is zero") {
  auto rhs = [](double, const Eigen::VectorXd&, const Eigen::VectorXd& c, Eigen::VectorXd& dx) {
    dx = c;
  };
  Rng rng(5);
  Eigen::VectorXd u1(1), u2(1);
  u1 << rng.uniform(-2, 2);
  u2 << rng.uniform(-2, 2);
  const auto grid = linspace(0.0, 5.0, 26);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  const auto t1 = integrate_grid(rhs, ControlSignal::impulse(u1, 0.0, 2.0), nullptr, x0, grid);
  const auto t2 = integrate_grid(rhs, ControlSignal::impulse(u2, 1.0, 4.0), nullptr, x0, grid);

  std::vector<double> pts{0.0, 1.0, 2.0, 4.0, 5.0};
  std::vector<Eigen::VectorXd> vals;
  // Sum of the two impulses as an explicit piecewise signal.
  vals.push_back(u1);
  vals.push_back(u1 + u2);
  vals.push_back(u2);
  vals.push_back(Eigen::VectorXd::Zero(1));
  const auto ts = integrate_grid(rhs, ControlSignal::piecewise(pts, vals), nullptr, x0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(ts.states[i][0] - (t1.states[i][0] + t2.states[i][0])) < 1e-12);
}

TEST_CASE("restarting at the impulse edge equals split integration") {
  std::array<double, 10> k{};
  k.fill(1.1);
  const auto field = kinetics::mass_action_compile(kinetics::competition_network(k));
  Eigen::MatrixXd mixing = Eigen::MatrixXd::Zero(15, 8);
  Rng rng(9);
  for (int i = 0; i < 15; ++i) mixing(i, i % 8) = rng.uniform(0.5, 1.5);
  Eigen::VectorXd u(8);
  for (int i = 0; i < 8; ++i) u[i] = rng.uniform(-0.3, 0.3);

  auto rhs = [&](double, const Eigen::VectorXd& x, const Eigen::VectorXd& c, Eigen::VectorXd& dx) {
    field.eval(x, dx);
    dx += c;
  };
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(15);
  const auto grid = linspace(0.0, 10.0, 11);
  const auto whole =
      integrate_grid(rhs, ControlSignal::impulse(u, 0.0, 3.0), &mixing, x0, grid);

  // Split at the impulse edge, then continue control-free.
  const auto part1 = integrate_grid(rhs, ControlSignal::impulse(u, 0.0, 3.0), &mixing, x0,
                                    linspace(0.0, 3.0, 4));
  const auto part2 = integrate_grid(rhs, ControlSignal::zero(8), &mixing, part1.states.back(),
                                    linspace(3.0, 10.0, 8));
  for (int i = 0; i <= 3; ++i)
    CHECK((whole.states[i] - part1.states[i]).cwiseAbs().maxCoeff() < 1e-12);
  for (int i = 3; i <= 10; ++i)
    CHECK((whole.states[i] - part2.states[i - 3]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("divergence raises an error carrying the failure time") {
  auto rhs = [](double, const Eigen::VectorXd& x, const Eigen::VectorXd&, Eigen::VectorXd& dx) {
    dx = x.array().square().matrix();  // blows up at t = 1/x0
  };
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 2.0);
  try {
    integrate_grid(rhs, ControlSignal::zero(0), nullptr, x0, {0.0, 2.0});
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.time > 0.2);
    CHECK(e.time < 1.2);
  } catch (const StiffnessError& e) {
    CHECK(e.time > 0.2);
    CHECK(e.time < 1.2);
  }
}

TEST_CASE("windowed RMS: constant and ramp oracles") {
  Trajectory traj;
  const int n = 1001;
  for (int i = 0; i < n; ++i) {
    traj.times.push_back(i * 1e-3);
    traj.states.push_back(Eigen::VectorXd::Constant(1, i * 1e-3));
  }
  // Z(t) = t on [0,1]: closed form sqrt(il t^2 dt) = sqrt(1/3).
  CHECK(windowed_rms(traj, 0, 0.0, 0.0, 1.0) ==
        doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-4));

  Trajectory flat;
  for (int i = 0; i <= 40; ++i) {
    flat.times.push_back(static_cast<double>(i));
    flat.states.push_back(Eigen::VectorXd::Constant(1, 2.5));
  }
  CHECK(windowed_rms(flat, 0, 2.5, 10.0, 30.0) == 0.0);
  CHECK(windowed_rms(flat, 0, 1.5, 10.0, 30.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(windowed_rms(flat, 0, 0.0, -1.0, 30.0), ValidationError);
}

TEST_CASE("trajectory CSV round-trips") {
  Trajectory traj;
  Rng rng(4);
  for (int i = 0; i < 5; ++i) {
    traj.times.push_back(i * 0.37);
    Eigen::VectorXd x(3);
    for (int s = 0; s < 3; ++s) x[s] = rng.normal();
    traj.states.push_back(x);
    Eigen::VectorXd u(2);
    u << rng.uniform(), rng.uniform();
    traj.controls.push_back(u);
  }
  const auto back = Trajectory::from_csv_text(traj.to_csv(), 3, 2);
  for (int i = 0; i < 5; ++i) {
    CHECK(back.times[i] == traj.times[i]);
    CHECK((back.states[i] - traj.states[i]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.controls[i] - traj.controls[i]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_SUITE_END();
