#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "lbd/errors.hpp"

namespace lbd::ode {

/// Piecewise-constant control input. Three shapes cover both tracks:
/// a single impulse active on [t_start, t_end), a value per interval of a
/// fixed grid, and the zero signal.
class ControlSignal {
 public:
  static ControlSignal zero(int dim);
  static ControlSignal impulse(Eigen::VectorXd u, double t_start, double t_end);
  static ControlSignal piecewise(std::vector<double> grid, std::vector<Eigen::VectorXd> values);

  int dim() const;
  Eigen::VectorXd value(double t) const;
  /// Discontinuity times strictly inside (t0, t1), ascending.
  std::vector<double> breakpoints(double t0, double t1) const;

 private:
  struct Zero {
    int dim;
  };
  struct Impulse {
    Eigen::VectorXd u;
    double t_start;
    double t_end;
  };
  struct Piecewise {
    std::vector<double> grid;  // strictly increasing, values[i] on [grid[i], grid[i+1])
    std::vector<Eigen::VectorXd> values;
  };
  std::variant<Zero, Impulse, Piecewise> body_;
};

/// Time grid plus state samples; the dataset record used everywhere.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> controls;  // empty, or one entry per time point

  int state_dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
  void validate() const;

  std::string to_csv() const;
  static Trajectory from_csv_text(const std::string& text, int state_dim, int control_dim);
};

struct IntegrateOptions {
  double rtol = 1e-8;
  double atol = 1e-12;
  long max_steps = 100'000'000;
};

/// Trapezoid rule over sampled values f(times[i]).
double trapezoid(const std::vector<double>& times, const std::vector<double>& values);

/// sqrt( 1/(b-a) * integral_a^b (traj.states[component] - target)^2 dt ),
/// trapezoid on the trajectory grid restricted to [a, b]; off-grid window
/// endpoints are linearly interpolated.
double windowed_rms(const Trajectory& traj, int component, double target, double window_lo,
                    double window_hi);

namespace detail {

inline double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y0,
                         const Eigen::VectorXd& y1, double atol, double rtol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = err[i] / sc;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) with the classic 4th-order dense output.
/// The control is piecewise constant, so each step evaluates it once at the
/// step start and never crosses a breakpoint; segments between breakpoints
/// are integrated as independent restarts.
///
/// rhs signature: rhs(t, x, c, dxdt) with c the (optionally mixed) control.
template <class Rhs>
Trajectory integrate_grid(Rhs&& rhs, const ControlSignal& control, const Eigen::MatrixXd* mixing,
                          const Eigen::VectorXd& x0, const std::vector<double>& grid,
                          const IntegrateOptions& opt = {}) {
  if (grid.size() < 2) throw ValidationError("integrate: output grid needs at least two points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw ValidationError("integrate: output grid must be strictly increasing");
  if (!(opt.rtol > 0.0)) throw ValidationError("integrate: tolerance must be positive");

  const int n = static_cast<int>(x0.size());
  const double t_begin = grid.front();
  const double t_final = grid.back();

  Trajectory out;
  out.times = grid;
  out.states.assign(grid.size(), Eigen::VectorXd());
  out.states[0] = x0;
  out.controls.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out.controls[i] = control.value(grid[i]);

  // Segment boundaries: control discontinuities inside the span.
  std::vector<double> seg{t_begin};
  for (double b : control.breakpoints(t_begin, t_final)) seg.push_back(b);
  seg.push_back(t_final);

  Eigen::VectorXd y = x0;
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  Eigen::VectorXd ytmp(n), ynew(n), yerr(n);
  Eigen::VectorXd rc1(n), rc2(n), rc3(n), rc4(n), rc5(n);

  std::size_t next_output = 1;  // grid[0] already stored
  long steps = 0;

  for (std::size_t s = 0; s + 1 < seg.size(); ++s) {
    double t = seg[s];
    const double t_end = seg[s + 1];
    const Eigen::VectorXd u_seg = control.value(t);
    const Eigen::VectorXd c_seg = mixing ? Eigen::VectorXd(*mixing * u_seg) : u_seg;

    auto f = [&](double tt, const Eigen::VectorXd& yy, Eigen::VectorXd& dy) {
      rhs(tt, yy, c_seg, dy);
    };

    f(t, y, k1);
    if (!k1.allFinite()) throw DivergenceError("integrate: non-finite derivative", t);

    // Initial step size from the local scale of y and f.
    double h;
    {
      const double span = t_end - t;
      double d0 = detail::error_norm(y, y, y, opt.atol, opt.rtol);
      double d1 = detail::error_norm(k1, y, y, opt.atol, opt.rtol);
      double h0 = (d0 > 1e-10 && d1 > 1e-10) ? 0.01 * d0 / d1 : 1e-6;
      h0 = std::min(h0, span);
      ytmp = y + h0 * k1;
      f(t + h0, ytmp, k2);
      const double d2 = detail::error_norm(Eigen::VectorXd(k2 - k1), y, y, opt.atol, opt.rtol) / h0;
      double h1;
      const double dm = std::max(d1, d2);
      if (dm <= 1e-15)
        h1 = std::max(1e-6, h0 * 1e-3);
      else
        h1 = std::pow(0.01 / dm, 0.2);
      h = std::min({100.0 * h0, h1, span});
    }

    bool rejected = false;
    while (t < t_end) {
      if (++steps > opt.max_steps) throw StiffnessError("integrate: step budget exhausted", t);
      if (!(h > std::abs(t) * 1e-14 + 1e-300))
        throw StiffnessError("integrate: step size underflow", t);
      if (t + h > t_end) h = t_end - t;

      // Dormand-Prince stages.
      ytmp = y + h * (1.0 / 5.0) * k1;
      f(t + h / 5.0, ytmp, k2);
      ytmp = y + h * ((3.0 / 40.0) * k1 + (9.0 / 40.0) * k2);
      f(t + 3.0 * h / 10.0, ytmp, k3);
      ytmp = y + h * ((44.0 / 45.0) * k1 + (-56.0 / 15.0) * k2 + (32.0 / 9.0) * k3);
      f(t + 4.0 * h / 5.0, ytmp, k4);
      ytmp = y + h * ((19372.0 / 6561.0) * k1 + (-25360.0 / 2187.0) * k2 +
                      (64448.0 / 6561.0) * k3 + (-212.0 / 729.0) * k4);
      f(t + 8.0 * h / 9.0, ytmp, k5);
      ytmp = y + h * ((9017.0 / 3168.0) * k1 + (-355.0 / 33.0) * k2 + (46732.0 / 5247.0) * k3 +
                      (49.0 / 176.0) * k4 + (-5103.0 / 18656.0) * k5);
      f(t + h, ytmp, k6);
      ynew = y + h * ((35.0 / 384.0) * k1 + (500.0 / 1113.0) * k3 + (125.0 / 192.0) * k4 +
                      (-2187.0 / 6784.0) * k5 + (11.0 / 84.0) * k6);
      f(t + h, ynew, k7);

      yerr = h * ((71.0 / 57600.0) * k1 + (-71.0 / 16695.0) * k3 + (71.0 / 1920.0) * k4 +
                  (-17253.0 / 339200.0) * k5 + (22.0 / 525.0) * k6 + (-1.0 / 40.0) * k7);

      if (!ynew.allFinite())
        throw DivergenceError("integrate: non-finite state", t + h);

      const double err = detail::error_norm(yerr, y, ynew, opt.atol, opt.rtol);
      if (err <= 1.0) {
        // Dense output coefficients for this step (Hairer's contd5).
        rc1 = y;
        rc2 = ynew - y;
        rc3 = h * k1 - rc2;
        rc4 = rc2 - h * k7 - rc3;
        rc5 = h * ((-12715105075.0 / 11282082432.0) * k1 + (87487479700.0 / 32700410799.0) * k3 +
                   (-10690763975.0 / 1880347072.0) * k4 + (701980252875.0 / 199316789632.0) * k5 +
                   (-1453857185.0 / 822651844.0) * k6 + (69997945.0 / 29380423.0) * k7);

        const double t_new = t + h;
        while (next_output < grid.size() && grid[next_output] <= t_new + 1e-14 * std::abs(t_new)) {
          const double tq = grid[next_output];
          const double th = (tq - t) / h;
          out.states[next_output] =
              rc1 + th * (rc2 + (1.0 - th) * (rc3 + th * (rc4 + (1.0 - th) * rc5)));
          ++next_output;
        }

        t = t_new;
        y.swap(ynew);
        k1.swap(k7);  // FSAL
        double fac = 0.9 * std::pow(err > 1e-30 ? err : 1e-30, -0.2);
        fac = std::min(rejected ? 1.0 : 10.0, std::max(0.2, fac));
        h *= fac;
        rejected = false;
      } else {
        h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        rejected = true;
      }
    }
    // Land exactly on the segment end so the next segment restarts from it.
    if (next_output < grid.size() &&
        std::abs(grid[next_output] - t_end) <= 1e-12 * std::max(1.0, std::abs(t_end))) {
      out.states[next_output] = y;
      ++next_output;
    }
  }
  if (next_output != grid.size())
    throw StiffnessError("integrate: failed to reach all output points", grid.back());
  return out;
}

/// Central finite-difference Jacobian with per-coordinate step
/// h_i = max(1e-6, 1e-6 |x_i|).
template <class F>
Eigen::MatrixXd fd_jacobian(F&& f, const Eigen::VectorXd& x) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  Eigen::VectorXd xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = std::max(1e-6, 1e-6 * std::abs(x[i]));
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    jac.col(i) = (f(xp) - f(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return jac;
}

}  // namespace lbd::ode
