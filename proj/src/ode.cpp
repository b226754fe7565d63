#include "lbd/ode.hpp"

#include <algorithm>
#include <sstream>

#include "lbd/csv.hpp"

namespace lbd::ode {

ControlSignal ControlSignal::zero(int dim) {
  ControlSignal s;
  s.body_ = Zero{dim};
  return s;
}

ControlSignal ControlSignal::impulse(Eigen::VectorXd u, double t_start, double t_end) {
  if (!(t_start < t_end)) throw ValidationError("impulse: empty active window");
  ControlSignal s;
  s.body_ = Impulse{std::move(u), t_start, t_end};
  return s;
}

ControlSignal ControlSignal::piecewise(std::vector<double> grid,
                                       std::vector<Eigen::VectorXd> values) {
  if (grid.size() < 2 || values.size() + 1 != grid.size())
    throw ValidationError("piecewise control: need one value per interval");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw ValidationError("piecewise control: grid must be strictly increasing");
  ControlSignal s;
  s.body_ = Piecewise{std::move(grid), std::move(values)};
  return s;
}

int ControlSignal::dim() const {
  if (const auto* z = std::get_if<Zero>(&body_)) return z->dim;
  if (const auto* i = std::get_if<Impulse>(&body_)) return static_cast<int>(i->u.size());
  return static_cast<int>(std::get<Piecewise>(body_).values.front().size());
}

Eigen::VectorXd ControlSignal::value(double t) const {
  if (const auto* z = std::get_if<Zero>(&body_)) return Eigen::VectorXd::Zero(z->dim);
  if (const auto* i = std::get_if<Impulse>(&body_)) {
    if (t >= i->t_start && t < i->t_end) return i->u;
    return Eigen::VectorXd::Zero(i->u.size());
  }
  const auto& p = std::get<Piecewise>(body_);
  if (t < p.grid.front() || t >= p.grid.back()) return Eigen::VectorXd::Zero(dim());
  const auto it = std::upper_bound(p.grid.begin(), p.grid.end(), t);
  const std::size_t interval = static_cast<std::size_t>(it - p.grid.begin()) - 1;
  return p.values[std::min(interval, p.values.size() - 1)];
}

std::vector<double> ControlSignal::breakpoints(double t0, double t1) const {
  std::vector<double> out;
  if (std::get_if<Zero>(&body_)) return out;
  if (const auto* i = std::get_if<Impulse>(&body_)) {
    if (i->t_start > t0 && i->t_start < t1) out.push_back(i->t_start);
    if (i->t_end > t0 && i->t_end < t1) out.push_back(i->t_end);
    return out;
  }
  const auto& p = std::get<Piecewise>(body_);
  for (double g : p.grid)
    if (g > t0 && g < t1) out.push_back(g);
  return out;
}

void Trajectory::validate() const {
  if (times.size() != states.size())
    throw ValidationError("trajectory: times and states lengths differ");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw ValidationError("trajectory: times must be strictly increasing");
  for (const auto& x : states)
    if (!x.allFinite()) throw ValidationError("trajectory: non-finite state entry");
  if (!controls.empty() && controls.size() != times.size())
    throw ValidationError("trajectory: controls length mismatch");
}

std::string Trajectory::to_csv() const {
  const int n = state_dim();
  const int p = controls.empty() ? 0 : static_cast<int>(controls.front().size());
  std::vector<std::string> header{"t"};
  for (int i = 1; i <= n; ++i) header.push_back("x" + std::to_string(i));
  for (int i = 1; i <= p; ++i) header.push_back("u" + std::to_string(i));
  csv::Writer w(header);
  for (std::size_t r = 0; r < times.size(); ++r) {
    w.append(times[r]);
    for (int i = 0; i < n; ++i) w.append(states[r][i]);
    for (int i = 0; i < p; ++i) w.append(controls[r][i]);
    w.end_row();
  }
  return w.buffer();
}

Trajectory Trajectory::from_csv_text(const std::string& text, int state_dim, int control_dim) {
  Trajectory traj;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      continue;
    }
    auto cells = csv::split_line(line);
    if (static_cast<int>(cells.size()) != 1 + state_dim + control_dim)
      throw ValidationError("trajectory CSV: wrong cell count");
    traj.times.push_back(csv::parse_double(cells[0]));
    Eigen::VectorXd x(state_dim);
    for (int i = 0; i < state_dim; ++i) x[i] = csv::parse_double(cells[1 + i]);
    traj.states.push_back(std::move(x));
    if (control_dim > 0) {
      Eigen::VectorXd u(control_dim);
      for (int i = 0; i < control_dim; ++i) u[i] = csv::parse_double(cells[1 + state_dim + i]);
      traj.controls.push_back(std::move(u));
    }
  }
  traj.validate();
  return traj;
}

double trapezoid(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size() || times.size() < 2)
    throw ValidationError("trapezoid: need matching series with at least two samples");
  double acc = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i)
    acc += 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
  return acc;
}

double windowed_rms(const Trajectory& traj, int component, double target, double window_lo,
                    double window_hi) {
  if (traj.times.size() < 2) throw ValidationError("windowed_rms: trajectory too short");
  if (!(window_lo < window_hi)) throw ValidationError("windowed_rms: empty window");
  if (window_lo < traj.times.front() - 1e-12 || window_hi > traj.times.back() + 1e-12)
    throw ValidationError("windowed_rms: window outside trajectory support");

  auto value_at = [&](double t, std::size_t hint) {
    // linear interpolation; hint indexes the first grid time >= t
    std::size_t hi = hint;
    if (hi == 0) hi = 1;
    const double t0 = traj.times[hi - 1], t1 = traj.times[hi];
    const double a = (t - t0) / (t1 - t0);
    return (1.0 - a) * traj.states[hi - 1][component] + a * traj.states[hi][component];
  };

  std::vector<double> ts, vs;
  const auto lo_it = std::lower_bound(traj.times.begin(), traj.times.end(), window_lo - 1e-12);
  std::size_t i = static_cast<std::size_t>(lo_it - traj.times.begin());
  if (i < traj.times.size() && std::abs(traj.times[i] - window_lo) <= 1e-12) {
    // window start on grid
  } else {
    ts.push_back(window_lo);
    const double d = value_at(window_lo, i) - target;
    vs.push_back(d * d);
  }
  for (; i < traj.times.size() && traj.times[i] <= window_hi + 1e-12; ++i) {
    if (traj.times[i] > window_hi - 1e-12 && std::abs(traj.times[i] - window_hi) > 1e-12) break;
    ts.push_back(traj.times[i]);
    const double d = traj.states[i][component] - target;
    vs.push_back(d * d);
  }
  if (ts.empty() || std::abs(ts.back() - window_hi) > 1e-12) {
    ts.push_back(window_hi);
    const double d = value_at(window_hi, i) - target;
    vs.push_back(d * d);
  }
  const double integral = trapezoid(ts, vs);
  return std::sqrt(std::max(0.0, integral / (window_hi - window_lo)));
}

}  // namespace lbd::ode
