#include "lbd/harness.hpp"

#include <algorithm>
#include <limits>

#include <nlohmann/json.hpp>

#include "lbd/csv.hpp"
#include "lbd/errors.hpp"
#include "lbd/ode.hpp"
#include "lbd/parallel.hpp"

namespace lbd::robo {

namespace {

Eigen::VectorXd integrate_interval(const ArmDynamics& dyn, const Eigen::VectorXd& state,
                                   const Eigen::VectorXd& latent, double t0, double dt,
                                   const EpisodeOptions& opt) {
  auto rhs = [&](double, const Eigen::VectorXd& x, const Eigen::VectorXd&,
                 Eigen::VectorXd& dx) { dyn.deriv(x, latent, dx); };
  ode::IntegrateOptions iopt;
  iopt.rtol = opt.rtol;
  iopt.atol = opt.atol;
  const auto traj = ode::integrate_grid(rhs, ode::ControlSignal::zero(0), nullptr, state,
                                        {t0, t0 + dt}, iopt);
  return traj.states.back();
}

}  // namespace

EpisodeOutcome run_episode(const ArmDynamics& dyn, const InterfaceMap& iface,
                           control::Controller& controller, const TargetProcess& target,
                           const EpisodeOptions& opt) {
  iface.validate();
  const int p = iface.control_dim();
  const int q = iface.latent_dim();
  if (q != dyn.joints()) throw ValidationError("interface rows must match the joint count");
  if (static_cast<int>(target.points.size()) != kGridPoints)
    throw ValidationError("target process must live on the episode grid");

  EpisodeOutcome out;
  out.states.reserve(kGridPoints);
  out.tips.reserve(kGridPoints);
  out.controls.assign(kGridPoints, Eigen::VectorXd::Zero(p));
  out.latents.assign(kGridPoints, Eigen::VectorXd::Zero(q));

  Eigen::VectorXd state =
      opt.initial_state.size() ? opt.initial_state : dyn.home_state();
  out.states.push_back(state);

  control::EpisodeContext ctx;
  ctx.system_id = opt.system_id;
  ctx.control_dim = p;
  ctx.interior_joints = dyn.interior_joints();

  Eigen::VectorXd w, dw;
  Eigen::Vector2d z, dz;

  try {
    controller.begin_episode(ctx);
    for (int step = 0; step < kSteps; ++step) {
      dyn.forward_kinematics(state, w, z, dw, dz);
      if (step == 0) out.tips.push_back(z);

      control::ControllerQuery query;
      query.step = step;
      query.t = step * kDt;
      query.z = z;
      query.w = w;
      query.dz = dz;
      query.dw = dw;
      query.target_next = target.at(step + 1);

      const control::ControllerReply reply = controller.query(query, opt.budget_ms);
      Eigen::VectorXd u = Eigen::VectorXd::Zero(p);
      if (reply.ok && reply.u.size() == p && reply.u.allFinite()) {
        u = reply.u;
      } else {
        ++out.timeout_count;
      }
      out.controls[step] = u;
      out.latents[step] = iface.A * u;

      state = integrate_interval(dyn, state, out.latents[step], step * kDt, kDt, opt);
      out.states.push_back(state);
      dyn.forward_kinematics(state, w, z, dw, dz);
      out.tips.push_back(z);
    }
    controller.end_episode();
  } catch (const std::exception& e) {
    out.aborted = true;
    out.diagnostic = e.what();
    return out;
  }

  std::vector<double> times = episode_grid();
  std::vector<double> track(kGridPoints), effort(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    track[i] = (out.tips[i] - target.at(i)).squaredNorm();
    effort[i] = out.controls[i].squaredNorm();
  }
  out.tracking_integral = ode::trapezoid(times, track);
  out.effort_integral = ode::trapezoid(times, effort);
  return out;
}

Calibration solve_calibration(double e_zero, double e_oracle, double u_oracle) {
  if (e_zero < 1e-9)
    throw DegenerateTargetError("target coincides with the uncontrolled trajectory");
  Calibration cal;
  cal.e_zero = e_zero;
  cal.e_oracle = e_oracle;
  cal.u_oracle = u_oracle;
  cal.b = 100.0 / e_zero;
  if (u_oracle < 1e-12) {
    cal.c = 0.0;
    cal.degenerate = true;
    return cal;
  }
  const double c = (1.0 - cal.b * e_oracle) / u_oracle;
  if (c <= 0.0) {
    cal.c = 0.0;
    cal.degenerate = true;
  } else {
    cal.c = c;
  }
  return cal;
}

Calibration calibrate_scaling(const ArmDynamics& dyn, const InterfaceMap& iface,
                              control::Controller& oracle, const TargetProcess& target,
                              const EpisodeOptions& opt) {
  EpisodeOptions copt = opt;
  copt.budget_ms = std::numeric_limits<double>::infinity();  // baselines run unmetered

  control::ZeroController zero;
  const EpisodeOutcome zero_run = run_episode(dyn, iface, zero, target, copt);
  if (zero_run.aborted)
    throw DegenerateTargetError("zero episode failed: " + zero_run.diagnostic);

  const EpisodeOutcome oracle_run = run_episode(dyn, iface, oracle, target, copt);
  if (oracle_run.aborted)
    throw DegenerateTargetError("oracle episode failed: " + oracle_run.diagnostic);

  return solve_calibration(zero_run.tracking_integral, oracle_run.tracking_integral,
                           oracle_run.effort_integral);
}

double raw_score(const Calibration& calib, const EpisodeOutcome& outcome) {
  if (outcome.aborted) return 100.0;
  return calib.b * outcome.tracking_integral + calib.c * outcome.effort_integral;
}

double clipped_score(const Calibration& calib, const EpisodeOutcome& outcome) {
  return std::min(raw_score(calib, outcome), 100.0);
}

std::vector<CalibratedTarget> synthesize_targets(const RobotSystem& system, int count,
                                                 std::uint64_t seed,
                                                 const ControllerFactory& oracle_factory,
                                                 const EpisodeOptions& opt) {
  const ArmDynamics dyn(lump_parameters(system.spec));
  EpisodeOptions sopt = opt;
  sopt.system_id = system.id;

  std::vector<CalibratedTarget> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    bool accepted = false;
    for (int variant = 0; variant < 20 && !accepted; ++variant) {
      TargetProcess target = generate_target(dyn, seed, system.id, k, variant);
      auto oracle = oracle_factory(system);
      try {
        Calibration cal = calibrate_scaling(dyn, system.interface, *oracle, target, sopt);
        if (cal.degenerate) continue;
        out.push_back({std::move(target), cal, variant});
        accepted = true;
      } catch (const DegenerateTargetError&) {
        continue;
      }
    }
    if (!accepted)
      throw DegenerateTargetError("system " + std::to_string(system.id) + ", target " +
                                  std::to_string(k) + ": no calibratable variant in 20 draws");
  }
  return out;
}

namespace {

EpisodeScore score_one(const RobotSystem& system, const CalibratedTarget& ct, int target_index,
                       const ControllerFactory& candidate, const EpisodeOptions& opt) {
  const ArmDynamics dyn(lump_parameters(system.spec));
  EpisodeOptions eopt = opt;
  eopt.system_id = system.id;
  auto controller = candidate(system);
  const EpisodeOutcome outcome = run_episode(dyn, system.interface, *controller, ct.target, eopt);

  EpisodeScore s;
  s.system_id = system.id;
  s.system_name = system.name;
  s.target_index = target_index;
  s.raw = raw_score(ct.calib, outcome);
  s.clipped = clipped_score(ct.calib, outcome);
  s.b = ct.calib.b;
  s.c = ct.calib.c;
  s.tracking = outcome.tracking_integral;
  s.effort = outcome.effort_integral;
  s.timeouts = outcome.timeout_count;
  s.aborted = outcome.aborted;
  s.degenerate = ct.calib.degenerate;
  return s;
}

void finalize_report(RoboScoreReport& report) {
  double acc = 0.0;
  for (const auto& e : report.episodes) acc += e.clipped;
  report.grand_mean = report.episodes.empty() ? 0.0 : acc / report.episodes.size();
}

}  // namespace

RoboScoreReport run_benchmark(const std::vector<RobotSystem>& table, std::uint64_t seed,
                              int targets_per_system, const ControllerFactory& candidate,
                              const ControllerFactory& oracle_factory, const EpisodeOptions& opt,
                              int jobs) {
  RoboScoreReport report;
  report.seed = seed;
  report.budget_ms = opt.budget_ms;
  report.targets_per_system = targets_per_system;

  const int ns = static_cast<int>(table.size());
  std::vector<std::vector<CalibratedTarget>> targets(ns);
  parallel_for(ns, jobs, [&](int i) {
    targets[i] = synthesize_targets(table[i], targets_per_system, seed, oracle_factory, opt);
  });

  report.episodes.assign(ns * targets_per_system, EpisodeScore{});
  parallel_for(ns * targets_per_system, jobs, [&](int idx) {
    const int i = idx / targets_per_system;
    const int k = idx % targets_per_system;
    report.episodes[idx] = score_one(table[i], targets[i][k], k, candidate, opt);
  });
  finalize_report(report);
  return report;
}

RoboScoreReport run_benchmark_serial(const std::vector<RobotSystem>& table, std::uint64_t seed,
                                     int targets_per_system, const ControllerFactory& candidate,
                                     const ControllerFactory& oracle_factory,
                                     const EpisodeOptions& opt) {
  RoboScoreReport report;
  report.seed = seed;
  report.budget_ms = opt.budget_ms;
  report.targets_per_system = targets_per_system;
  for (const auto& system : table) {
    const auto targets = synthesize_targets(system, targets_per_system, seed, oracle_factory, opt);
    for (int k = 0; k < targets_per_system; ++k)
      report.episodes.push_back(score_one(system, targets[k], k, candidate, opt));
  }
  finalize_report(report);
  return report;
}

std::vector<std::pair<int, double>> RoboScoreReport::system_means() const {
  std::vector<std::pair<int, double>> means;
  int cur = -1;
  double acc = 0.0;
  int cnt = 0;
  for (const auto& e : episodes) {
    if (e.system_id != cur) {
      if (cnt) means.emplace_back(cur, acc / cnt);
      cur = e.system_id;
      acc = 0.0;
      cnt = 0;
    }
    acc += e.clipped;
    ++cnt;
  }
  if (cnt) means.emplace_back(cur, acc / cnt);
  return means;
}

std::string RoboScoreReport::to_json_text() const {
  nlohmann::json j;
  j["track"] = "robo";
  j["seed"] = seed;
  j["budget_ms"] = budget_ms;
  j["targets_per_system"] = targets_per_system;
  j["episodes"] = nlohmann::json::array();
  for (const auto& e : episodes) {
    nlohmann::json ej;
    ej["system"] = e.system_id;
    ej["name"] = e.system_name;
    ej["target"] = e.target_index;
    ej["raw"] = e.raw;
    ej["clipped"] = e.clipped;
    ej["b"] = e.b;
    ej["c"] = e.c;
    ej["tracking"] = e.tracking;
    ej["effort"] = e.effort;
    ej["timeouts"] = e.timeouts;
    ej["aborted"] = e.aborted;
    ej["degenerate_calibration"] = e.degenerate;
    j["episodes"].push_back(std::move(ej));
  }
  j["grand_mean"] = grand_mean;
  return j.dump(2) + "\n";
}

std::vector<EpisodeOutcome> generate_training_trajectories(const RobotSystem& system, int count,
                                                           std::uint64_t seed,
                                                           const EpisodeOptions& opt, int jobs) {
  const ArmDynamics dyn(lump_parameters(system.spec));
  const Workspace ws = dyn.workspace();
  std::vector<EpisodeOutcome> episodes(count);
  parallel_for(count, jobs, [&](int r) {
    Rng rng = Rng::stream(seed, {stream_tag::kRoboTrain, static_cast<std::uint64_t>(system.id),
                                 static_cast<std::uint64_t>(r)});
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(dyn.state_dim());
    if (dyn.kind() == RobotKind::Prismatic2) {
      for (int i = 0; i < dyn.joints(); ++i)
        x0[i] = rng.uniform(-0.4 * dyn.params().lengths[i], 0.8 * dyn.params().lengths[i]);
    } else {
      for (int i = 0; i < dyn.joints(); ++i) x0[i] = rng.uniform(-2.4, 2.4);
    }
    const Eigen::Vector2d goal = ws.sample_interior(rng, 0.15);
    TargetProcess target;
    target.points.assign(kGridPoints, goal);

    EpisodeOptions eopt = opt;
    eopt.system_id = system.id;
    eopt.initial_state = x0;
    eopt.budget_ms = std::numeric_limits<double>::infinity();
    control::ModelLqrController oracle(lump_parameters(system.spec), system.interface.A);
    episodes[r] = run_episode(dyn, system.interface, oracle, target, eopt);
    if (episodes[r].aborted)
      throw DivergenceError("training episode aborted: " + episodes[r].diagnostic, 0.0);
  });
  return episodes;
}

std::string training_csv(const RobotSystem& system, const std::vector<EpisodeOutcome>& episodes) {
  const ArmDynamics dyn(lump_parameters(system.spec));
  const int d = dyn.interior_joints();
  const int p = system.interface.control_dim();

  std::vector<std::string> header{"system", "run", "t"};
  for (int i = 1; i <= d; ++i) {
    header.push_back("X" + std::to_string(i));
    header.push_back("Y" + std::to_string(i));
  }
  header.push_back("X");
  header.push_back("Y");
  for (int i = 1; i <= d; ++i) {
    header.push_back("dX" + std::to_string(i));
    header.push_back("dY" + std::to_string(i));
  }
  header.push_back("dX");
  header.push_back("dY");
  for (int i = 1; i <= p; ++i) header.push_back("U" + std::to_string(i));

  csv::Writer w(header);
  Eigen::VectorXd wj, dwj;
  Eigen::Vector2d z, dz;
  for (std::size_t run = 0; run < episodes.size(); ++run) {
    const auto& ep = episodes[run];
    for (int i = 0; i < kGridPoints; ++i) {
      dyn.forward_kinematics(ep.states[i], wj, z, dwj, dz);
      w.append(system.id);
      w.append(static_cast<long>(run + 1));
      w.append(i * kDt);
      for (int jnt = 0; jnt < d; ++jnt) {
        w.append(wj[2 * jnt]);
        w.append(wj[2 * jnt + 1]);
      }
      w.append(z.x());
      w.append(z.y());
      for (int jnt = 0; jnt < d; ++jnt) {
        w.append(dwj[2 * jnt]);
        w.append(dwj[2 * jnt + 1]);
      }
      w.append(dz.x());
      w.append(dz.y());
      for (int c = 0; c < p; ++c) w.append(ep.controls[i][c]);
      w.end_row();
    }
  }
  return w.buffer();
}

std::string targets_csv(const RobotSystem& system, const std::vector<CalibratedTarget>& targets) {
  csv::Writer w({"system", "episode", "t", "zx", "zy"});
  for (std::size_t k = 0; k < targets.size(); ++k)
    for (int i = 0; i < kGridPoints; ++i) {
      w.append(system.id);
      w.append(static_cast<long>(k + 1));
      w.append(i * kDt);
      w.append(targets[k].target.at(i).x());
      w.append(targets[k].target.at(i).y());
      w.end_row();
    }
  return w.buffer();
}

}  // namespace lbd::robo
