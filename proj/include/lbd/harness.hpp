#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lbd/control.hpp"
#include "lbd/robo.hpp"

namespace lbd::robo {

struct EpisodeOptions {
  double budget_ms = 50.0;  // per-query wall clock for subprocess controllers
  double rtol = 1e-8;
  double atol = 1e-10;
  int system_id = 0;
  Eigen::VectorXd initial_state;  // empty: home configuration
};

struct EpisodeOutcome {
  std::vector<Eigen::VectorXd> states;    // joint states, one per grid point
  std::vector<Eigen::Vector2d> tips;      // Z(t_l)
  std::vector<Eigen::VectorXd> controls;  // applied U, zero after the last step
  std::vector<Eigen::VectorXd> latents;   // applied C = A U
  double tracking_integral = 0.0;         // integral of |Z - z*|^2
  double effort_integral = 0.0;           // integral of U^T U
  int timeout_count = 0;
  bool aborted = false;  // controller death or integration failure; scores 100
  std::string diagnostic;
};

/// Closed-loop episode on the 201-point grid: query, apply C = A U (zero on
/// timeout / malformed replies), integrate one interval, repeat.
EpisodeOutcome run_episode(const ArmDynamics& dyn, const InterfaceMap& iface,
                           control::Controller& controller, const TargetProcess& target,
                           const EpisodeOptions& opt = {});

struct Calibration {
  double b = 0.0;
  double c = 0.0;
  bool degenerate = false;  // the 2x2 solve gave c <= 0; c clamped to 0
  double e_zero = 0.0;
  double e_oracle = 0.0;
  double u_oracle = 0.0;
};

/// Solves b * E_zero = 100 and b * E_oracle + c * U_oracle = 1.
Calibration solve_calibration(double e_zero, double e_oracle, double u_oracle);

Calibration calibrate_scaling(const ArmDynamics& dyn, const InterfaceMap& iface,
                              control::Controller& oracle, const TargetProcess& target,
                              const EpisodeOptions& opt = {});

double raw_score(const Calibration& calib, const EpisodeOutcome& outcome);
double clipped_score(const Calibration& calib, const EpisodeOutcome& outcome);

using ControllerFactory =
    std::function<std::unique_ptr<control::Controller>(const RobotSystem&)>;

struct CalibratedTarget {
  TargetProcess target;
  Calibration calib;
  int variant = 0;
};

/// Generates `count` targets for one system, re-drawing any target whose
/// calibration is degenerate (up to 20 variants each).
std::vector<CalibratedTarget> synthesize_targets(const RobotSystem& system, int count,
                                                 std::uint64_t seed,
                                                 const ControllerFactory& oracle_factory,
                                                 const EpisodeOptions& opt = {});

struct EpisodeScore {
  int system_id = 0;
  std::string system_name;
  int target_index = 0;
  double raw = 0.0;
  double clipped = 0.0;
  double b = 0.0;
  double c = 0.0;
  double tracking = 0.0;
  double effort = 0.0;
  int timeouts = 0;
  bool aborted = false;
  bool degenerate = false;
};

struct RoboScoreReport {
  std::uint64_t seed = 0;
  double budget_ms = 0.0;
  int targets_per_system = 0;
  std::vector<EpisodeScore> episodes;  // system-major, target-minor
  double grand_mean = 0.0;

  std::string to_json_text() const;
  /// Per-system mean of clipped scores, keyed by system id.
  std::vector<std::pair<int, double>> system_means() const;
};

/// Calibrates every (system, target) pair and scores the candidate on all of
/// them. Episodes are independent; `jobs` controls the OpenMP fan-out.
RoboScoreReport run_benchmark(const std::vector<RobotSystem>& table, std::uint64_t seed,
                              int targets_per_system, const ControllerFactory& candidate,
                              const ControllerFactory& oracle_factory, const EpisodeOptions& opt,
                              int jobs);

/// Plain-loop reference of run_benchmark; kept for testing the parallel path.
RoboScoreReport run_benchmark_serial(const std::vector<RobotSystem>& table, std::uint64_t seed,
                                     int targets_per_system, const ControllerFactory& candidate,
                                     const ControllerFactory& oracle_factory,
                                     const EpisodeOptions& opt);

/// Point-to-point oracle moves from random rest configurations; the rows of
/// the published training CSVs.
std::vector<EpisodeOutcome> generate_training_trajectories(const RobotSystem& system, int count,
                                                           std::uint64_t seed,
                                                           const EpisodeOptions& opt, int jobs);

/// Header: system,run,t,X1,Y1..Xd,Yd,X,Y,dX1,dY1..,dX,dY,U1..Up.
std::string training_csv(const RobotSystem& system,
                         const std::vector<EpisodeOutcome>& episodes);

std::string targets_csv(const RobotSystem& system, const std::vector<CalibratedTarget>& targets);

}  // namespace lbd::robo
