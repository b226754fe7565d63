#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lbd/kinetics.hpp"
#include "lbd/ode.hpp"
#include "lbd/rng.hpp"

namespace lbd::chem {

inline constexpr int kSystems = 12;
inline constexpr int kSpecies = 15;
inline constexpr int kControls = 8;
inline constexpr int kRunsPerSystem = 20;
inline constexpr int kTestCasesPerSystem = 50;
inline constexpr double kControlBound = 10.0;
inline constexpr double kCostWeight = 1.0 / 20.0;
inline constexpr int kGridPoints = 81;  // t = 0, 1, ..., 80
inline constexpr double kImpulseEnd = 3.0;
inline constexpr double kWindowLo = 40.0;
inline constexpr double kWindowHi = 80.0;

std::vector<double> observation_grid();

/// Full parameterization of the 12-system ensemble. All twelve fields share
/// one sparsity and sign pattern because they compile from the same network
/// with per-system rates; B and the noise are shared across systems.
struct ChemSystemSpec {
  std::uint64_t seed = 0;
  std::vector<kinetics::PolynomialField> fields;       // 12 entries
  std::vector<std::array<double, 10>> rates;           // per-system k1..k10
  Eigen::MatrixXd mixing;                              // B, 15 x 8
  Eigen::VectorXd noise_sigma;                         // per species
  Eigen::MatrixXd z0_log_median;                       // kSystems x kSpecies
  double z0_log_sigma = 0.25;
  std::vector<Eigen::MatrixXd> confounder;             // per-system Gamma, 8 x 15
  double confound_noise = 0.04;

  Eigen::VectorXd z0_mean(int system) const;  // mean of the log-normal z0 draw
  Eigen::VectorXd sample_z0(int system, Rng& rng) const;

  std::string to_json_text() const;
  static ChemSystemSpec from_json_text(const std::string& text);
};

ChemSystemSpec sample_ensemble(std::uint64_t seed);

struct ChemEpisode {
  int system = 0;  // 1-based
  int run = 0;     // 1-based
  Eigen::VectorXd z0;
  Eigen::VectorXd u;            // impulse value actually applied
  ode::Trajectory observations;  // noisy samples on the observation grid
};

/// Adds the observation noise of the spec on the trajectory's own grid.
ode::Trajectory observe(const ode::Trajectory& latent, const Eigen::VectorXd& noise_sigma,
                        Rng& rng);

/// Confounded training data: z0 log-normal, u = clip(Gamma (z0 - mean) + eps).
/// Draws that blow the integrator up are re-drawn (the data-generating
/// process is defined conditional on a finite trajectory).
std::vector<ChemEpisode> generate_training_data(const ChemSystemSpec& spec, int runs_per_system,
                                                std::uint64_t seed, int jobs);
std::vector<ChemEpisode> generate_training_data_serial(const ChemSystemSpec& spec,
                                                       int runs_per_system, std::uint64_t seed);

std::string training_csv(const std::vector<ChemEpisode>& episodes);

struct ChemTestCase {
  int system = 0;  // 1-based
  int index = 0;   // 1-based case number
  Eigen::VectorXd x0_observed;
  Eigen::VectorXd z0_latent;  // held privately; scoring integrates from here
  double y_star = 0.0;
};

/// Reachable targets: y_star is the window average of Y under a random
/// feasible impulse from the same latent initial condition.
std::vector<ChemTestCase> make_test_cases(const ChemSystemSpec& spec, int cases_per_system,
                                          std::uint64_t seed);

std::string test_cases_csv(const std::vector<ChemTestCase>& cases);
nlohmann::json test_cases_private_json(const std::vector<ChemTestCase>& cases);
std::vector<ChemTestCase> test_cases_from_private_json(const nlohmann::json& j);

struct ChemSubmission {
  // controls[(system-1) * cases_per_system + (case-1)]
  int cases_per_system = 0;
  std::vector<Eigen::VectorXd> controls;

  const Eigen::VectorXd& at(int system, int index) const {
    return controls[(system - 1) * cases_per_system + (index - 1)];
  }

  std::string to_csv() const;
  static ChemSubmission from_csv_text(const std::string& text, int systems, int cases_per_system);
};

struct ChemCaseScore {
  int system = 0;
  int index = 0;
  double tracking = 0.0;
  double penalty = 0.0;
  double total = 0.0;
  bool clipped = false;   // submission left the control box and was clipped
  bool diverged = false;  // trajectory blew up; tracking set to the divergence penalty
};

struct ChemScoreReport {
  std::uint64_t seed = 0;
  std::vector<ChemCaseScore> cases;     // system-major
  std::vector<double> system_means;     // J_i
  double grand_mean = 0.0;

  std::string to_json_text() const;
};

/// The loss of every (system, case): windowed RMS of Y against y_star over
/// [40, 80] plus (1/20) sqrt(|u|^2 / 8), averaged per system.
ChemScoreReport evaluate_submission(const ChemSystemSpec& spec,
                                    const std::vector<ChemTestCase>& cases,
                                    const ChemSubmission& submission, int jobs);
ChemScoreReport evaluate_submission_serial(const ChemSystemSpec& spec,
                                           const std::vector<ChemTestCase>& cases,
                                           const ChemSubmission& submission);

/// Tracking value charged when a submission makes the system diverge.
inline constexpr double kDivergencePenalty = 1e6;

/// Latent trajectory of one system under an impulse u on [0, 3).
ode::Trajectory simulate_episode(const ChemSystemSpec& spec, int system,
                                 const Eigen::VectorXd& z0, const Eigen::VectorXd& u,
                                 double rtol = 1e-8);

}  // namespace lbd::chem
