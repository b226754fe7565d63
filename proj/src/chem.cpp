#include "lbd/chem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lbd/csv.hpp"
#include "lbd/errors.hpp"
#include "lbd/parallel.hpp"

namespace lbd::chem {

std::vector<double> observation_grid() {
  std::vector<double> g(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) g[i] = static_cast<double>(i);
  return g;
}

Eigen::VectorXd ChemSystemSpec::z0_mean(int system) const {
  // Mean of a log-normal with the stored log-median and sigma.
  const double bump = std::exp(0.5 * z0_log_sigma * z0_log_sigma);
  return (z0_log_median.row(system - 1).array().exp() * bump).matrix();
}

Eigen::VectorXd ChemSystemSpec::sample_z0(int system, Rng& rng) const {
  Eigen::VectorXd z(kSpecies);
  for (int s = 0; s < kSpecies; ++s)
    z[s] = std::exp(z0_log_median(system - 1, s) + z0_log_sigma * rng.normal());
  return z;
}

ode::Trajectory simulate_episode(const ChemSystemSpec& spec, int system,
                                 const Eigen::VectorXd& z0, const Eigen::VectorXd& u,
                                 double rtol) {
  const auto& field = spec.fields[system - 1];
  auto rhs = [&](double, const Eigen::VectorXd& x, const Eigen::VectorXd& c,
                 Eigen::VectorXd& dx) {
    field.eval(x, dx);
    dx += c;
  };
  ode::IntegrateOptions opt;
  opt.rtol = rtol;
  opt.atol = 1e-12;
  const ode::ControlSignal control =
      u.isZero(0.0) ? ode::ControlSignal::zero(kControls)
                    : ode::ControlSignal::impulse(u, 0.0, kImpulseEnd);
  return ode::integrate_grid(rhs, control, &spec.mixing, z0, observation_grid(), opt);
}

namespace {

std::array<double, 10> sample_rates(Rng& rng) {
  std::array<double, 10> k{};
  for (double& v : k) v = rng.log_uniform(0.1, 2.0);
  return k;
}

// Control-to-species wiring: strong controls U1..U4 touch one species of an
// increasing and one of a decreasing block; weak controls U5..U8 touch two
// species on the same side.
constexpr int kMixingEdges[kControls][2] = {
    {0, 2},  // U1 -> Z1, Z3
    {1, 3},  // U2 -> Z2, Z4
    {4, 6},  // U3 -> Z5, Z7
    {5, 7},  // U4 -> Z6, Z8
    {0, 6},  // U5 -> Z1, Z7
    {1, 7},  // U6 -> Z2, Z8
    {2, 4},  // U7 -> Z3, Z5
    {3, 5},  // U8 -> Z4, Z6
};

}  // namespace

ChemSystemSpec sample_ensemble(std::uint64_t seed) {
  ChemSystemSpec spec;
  spec.seed = seed;
  spec.fields.reserve(kSystems);
  spec.rates.reserve(kSystems);
  for (int i = 0; i < kSystems; ++i) {
    Rng rng = Rng::stream(seed, {stream_tag::kChemRates, static_cast<std::uint64_t>(i + 1)});
    const auto rates = sample_rates(rng);
    spec.rates.push_back(rates);
    spec.fields.push_back(kinetics::mass_action_compile(kinetics::competition_network(rates)));
  }

  {
    Rng rng = Rng::stream(seed, {stream_tag::kChemMixing});
    spec.mixing = Eigen::MatrixXd::Zero(kSpecies, kControls);
    for (int u = 0; u < kControls; ++u)
      for (int e = 0; e < 2; ++e) spec.mixing(kMixingEdges[u][e], u) = rng.uniform(0.5, 1.5);
  }

  {
    Rng rng = Rng::stream(seed, {stream_tag::kChemInit});
    spec.z0_log_median.resize(kSystems, kSpecies);
    for (int i = 0; i < kSystems; ++i)
      for (int s = 0; s < kSpecies; ++s)
        spec.z0_log_median(i, s) = std::log(rng.uniform(0.5, 2.0));
  }

  {
    spec.confounder.reserve(kSystems);
    for (int i = 0; i < kSystems; ++i) {
      Rng rng = Rng::stream(seed, {stream_tag::kChemConfound, static_cast<std::uint64_t>(i + 1)});
      Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(kControls, kSpecies);
      for (int r = 0; r < kControls; ++r)
        for (int pick = 0; pick < 2; ++pick) {
          const int s = rng.uniform_int(0, kSpecies - 1);
          const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
          gamma(r, s) += sign * rng.uniform(0.04, 0.12);
        }
      spec.confounder.push_back(std::move(gamma));
    }
  }

  // Noise scale from a zero-control pilot run of each system: 5% of the
  // species' time-averaged level, floored.
  {
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(kSpecies);
    for (int i = 1; i <= kSystems; ++i) {
      const Eigen::VectorXd z0 = spec.z0_log_median.row(i - 1).array().exp().matrix();
      const auto traj = simulate_episode(spec, i, z0, Eigen::VectorXd::Zero(kControls), 1e-8);
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(kSpecies);
      for (const auto& x : traj.states) mean += x;
      avg += mean / static_cast<double>(traj.states.size());
    }
    avg /= static_cast<double>(kSystems);
    spec.noise_sigma = (0.05 * avg).cwiseMax(1e-3);
  }
  return spec;
}

ode::Trajectory observe(const ode::Trajectory& latent, const Eigen::VectorXd& noise_sigma,
                        Rng& rng) {
  ode::Trajectory noisy = latent;
  for (auto& x : noisy.states)
    for (Eigen::Index s = 0; s < x.size(); ++s) x[s] += noise_sigma[s] * rng.normal();
  return noisy;
}

namespace {

ChemEpisode generate_one_episode(const ChemSystemSpec& spec, int system, int run,
                                 std::uint64_t seed) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    Rng rng = Rng::stream(seed, {stream_tag::kChemTrain, static_cast<std::uint64_t>(system),
                                 static_cast<std::uint64_t>(run),
                                 static_cast<std::uint64_t>(attempt)});
    ChemEpisode ep;
    ep.system = system;
    ep.run = run;
    ep.z0 = spec.sample_z0(system, rng);
    Eigen::VectorXd eps(kControls);
    for (int a = 0; a < kControls; ++a) eps[a] = spec.confound_noise * rng.normal();
    ep.u = spec.confounder[system - 1] * (ep.z0 - spec.z0_mean(system)) + eps;
    ep.u = ep.u.cwiseMin(kControlBound).cwiseMax(-kControlBound);
    try {
      const auto latent = simulate_episode(spec, system, ep.z0, ep.u);
      Rng noise_rng =
          Rng::stream(seed, {stream_tag::kChemNoise, static_cast<std::uint64_t>(system),
                             static_cast<std::uint64_t>(run)});
      ep.observations = observe(latent, spec.noise_sigma, noise_rng);
      return ep;
    } catch (const DivergenceError&) {
      continue;  // redraw (z0, u)
    } catch (const StiffnessError&) {
      continue;
    }
  }
  throw DivergenceError("system " + std::to_string(system) + " run " + std::to_string(run) +
                            ": no finite episode in 50 draws",
                        0.0);
}

}  // namespace

std::vector<ChemEpisode> generate_training_data(const ChemSystemSpec& spec, int runs_per_system,
                                                std::uint64_t seed, int jobs) {
  std::vector<ChemEpisode> episodes(kSystems * runs_per_system);
  parallel_for(kSystems * runs_per_system, jobs, [&](int idx) {
    const int system = idx / runs_per_system + 1;
    const int run = idx % runs_per_system + 1;
    episodes[idx] = generate_one_episode(spec, system, run, seed);
  });
  return episodes;
}

std::vector<ChemEpisode> generate_training_data_serial(const ChemSystemSpec& spec,
                                                       int runs_per_system, std::uint64_t seed) {
  std::vector<ChemEpisode> episodes;
  episodes.reserve(kSystems * runs_per_system);
  for (int system = 1; system <= kSystems; ++system)
    for (int run = 1; run <= runs_per_system; ++run)
      episodes.push_back(generate_one_episode(spec, system, run, seed));
  return episodes;
}

std::string training_csv(const std::vector<ChemEpisode>& episodes) {
  std::vector<std::string> header{"system", "run", "t"};
  for (int s = 1; s <= kSpecies; ++s) header.push_back("X" + std::to_string(s));
  for (int a = 1; a <= kControls; ++a) header.push_back("U" + std::to_string(a));
  csv::Writer w(header);
  for (const auto& ep : episodes) {
    for (std::size_t i = 0; i < ep.observations.times.size(); ++i) {
      const double t = ep.observations.times[i];
      w.append(ep.system);
      w.append(ep.run);
      w.append(t);
      for (int s = 0; s < kSpecies; ++s) w.append(ep.observations.states[i][s]);
      const bool active = t < kImpulseEnd;
      for (int a = 0; a < kControls; ++a) w.append(active ? ep.u[a] : 0.0);
      w.end_row();
    }
  }
  return w.buffer();
}

std::vector<ChemTestCase> make_test_cases(const ChemSystemSpec& spec, int cases_per_system,
                                          std::uint64_t seed) {
  std::vector<ChemTestCase> cases(kSystems * cases_per_system);
  for (int system = 1; system <= kSystems; ++system) {
    for (int k = 1; k <= cases_per_system; ++k) {
      ChemTestCase tc;
      tc.system = system;
      tc.index = k;
      bool done = false;
      for (int attempt = 0; attempt < 50 && !done; ++attempt) {
        Rng rng = Rng::stream(seed, {stream_tag::kChemTest, static_cast<std::uint64_t>(system),
                                     static_cast<std::uint64_t>(k),
                                     static_cast<std::uint64_t>(attempt)});
        tc.z0_latent = spec.sample_z0(system, rng);
        Eigen::VectorXd u_probe(kControls);
        for (int a = 0; a < kControls; ++a) u_probe[a] = rng.uniform(-1.5, 1.5);
        try {
          const auto traj = simulate_episode(spec, system, tc.z0_latent, u_probe);
          // Window average of Y: the reachable target this probe realized.
          double acc = 0.0;
          int cnt = 0;
          for (std::size_t i = 0; i < traj.times.size(); ++i) {
            if (traj.times[i] < kWindowLo - 1e-9) continue;
            acc += traj.states[i][kinetics::kOutputSpecies];
            ++cnt;
          }
          tc.y_star = acc / cnt;
          if (!(tc.y_star > 0.0)) continue;  // the target is a concentration
          tc.x0_observed = tc.z0_latent;
          for (int s = 0; s < kSpecies; ++s)
            tc.x0_observed[s] += spec.noise_sigma[s] * rng.normal();
          done = true;
        } catch (const DivergenceError&) {
          continue;
        } catch (const StiffnessError&) {
          continue;
        }
      }
      if (!done)
        throw DivergenceError("test case generation failed for system " + std::to_string(system),
                              0.0);
      cases[(system - 1) * cases_per_system + (k - 1)] = std::move(tc);
    }
  }
  return cases;
}

std::string test_cases_csv(const std::vector<ChemTestCase>& cases) {
  std::vector<std::string> header{"system", "case"};
  for (int s = 1; s <= kSpecies; ++s) header.push_back("X" + std::to_string(s) + "_0");
  header.push_back("ystar");
  csv::Writer w(header);
  for (const auto& tc : cases) {
    w.append(tc.system);
    w.append(tc.index);
    for (int s = 0; s < kSpecies; ++s) w.append(tc.x0_observed[s]);
    w.append(tc.y_star);
    w.end_row();
  }
  return w.buffer();
}

nlohmann::json test_cases_private_json(const std::vector<ChemTestCase>& cases) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& tc : cases) {
    nlohmann::json j;
    j["system"] = tc.system;
    j["case"] = tc.index;
    j["z0"] = std::vector<double>(tc.z0_latent.data(), tc.z0_latent.data() + kSpecies);
    j["x0"] = std::vector<double>(tc.x0_observed.data(), tc.x0_observed.data() + kSpecies);
    j["ystar"] = tc.y_star;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<ChemTestCase> test_cases_from_private_json(const nlohmann::json& arr) {
  std::vector<ChemTestCase> cases;
  for (const auto& j : arr) {
    ChemTestCase tc;
    tc.system = j.at("system").get<int>();
    tc.index = j.at("case").get<int>();
    const auto z0 = j.at("z0").get<std::vector<double>>();
    const auto x0 = j.at("x0").get<std::vector<double>>();
    tc.z0_latent = Eigen::Map<const Eigen::VectorXd>(z0.data(), z0.size());
    tc.x0_observed = Eigen::Map<const Eigen::VectorXd>(x0.data(), x0.size());
    tc.y_star = j.at("ystar").get<double>();
    cases.push_back(std::move(tc));
  }
  return cases;
}

std::string ChemSubmission::to_csv() const {
  std::vector<std::string> header{"system", "case"};
  for (int a = 1; a <= kControls; ++a) header.push_back("u" + std::to_string(a));
  csv::Writer w(header);
  const int systems = static_cast<int>(controls.size()) / cases_per_system;
  for (int i = 1; i <= systems; ++i)
    for (int k = 1; k <= cases_per_system; ++k) {
      w.append(i);
      w.append(k);
      const auto& u = at(i, k);
      for (int a = 0; a < kControls; ++a) w.append(u[a]);
      w.end_row();
    }
  return w.buffer();
}

ChemSubmission ChemSubmission::from_csv_text(const std::string& text, int systems,
                                             int cases_per_system) {
  ChemSubmission sub;
  sub.cases_per_system = cases_per_system;
  sub.controls.assign(systems * cases_per_system, Eigen::VectorXd());

  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      continue;
    }
    const auto cells = csv::split_line(line);
    if (static_cast<int>(cells.size()) != 2 + kControls)
      throw ValidationError("submission line " + std::to_string(lineno) + ": expected " +
                            std::to_string(2 + kControls) + " cells");
    const long system = csv::parse_long(cells[0]);
    const long index = csv::parse_long(cells[1]);
    if (system < 1 || system > systems || index < 1 || index > cases_per_system)
      throw ValidationError("submission line " + std::to_string(lineno) +
                            ": (system, case) out of range");
    Eigen::VectorXd u(kControls);
    for (int a = 0; a < kControls; ++a) u[a] = csv::parse_double(cells[2 + a]);
    sub.controls[(system - 1) * cases_per_system + (index - 1)] = std::move(u);
  }
  for (std::size_t i = 0; i < sub.controls.size(); ++i)
    if (sub.controls[i].size() != kControls)
      throw ValidationError("submission missing entry for flat index " + std::to_string(i));
  return sub;
}

namespace {

ChemCaseScore score_case(const ChemSystemSpec& spec, const ChemTestCase& tc,
                         const Eigen::VectorXd& u_submitted) {
  ChemCaseScore s;
  s.system = tc.system;
  s.index = tc.index;

  Eigen::VectorXd u = u_submitted.cwiseMin(kControlBound).cwiseMax(-kControlBound);
  s.clipped = (u - u_submitted).norm() > 0.0;
  s.penalty = kCostWeight * std::sqrt(u.squaredNorm() / kControls);

  try {
    const auto traj = simulate_episode(spec, tc.system, tc.z0_latent, u);
    s.tracking =
        ode::windowed_rms(traj, kinetics::kOutputSpecies, tc.y_star, kWindowLo, kWindowHi);
  } catch (const DivergenceError&) {
    s.tracking = kDivergencePenalty;
    s.diverged = true;
  } catch (const StiffnessError&) {
    s.tracking = kDivergencePenalty;
    s.diverged = true;
  }
  s.total = s.tracking + s.penalty;
  return s;
}

ChemScoreReport assemble_report(const ChemSystemSpec& spec, std::vector<ChemCaseScore> cases,
                                int cases_per_system) {
  ChemScoreReport report;
  report.seed = spec.seed;
  report.cases = std::move(cases);
  report.system_means.assign(kSystems, 0.0);
  for (const auto& c : report.cases) report.system_means[c.system - 1] += c.total;
  for (double& m : report.system_means) m /= cases_per_system;
  report.grand_mean = 0.0;
  for (double m : report.system_means) report.grand_mean += m;
  report.grand_mean /= kSystems;
  return report;
}

}  // namespace

ChemScoreReport evaluate_submission(const ChemSystemSpec& spec,
                                    const std::vector<ChemTestCase>& cases,
                                    const ChemSubmission& submission, int jobs) {
  if (static_cast<int>(cases.size()) != static_cast<int>(submission.controls.size()))
    throw ValidationError("submission shape does not match the test cases");
  std::vector<ChemCaseScore> scores(cases.size());
  parallel_for(static_cast<int>(cases.size()), jobs, [&](int i) {
    scores[i] = score_case(spec, cases[i], submission.at(cases[i].system, cases[i].index));
  });
  return assemble_report(spec, std::move(scores), submission.cases_per_system);
}

ChemScoreReport evaluate_submission_serial(const ChemSystemSpec& spec,
                                           const std::vector<ChemTestCase>& cases,
                                           const ChemSubmission& submission) {
  if (static_cast<int>(cases.size()) != static_cast<int>(submission.controls.size()))
    throw ValidationError("submission shape does not match the test cases");
  std::vector<ChemCaseScore> scores;
  scores.reserve(cases.size());
  for (const auto& tc : cases)
    scores.push_back(score_case(spec, tc, submission.at(tc.system, tc.index)));
  return assemble_report(spec, std::move(scores), submission.cases_per_system);
}

std::string ChemScoreReport::to_json_text() const {
  nlohmann::json j;
  j["track"] = "chem";
  j["seed"] = seed;
  j["cases"] = nlohmann::json::array();
  for (const auto& c : cases) {
    nlohmann::json cj;
    cj["system"] = c.system;
    cj["case"] = c.index;
    cj["tracking"] = c.tracking;
    cj["penalty"] = c.penalty;
    cj["total"] = c.total;
    cj["clipped"] = c.clipped;
    cj["diverged"] = c.diverged;
    j["cases"].push_back(std::move(cj));
  }
  j["system_means"] = system_means;
  j["grand_mean"] = grand_mean;
  return j.dump(2) + "\n";
}

std::string ChemSystemSpec::to_json_text() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["fields"] = nlohmann::json::array();
  for (const auto& f : fields) j["fields"].push_back(kinetics::field_to_json(f));
  j["rates"] = nlohmann::json::array();
  for (const auto& r : rates) j["rates"].push_back(std::vector<double>(r.begin(), r.end()));
  j["mixing"] = std::vector<double>(mixing.data(), mixing.data() + mixing.size());
  j["noise_sigma"] =
      std::vector<double>(noise_sigma.data(), noise_sigma.data() + noise_sigma.size());
  j["z0_log_median"] =
      std::vector<double>(z0_log_median.data(), z0_log_median.data() + z0_log_median.size());
  j["z0_log_sigma"] = z0_log_sigma;
  j["confounder"] = nlohmann::json::array();
  for (const auto& g : confounder)
    j["confounder"].push_back(std::vector<double>(g.data(), g.data() + g.size()));
  j["confound_noise"] = confound_noise;
  return j.dump(2) + "\n";
}

ChemSystemSpec ChemSystemSpec::from_json_text(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ChemSystemSpec spec;
  spec.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& f : j.at("fields")) spec.fields.push_back(kinetics::field_from_json(f));
  for (const auto& r : j.at("rates")) {
    std::array<double, 10> a{};
    for (int i = 0; i < 10; ++i) a[i] = r.at(i).get<double>();
    spec.rates.push_back(a);
  }
  auto mat_from = [&](const nlohmann::json& arr, int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    const auto v = arr.get<std::vector<double>>();
    if (static_cast<int>(v.size()) != rows * cols)
      throw ValidationError("chem spec JSON: matrix size mismatch");
    std::copy(v.begin(), v.end(), m.data());
    return m;
  };
  spec.mixing = mat_from(j.at("mixing"), kSpecies, kControls);
  const auto ns = j.at("noise_sigma").get<std::vector<double>>();
  spec.noise_sigma = Eigen::Map<const Eigen::VectorXd>(ns.data(), ns.size());
  spec.z0_log_median = mat_from(j.at("z0_log_median"), kSystems, kSpecies);
  spec.z0_log_sigma = j.at("z0_log_sigma").get<double>();
  for (const auto& g : j.at("confounder"))
    spec.confounder.push_back(mat_from(g, kControls, kSpecies));
  spec.confound_noise = j.at("confound_noise").get<double>();
  return spec;
}

}  // namespace lbd::chem
