#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bwa/bounds.hpp"
#include "bwa/io.hpp"
#include "bwa/noise.hpp"
#include "bwa/occupation.hpp"
#include "bwa/stats.hpp"

namespace bwa {

enum class ExperimentKind { consistency, robustness, domination };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

struct NoiseConfig {
  double Xi = 0.0;
  NoiseKind kind = NoiseKind::uniform;
  std::uint64_t seed = 0;
  /// Hypothesis id adversarial noise pulls toward; defaults to the hypothesis
  /// with the largest expected loss.
  std::optional<int> designated;
};

/// A schedule entry is either an explicit n or the name of a bound whose
/// inverted sample size is used: "lemma2", "theorem2" or "theorem4".
using ScheduleItem = std::variant<std::uint64_t, std::string>;

/// Explicit bound parameters; when present they replace the values derived from
/// the problem (certificate, good volumes, covering model).
struct BoundOverrides {
  std::optional<double> M, L, gamma, B, rho, N, V_eps_quarter, V_eps_half;
  std::optional<SpaceCapacity> capacity;
};

struct ExperimentConfig {
  explicit ExperimentConfig(Problem p) : problem(std::move(p)) {}

  Problem problem;
  double alpha = 0.5;
  double eps = 0.3;
  double delta = 0.1;
  std::optional<NoiseConfig> noise;
  std::size_t trials = 200;
  std::vector<ScheduleItem> schedule;
  std::uint64_t seed = 20240601;
  OccupationMethod sampler = OccupationMethod::automatic;
  std::size_t threads = 1;
  std::size_t certificate_horizon = 50;
  BoundOverrides bounds;
};

/// JSON keys: fixture | chain + space, task.kind, task.target, alpha, eps, delta,
/// trials, schedule, seed, sampler (automatic | stepwise | renewal), threads,
/// certificate_horizon, noise.xi, noise.kind, noise.seed, noise.designated,
/// bounds.{M, L, gamma, B, rho, N, V_eps_quarter, V_eps_half, capacity}.
ExperimentConfig config_from_json(const json& j);

/// Trials >= 30, alpha/eps/delta in range. Throws std::invalid_argument.
void validate(const ExperimentConfig& config);

/// Exact problem quantities shared by every trial.
struct ProblemQuantities {
  Eigen::VectorXd pi;
  ErgodicityCertificate certificate;
  std::vector<double> expected_loss;
  double gamma_star = 0.0;
  std::size_t optimal_index = 0;
  double V_eps_quarter = 1.0;
  double V_eps_half = 1.0;
  std::vector<std::size_t> bad;  ///< indices with l(h) > gamma* + eps
};
ProblemQuantities problem_quantities(const ExperimentConfig& config);

BoundInputs bound_inputs(const ExperimentConfig& config, const ProblemQuantities& q);

struct ScheduleEntry {
  std::uint64_t n = 0;
  std::string label;  ///< "practical" or the bound name
};
/// Resolves bound names and checks the schedule is strictly increasing.
std::vector<ScheduleEntry> resolve_schedule(const ExperimentConfig& config, const BoundInputs& inputs);

struct TrialRecord {
  std::uint64_t n = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double l_hbar = 0.0;
  double gamma_star = 0.0;
  double excess = 0.0;
  double sup_bad_log_weight = 0.0;  ///< -inf when the bad set is empty
  double log_threshold = 0.0;
  bool lemma2_event = false;
  bool theorem_event = false;  ///< excess <= eps + Xi
  double max_perturbation = 0.0;
  double erm_excess = 0.0;
  std::string status = "ok";
};

struct ScheduleSummary {
  ScheduleEntry entry;
  std::size_t failed = 0;
  double median_excess = 0.0;
  double p90_excess = 0.0;
  double median_erm_excess = 0.0;
  double max_perturbation = 0.0;
  ProportionEstimate theorem_event;
  ProportionEstimate lemma2_event;
};

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct TrialReport {
  ExperimentKind kind = ExperimentKind::consistency;
  BoundInputs inputs;
  double gamma_star = 0.0;
  std::vector<TrialRecord> trials;
  std::vector<ScheduleSummary> per_n;
  std::vector<Assertion> assertions;

  [[nodiscard]] bool passed() const;
};

/// One-sided event checks use Wilson lower bound >= 1 - delta - kEventSlack.
inline constexpr double kEventSlack = 0.02;

TrialReport run_consistency(const ExperimentConfig& config);
/// Requires config.noise. Training sees noisy targets; losses are evaluated
/// against the clean stationary expectation.
TrialReport run_robustness(const ExperimentConfig& config);
/// Throws std::invalid_argument when no hypothesis lies outside H_{gamma*+eps}.
TrialReport run_weight_domination(const ExperimentConfig& config);
TrialReport run_experiment(ExperimentKind kind, const ExperimentConfig& config);

/// Columns: n,trial,seed,l_hbar,gamma_star,excess,sup_bad_log_weight,log_threshold,
/// lemma2_event,theorem_event,max_perturbation,erm_excess,status.
std::string report_csv(const TrialReport& report);
json summary_json(const TrialReport& report);
/// Writes report.csv and summary.json into `dir`, creating it if needed.
void write_report(const TrialReport& report, const std::filesystem::path& dir);

struct BoundRow {
  std::string name;
  BoundResult result;
};
struct BoundTable {
  BoundInputs inputs;
  std::vector<BoundRow> rows;
  double guarantee_excess = 0.0;
};
BoundTable run_bound_table(const ExperimentConfig& config);
/// Human-readable table; every number is printed exactly as in bound_table_json.
std::string bound_table_text(const BoundTable& table);
json bound_table_json(const BoundTable& table);

}  // namespace bwa
