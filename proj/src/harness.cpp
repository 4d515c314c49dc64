#include "bwa/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "bwa/rng.hpp"
#include "bwa/tasks.hpp"
#include "bwa/weights.hpp"

namespace bwa {

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::consistency: return "consistency";
    case ExperimentKind::robustness: return "robustness";
    case ExperimentKind::domination: return "domination";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  if (name == "consistency") return ExperimentKind::consistency;
  if (name == "robustness") return ExperimentKind::robustness;
  if (name == "domination") return ExperimentKind::domination;
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

namespace {

OccupationMethod parse_sampler(std::string_view name) {
  if (name == "automatic") return OccupationMethod::automatic;
  if (name == "stepwise") return OccupationMethod::stepwise;
  if (name == "renewal") return OccupationMethod::renewal;
  throw std::invalid_argument("unknown sampler '" + std::string(name) + "'");
}

template <class T>
void read_opt(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key)) out = j[key].get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c(problem_from_json(j));
  c.alpha = j.value("alpha", c.alpha);
  c.eps = j.value("eps", c.eps);
  c.delta = j.value("delta", c.delta);
  c.trials = j.value("trials", c.trials);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  c.certificate_horizon = j.value("certificate_horizon", c.certificate_horizon);
  if (j.contains("sampler")) c.sampler = parse_sampler(j["sampler"].get<std::string>());
  if (j.contains("schedule")) {
    for (const auto& item : j["schedule"]) {
      if (item.is_string()) c.schedule.emplace_back(item.get<std::string>());
      else if (item.is_number_unsigned() || (item.is_number_integer() && item.get<long long>() > 0))
        c.schedule.emplace_back(item.get<std::uint64_t>());
      else throw std::invalid_argument("schedule entries are positive integers or bound names");
    }
  }
  if (j.contains("noise")) {
    const auto& nj = j["noise"];
    NoiseConfig n;
    n.Xi = nj.value("xi", 0.0);
    n.kind = parse_noise_kind(nj.value("kind", "uniform"));
    n.seed = nj.value("seed", std::uint64_t{0});
    read_opt(nj, "designated", n.designated);
    c.noise = n;
  }
  if (j.contains("bounds")) {
    const auto& b = j["bounds"];
    read_opt(b, "M", c.bounds.M);
    read_opt(b, "L", c.bounds.L);
    read_opt(b, "gamma", c.bounds.gamma);
    read_opt(b, "B", c.bounds.B);
    read_opt(b, "rho", c.bounds.rho);
    read_opt(b, "N", c.bounds.N);
    read_opt(b, "V_eps_quarter", c.bounds.V_eps_quarter);
    read_opt(b, "V_eps_half", c.bounds.V_eps_half);
    if (b.contains("capacity")) {
      const auto& cj = b["capacity"];
      SpaceCapacity cap = c.problem.capacity;
      cap.c = cj.value("c", cap.c);
      cap.d = cj.value("d", cap.d);
      cap.q = cj.value("q", cap.q);
      c.bounds.capacity = cap;
    }
  }
  validate(c);
  return c;
}

void validate(const ExperimentConfig& c) {
  if (c.trials < 30) throw std::invalid_argument("trials must be >= 30 for a probability estimate");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(c.eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (c.threads == 0) throw std::invalid_argument("threads must be >= 1");
  if (c.noise && !(c.noise->Xi >= 0.0)) throw std::invalid_argument("noise.xi must be >= 0");
}

ProblemQuantities problem_quantities(const ExperimentConfig& c) {
  const auto& space = c.problem.finite_space();
  const auto& chain = c.problem.chain;
  ProblemQuantities q;
  q.pi = stationary_distribution(chain).probabilities;
  q.certificate = fit_certificate(chain, c.certificate_horizon);
  q.expected_loss = expected_losses(space, chain, q.pi);
  q.gamma_star = optimal_loss_gamma_star(q.expected_loss, space.priors());
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (space.prior(i) > 0.0 && q.expected_loss[i] == q.gamma_star) {
      q.optimal_index = i;
      break;
    }
  }
  q.V_eps_quarter = good_volume_V_eps(q.expected_loss, space.priors(), c.eps / 4.0);
  q.V_eps_half = good_volume_V_eps(q.expected_loss, space.priors(), c.eps / 2.0);
  for (std::size_t i = 0; i < space.size(); ++i)
    if (q.expected_loss[i] > q.gamma_star + c.eps) q.bad.push_back(i);
  return q;
}

BoundInputs bound_inputs(const ExperimentConfig& c, const ProblemQuantities& q) {
  const auto& o = c.bounds;
  BoundInputs in;
  in.eps = c.eps;
  in.delta = c.delta;
  in.alpha = c.alpha;
  in.M = o.M.value_or(c.problem.capacity.M);
  in.L = o.L.value_or(c.problem.capacity.L);
  in.gamma = o.gamma.value_or(q.certificate.gamma);
  in.B = o.B.value_or(q.certificate.B);
  in.rho = o.rho.value_or(q.certificate.rho);
  const SpaceCapacity cap = o.capacity.value_or(c.problem.capacity);
  if (o.N) in.covering = CoveringModel::fixed(*o.N);
  else if (c.problem.space) in.covering = CoveringModel::finite(c.problem.space->size(), cap);
  else in.covering = CoveringModel::parametric(cap);
  in.capacity = cap;
  in.V_eps_quarter = o.V_eps_quarter.value_or(q.V_eps_quarter);
  in.V_eps_half = o.V_eps_half.value_or(q.V_eps_half);
  in.Xi = c.noise ? c.noise->Xi : 0.0;
  return in;
}

std::vector<ScheduleEntry> resolve_schedule(const ExperimentConfig& c, const BoundInputs& in) {
  std::vector<ScheduleEntry> out;
  for (const auto& item : c.schedule) {
    ScheduleEntry e;
    if (const auto* n = std::get_if<std::uint64_t>(&item)) {
      if (*n == 0) throw std::invalid_argument("schedule: n must be >= 1");
      e = {*n, "practical"};
    } else {
      const auto& name = std::get<std::string>(item);
      BoundResult r;
      if (name == "lemma2") r = lemma2_ne(in);
      else if (name == "theorem2") r = theorem2_ne(in);
      else if (name == "theorem4") r = theorem4_guarantee(in).bound;
      else throw std::invalid_argument("schedule: unknown bound '" + name + "'");
      if (!r.n_required) throw std::invalid_argument("schedule: " + name + " sample size overflows");
      e = {*r.n_required, name};
    }
    if (!out.empty() && e.n <= out.back().n)
      throw std::invalid_argument("schedule must be strictly increasing (n = " + std::to_string(e.n) + " after " +
                                  std::to_string(out.back().n) + ")");
    out.push_back(e);
  }
  if (out.empty()) throw std::invalid_argument("schedule is empty");
  return out;
}

bool TrialReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

namespace {

/// Uniform label noise needs every draw; longer paths than this are refused.
constexpr std::uint64_t kMaxPathLength = 20'000'000;

struct Labelled {
  std::vector<StatePoint> points;
  std::vector<double> counts;
};

Labelled from_counts(const FiniteChainSpec& chain, const std::vector<std::uint64_t>& counts) {
  Labelled l;
  for (std::size_t z = 0; z < chain.size(); ++z) {
    if (counts[z] == 0) continue;
    l.points.push_back(chain.state(z));
    l.counts.push_back(static_cast<double>(counts[z]));
  }
  return l;
}

Labelled from_path(const Trajectory& traj) {
  Labelled l;
  std::map<std::pair<std::vector<double>, double>, double> tally;
  for (const auto& z : traj.points) tally[{z.x, z.y}] += 1.0;
  for (const auto& [key, c] : tally) {
    l.points.push_back(StatePoint{key.first, key.second});
    l.counts.push_back(c);
  }
  return l;
}

/// Count-domain noise: the number of positive two-point draws among N_z visits
/// is Binomial(N_z, 1/2); adversarial noise is deterministic per state.
Labelled noisy_counts(const Labelled& clean, const NoiseSpec& spec) {
  if (spec.Xi == 0.0) return clean;
  Labelled out;
  const double half = 0.5 * spec.Xi;
  CounterRng rng(spec.seed, 4);
  for (std::size_t j = 0; j < clean.points.size(); ++j) {
    const auto& z = clean.points[j];
    if (spec.kind == NoiseKind::two_point) {
      const auto total = static_cast<std::uint64_t>(clean.counts[j]);
      std::binomial_distribution<std::uint64_t> split(total, 0.5);
      const auto up = split(rng);
      out.points.push_back(StatePoint{z.x, z.y - half});
      out.counts.push_back(static_cast<double>(total - up));
      out.points.push_back(StatePoint{z.x, z.y + half});
      out.counts.push_back(static_cast<double>(up));
    } else {
      out.points.push_back(StatePoint{z.x, z.y + noise_value(spec, z, 0.0)});
      out.counts.push_back(clean.counts[j]);
    }
  }
  return out;
}

struct Context {
  const ExperimentConfig* config;
  const ProblemQuantities* q;
  std::optional<NoiseSpec> noise;
  double Xi = 0.0;
};

TrialRecord run_trial(const Context& ctx, std::uint64_t n, std::size_t t) {
  const auto& c = *ctx.config;
  const auto& space = c.problem.finite_space();
  const auto& chain = c.problem.chain;
  const auto& q = *ctx.q;

  TrialRecord r;
  r.n = n;
  r.trial = t;
  r.seed = derive_seed(c.seed, {n, t});
  r.gamma_star = q.gamma_star;
  try {
    std::optional<NoiseSpec> noise = ctx.noise;
    if (noise) noise->seed = derive_seed(noise->seed, {n, t});
    const bool need_path = noise && noise->Xi > 0.0 && noise->kind == NoiseKind::uniform;

    Labelled clean, noisy;
    if (need_path) {
      if (n > kMaxPathLength)
        throw std::invalid_argument("uniform noise needs the full path; n = " + std::to_string(n) + " is too long");
      const Trajectory path = sample_path(chain, n, r.seed);
      clean = from_path(path);
      noisy = from_path(inject_noise(path, *noise));
    } else {
      clean = from_counts(chain, sample_occupation(chain, n, r.seed, c.sampler));
      noisy = noise ? noisy_counts(clean, *noise) : clean;
    }
    const double slack = 0.5 * ctx.Xi;
    const WeightState clean_state = train_weighted(space, clean.points, clean.counts, c.alpha);
    const WeightState state = train_weighted(space, noisy.points, noisy.counts, c.alpha, slack);

    r.l_hbar = mixture_expected_loss(state, space, chain, q.pi);
    r.excess = mixture_excess_loss(state, space, chain, q.pi, q.optimal_index);
    r.theorem_event = r.excess <= c.eps + ctx.Xi;

    const auto logw = log_normalized_weights(state, space);
    r.sup_bad_log_weight = -std::numeric_limits<double>::infinity();
    for (auto i : q.bad) r.sup_bad_log_weight = std::max(r.sup_bad_log_weight, logw[i]);
    r.log_threshold = log_weight_domination_threshold(c.alpha, static_cast<double>(n), c.eps, q.V_eps_half);
    r.lemma2_event = r.sup_bad_log_weight <= r.log_threshold;

    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < space.size(); ++i)
      r.max_perturbation =
          std::max(r.max_perturbation, std::abs(state.cumulative_loss[i] - clean_state.cumulative_loss[i]) / dn);

    const auto& erm = erm_select(space, state.cumulative_loss);
    r.erm_excess = q.expected_loss[space.index_of(erm.id())] - q.gamma_star;
  } catch (const std::exception& e) {
    r.status = std::string("error: ") + e.what();
  }
  return r;
}

std::vector<TrialRecord> run_trials(const Context& ctx, std::uint64_t n) {
  const std::size_t T = ctx.config->trials;
  std::vector<TrialRecord> out(T);
  const std::size_t workers = std::min(ctx.config->threads, T);
  if (workers <= 1) {
    for (std::size_t t = 0; t < T; ++t) out[t] = run_trial(ctx, n, t);
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t t = w; t < T; t += workers) out[t] = run_trial(ctx, n, t);
    });
  for (auto& th : pool) th.join();
  return out;
}

ScheduleSummary summarise(const ScheduleEntry& entry, const std::vector<TrialRecord>& records) {
  ScheduleSummary s;
  s.entry = entry;
  std::vector<double> excess, erm;
  std::size_t theorem_hits = 0, lemma_hits = 0;
  for (const auto& r : records) {
    if (r.status != "ok") {
      ++s.failed;
      continue;
    }
    excess.push_back(r.excess);
    erm.push_back(r.erm_excess);
    theorem_hits += r.theorem_event;
    lemma_hits += r.lemma2_event;
    s.max_perturbation = std::max(s.max_perturbation, r.max_perturbation);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.median_excess = excess.empty() ? nan : median(excess);
  s.p90_excess = excess.empty() ? nan : quantile(excess, 0.9);
  s.median_erm_excess = erm.empty() ? nan : median(erm);
  // failed trials count against the event
  s.theorem_event = wilson_interval(theorem_hits, records.size());
  s.lemma2_event = wilson_interval(lemma_hits, records.size());
  return s;
}

std::string describe(const ProportionEstimate& p) {
  std::ostringstream os;
  os << p.successes << "/" << p.trials << " (Wilson 95% [" << format_double(p.lower) << ", "
     << format_double(p.upper) << "])";
  return os.str();
}

TrialReport run(ExperimentKind kind, const ExperimentConfig& c) {
  validate(c);
  const auto q = problem_quantities(c);
  if (kind == ExperimentKind::domination && q.bad.empty()) {
    double widest = 0.0;
    for (std::size_t i = 0; i < q.expected_loss.size(); ++i)
      if (c.problem.finite_space().prior(i) > 0.0) widest = std::max(widest, q.expected_loss[i] - q.gamma_star);
    std::ostringstream os;
    os << "no hypothesis has l(h) > gamma* + eps at eps = " << format_double(c.eps);
    if (widest > 0.0) os << "; the bad set is nonempty for every eps < " << format_double(widest);
    else os << "; every hypothesis is optimal, so no eps gives a bad set";
    throw std::invalid_argument(os.str());
  }
  if (kind == ExperimentKind::robustness && !c.noise) throw std::invalid_argument("robustness needs a noise block");

  Context ctx{&c, &q, std::nullopt, 0.0};
  const auto& space = c.problem.finite_space();
  if (kind == ExperimentKind::robustness) {
    NoiseSpec ns{c.noise->Xi, c.noise->kind, c.noise->seed, std::nullopt};
    if (ns.kind == NoiseKind::adversarial) {
      std::size_t idx = 0;
      if (c.noise->designated) {
        idx = space.index_of(*c.noise->designated);
      } else {
        for (std::size_t i = 1; i < space.size(); ++i)
          if (q.expected_loss[i] > q.expected_loss[idx]) idx = i;
      }
      ns.designated = space.hypothesis(idx);
    }
    ctx.noise = ns;
    ctx.Xi = ns.Xi;
  }

  TrialReport report;
  report.kind = kind;
  report.inputs = bound_inputs(c, q);
  report.gamma_star = q.gamma_star;
  const auto schedule = resolve_schedule(c, report.inputs);
  for (const auto& e : schedule) {
    auto records = run_trials(ctx, e.n);
    report.per_n.push_back(summarise(e, records));
    for (auto& r : records) report.trials.push_back(std::move(r));
  }

  const double floor = 1.0 - c.delta - kEventSlack;
  std::size_t failed = 0;
  for (const auto& s : report.per_n) failed += s.failed;
  report.assertions.push_back({"trials completed", failed == 0, std::to_string(failed) + " failed trials"});

  for (const auto& s : report.per_n) {
    const std::string at = " at n = " + std::to_string(s.entry.n);
    if (kind == ExperimentKind::domination && s.entry.label == "lemma2") {
      report.assertions.push_back(
          {"weight domination event" + at, s.lemma2_event.lower >= floor, describe(s.lemma2_event)});
    }
    if (kind != ExperimentKind::domination && (s.entry.label == "theorem2" || s.entry.label == "theorem4")) {
      report.assertions.push_back({(kind == ExperimentKind::robustness ? "excess <= eps + Xi" : "excess <= eps") + at,
                                   s.theorem_event.lower >= floor, describe(s.theorem_event)});
    }
  }
  if (kind == ExperimentKind::consistency) {
    std::vector<const ScheduleSummary*> practical;
    for (const auto& s : report.per_n)
      if (s.entry.label == "practical") practical.push_back(&s);
    if (practical.size() >= 2) {
      bool down = true;
      std::ostringstream os;
      for (std::size_t i = 0; i < practical.size(); ++i) {
        if (i) os << " > ";
        os << format_double(practical[i]->median_excess);
        if (i && !(practical[i]->median_excess < practical[i - 1]->median_excess)) down = false;
      }
      report.assertions.push_back({"median excess strictly decreasing over practical n", down, os.str()});
    }
  }
  if (kind == ExperimentKind::robustness) {
    double worst = 0.0;
    for (const auto& s : report.per_n) worst = std::max(worst, s.max_perturbation);
    report.assertions.push_back({"empirical loss perturbation <= Xi/2", worst <= 0.5 * ctx.Xi + 1e-12,
                                 "max " + format_double(worst) + ", Xi/2 = " + format_double(0.5 * ctx.Xi)});
  }
  return report;
}

}  // namespace

TrialReport run_consistency(const ExperimentConfig& c) { return run(ExperimentKind::consistency, c); }
TrialReport run_robustness(const ExperimentConfig& c) { return run(ExperimentKind::robustness, c); }
TrialReport run_weight_domination(const ExperimentConfig& c) { return run(ExperimentKind::domination, c); }
TrialReport run_experiment(ExperimentKind kind, const ExperimentConfig& c) { return run(kind, c); }

std::string report_csv(const TrialReport& report) {
  std::ostringstream os;
  os << "n,trial,seed,l_hbar,gamma_star,excess,sup_bad_log_weight,log_threshold,lemma2_event,theorem_event,"
        "max_perturbation,erm_excess,status\n";
  for (const auto& r : report.trials) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    os << r.n << ',' << r.trial << ',' << r.seed << ',' << format_double(r.l_hbar) << ','
       << format_double(r.gamma_star) << ',' << format_double(r.excess) << ',' << format_double(r.sup_bad_log_weight)
       << ',' << format_double(r.log_threshold) << ',' << (r.lemma2_event ? 1 : 0) << ','
       << (r.theorem_event ? 1 : 0) << ',' << format_double(r.max_perturbation) << ','
       << format_double(r.erm_excess) << ',' << status << '\n';
  }
  return os.str();
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json proportion_json(const ProportionEstimate& p) {
  return {{"successes", p.successes}, {"trials", p.trials}, {"estimate", p.estimate}, {"wilson_lower", p.lower},
          {"wilson_upper", p.upper}};
}

json bound_json(const BoundResult& r) {
  json terms = json::object();
  for (const auto& t : r.terms) terms[t.name] = t.value;
  return {{"n_e_required", r.n_e_required},
          {"n_required", r.n_required ? json(*r.n_required) : json(nullptr)},
          {"vacuous", r.vacuous},
          {"terms", terms}};
}

json inputs_json(const BoundInputs& in) {
  return {{"eps", in.eps},     {"delta", in.delta}, {"M", in.M},         {"L", in.L},
          {"gamma", in.gamma}, {"B", in.B},         {"rho", in.rho},     {"alpha", in.alpha},
          {"V_eps_quarter", in.V_eps_quarter},      {"V_eps_half", in.V_eps_half}, {"Xi", in.Xi}};
}

}  // namespace

json summary_json(const TrialReport& report) {
  json j;
  j["experiment"] = std::string(to_string(report.kind));
  j["gamma_star"] = report.gamma_star;
  j["inputs"] = inputs_json(report.inputs);
  json per_n = json::array();
  for (const auto& s : report.per_n) {
    per_n.push_back({{"n", s.entry.n},
                     {"label", s.entry.label},
                     {"failed", s.failed},
                     {"median_excess", number_or_null(s.median_excess)},
                     {"p90_excess", number_or_null(s.p90_excess)},
                     {"median_erm_excess", number_or_null(s.median_erm_excess)},
                     {"max_perturbation", s.max_perturbation},
                     {"theorem_event", proportion_json(s.theorem_event)},
                     {"lemma2_event", proportion_json(s.lemma2_event)}});
  }
  j["per_n"] = per_n;
  json asserts = json::array();
  for (const auto& a : report.assertions) asserts.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  j["assertions"] = asserts;
  j["passed"] = report.passed();
  return j;
}

void write_report(const TrialReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "report.csv") << report_csv(report);
  std::ofstream(dir / "summary.json") << summary_json(report).dump(2) << '\n';
}

BoundTable run_bound_table(const ExperimentConfig& c) {
  const auto q = problem_quantities(c);
  BoundTable t;
  t.inputs = bound_inputs(c, q);
  t.rows.push_back({"lemma1", lemma1_ne(t.inputs)});
  t.rows.push_back({"lemma2", lemma2_ne(t.inputs)});
  t.rows.push_back({"theorem2", theorem2_ne(t.inputs)});
  t.rows.push_back({"corollary1", corollary1_ne(t.inputs)});
  const auto th4 = theorem4_guarantee(t.inputs);
  t.rows.push_back({"theorem4", th4.bound});
  t.guarantee_excess = th4.guarantee_excess;
  return t;
}

namespace {

/// Shortest round-trip text, identical to how the JSON mirror prints the value.
std::string num(double v) { return json(v).dump(); }

}  // namespace

json bound_table_json(const BoundTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = bound_json(r.result);
    row["bound"] = r.name;
    rows.push_back(row);
  }
  return {{"inputs", inputs_json(t.inputs)}, {"bounds", rows}, {"theorem4_guarantee_excess", t.guarantee_excess}};
}

std::string bound_table_text(const BoundTable& t) {
  std::ostringstream os;
  os << "bound       n_e                      n                     terms\n";
  for (const auto& r : t.rows) {
    std::string name = r.name;
    name.resize(std::max<std::size_t>(name.size(), 11), ' ');
    std::string ne = num(r.result.n_e_required);
    ne.resize(std::max<std::size_t>(ne.size(), 24), ' ');
    std::string n = r.result.n_required ? std::to_string(*r.result.n_required) : std::string("overflow");
    if (r.result.vacuous) n += " (vacuous)";
    n.resize(std::max<std::size_t>(n.size(), 21), ' ');
    os << name << ' ' << ne << ' ' << n << ' ';
    for (std::size_t i = 0; i < r.result.terms.size(); ++i)
      os << (i ? " " : "") << r.result.terms[i].name << '=' << num(r.result.terms[i].value);
    os << '\n';
  }
  os << "theorem4 guarantee: excess <= " << num(t.guarantee_excess) << '\n';
  return os.str();
}

}  // namespace bwa
