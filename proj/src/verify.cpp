#include "bwa/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "bwa/bounds.hpp"
#include "bwa/chain.hpp"
#include "bwa/fixtures.hpp"
#include "bwa/harness.hpp"
#include "bwa/mcmc.hpp"
#include "bwa/noise.hpp"
#include "bwa/tasks.hpp"
#include "bwa/weights.hpp"

namespace bwa::verify {

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

std::string fmt(double v) { return format_double(v); }

ExperimentConfig reference_config(std::vector<ScheduleItem> schedule) {
  ExperimentConfig c(problem_from_fixture(make_fixture("reference")));
  c.alpha = 0.5;
  c.eps = 0.3;
  c.delta = 0.1;
  c.trials = 200;
  c.seed = 20240601;
  c.schedule = std::move(schedule);
  return c;
}

Outcome ess_regression() {
  struct Case {
    std::uint64_t n;
    double rho;
    std::uint64_t expect;
  };
  const Case cases[] = {{100, std::exp(-8.0), 10}, {1000, 0.5, 9}, {1, 0.5, 0}};
  std::ostringstream os;
  bool ok = true;
  for (const auto& c : cases) {
    const auto got = effective_sample_size(c.n, c.rho);
    ok = ok && got == c.expect;
    os << "n=" << c.n << " rho=" << fmt(c.rho) << " -> " << got << " (want " << c.expect << "); ";
  }
  return {ok, os.str()};
}

Outcome bound_regression() {
  std::ostringstream os;
  bool ok = true;
  auto check = [&](const char* name, double got, double want) {
    const bool good = close_rel(got, want, 1e-9);
    ok = ok && good;
    os << name << "=" << fmt(got) << (good ? " ok; " : " MISMATCH; ");
  };
  BoundInputs a;
  a.eps = 0.1;
  a.delta = 0.05;
  a.M = 1.0;
  a.L = 1.0;
  a.gamma = 1.0;
  a.B = 2.0;
  a.covering = CoveringModel::fixed(8.0);
  check("lemma1", lemma1_ne(a).n_e_required, 4806.2926096125253887784599641);
  check("lemma2", lemma2_ne(a).n_e_required, 173026.533946050913996024558708);

  BoundInputs b = a;
  b.eps = 0.3;
  b.delta = 0.1;
  b.alpha = 0.5;
  b.rho = 0.5;
  b.V_eps_quarter = 0.25;
  const auto t2 = theorem2_ne(b);
  check("theorem2", t2.n_e_required, 68034.2433523506438279328218728);
  b.capacity = SpaceCapacity{1.0, 1.0, 2.0, 1, 1.0};
  check("corollary1", corollary1_ne(b).n_e_required, 2089417.39161884874394631110841);

  b.Xi = 0.0;
  const auto t4 = theorem4_guarantee(b);
  const bool same = t4.bound == t2 && t4.guarantee_excess == b.eps;
  ok = ok && same;
  os << "theorem4(Xi=0) " << (same ? "matches theorem2" : "DIFFERS from theorem2");
  return {ok, os.str()};
}

Outcome log_domain_oracle() {
  std::size_t cases = 0;
  double worst = 0.0;
  for (const auto& name : fixture_names()) {
    const auto f = make_fixture(name);
    if (f.space.size() > 8) continue;
    const auto& space = f.space;
    for (double alpha : {0.5, 0.1, 0.9}) {
      for (std::uint64_t n = 1; n <= 20; ++n) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
          const auto traj = sample_path(f.chain, n, derive_seed(seed, {n}));
          const auto state = train(space, traj, alpha);
          // linear-scale product, one factor per observation
          std::vector<double> w(space.size(), 1.0);
          for (const auto& z : traj.points)
            for (std::size_t i = 0; i < space.size(); ++i) w[i] *= std::pow(alpha, loss_l1(space.hypothesis(i), z));
          double Z = 0.0;
          for (std::size_t i = 0; i < space.size(); ++i) Z += w[i] * space.prior(i);
          const auto P = normalized_weights(state, space);
          for (std::size_t i = 0; i < space.size(); ++i) {
            const double naive = w[i] / Z;
            worst = std::max(worst, std::abs(P[i] - naive) / std::max(std::abs(naive), 1e-300));
          }
          for (const auto& z : f.chain.states()) {
            double naive = 0.0;
            for (std::size_t i = 0; i < space.size(); ++i) naive += w[i] / Z * space.prior(i) * space.hypothesis(i)(z.x);
            const double got = predict(state, z.x, space).value;
            worst = std::max(worst, std::abs(got - naive) / std::max(std::abs(naive), 1e-300));
          }
          ++cases;
        }
      }
    }
  }
  return {worst <= 1e-10, std::to_string(cases) + " cases, worst relative error " + fmt(worst)};
}

Outcome mcmc_oracle() {
  const auto family = grid_affine_family(51);
  const auto fixture = make_fixture("reference");
  const auto space = family.to_finite(fixture.chain.domain());
  const double alpha = 0.5;
  const auto traj = sample_path(fixture.chain, 30, 7);
  const auto state = train(space, traj, alpha);
  std::size_t within = 0;
  std::size_t warnings = 0;
  double worst_z = 0.0;
  for (std::size_t qi = 0; qi < 100; ++qi) {
    const std::vector<double> x{static_cast<double>(qi) / 99.0};
    const double exact = predict(state, x, space).value;
    McmcOptions opt;
    opt.samples = 4000;
    opt.seed = qi;
    const auto p = predict_mcmc(family, traj, alpha, x, opt);
    const double err = std::abs(p.value - exact);
    if (p.warning) ++warnings;
    if (err <= 3.0 * *p.mc_error) ++within;
    worst_z = std::max(worst_z, *p.mc_error > 0 ? err / *p.mc_error : (err > 0 ? INFINITY : 0.0));
  }
  std::ostringstream os;
  os << within << "/100 queries within 3 mc_error (need 95), worst |err|/mc_error " << fmt(worst_z)
     << ", acceptance warnings " << warnings;
  return {within >= 95, os.str()};
}

std::string assertions_detail(const TrialReport& r) {
  std::ostringstream os;
  for (const auto& a : r.assertions) os << (a.passed ? "" : "FAILED ") << a.name << ": " << a.detail << "; ";
  return os.str();
}

Outcome domination_event() {
  const auto report = run_weight_domination(reference_config({std::string("lemma2")}));
  return {report.passed(), assertions_detail(report)};
}

Outcome consistency_event() {
  const auto report =
      run_consistency(reference_config({std::uint64_t{100}, std::uint64_t{1000}, std::uint64_t{10000}, std::string("theorem2")}));
  return {report.passed(), assertions_detail(report)};
}

Outcome noise_perturbation_bound() {
  const auto f = make_fixture("reference");
  const auto pi = stationary_distribution(f.chain).probabilities;
  const auto losses = expected_losses(f.space, f.chain, pi);
  std::size_t worst_h = 0;
  for (std::size_t i = 1; i < losses.size(); ++i)
    if (losses[i] > losses[worst_h]) worst_h = i;
  const double Xi = 0.2;
  double worst = 0.0;
  std::size_t checks = 0;
  for (auto kind : {NoiseKind::uniform, NoiseKind::two_point, NoiseKind::adversarial}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto clean = sample_path(f.chain, 500, seed);
      NoiseSpec spec{Xi, kind, seed, std::nullopt};
      if (kind == NoiseKind::adversarial) spec.designated = f.space.hypothesis(worst_h);
      const auto noisy = inject_noise(clean, spec);
      for (const auto& h : f.space.hypotheses()) {
        worst = std::max(worst, std::abs(empirical_loss(h, noisy) - empirical_loss(h, clean)));
        ++checks;
      }
    }
  }
  return {worst <= Xi / 2.0 + 1e-12, std::to_string(checks) + " checks, max |l_noisy - l_clean| = " + fmt(worst) +
                                         " (bound " + fmt(Xi / 2.0) + ")"};
}

Outcome robustness_event() {
  std::ostringstream os;
  bool ok = true;
  for (auto kind : {NoiseKind::two_point, NoiseKind::adversarial}) {
    auto c = reference_config({std::string("theorem4")});
    c.noise = NoiseConfig{0.2, kind, 99, std::nullopt};
    const auto report = run_robustness(c);
    ok = ok && report.passed();
    os << to_string(kind) << ": " << assertions_detail(report);
  }
  const std::vector<ScheduleItem> practical{std::uint64_t{100}, std::uint64_t{1000}, std::uint64_t{10000}};
  auto base = practical;
  base.emplace_back(std::string("theorem2"));
  auto noisy = practical;
  noisy.emplace_back(std::string("theorem4"));
  const auto consistency = report_csv(run_consistency(reference_config(base)));
  auto c0 = reference_config(noisy);
  c0.noise = NoiseConfig{0.0, NoiseKind::two_point, 99, std::nullopt};
  const auto robust = report_csv(run_robustness(c0));
  const bool identical = consistency == robust;
  ok = ok && identical;
  os << "Xi=0 report " << (identical ? "byte-identical" : "DIFFERS") << " to consistency (" << consistency.size()
     << " bytes)";
  return {ok, os.str()};
}

Outcome classification_identity() {
  std::ostringstream os;
  bool ok = true;
  for (const auto& name : {"classify_pair", "classify_ladder", "classify_offspace"}) {
    const auto f = make_fixture(name);
    const auto pi = stationary_distribution(f.chain).probabilities;
    const auto traj = sample_path(f.chain, 40, 11);
    const auto state = train(f.space, traj, 0.5);
    const auto e = expected_error(state, f.space, f.chain, pi, 100000, 12345);
    const double gap = std::abs(e.mc - e.exact);
    const bool good = gap <= 3.0 * e.std_error + 1e-9;
    ok = ok && good;
    os << name << ": exact " << fmt(e.exact) << " mc " << fmt(e.mc) << " (" << fmt(gap / e.std_error)
       << " se); ";
  }
  return {ok, os.str()};
}

Outcome augmented_chain() {
  std::ostringstream os;
  bool ok = true;
  const Interval Y{0.0, 1.0};
  for (const auto& cname : x_chain_names()) {
    const auto xc = x_chain(cname);
    const auto pi_x = stationary_distribution(xc).probabilities;
    const auto cert = fit_certificate(xc, 50);
    for (const auto& tname : target_names()) {
      const auto c = named_target(tname, Y);
      const auto aug = augment_with_target(xc, c, Y);
      const auto pi = stationary_distribution(aug).probabilities;
      const double diag = (pi - pi_x).cwiseAbs().maxCoeff();

      std::vector<double> labels{Y.lo, Y.hi};
      for (const auto& z : xc.states()) {
        const double v = c(z.x);
        if (std::find(labels.begin(), labels.end(), v) == labels.end()) labels.push_back(v);
      }
      const auto full = augmented_full_kernel(xc, c, labels);
      const double invariance =
          (full.stationary.transpose() * full.transition - full.stationary.transpose()).cwiseAbs().maxCoeff();
      const bool env_diag = certificate_holds(aug, pi, cert, 50);
      const bool env_full = augmented_envelope_holds(full, cert, 50);
      const bool good = diag <= 1e-10 && invariance <= 1e-12 && env_diag && env_full;
      ok = ok && good;
      if (!good)
        os << cname << "/" << tname << ": |pi - pi_X| " << fmt(diag) << ", invariance " << fmt(invariance)
           << ", diagonal envelope " << env_diag << ", full envelope " << env_full << "; ";
    }
  }
  if (ok) os << x_chain_names().size() * target_names().size() << " chain/target pairs validated";
  return {ok, os.str()};
}

Outcome certificate_validity() {
  std::ostringstream os;
  bool ok = true;
  for (const auto& chain : fixture_chains()) {
    const auto pi = stationary_distribution(chain).probabilities;
    const auto cert = fit_certificate(chain, 50);
    const bool holds = certificate_holds(chain, pi, cert, 50);
    ok = ok && holds;
    os << chain.name() << " rho=" << fmt(cert.rho) << (holds ? " ok; " : " FAILS; ");
  }
  const auto two = x_chain("two_state");
  const double rho = fit_certificate(two, 50).rho;
  const bool near = std::abs(rho - 0.4) <= 1e-6;
  ok = ok && near;
  os << "two-state rho " << fmt(rho) << (near ? " within 1e-6 of 0.4" : " NOT within 1e-6 of 0.4");
  return {ok, os.str()};
}

struct Criterion {
  int id;
  const char* name;
  double budget;
  std::function<Outcome()> run;
};

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& out, const std::set<int>& only) {
  const std::vector<Criterion> all{
      {1, "effective sample size regression", 1.0, ess_regression},
      {2, "bound formula regression", 1.0, bound_regression},
      {3, "log-domain weights match linear-scale oracle", 5.0, log_domain_oracle},
      {4, "MCMC prediction matches exact grid prediction", 120.0, mcmc_oracle},
      {5, "weight domination event frequency", 300.0, domination_event},
      {6, "consistency event frequency and excess trend", 300.0, consistency_event},
      {7, "label noise moves empirical loss by at most Xi/2", 30.0, noise_perturbation_bound},
      {8, "robustness event frequency and Xi=0 regression", 300.0, robustness_event},
      {9, "random classifier error equals mixture loss", 30.0, classification_identity},
      {10, "deterministic-target chain stationarity and envelope", 10.0, augmented_chain},
      {11, "ergodicity certificate validity", 5.0, certificate_validity},
  };
  std::vector<CriterionResult> results;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    CriterionResult r{c.id, c.name, false, 0.0, c.budget, {}};
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto o = c.run();
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.seconds > r.budget_seconds) {
      r.passed = false;
      r.detail += " [over time budget of " + fmt(r.budget_seconds) + " s]";
    }
    out << (r.passed ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << r.id << "  " << r.name << "  ("
        << std::fixed << std::setprecision(2) << r.seconds << " s)  " << std::defaultfloat << r.detail << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace bwa::verify
