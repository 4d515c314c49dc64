#include "bwa/bounds.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "bwa/chain.hpp"

namespace bwa {

namespace {

constexpr std::uint64_t kMaxN = std::uint64_t{1} << 62;

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

void validate(const BoundInputs& in) {
  require(in.M > 0.0 && std::isfinite(in.M), "bounds: M must be > 0");
  require(in.L > 0.0 && std::isfinite(in.L), "bounds: L must be > 0");
  require(in.eps > 0.0 && in.eps <= 3.0 * in.M, "bounds: eps must lie in (0, 3M]");
  require(in.delta > 0.0 && in.delta < 1.0, "bounds: delta must lie in (0, 1)");
  require(in.gamma >= 0.0 && std::isfinite(in.gamma), "bounds: gamma must be >= 0");
  require(in.B > 0.0 && std::isfinite(in.B), "bounds: B must be > 0");
  require(in.rho > 0.0 && in.rho < 1.0, "bounds: rho must lie in (0, 1)");
  require(in.Xi >= 0.0, "bounds: Xi must be >= 0");
}

void validate_decay(const BoundInputs& in) {
  require(in.alpha > 0.0 && in.alpha < 1.0, "bounds: alpha must lie in (0, 1)");
  require(in.V_eps_quarter > 0.0 && in.V_eps_quarter <= 1.0, "bounds: V_eps_quarter must lie in (0, 1]");
}

double capacity_log_n(const SpaceCapacity& cap, double radius) {
  return cap.c * std::pow(radius, -2.0 * cap.d / cap.q);
}

/// factor * (ln(2/delta) + ln(1 + gamma B e^-2) + ln N), kept per addend.
std::vector<BoundTerm> uniform_terms(const BoundInputs& in, double factor, double log_n) {
  const double lead = factor * in.M * in.M / (in.eps * in.eps);
  return {
      {"confidence", lead * std::log(2.0 / in.delta)},
      {"mixing", lead * std::log1p(in.gamma * in.B * std::exp(-2.0))},
      {"capacity", lead * log_n},
  };
}

double weight_decay_term(const BoundInputs& in) {
  const double logs = std::log(1.0 / in.V_eps_quarter) + std::log(2.0 * in.M / in.eps);
  return std::sqrt(3.0 * logs / (2.0 * in.eps * std::log(1.0 / in.alpha) * std::log(1.0 / in.rho)));
}

BoundResult finish(std::vector<BoundTerm> terms, double rho) {
  BoundResult r;
  r.terms = std::move(terms);
  r.n_e_required = r.term_sum();
  const SampleSize s = n_from_ne(r.n_e_required, rho);
  r.n_required = s.n;
  r.vacuous = s.vacuous;
  return r;
}

BoundResult theorem2_with(const BoundInputs& in, double log_n) {
  validate(in);
  validate_decay(in);
  auto terms = uniform_terms(in, 1152.0, log_n);
  terms.push_back({"weight_decay", weight_decay_term(in)});
  return finish(std::move(terms), in.rho);
}

}  // namespace

CoveringModel CoveringModel::fixed(double N) {
  if (!(N >= 1.0)) throw std::invalid_argument("CoveringModel: covering number must be >= 1");
  CoveringModel m;
  m.kind_ = Kind::fixed;
  m.log_fixed_ = std::log(N);
  return m;
}

CoveringModel CoveringModel::finite(std::size_t m, SpaceCapacity capacity) {
  if (m == 0) throw std::invalid_argument("CoveringModel: empty space");
  CoveringModel c;
  c.kind_ = Kind::finite;
  c.m_ = m;
  c.cap_ = capacity;
  return c;
}

CoveringModel CoveringModel::parametric(SpaceCapacity capacity) {
  CoveringModel c;
  c.kind_ = Kind::parametric;
  c.cap_ = capacity;
  return c;
}

double CoveringModel::log_n(double radius) const {
  switch (kind_) {
    case Kind::fixed: return log_fixed_;
    case Kind::finite: return log_covering_number_bound(SpaceKind::finite, radius, cap_, m_);
    case Kind::parametric: return log_covering_number_bound(SpaceKind::parametric, radius, cap_, 0);
  }
  return 0.0;
}

double BoundResult::term_sum() const {
  double s = 0.0;
  for (const auto& t : terms) s += t.value;
  return s;
}

BoundResult lemma1_ne(const BoundInputs& in) {
  validate(in);
  return finish(uniform_terms(in, 8.0, in.covering.log_n(in.eps / (4.0 * in.L))), in.rho);
}

BoundResult lemma2_ne(const BoundInputs& in) {
  validate(in);
  return finish(uniform_terms(in, 288.0, in.covering.log_n(in.eps / (24.0 * in.L))), in.rho);
}

BoundResult theorem2_ne(const BoundInputs& in) {
  return theorem2_with(in, in.covering.log_n(in.eps / (48.0 * in.L)));
}

BoundResult corollary1_ne(const BoundInputs& in) {
  if (!in.capacity) throw std::invalid_argument("corollary1_ne: capacity constants (c, d, q) are required");
  return theorem2_with(in, capacity_log_n(*in.capacity, in.eps / (48.0 * in.L)));
}

Theorem4Result theorem4_guarantee(const BoundInputs& in) {
  Theorem4Result r;
  r.bound = theorem2_ne(in);
  r.guarantee_excess = in.eps + in.Xi;
  return r;
}

double log_weight_domination_threshold(double alpha, double n, double eps, double V_half) {
  if (!(V_half > 0.0)) throw std::domain_error("weight_domination_threshold: V_half must be > 0");
  return n * eps / 6.0 * std::log(alpha) - std::log(V_half);
}

double weight_domination_threshold(double alpha, double n, double eps, double V_half) {
  return std::exp(log_weight_domination_threshold(alpha, n, eps, V_half));
}

SampleSize n_from_ne(double ne_target, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("n_from_ne: rho must lie in (0, 1)");
  if (std::isnan(ne_target)) throw std::invalid_argument("n_from_ne: target is NaN");
  SampleSize out;
  if (ne_target < 1.0) {
    out.vacuous = true;
    ne_target = 1.0;
  }
  if (!(ne_target < static_cast<double>(kMaxN))) return out;
  const auto t = static_cast<std::uint64_t>(std::ceil(ne_target));

  // U(k) = largest n whose block length is <= k (0 if none).
  auto largest_with_block = [&](std::uint64_t k) -> std::uint64_t {
    if (ess_block_length(1, rho) > k) return 0;
    std::uint64_t lo = 1, hi = 2;
    while (hi < kMaxN && ess_block_length(hi, rho) <= k) {
      lo = hi;
      hi *= 2;
    }
    if (hi >= kMaxN && ess_block_length(hi, rho) <= k) return kMaxN;
    while (hi - lo > 1) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      (ess_block_length(mid, rho) <= k ? lo : hi) = mid;
    }
    return lo;
  };
  // Block length k is usable if some n with block length <= k reaches t k.
  auto feasible = [&](std::uint64_t k) {
    if (k > kMaxN / t) return false;
    return largest_with_block(k) >= t * k;
  };

  std::uint64_t hi = 1;
  while (!feasible(hi)) {
    if (hi > kMaxN / 2) return out;
    hi *= 2;
  }
  std::uint64_t lo = hi / 2;  // infeasible or zero
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (feasible(mid) ? hi : lo) = mid;
  }
  std::uint64_t k = hi;
  while (k > 1 && feasible(k - 1)) --k;

  const std::uint64_t n = std::max(t * k, k > 1 ? largest_with_block(k - 1) + 1 : std::uint64_t{1});
  if (effective_sample_size(n, rho) < t || (n > 1 && effective_sample_size(n - 1, rho) >= t))
    throw std::logic_error("n_from_ne: inversion check failed at n = " + std::to_string(n));
  out.n = n;
  return out;
}

}  // namespace bwa
