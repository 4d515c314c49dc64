#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bwa/hypothesis.hpp"

namespace bwa {

/// ln N(H, r) as a function of the covering radius.
class CoveringModel {
public:
  /// A fixed covering number, independent of the radius.
  static CoveringModel fixed(double N);
  /// min(m, exp{c r^(-2d/q)}).
  static CoveringModel finite(std::size_t m, SpaceCapacity capacity);
  /// exp{c r^(-2d/q)}.
  static CoveringModel parametric(SpaceCapacity capacity);

  [[nodiscard]] double log_n(double radius) const;

private:
  enum class Kind { fixed, finite, parametric };
  Kind kind_ = Kind::fixed;
  double log_fixed_ = 0.0;
  std::size_t m_ = 1;
  SpaceCapacity cap_;
};

struct BoundInputs {
  double eps = 0.1;
  double delta = 0.05;
  double M = 1.0;
  double L = 1.0;
  double gamma = 1.0;
  double B = 1.0;
  double rho = 0.5;
  double alpha = 0.5;
  CoveringModel covering = CoveringModel::fixed(1.0);
  /// Hoelder capacity constants; required by corollary1_ne only.
  std::optional<SpaceCapacity> capacity;
  double V_eps_quarter = 1.0;
  double V_eps_half = 1.0;
  double Xi = 0.0;
};

struct BoundTerm {
  std::string name;
  double value = 0.0;

  friend bool operator==(const BoundTerm&, const BoundTerm&) = default;
};

struct BoundResult {
  double n_e_required = 0.0;
  /// Smallest n whose effective sample size reaches n_e_required; empty when it
  /// does not fit in 63 bits.
  std::optional<std::uint64_t> n_required;
  bool vacuous = false;
  std::vector<BoundTerm> terms;

  [[nodiscard]] double term_sum() const;

  friend bool operator==(const BoundResult&, const BoundResult&) = default;
};

/// Uniform convergence: (8M^2/eps^2) (ln(2/delta) + ln(1 + gamma B e^-2) + ln N(H, eps/4L)).
/// All bounds throw std::domain_error outside eps in (0, 3M] and the other
/// parameter domains.
BoundResult lemma1_ne(const BoundInputs& in);
/// Weight domination: factor 288, radius eps/24L.
BoundResult lemma2_ne(const BoundInputs& in);
/// Generalisation: factor 1152 at radius eps/48L plus the weight-decay term
/// sqrt(3 (ln 1/V_{eps/4} + ln 2M/eps) / (2 eps ln(1/alpha) ln(1/rho))). The two
/// addends are summed as printed and both are kept in `terms`.
BoundResult theorem2_ne(const BoundInputs& in);
/// theorem2_ne with ln N replaced by c (eps/48L)^(-2d/q).
BoundResult corollary1_ne(const BoundInputs& in);

struct Theorem4Result {
  BoundResult bound;
  double guarantee_excess = 0.0;  ///< eps + Xi
};
/// Same sample size as theorem2_ne; the excess guarantee widens to eps + Xi.
Theorem4Result theorem4_guarantee(const BoundInputs& in);

/// alpha^(n eps / 6) / V_half, evaluated in the log domain.
double weight_domination_threshold(double alpha, double n, double eps, double V_half);
double log_weight_domination_threshold(double alpha, double n, double eps, double V_half);

struct SampleSize {
  std::optional<std::uint64_t> n;  ///< empty on 63-bit overflow
  bool vacuous = false;            ///< target below 1
};

/// Smallest n with effective_sample_size(n, rho) >= ceil(ne_target). The effective
/// sample size is not monotone in n, so the search runs over the block length
/// k = ceil(sqrt(8n/ln(1/rho))) and the result is checked at n and n - 1.
SampleSize n_from_ne(double ne_target, double rho);

}  // namespace bwa
