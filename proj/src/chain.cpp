#include "bwa/chain.hpp"

#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace bwa {

Domain bounding_domain(std::span<const StatePoint> points) {
  if (points.empty()) throw std::invalid_argument("bounding_domain: no points");
  Domain d;
  d.x_box.resize(points.front().x.size(), Interval{INFINITY, -INFINITY});
  d.y = Interval{INFINITY, -INFINITY};
  for (const auto& z : points) {
    if (z.x.size() != d.x_box.size()) throw std::invalid_argument("bounding_domain: mixed dimensions");
    for (std::size_t i = 0; i < z.x.size(); ++i) {
      d.x_box[i].lo = std::min(d.x_box[i].lo, z.x[i]);
      d.x_box[i].hi = std::max(d.x_box[i].hi, z.x[i]);
    }
    d.y.lo = std::min(d.y.lo, z.y);
    d.y.hi = std::max(d.y.hi, z.y);
  }
  return d;
}

namespace {

std::vector<std::size_t> bfs_reach(const Eigen::MatrixXd& adj, bool transpose) {
  const auto k = static_cast<std::size_t>(adj.rows());
  std::vector<std::size_t> level(k, SIZE_MAX);
  std::queue<std::size_t> q;
  level[0] = 0;
  q.push(0);
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    for (std::size_t v = 0; v < k; ++v) {
      double w = transpose ? adj(v, u) : adj(u, v);
      if (w > 0.0 && level[v] == SIZE_MAX) {
        level[v] = level[u] + 1;
        q.push(v);
      }
    }
  }
  return level;
}

std::vector<double> cumulative(const Eigen::VectorXd& p) {
  std::vector<double> cdf(static_cast<std::size_t>(p.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p(i);
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  return cdf;
}

}  // namespace

bool is_irreducible(const Eigen::MatrixXd& transition) {
  if (transition.rows() == 0) return false;
  for (auto l : bfs_reach(transition, false))
    if (l == SIZE_MAX) return false;
  for (auto l : bfs_reach(transition, true))
    if (l == SIZE_MAX) return false;
  return true;
}

std::size_t period(const Eigen::MatrixXd& transition) {
  // gcd over edges u->v of level(u) + 1 - level(v) for an irreducible chain
  const auto level = bfs_reach(transition, false);
  const auto k = static_cast<std::size_t>(transition.rows());
  std::size_t g = 0;
  for (std::size_t u = 0; u < k; ++u) {
    if (level[u] == SIZE_MAX) continue;
    for (std::size_t v = 0; v < k; ++v) {
      if (transition(u, v) <= 0.0 || level[v] == SIZE_MAX) continue;
      auto diff = static_cast<long long>(level[u]) + 1 - static_cast<long long>(level[v]);
      g = std::gcd(g, static_cast<std::size_t>(std::llabs(diff)));
    }
  }
  return g;
}

FiniteChainSpec FiniteChainSpec::create(std::vector<StatePoint> states, Eigen::MatrixXd transition,
                                        Eigen::VectorXd initial, std::optional<Domain> domain,
                                        std::string name) {
  const auto k = states.size();
  if (k == 0) throw std::invalid_argument("chain: no states");
  if (static_cast<std::size_t>(transition.rows()) != k || static_cast<std::size_t>(transition.cols()) != k)
    throw std::invalid_argument("chain: transition must be k x k for k states");
  if (static_cast<std::size_t>(initial.size()) != k)
    throw std::invalid_argument("chain: initial must have one entry per state");

  for (std::size_t i = 0; i < k; ++i) {
    const auto row = transition.row(static_cast<Eigen::Index>(i));
    if ((row.array() < 0.0).any()) throw std::invalid_argument("chain: negative transition entry");
    if (std::abs(row.sum() - 1.0) > 1e-12) {
      std::ostringstream os;
      os << "chain: row " << i << " sums to " << row.sum();
      throw std::invalid_argument(os.str());
    }
  }
  if ((initial.array() < 0.0).any() || std::abs(initial.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("chain: initial is not a probability vector");
  if (!is_irreducible(transition)) throw std::invalid_argument("chain: kernel is reducible");
  if (auto p = period(transition); p != 1) {
    std::ostringstream os;
    os << "chain: kernel is periodic (period " << p << ")";
    throw std::invalid_argument(os.str());
  }

  Domain dom = domain ? *domain : bounding_domain(states);
  for (const auto& z : states) {
    if (z.x.size() != dom.dimension()) throw std::invalid_argument("chain: state dimension mismatch");
    if (!dom.contains(z)) throw std::invalid_argument("chain: state outside declared X x Y");
  }

  FiniteChainSpec spec;
  spec.states_ = std::move(states);
  spec.transition_ = std::move(transition);
  spec.initial_ = std::move(initial);
  spec.domain_ = std::move(dom);
  spec.name_ = std::move(name);
  spec.row_cdf_.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    spec.row_cdf_.push_back(cumulative(spec.transition_.row(static_cast<Eigen::Index>(i)).transpose()));
  spec.initial_cdf_ = cumulative(spec.initial_);
  return spec;
}

StationaryDistribution stationary_distribution(const FiniteChainSpec& spec) {
  constexpr std::size_t kMaxIter = 1'000'000;
  const auto k = static_cast<Eigen::Index>(spec.size());
  const Eigen::MatrixXd Pt = spec.transition().transpose();
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
  double prev_diff = 0.0;
  double diff = 0.0;
  for (std::size_t it = 1; it <= kMaxIter; ++it) {
    Eigen::VectorXd next = Pt * pi;
    next /= next.sum();
    prev_diff = diff;
    diff = (next - pi).cwiseAbs().sum();
    pi = std::move(next);
    if (diff < 1e-13) return {pi, it};
  }
  std::ostringstream os;
  os << "stationary_distribution: no convergence after " << kMaxIter
     << " iterations; spectral gap estimate " << (prev_diff > 0.0 ? 1.0 - diff / prev_diff : 0.0);
  throw std::runtime_error(os.str());
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv_distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return s;
}

double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  return tv_distance(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())),
                     std::span<const double>(q.data(), static_cast<std::size_t>(q.size())));
}

std::size_t sample_index(std::span<const double> cdf, double u) noexcept {
  for (std::size_t i = 0; i + 1 < cdf.size(); ++i)
    if (u < cdf[i]) return i;
  // rounding left u above the penultimate total: take the last positive-mass entry
  std::size_t last = cdf.size() - 1;
  while (last > 0 && cdf[last] <= cdf[last - 1]) --last;
  return last;
}

ChainWalker::ChainWalker(const FiniteChainSpec& spec, std::uint64_t seed)
    : spec_(&spec), rng_(seed, 0) {}

std::size_t ChainWalker::next() {
  const double u = rng_.uniform();
  current_ = current_ ? sample_index(spec_->row_cdf()[*current_], u)
                      : sample_index(spec_->initial_cdf(), u);
  return *current_;
}

Trajectory sample_path(const FiniteChainSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_path: n must be >= 1");
  Trajectory t;
  t.seed = seed;
  t.source = spec.name();
  t.points.reserve(n);
  ChainWalker walker(spec, seed);
  for (std::size_t i = 0; i < n; ++i) t.points.push_back(spec.state(walker.next()));
  return t;
}

Eigen::VectorXd state_frequencies(std::span<const std::uint64_t> counts) {
  Eigen::VectorXd f(static_cast<Eigen::Index>(counts.size()));
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  for (std::size_t i = 0; i < counts.size(); ++i)
    f(static_cast<Eigen::Index>(i)) = static_cast<double>(counts[i]) / total;
  return f;
}

Eigen::MatrixXd tv_decay(const FiniteChainSpec& spec, const Eigen::VectorXd& pi, std::size_t horizon) {
  const auto k = static_cast<Eigen::Index>(spec.size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(horizon), k);
  Eigen::MatrixXd power = spec.transition();
  for (std::size_t n = 1; n <= horizon; ++n) {
    for (Eigen::Index z = 0; z < k; ++z)
      out(static_cast<Eigen::Index>(n - 1), z) = (power.row(z).transpose() - pi).cwiseAbs().sum();
    power = power * spec.transition();
  }
  return out;
}

ErgodicityCertificate fit_certificate(const FiniteChainSpec& spec, std::size_t horizon) {
  if (horizon < 2) throw std::invalid_argument("fit_certificate: horizon must be >= 2");
  const auto pi = stationary_distribution(spec).probabilities;
  const Eigen::MatrixXd tv = tv_decay(spec, pi, horizon);
  const Eigen::VectorXd worst = tv.rowwise().maxCoeff();

  ErgodicityCertificate cert;
  cert.horizon = horizon;
  cert.V.assign(spec.size(), 1.0);
  cert.B = 1.0 + 1e-6;

  // The envelope also covers n = 0 (TV of a point mass against pi), which the
  // deterministic-target construction needs for its off-target states.
  double tv0 = 0.0;
  for (Eigen::Index z = 0; z < pi.size(); ++z) tv0 = std::max(tv0, 2.0 * (1.0 - pi(z)));

  const double tv1 = worst(0);
  if (tv1 <= kTvFloor) {
    // mixes in one step: any rho in (0, 1) works
    cert.rho = 0.5;
    cert.gamma = std::max(tv1 / cert.rho, tv0);
    return cert;
  }
  // gamma = tv1 / rho makes the envelope exact at n = 1; for n >= 2 we need
  // tv1 * rho^(n-1) >= TV_n, i.e. rho >= (TV_n / tv1)^(1/(n-1)).
  double rho = 0.0;
  for (std::size_t n = 2; n <= horizon; ++n) {
    const double tvn = worst(static_cast<Eigen::Index>(n - 1));
    if (tvn <= kTvFloor) continue;
    rho = std::max(rho, std::pow(tvn / tv1, 1.0 / static_cast<double>(n - 1)));
  }
  if (rho <= 0.0) rho = 0.5;  // every step past the first is below the floor
  if (rho >= 1.0) throw std::runtime_error("fit_certificate: TV does not decay over the horizon");
  cert.rho = rho;
  cert.gamma = std::max(tv1 / rho, tv0);
  return cert;
}

bool certificate_holds(const FiniteChainSpec& spec, const Eigen::VectorXd& pi,
                       const ErgodicityCertificate& cert, std::size_t horizon) {
  if (cert.V.size() != spec.size()) return false;
  double vpi = 0.0;
  for (std::size_t z = 0; z < spec.size(); ++z) {
    if (cert.V[z] < 1.0) return false;
    vpi += cert.V[z] * pi(static_cast<Eigen::Index>(z));
  }
  if (!(vpi < cert.B)) return false;
  const Eigen::MatrixXd tv = tv_decay(spec, pi, horizon);
  for (std::size_t n = 1; n <= horizon; ++n) {
    const double env = cert.gamma * std::pow(cert.rho, static_cast<double>(n));
    for (std::size_t z = 0; z < spec.size(); ++z) {
      const double lhs = tv(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(z));
      if (lhs > env * cert.V[z] * (1.0 + 1e-12) + kTvFloor) return false;
    }
  }
  return true;
}

std::uint64_t ess_block_length(std::uint64_t n, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("effective_sample_size: rho must lie in (0, 1)");
  return static_cast<std::uint64_t>(std::ceil(std::sqrt(8.0 * static_cast<double>(n) / -std::log(rho))));
}

std::uint64_t effective_sample_size(std::uint64_t n, double rho) {
  if (n == 0) throw std::invalid_argument("effective_sample_size: n must be >= 1");
  return n / ess_block_length(n, rho);
}

}  // namespace bwa
