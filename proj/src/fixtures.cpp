#include "bwa/fixtures.hpp"

#include <stdexcept>
#include <string>

namespace bwa {

namespace {

constexpr Interval kUnit{0.0, 1.0};

std::vector<StatePoint> line_states(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<StatePoint> out;
  for (std::size_t i = 0; i < xs.size(); ++i) out.push_back(StatePoint{{xs[i]}, ys[i]});
  return out;
}

Domain unit_domain() { return Domain{{kUnit}, kUnit}; }

Eigen::MatrixXd matrix(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

Eigen::VectorXd start_at_first(std::size_t k) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  v(0) = 1.0;
  return v;
}

std::vector<std::vector<double>> xs_of(const FiniteChainSpec& c) {
  std::vector<std::vector<double>> out;
  for (const auto& z : c.states()) out.push_back(z.x);
  return out;
}

FiniteChainSpec reference_chain(const std::vector<double>& ys, const std::string& name) {
  const Eigen::Vector4d pi(0.4, 0.3, 0.2, 0.1);
  const double lambda = 0.4;
  Eigen::MatrixXd P = lambda * Eigen::MatrixXd::Identity(4, 4);
  P.rowwise() += (1.0 - lambda) * pi.transpose();
  return FiniteChainSpec::create(line_states({0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}, ys), P, start_at_first(4),
                                 unit_domain(), name);
}

FiniteChainSpec two_state_chain(const std::vector<double>& ys, const std::string& name) {
  return FiniteChainSpec::create(line_states({0.0, 1.0}, ys), matrix({{0.9, 0.1}, {0.5, 0.5}}), start_at_first(2),
                                 unit_domain(), name);
}

FiniteChainSpec three_state_chain(const std::vector<double>& ys, const std::string& name) {
  return FiniteChainSpec::create(line_states({0.0, 0.5, 1.0}, ys),
                                 matrix({{0.5, 0.3, 0.2}, {0.2, 0.6, 0.2}, {0.3, 0.3, 0.4}}), start_at_first(3),
                                 unit_domain(), name);
}

std::vector<Hypothesis> constants(const std::vector<double>& values) {
  std::vector<Hypothesis> out;
  for (std::size_t i = 0; i < values.size(); ++i) out.push_back(constant_hypothesis(static_cast<int>(i), values[i], kUnit));
  return out;
}

std::vector<Hypothesis> tables(const FiniteChainSpec& chain, const std::vector<std::vector<double>>& rows) {
  std::vector<Hypothesis> out;
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.push_back(table_hypothesis(static_cast<int>(i), xs_of(chain), rows[i], kUnit));
  return out;
}

}  // namespace

Fixture make_fixture(std::string_view name) {
  if (name == "reference") {
    const std::vector<double> y{0.2, 0.5, 0.3, 0.4};
    auto chain = reference_chain(y, "reference");
    const std::vector<std::vector<double>> offsets{
        {0.0, 0.1, 0.05, 0.1},    // optimal, l = 0.05
        {0.1, 0.05, 0.15, 0.1},   // near-optimal, 0.095
        {0.35, 0.4, 0.35, 0.4},   // 0.37
        {0.4, 0.3, 0.4, 0.35},    // 0.365
        {0.3, 0.4, 0.4, 0.4},     // 0.36
    };
    std::vector<std::vector<double>> rows;
    for (const auto& o : offsets) {
      std::vector<double> r(4);
      for (std::size_t z = 0; z < 4; ++z) r[z] = y[z] + o[z];
      rows.push_back(r);
    }
    auto space = FiniteHypothesisSpace::uniform(tables(chain, rows), unit_domain());
    return Fixture{"reference", std::move(chain), std::move(space), SpaceCapacity{0.4, 1.0, 1.0, 1, 1.0},
                   TaskKind::regression};
  }
  if (name == "two_state") {
    auto chain = two_state_chain({0.2, 0.8}, "two_state");
    auto space = FiniteHypothesisSpace::uniform(constants({0.2, 0.4, 0.6, 0.8}), unit_domain());
    return Fixture{"two_state", std::move(chain), std::move(space), SpaceCapacity{0.6, 1.0, 1.0, 1, 1.0},
                   TaskKind::regression};
  }
  if (name == "three_state") {
    auto chain = three_state_chain({0.1, 0.6, 0.9}, "three_state");
    auto space = FiniteHypothesisSpace::uniform(constants({0.1, 0.3, 0.5, 0.7, 0.9}), unit_domain());
    return Fixture{"three_state", std::move(chain), std::move(space), SpaceCapacity{0.8, 1.0, 1.0, 1, 1.0},
                   TaskKind::regression};
  }
  if (name == "classify_pair") {
    auto chain = two_state_chain({0.0, 1.0}, "classify_pair");
    auto space = FiniteHypothesisSpace::uniform(
        tables(chain, {{0.5, 0.5}, {0.1, 0.9}, {0.3, 0.6}, {0.8, 0.2}}), unit_domain());
    return Fixture{"classify_pair", std::move(chain), std::move(space), SpaceCapacity{1.0, 1.0, 1.0, 1, 1.0},
                   TaskKind::classification};
  }
  if (name == "classify_ladder") {
    auto chain = reference_chain({0.0, 0.0, 1.0, 1.0}, "classify_ladder");
    auto space = FiniteHypothesisSpace::create(
        tables(chain, {{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}, {0.25, 5.0 / 12.0, 7.0 / 12.0, 0.75}, {0.5, 0.5, 0.5, 0.5},
                       {1.0, 2.0 / 3.0, 1.0 / 3.0, 0.0}}),
        {0.4, 0.3, 0.2, 0.1}, unit_domain());
    return Fixture{"classify_ladder", std::move(chain), std::move(space), SpaceCapacity{1.0, 1.0, 1.0, 1, 1.0},
                   TaskKind::classification};
  }
  if (name == "classify_offspace") {
    auto x = three_state_chain({0.0, 0.0, 0.0}, "three_state");
    auto chain = augment_with_target(x, named_target("threshold", kUnit), kUnit, "classify_offspace");
    std::vector<Hypothesis> hyps = constants({0.3, 0.6});
    hyps.push_back(affine_hypothesis(2, {0.8}, 0.1, kUnit));
    auto space = FiniteHypothesisSpace::uniform(std::move(hyps), unit_domain());
    return Fixture{"classify_offspace", std::move(chain), std::move(space), SpaceCapacity{1.0, 1.0, 1.0, 1, 1.0},
                   TaskKind::deterministic_target};
  }
  throw std::invalid_argument("unknown fixture '" + std::string(name) + "'");
}

std::vector<std::string> fixture_names() {
  return {"reference", "two_state", "three_state", "classify_pair", "classify_ladder", "classify_offspace"};
}

FiniteChainSpec x_chain(std::string_view name) {
  if (name == "reference") return reference_chain({0.0, 0.0, 0.0, 0.0}, "reference");
  if (name == "two_state") return two_state_chain({0.0, 0.0}, "two_state");
  if (name == "three_state") return three_state_chain({0.0, 0.0, 0.0}, "three_state");
  throw std::invalid_argument("unknown chain '" + std::string(name) + "'");
}

std::vector<std::string> x_chain_names() { return {"reference", "two_state", "three_state"}; }

std::vector<FiniteChainSpec> fixture_chains() {
  std::vector<FiniteChainSpec> out;
  for (const auto& n : fixture_names()) out.push_back(make_fixture(n).chain);
  for (const auto& n : x_chain_names()) out.push_back(x_chain(n));
  return out;
}

AffineFamily grid_affine_family(std::size_t grid) {
  return AffineFamily({Interval{-1.0, 1.0}, Interval{0.0, 1.0}}, kUnit, grid);
}

}  // namespace bwa
