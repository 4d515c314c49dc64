#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "bwa/io.hpp"
#include "bwa/occupation.hpp"

using namespace bwa;

TEST(Io, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Io, ChainJsonRoundTrip) {
  for (const auto& c : fixture_chains()) {
    const auto back = chain_from_json(json::parse(chain_to_json(c).dump()));
    EXPECT_EQ(back.states(), c.states()) << c.name();
    EXPECT_EQ(back.transition(), c.transition()) << c.name();
    EXPECT_EQ(back.initial(), c.initial()) << c.name();
    EXPECT_EQ(back.domain(), c.domain()) << c.name();
    EXPECT_EQ(back.name(), c.name());
  }
}

TEST(Io, ChainJsonValidation) {
  json j = chain_to_json(make_fixture("two_state").chain);
  j["transition"] = {{0.5, 0.5}};
  EXPECT_THROW(chain_from_json(j), std::invalid_argument);
  j = chain_to_json(make_fixture("two_state").chain);
  j["transition"] = {{0.5, 0.6}, {0.5, 0.5}};
  EXPECT_THROW(chain_from_json(j), std::invalid_argument);
  j = chain_to_json(make_fixture("two_state").chain);
  j["states"] = {{0.5}, {0.7}};
  EXPECT_THROW(chain_from_json(j), std::invalid_argument);
}

TEST(Io, TrajectoryCsvRoundTrip) {
  const auto t = sample_path(make_fixture("three_state").chain, 250, 4);
  std::stringstream ss;
  write_trajectory_csv(ss, t);
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  EXPECT_EQ(header, "step,x0,y");
  const auto back = read_trajectory_csv(ss);
  EXPECT_EQ(back.points, t.points);
}

TEST(Io, TrajectoryCsvRejectsMalformedInput) {
  std::stringstream bad_header("i,x0,y\n0,0.1,0.2\n");
  EXPECT_THROW(read_trajectory_csv(bad_header), std::invalid_argument);
  std::stringstream short_row("step,x0,y\n0,0.1\n");
  EXPECT_THROW(read_trajectory_csv(short_row), std::invalid_argument);
  std::stringstream garbage("step,x0,y\n0,abc,0.2\n");
  EXPECT_THROW(read_trajectory_csv(garbage), std::invalid_argument);
  std::stringstream empty;
  EXPECT_THROW(read_trajectory_csv(empty), std::invalid_argument);
}

TEST(Io, WeightsCsvRoundTrip) {
  const auto f = make_fixture("reference");
  const auto counts = sample_occupation(f.chain, 12345, 3);
  const auto s = train_from_counts(f.space, f.chain, counts, 0.3);
  std::stringstream ss;
  write_weights_csv(ss, s, f.space);
  const auto back = read_weights_csv(ss, f.space, 0.3);
  EXPECT_EQ(back.cumulative_loss, s.cumulative_loss);
  EXPECT_EQ(back.ids, s.ids);
  const std::vector<double> x{0.5};
  EXPECT_EQ(predict(back, x, f.space).value, predict(s, x, f.space).value);
}

TEST(Io, WeightsCsvChecksAlphaAndOrder) {
  const auto f = make_fixture("two_state");
  const std::vector<std::uint64_t> counts{7, 3};
  const auto s = train_from_counts(f.space, f.chain, counts, 0.5);
  std::stringstream ss;
  write_weights_csv(ss, s, f.space);
  const std::string text = ss.str();
  std::stringstream wrong_alpha(text);
  EXPECT_THROW(read_weights_csv(wrong_alpha, f.space, 0.25), std::invalid_argument);
  std::stringstream truncated(text.substr(0, text.rfind('\n', text.size() - 2) + 1));
  EXPECT_THROW(read_weights_csv(truncated, f.space, 0.5), std::invalid_argument);
  std::stringstream no_header("0,0,0,0.25\n");
  EXPECT_THROW(read_weights_csv(no_header, f.space, 0.5), std::invalid_argument);
}

TEST(Io, ProblemFromJsonFiniteSpace) {
  const json j = json::parse(R"({
    "chain": {"states": [[0.0, 0.2], [1.0, 0.8]], "transition": [[0.9, 0.1], [0.5, 0.5]], "initial": [1, 0],
              "domain": {"x": [[0, 1]], "y": [0, 1]}},
    "space": {"kind": "finite",
              "hypotheses": [{"id": 4, "constant": 0.3}, {"id": 7, "values": [0.2, 0.8]},
                             {"id": 9, "slope": [0.5], "intercept": 0.1}],
              "prior": [0.5, 0.25, 0.25], "capacity": {"M": 0.6}}
  })");
  const auto p = problem_from_json(j);
  const auto& s = p.finite_space();
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.hypothesis(1).id(), 7);
  EXPECT_DOUBLE_EQ(s.prior(0), 0.5);
  const std::vector<double> x{1.0};
  EXPECT_DOUBLE_EQ(s.hypothesis(2)(x), 0.6);
  EXPECT_DOUBLE_EQ(p.capacity.M, 0.6);
}

TEST(Io, ProblemFromJsonAffineAndTarget) {
  const json j = json::parse(R"({
    "chain": {"states": [[0.0, 0.0], [0.5, 0.0], [1.0, 0.0]],
              "transition": [[0.5, 0.3, 0.2], [0.2, 0.6, 0.2], [0.3, 0.3, 0.4]], "initial": [1, 0, 0],
              "domain": {"x": [[0, 1]], "y": [0, 1]}},
    "task": {"kind": "deterministic_target", "target": "identity"},
    "space": {"kind": "affine", "box": [[-1, 1], [0, 1]], "grid": 5, "capacity": {"M": 1}}
  })");
  const auto p = problem_from_json(j);
  EXPECT_EQ(p.task, TaskKind::deterministic_target);
  EXPECT_DOUBLE_EQ(p.chain.state(1).y, 0.5);
  ASSERT_TRUE(p.family);
  ASSERT_TRUE(p.space);  // a grid is enumerable
  EXPECT_EQ(p.space->size(), 25u);
}

TEST(Io, ProblemFromJsonErrors) {
  EXPECT_THROW(problem_from_json(json::object()), std::invalid_argument);
  json cls = {{"fixture", "reference"}, {"task", {{"kind", "classification"}}}};
  EXPECT_THROW(problem_from_json(cls), std::invalid_argument);
  json tgt = {{"fixture", "reference"}, {"task", {{"kind", "regression"}, {"target", "identity"}}}};
  EXPECT_THROW(problem_from_json(tgt), std::invalid_argument);
  const auto ok = problem_from_json(json{{"fixture", "classify_pair"}});
  EXPECT_EQ(ok.task, TaskKind::classification);
}
