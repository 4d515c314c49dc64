#include "bwa/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bwa {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json chain_to_json(const FiniteChainSpec& spec) {
  json j;
  j["name"] = spec.name();
  json states = json::array();
  for (const auto& z : spec.states()) {
    json row = json::array();
    for (double v : z.x) row.push_back(v);
    row.push_back(z.y);
    states.push_back(row);
  }
  j["states"] = states;
  json P = json::array();
  for (Eigen::Index i = 0; i < spec.transition().rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < spec.transition().cols(); ++k) row.push_back(spec.transition()(i, k));
    P.push_back(row);
  }
  j["transition"] = P;
  j["initial"] = std::vector<double>(spec.initial().data(), spec.initial().data() + spec.initial().size());
  json box = json::array();
  for (const auto& b : spec.domain().x_box) box.push_back({b.lo, b.hi});
  j["domain"] = {{"x", box}, {"y", {spec.domain().y.lo, spec.domain().y.hi}}};
  return j;
}

namespace {

Interval interval_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected an interval [lo, hi]");
  Interval out{j[0].get<double>(), j[1].get<double>()};
  if (!(out.lo <= out.hi)) throw std::invalid_argument("interval has lo > hi");
  return out;
}

SpaceCapacity capacity_from(const json& j, SpaceCapacity fallback) {
  if (j.is_null()) return fallback;
  SpaceCapacity c = fallback;
  c.M = j.value("M", c.M);
  c.L = j.value("L", c.L);
  c.q = j.value("q", c.q);
  c.d = j.value("d", c.d);
  c.c = j.value("c", c.c);
  return c;
}

FiniteHypothesisSpace finite_space_from(const json& j, const FiniteChainSpec& chain) {
  const Interval Y = chain.domain().y;
  std::vector<std::vector<double>> xs;
  for (const auto& z : chain.states()) xs.push_back(z.x);
  std::vector<Hypothesis> hyps;
  for (const auto& h : j.at("hypotheses")) {
    const int id = h.at("id").get<int>();
    if (h.contains("values")) {
      auto values = h["values"].get<std::vector<double>>();
      if (values.size() != chain.size())
        throw std::invalid_argument("hypothesis " + std::to_string(id) + ": one value per chain state");
      hyps.push_back(table_hypothesis(id, xs, std::move(values), Y));
    } else if (h.contains("constant")) {
      hyps.push_back(constant_hypothesis(id, h["constant"].get<double>(), Y));
    } else if (h.contains("slope")) {
      hyps.push_back(affine_hypothesis(id, h["slope"].get<std::vector<double>>(), h.value("intercept", 0.0), Y));
    } else {
      throw std::invalid_argument("hypothesis " + std::to_string(id) + ": needs values, constant or slope");
    }
  }
  if (j.contains("prior")) return FiniteHypothesisSpace::create(std::move(hyps), j["prior"].get<std::vector<double>>(), chain.domain());
  return FiniteHypothesisSpace::uniform(std::move(hyps), chain.domain());
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size() && s.find_first_not_of(" \r", used) != std::string::npos)
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

}  // namespace

FiniteChainSpec chain_from_json(const json& j) {
  std::vector<StatePoint> states;
  for (const auto& row : j.at("states")) {
    auto v = row.get<std::vector<double>>();
    if (v.size() < 2) throw std::invalid_argument("chain: each state is [x..., y]");
    const double y = v.back();
    v.pop_back();
    states.push_back(StatePoint{std::move(v), y});
  }
  const auto rows = j.at("transition").get<std::vector<std::vector<double>>>();
  Eigen::MatrixXd P(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw std::invalid_argument("chain: transition must be square");
    for (std::size_t k = 0; k < rows.size(); ++k) P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  const auto init = j.at("initial").get<std::vector<double>>();
  Eigen::VectorXd initial = Eigen::Map<const Eigen::VectorXd>(init.data(), static_cast<Eigen::Index>(init.size()));
  std::optional<Domain> domain;
  if (j.contains("domain")) {
    Domain d;
    for (const auto& b : j["domain"].at("x")) d.x_box.push_back(interval_from(b));
    d.y = interval_from(j["domain"].at("y"));
    domain = d;
  }
  return FiniteChainSpec::create(std::move(states), std::move(P), std::move(initial), domain, j.value("name", ""));
}

const FiniteHypothesisSpace& Problem::finite_space() const {
  if (!space) throw std::invalid_argument("problem '" + name + "' has no finite hypothesis space");
  return *space;
}

Problem problem_from_fixture(Fixture f) {
  return Problem{f.name, std::move(f.chain), std::move(f.space), std::nullopt, f.capacity, f.task};
}

Problem problem_from_json(const json& config) {
  std::optional<Problem> p;
  if (config.contains("fixture")) {
    p = problem_from_fixture(make_fixture(config["fixture"].get<std::string>()));
  } else {
    if (!config.contains("chain") || !config.contains("space"))
      throw std::invalid_argument("config needs either `fixture` or both `chain` and `space`");
    p = Problem{config.value("name", "custom"), chain_from_json(config["chain"]), std::nullopt, std::nullopt, {},
                TaskKind::regression};
  }

  if (config.contains("task")) {
    const auto& t = config["task"];
    p->task = parse_task_kind(t.value("kind", "regression"));
    if (t.contains("target")) {
      if (p->task != TaskKind::deterministic_target)
        throw std::invalid_argument("task.target only applies to task.kind = deterministic_target");
      const Interval Y = p->chain.domain().y;
      p->chain = augment_with_target(p->chain, named_target(t["target"].get<std::string>(), Y), Y);
    }
  }
  if (p->task == TaskKind::classification) {
    for (const auto& z : p->chain.states())
      if (z.y != 0.0 && z.y != 1.0) throw std::invalid_argument("classification task needs targets in {0, 1}");
  }

  if (config.contains("space")) {
    const auto& s = config["space"];
    const std::string kind = s.value("kind", "finite");
    SpaceCapacity cap = capacity_from(s.value("capacity", json()), SpaceCapacity{});
    if (kind == "finite") {
      p->space = finite_space_from(s, p->chain);
      if (!s.contains("capacity") || !s["capacity"].contains("M"))
        cap.M = constants_ML(*p->space, p->chain).M;
    } else if (kind == "affine") {
      std::vector<Interval> box;
      for (const auto& b : s.at("box")) box.push_back(interval_from(b));
      std::optional<std::size_t> grid;
      if (s.contains("grid")) grid = s["grid"].get<std::size_t>();
      p->family = AffineFamily(std::move(box), p->chain.domain().y, grid);
      if (grid) p->space = p->family->to_finite(p->chain.domain());
      cap.d = static_cast<int>(p->chain.dimension());
    } else {
      throw std::invalid_argument("unknown space kind '" + kind + "'");
    }
    p->capacity = cap;
  }
  if (!p->space && !p->family) throw std::invalid_argument("config defines no hypothesis space");
  return std::move(*p);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const std::size_t d = traj.points.empty() ? 0 : traj.points.front().x.size();
  out << "step";
  for (std::size_t i = 0; i < d; ++i) out << ",x" << i;
  out << ",y\n";
  for (std::size_t s = 0; s < traj.points.size(); ++s) {
    out << s;
    for (double v : traj.points[s].x) out << ',' << format_double(v);
    out << ',' << format_double(traj.points[s].y) << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("trajectory: empty input");
  const auto header = split_csv(line);
  if (header.size() < 3 || header.front() != "step" || header.back().substr(0, 1) != "y")
    throw std::invalid_argument("trajectory: header must be step,x0..x{d-1},y");
  const std::size_t d = header.size() - 2;
  for (std::size_t i = 0; i < d; ++i)
    if (header[i + 1] != "x" + std::to_string(i)) throw std::invalid_argument("trajectory: bad column " + header[i + 1]);
  Trajectory t;
  t.source = "csv";
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != d + 2) throw std::invalid_argument("trajectory: row " + std::to_string(row) + " has wrong width");
    StatePoint z;
    for (std::size_t i = 0; i < d; ++i) z.x.push_back(parse_number(cells[i + 1]));
    z.y = parse_number(cells.back());
    t.points.push_back(std::move(z));
    ++row;
  }
  return t;
}

void write_weights_csv(std::ostream& out, const WeightState& state, const FiniteHypothesisSpace& space) {
  const auto mass = posterior_masses(state, space);
  out << "hypothesis_id,cumulative_loss,log_weight,posterior_mass\n";
  for (std::size_t i = 0; i < state.size(); ++i)
    out << state.ids[i] << ',' << format_double(state.cumulative_loss[i]) << ',' << format_double(state.log_weight(i))
        << ',' << format_double(mass[i]) << '\n';
}

WeightState read_weights_csv(std::istream& in, const FiniteHypothesisSpace& space, double alpha) {
  WeightState s = initial_weights(space, alpha);
  std::string line;
  if (!std::getline(in, line) || line.rfind("hypothesis_id,cumulative_loss,log_weight,posterior_mass", 0) != 0)
    throw std::invalid_argument("weights: missing header");
  std::size_t i = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != 4) throw std::invalid_argument("weights: rows have four columns");
    if (i >= space.size()) throw std::invalid_argument("weights: more rows than hypotheses");
    if (std::stoi(cells[0]) != space.hypothesis(i).id())
      throw std::invalid_argument("weights: row " + std::to_string(i) + " does not match hypothesis order");
    s.cumulative_loss[i] = parse_number(cells[1]);
    const double lw = parse_number(cells[2]);
    const double expect = s.log_weight(i);
    if (std::abs(lw - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
      throw std::invalid_argument("weights: log_weight disagrees with alpha = " + format_double(alpha));
    ++i;
  }
  if (i != space.size()) throw std::invalid_argument("weights: fewer rows than hypotheses");
  return s;
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return json::parse(f, nullptr, true, true);
}

}  // namespace bwa
