#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace bwa {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  [[nodiscard]] double clamp(double v) const noexcept { return std::clamp(v, lo, hi); }
  [[nodiscard]] bool contains(double v, double slack = 0.0) const noexcept {
    return v >= lo - slack && v <= hi + slack;
  }
  [[nodiscard]] double width() const noexcept { return hi - lo; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// One observation z = (x, y) of the chain on X x Y.
struct StatePoint {
  std::vector<double> x;
  double y = 0.0;

  friend bool operator==(const StatePoint&, const StatePoint&) = default;
};

/// Compact state space X x Y given as a bounding box for X and an interval Y.
struct Domain {
  std::vector<Interval> x_box;
  Interval y;

  [[nodiscard]] std::size_t dimension() const noexcept { return x_box.size(); }

  [[nodiscard]] bool contains_x(std::span<const double> x) const noexcept {
    if (x.size() != x_box.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!x_box[i].contains(x[i])) return false;
    return true;
  }

  /// y_slack widens Y; noisy targets may leave Y by up to Xi/2.
  [[nodiscard]] bool contains(const StatePoint& z, double y_slack = 0.0) const noexcept {
    return contains_x(z.x) && y.contains(z.y, y_slack);
  }

  friend bool operator==(const Domain&, const Domain&) = default;
};

/// Tight bounding box of a set of points.
Domain bounding_domain(std::span<const StatePoint> points);

}  // namespace bwa
