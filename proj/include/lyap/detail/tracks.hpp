#pragma once

// Per-candidate orbit tracking shared by the point and set estimators.
//
// A track follows one candidate y for up to `steps` iterates in one time
// direction and stops as soon as the gauge (distance to x's orbit, or to K)
// exceeds delta. survived = largest n such that the gauge stayed <= delta for
// every j in [0, n], or -1 when y starts outside the ball.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lyap/parallel.hpp"
#include "lyap/system.hpp"

namespace lyap::detail {

struct Track {
  double d0 = 0.0;
  int survived = -1;
  std::vector<double> gaps;  // gauge at j = 1..survived

  double ratio(int n) const { return gaps[static_cast<std::size_t>(n - 1)] / d0; }
};

/// gauge(j, y_j) is the distance at |j| steps; sign picks forward (+1) or backward (-1).
template <class Gauge>
Track follow(const DynamicalSystem& system, Point y, int steps, int sign, double delta, const Gauge& gauge) {
  Track t;
  t.d0 = gauge(0, y);
  if (!(t.d0 > 0.0) || t.d0 > delta) return t;
  t.survived = 0;
  t.gaps.reserve(static_cast<std::size_t>(steps));
  for (int j = 1; j <= steps; ++j) {
    y = sign > 0 ? system.forward(y) : system.backward(y);
    const double g = gauge(j, y);
    if (!(g <= delta)) break;
    t.gaps.push_back(g);
    t.survived = j;
  }
  return t;
}

template <class Gauge>
std::vector<Track> follow_all(const DynamicalSystem& system, std::span<const Point> candidates, int steps, int sign,
                              double delta, const Gauge& gauge) {
  std::vector<Track> tracks(candidates.size());
  parallel_for(candidates.size(),
               [&](std::size_t i) { tracks[i] = follow(system, candidates[i], steps, sign, delta, gauge); });
  return tracks;
}

struct Extremes {
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  std::size_t arg_max = 0;
  std::size_t arg_min = 0;
  std::size_t count = 0;
};

/// Max / min of the step-n ratio over tracks that survive n steps. Ties go to
/// the lowest index, so the answer does not depend on how tracks were computed.
inline std::optional<Extremes> extremes_at(const std::vector<Track>& tracks, int n) {
  Extremes e;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if (tracks[i].survived < n) continue;
    const double r = n == 0 ? 1.0 : tracks[i].ratio(n);
    if (e.count == 0 || r > e.max_ratio) {
      e.max_ratio = r;
      e.arg_max = i;
    }
    if (e.count == 0 || r < e.min_ratio) {
      e.min_ratio = r;
      e.arg_min = i;
    }
    ++e.count;
  }
  if (e.count == 0) return std::nullopt;
  return e;
}

}  // namespace lyap::detail
