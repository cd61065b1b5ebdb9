#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cifs/circle_map.hpp"
#include "cifs/fixed_points.hpp"

namespace cifs {

/// Generators reduced to maps with fixed points: g_i = f_i^{q_i} - p_i.
/// Maps without periodic points (up to q_max) are kept as they are (q = 1, p = 0).
struct ReducedPair {
  MapPair maps;
  std::array<int, 2> q{1, 1};
  std::array<long, 2> p{0, 0};
  std::array<bool, 2> has_fixed_points{false, false};
  std::array<std::vector<FixedPointRecord>, 2> fixed;  // of maps[i], sorted
};

/// Rotation numbers, reduction to powers and the merged fixed-point inventory.
/// Throws CommonFixedPoint when the reduced maps share a fixed point.
ReducedPair reduce(const MapPair& maps, int q_max = 32);
/// Inventory only (maps are used as given, period 1).
ReducedPair inventory(const MapPair& maps);

enum class StarKind { ss, su, uu, s, u };
std::string to_string(StarKind k);

/// Chart change bringing an interval to the standard form of the local
/// return-map construction: a fixed by f0 with f0 < id on (a,b) and f1 > id.
/// Applied in the order: invert, reflect (x -> -x), swap generators.
struct Normalization {
  bool invert = false;
  bool reflect = false;
  bool swap = false;
};

struct StarInterval {
  StarKind kind = StarKind::ss;
  double a = 0.0, b = 0.0;  // lift coordinates, a < b; s/u intervals use +-infinity
  int owner_a = -1, owner_b = -1;  // generator fixing each endpoint, -1 at infinity
  bool mirrored = false;           // repeller-attractor su, or s/u towards -infinity
  Normalization normalization;
  int covering_samples = 0;
  double covering_slack = 0.0;  // min over samples of the distance inside the cover
  bool has_overlap = false;
  double overlap_witness = 0.0;
  std::vector<std::string> warnings;
};

/// Classification of a single gap [a, b] of the merged inventory.
std::optional<StarInterval> classify_interval(const ReducedPair& sys, double a, double b);
/// Convenience overload computing the inventory of (f0, f1) first.
std::optional<StarInterval> classify_interval(const CircleMap& f0, const CircleMap& f1, double a,
                                              double b);

std::vector<StarInterval> enumerate_star_intervals(const ReducedPair& sys);
std::vector<StarInterval> enumerate_star_intervals(const CircleMap& f0, const CircleMap& f1);

/// Generators and endpoints after the chart change of the interval.
struct NormalizedInterval {
  MapPair maps;
  double a = 0.0, b = 0.0;
  Normalization how;
  double to_chart(double x) const { return how.reflect ? -x : x; }
  double from_chart(double x) const { return how.reflect ? -x : x; }
};
NormalizedInterval normalize(const MapPair& maps, const StarInterval& k);

struct Basin {
  FixedPointRecord attractor;
  double lo = 0.0, hi = 0.0;  // neighbouring fixed points of the same map (lift)
  bool left = false, right = false;  // which sides (lo, s) and (s, hi) belong to the basin
  bool circle = true;
  bool contains(double x) const;
};

/// Basin of an attracting or semi-attracting point; none for repellers.
std::optional<Basin> basin_of(const FixedPointRecord& attractor,
                              const std::vector<FixedPointRecord>& same_map_points, bool circle);
std::optional<Basin> basin_of(const FixedPointRecord& attractor, const CircleMap& map);

}  // namespace cifs
