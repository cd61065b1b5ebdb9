#pragma once

#include <string>
#include <vector>

#include "cifs/circle_map.hpp"

namespace cifs {

enum class Stability {
  attracting,
  repelling,
  semi_attracting_left,   // attracts from the left only
  semi_attracting_right,  // attracts from the right only
  parabolic_unresolved,
};

std::string to_string(Stability s);

struct FixedPointRecord {
  double location = 0.0;  // in [0,1) on the circle
  int period = 1;
  int map_tag = 0;  // 0 for f0, 1 for f1
  Stability stability = Stability::parabolic_unresolved;
  double derivative = 1.0;  // Df^period at the point
  long translation = 0;     // p with f^period(x) = x + p in the lift

  bool has_basin() const {
    return stability == Stability::attracting || stability == Stability::semi_attracting_left ||
           stability == Stability::semi_attracting_right;
  }
  bool hyperbolic() const {
    return stability == Stability::attracting || stability == Stability::repelling;
  }
};

struct FixedPointOptions {
  int grid = 4096;
  // Throw UnresolvedTangency instead of returning parabolic_unresolved records.
  bool strict = true;
  // Translations to scan; empty means every integer hit by f^q - id.
  std::vector<long> translations;
};

/// Fixed points of f^period (with any integer translation in the lift),
/// classified and sorted by location.
std::vector<FixedPointRecord> fixed_points(const CircleMap& f, int period, int map_tag = 0,
                                           const FixedPointOptions& opt = {});

struct RotationResult {
  double estimate = 0.0;
  double error_bound = 0.0;
  bool rational = false;
  long p = 0;
  int q = 0;
};

/// Birkhoff-average rotation number with a rationality verdict for q <= q_max.
RotationResult rotation_number(const CircleMap& f, long budget = 10000, int q_max = 32);

}  // namespace cifs
