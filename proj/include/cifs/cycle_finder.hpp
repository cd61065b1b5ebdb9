#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cifs/interval_classifier.hpp"

namespace cifs {

/// One verified chain s_k < f_{k+1}^{-1}(s_k) < s_{k+1} < s_k^+.
struct OrderCheck {
  int k = 0;
  double s_k = 0.0, preimage = 0.0, s_next = 0.0, s_plus = 0.0;
  double margin = 0.0;  // smallest of the three gaps
};

/// Attractors s_0 < s_1 < ... < s_n = s_0 + 1 in the chart [s_0, s_0 + 1],
/// with s_{k+1} in the basin of s_k. A mirrored cycle lives in the chart of
/// the reflected pair (x -> -x).
struct Cycle {
  std::vector<double> attractors;  // s_0 .. s_n (chart lift coordinates)
  std::vector<int> parities;       // owner of s_k, alternating
  int length = 0;                  // n
  int winding = 1;                 // s_n - s_0; 0 when the loop closes on an ss-interval
  bool mirrored = false;
  std::vector<OrderCheck> certificate;
};

/// si lies in the basin of sj.
bool precedes(const FixedPointRecord& si, const FixedPointRecord& sj, const ReducedPair& sys);

/// Greedy walk over the basin cover; none when a generator has no fixed point.
std::optional<Cycle> find_cycle(const ReducedPair& sys);
std::optional<Cycle> find_cycle(const CircleMap& f0, const CircleMap& f1);

/// Generators in the chart of the cycle (reflected for mirrored cycles).
MapPair chart_maps(const Cycle& c, const MapPair& maps);

/// Checks every chain of the order lemma; throws OrderViolation on failure.
std::vector<OrderCheck> verify_cycle_order(const Cycle& c, const ReducedPair& sys);

}  // namespace cifs
