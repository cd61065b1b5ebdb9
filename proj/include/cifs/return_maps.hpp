#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cifs/cycle_finder.hpp"
#include "cifs/distortion.hpp"
#include "cifs/interval_classifier.hpp"
#include "cifs/words.hpp"

namespace cifs {

/// Hypothesis check of the local expansion argument on a normalized interval.
struct DuminyResult {
  bool holds = false;
  double epsilon = 0.0;       // requested
  double epsilon_eff = 0.0;   // sup |Df0 - 1| measured on (a, w)
  double v0 = 0.0, v1 = 0.0;  // sup |D^2 f_i / Df_i| on (a, w]
  double window = 0.0;        // w - a
  double v = 0.0;             // (v0 + v1) * window
  double factor = 0.0;        // (1 - eps_eff) / eps_eff * exp(-v)
  double margin = 0.0;        // factor - 1
  std::string witness;        // reason when it fails
};

/// A right-closed piece of the partition of A with its return branch.
struct Piece {
  Interval I;
  Word word;               // return branch in application order
  std::vector<long> index; // (m, n) locally, (i_1 .. i_n) globally
  Interval image;          // word applied to I, before the chart shift
};

/// Piece endpoint expressed as word(base point).
struct Discontinuity {
  double x = 0.0;
  int base = 0;  // index into ReturnMapAtlas::base_points
  Word expr;
};

struct ReturnMapAtlas {
  bool global = false;
  MapPair maps;                  // generators in the chart of the construction
  NormalizedInterval chart;      // local construction only
  Cycle cycle;                   // global construction only
  Interval domain;               // A
  double shift = 0.0;            // R(x) = word(x) - shift
  std::vector<double> base_points;  // a locally, s_0 .. s_n globally
  std::vector<Piece> pieces;     // sorted by left endpoint
  std::vector<Discontinuity> discontinuities;
  std::vector<Interval> tail;    // unresolved parts of A
  int depth = 0;
  double tail_mass = 0.0;
  long ell = 0;                  // largest m with f1^m f1(a) in A (local)
  // Constants of the derivative estimate.
  double epsilon = 0.0, v0 = 0.0, v1 = 0.0, v = 0.0;
  double factor = 0.0;           // per-return lower bound multiplier
  bool hypothesis_holds = false;
};

/// Closed forms of the thresholds when every distortion constant equals eps:
/// (1 - eps) / eps * exp(-2 eps^2 / (1 - eps)) for the local argument,
/// the same with eps replaced by exp(eps) - 1 for periodic generators, and
/// exp(-2 eps) / (exp(eps) - 1) along a cycle.
double proximity_chain(double eps);
double periodic_chain(double eps);
double cycle_chain(double eps);

/// Local condition on a star interval of kind ss, su or s (any orientation).
/// maps are the generators the interval was classified with.
DuminyResult duminy_condition(const MapPair& maps, const StarInterval& k, double epsilon);
DuminyResult duminy_condition(const NormalizedInterval& n, double epsilon);

/// Partition of A = (f1(a), f0^{-1} f1(a)] into pieces I_{mn}, n <= depth.
/// Throws OverlapEmpty when A does not fit inside the interval.
ReturnMapAtlas build_local_return_map(const MapPair& maps, const StarInterval& k, int depth,
                                      double epsilon = 0.38);

/// The auxiliary map F = f0^{-1} on [a, f1(a)], f1^{-1} on (f1(a), b].
double auxiliary_map(const ReturnMapAtlas& atlas, double x);
/// R extended to (a, b) by running F into A first.
std::optional<double> extended_return(const ReturnMapAtlas& atlas, double x, long budget = 100000);

/// n-stage induction along a cycle whose order has been verified. A cycle closing on an
/// ss-interval (winding 0) falls back to the local construction.
ReturnMapAtlas build_global_return_map(const Cycle& cycle, const ReducedPair& sys, int depth,
                                       long piece_budget = 200000);

/// The piece containing x, if resolved.
const Piece* locate(const ReturnMapAtlas& atlas, double x);
/// R(x) and DR(x), none in the tail.
std::optional<WordJet> return_jet(const ReturnMapAtlas& atlas, double x);

/// Return branch of x in A found by walking the construction without
/// truncation (F-iteration locally, stagewise attraction globally).
std::optional<Word> return_word(const ReturnMapAtlas& atlas, double x, long budget = 1000000);

/// D(y) = |f0(y) - y| in the chart.
double displacement(const ReturnMapAtlas& atlas, double y);

struct RatioBound {
  double measured = 0.0;  // |R(J)| / |J|
  double analytic = 0.0;  // factor * D(R(y)) / D(y)
  bool extended = false;  // computed in extended precision
};

/// J = [x, y] inside one piece.
RatioBound derivative_ratio_bound(const ReturnMapAtlas& atlas, double x, double y);

/// Two-by-two estimate on stages j -> j + 2 of a global atlas (j even).
RatioBound two_by_two_bound(const ReturnMapAtlas& atlas, double x, double y, int j);

struct ExpansionCertificate {
  int N = 0;
  double lambda = 0.0;         // analytic lower bound factor^N * C
  std::string method = "analytic_bound";
  double measured_min = 0.0;   // min DR^N over samples
  long samples = 0;
  long tail_hits = 0;          // replay steps resolved by the direct walk
  double kappa = 0.0;
  double epsilon = 0.0, v = 0.0, v0 = 0.0, v1 = 0.0;
  double c_f0 = 0.0;
  double factor = 0.0;
  int cycle_length = 0;
};

/// Smallest N with factor^N * c > kappa.
int expansion_power(double factor, double c, double kappa);

/// C(f0) = inf D / sup D over A (over the resolved pieces for a global atlas).
double displacement_ratio(const ReturnMapAtlas& atlas);

ExpansionCertificate expansion_certificate(const ReturnMapAtlas& atlas, double kappa,
                                           long samples = 1000);

}  // namespace cifs
