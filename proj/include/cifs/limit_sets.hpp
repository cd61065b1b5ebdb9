#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cifs/distortion.hpp"
#include "cifs/interval_classifier.hpp"
#include "cifs/return_maps.hpp"
#include "cifs/words.hpp"

namespace cifs {

/// Worker count: hardware concurrency capped by CIRCLE_IFS_THREADS.
int worker_count();

enum class WordStrategy { mixed, uniform, greedy, replay };
std::string to_string(WordStrategy s);

/// Forward branches of an atlas as positive words in the generators of the
/// IFS they belong to (Phi, or Phi^-1 when the chart was inverted).
struct ReplayLibrary {
  std::vector<Word> words;
  bool inverse = false;
};
ReplayLibrary replay_library(const ReturnMapAtlas& atlas, std::size_t max_words = 4096);

/// Random letters for one orbit. Segments are drawn as 50% uniform letters,
/// 25% runs of one generator and 25% library words under `mixed`.
class WordSampler {
 public:
  WordSampler(std::uint64_t seed, std::uint64_t stream, WordStrategy s = WordStrategy::mixed,
              const std::vector<Word>* library = nullptr, int max_run_log2 = 12);
  int next();
  std::mt19937_64& rng() { return rng_; }

 private:
  void refill();
  std::mt19937_64 rng_;
  WordStrategy strategy_;
  const std::vector<Word>* library_;
  std::vector<int> pending_;  // reversed
  int max_run_log2_;
};

/// Occupied cells of a delta-grid: [k delta, (k+1) delta).
struct BinSet {
  double delta = 1e-3;
  bool circle = true;
  std::vector<long> bins;    // sorted
  std::vector<long> counts;  // visits per bin
  long bin_of(double x) const;
  bool has(long b) const;
  std::size_t size() const { return bins.size(); }
  /// Runs of adjacent bins, wrapping on the circle.
  std::vector<Interval> clusters() const;
  /// Every bin of *this lies within `slack` bins of one of `other`.
  bool within(const BinSet& other, long slack = 1) const;
};
BinSet make_bins(const std::vector<double>& pts, double delta, bool circle);

struct OmegaOptions {
  long budget = 100000;  // word steps over all seeds
  int seeds = 8;
  double delta = 1e-3;
  std::uint64_t seed = 1;
  WordStrategy strategy = WordStrategy::mixed;
  double escape = 1e6;   // |x| beyond this on the line counts as +-infinity
  const std::vector<Word>* library = nullptr;
};

struct OmegaApprox {
  BinSet cells;
  bool plus_infinity = false, minus_infinity = false;
  long steps = 0, recorded = 0;
  std::uint64_t seed = 0;
  std::vector<double> points;  // cell centres, empty when everything escaped
};

/// Accumulation points of random forward compositions from x: every seed runs
/// budget / seeds steps and records the second half of its orbit.
OmegaApprox omega_limit(double x, const MapPair& maps, const OmegaOptions& opt = {});

/// A word w and an interval J with w(J) inside J and sup |Dw| < 1 on J, so w has
/// an attracting fixed point in J. Words use the generators of the system they
/// were searched in; `inverse` marks words of Phi^-1 (repelling points of Phi).
struct PeriodicWitness {
  Word word;
  long translation = 0;  // w(x) - translation on the circle
  Interval J;
  double contraction = 1.0;  // sup |Dw| measured on J
  double point = 0.0;        // the fixed point, in [0,1) on the circle
  bool inverse = false;
};

/// Contraction witness inside J built as h o g^l: g has an attractor s whose
/// basin holds J and h carries s into J along a random orbit.
class WitnessSearch {
 public:
  WitnessSearch(const MapPair& maps, bool inverse, std::uint64_t seed, long walk_budget = 100000);
  std::optional<PeriodicWitness> find(Interval J, std::uint64_t stream) const;
  /// One witness per delta-bin of the circle, found in parallel.
  std::vector<std::optional<PeriodicWitness>> per_bin(double delta) const;
  const MapPair& maps() const { return maps_; }

 private:
  std::optional<PeriodicWitness> attempt(Interval J, std::uint64_t stream) const;
  MapPair maps_;  // Phi
  MapPair walk_;  // Phi or Phi^-1
  bool inverse_;
  std::uint64_t seed_;
  long walk_budget_;
  std::vector<Basin> basins_;
  std::vector<int> owners_;
};

/// Checks w(J) inside J and the contraction on a grid of J. Inverse witnesses
/// are checked through the expanding positive word w^-1.
bool verify_witness(const MapPair& maps, const PeriodicWitness& w, int grid = 64);

enum class PieceType { fixed_point, star_interval };

struct DecompositionPiece {
  PieceType type = PieceType::fixed_point;
  StarKind kind = StarKind::ss;  // star intervals only
  double a = 0.0, b = 0.0;       // equal for a fixed point
  int owner = -1;                // fixed points: generator fixing it
  Stability stability = Stability::parabolic_unresolved;
  std::vector<PeriodicWitness> witnesses;
  // Transitivity sample: delta-bins of the piece hit by one orbit.
  bool transitivity_inverse = false;  // sampled with Phi^-1
  double transitivity_coverage = 0.0;
  long transitivity_steps = 0;
  long exits = 0;  // orbit points that left the piece
};

enum class DecompositionStatus { decomposed, minimal, unknown };
std::string to_string(DecompositionStatus s);

struct DecompositionOptions {
  double epsilon = 0.30;
  long orbit_budget = 200000;
  double delta = 1e-3;
  std::uint64_t seed = 1;
};

struct DecompositionReport {
  DecompositionStatus status = DecompositionStatus::unknown;
  std::string reason;
  std::array<ClosenessCertificate, 2> closeness;
  std::array<int, 2> q{1, 1};
  std::array<long, 2> p{0, 0};
  std::vector<DecompositionPiece> pieces;
  bool overlap = false;
  double unclassified_mass = 0.0;
  std::vector<std::string> notes;
  std::uint64_t seed = 0;
};

/// Limit-set pieces of IFS(f0^n0, f1^n1). Throws HypothesisFailure when a
/// generator has no periodic points, CommonFixedPoint from the reduction.
DecompositionReport spectral_decomposition(const CircleMap& f0, const CircleMap& f1,
                                           const DecompositionOptions& opt = {});

enum class MinimalityVerdict { minimal_certified, not_minimal, unknown };
std::string to_string(MinimalityVerdict v);

struct CoverageStats {
  int seeds = 0;
  int seeds_full = 0;      // seeds whose orbit hit every bin
  double min_coverage = 0.0;
  long max_steps = 0;      // steps needed by the slowest full seed
};

struct MinimalityOptions {
  double delta = 1e-3;
  int seeds = 32;
  long budget = 1000000;   // per seed
  bool witnesses = true;
  std::uint64_t seed = 1;
};

struct MinimalityCertificate {
  MinimalityVerdict verdict = MinimalityVerdict::unknown;
  std::string reason;
  std::optional<StarInterval> ss_witness;
  std::array<ClosenessCertificate, 2> closeness;
  bool common_point = false;
  std::array<bool, 2> periodic_points{false, false};
  std::array<int, 2> q{1, 1};
  double delta = 0.0;
  CoverageStats forward, backward;
  long bins = 0;
  long attractor_bins = 0, repeller_bins = 0;  // bins holding a verified witness
  std::uint64_t seed = 0;
  BinSet histogram;  // forward orbit of the first seed
};

MinimalityCertificate minimality_certificate(const CircleMap& f0, const CircleMap& f1,
                                             double epsilon = 0.38,
                                             const MinimalityOptions& opt = {});

/// Coverage of the delta-grid of the circle by orbits of random seeds.
CoverageStats orbit_coverage(const MapPair& maps, double delta, int seeds, long budget,
                             std::uint64_t seed, BinSet* first_histogram = nullptr);

/// A positive word carrying x into I (inverse words for Phi^-1 when `inverse`).
/// Throws BudgetExhausted.
Word reach_interval(double x, Interval I, const MapPair& maps, long budget,
                    std::uint64_t seed = 1, bool inverse = false);

enum class DenjoyVerdict { no_cantor_found, cantor_suspected };
std::string to_string(DenjoyVerdict v);

struct GapTrace {
  long steps = 0;
  double largest_gap = 0.0;
  std::array<double, 3> coverage{};  // at delta 1e-2, 1e-3, 1e-4
};

struct DenjoyInterval {
  double a = 0.0, b = 0.0;
  std::vector<GapTrace> trace;  // one entry per budget doubling
  bool monotone = true;
  std::string taxonomy;  // "finite orbit", "nonempty interior" or "cantor"
  DenjoyVerdict verdict = DenjoyVerdict::no_cantor_found;
};

struct DenjoyResult {
  DenjoyVerdict verdict = DenjoyVerdict::no_cantor_found;
  bool in_scope = false;
  std::string label;  // "certified" or "outside theorem scope"
  std::vector<DenjoyInterval> intervals;
  std::uint64_t seed = 0;
};

DenjoyResult denjoy_check(const CircleMap& f0, const CircleMap& f1, long budget = 1000000,
                          std::uint64_t seed = 1, double epsilon = 0.30);

}  // namespace cifs
