#pragma once

// Compositions of the generators stored in run-length form. A word is read in
// application order: {(1,-m), (0,-n)} is x -> f0^{-n}(f1^{-m}(x)).

#include <string>
#include <vector>

#include "cifs/circle_map.hpp"

namespace cifs {

struct Letter {
  int map = 0;    // 0 or 1
  long exp = 0;   // nonzero; negative means inverse
  bool operator==(const Letter&) const = default;
};

using Word = std::vector<Letter>;

struct WordJet {
  double value;
  double d1;
};

/// Appends a letter, merging with the last one when the map matches.
void push(Word& w, Letter l);
Word concat(const Word& first, const Word& then);
/// The inverse composition.
Word inverse(const Word& w);
long length(const Word& w);
std::string to_string(const Word& w);

/// Applies the word to x in the lift and accumulates the derivative.
WordJet apply(const MapPair& maps, const Word& w, double x);
double apply_value(const MapPair& maps, const Word& w, double x);

}  // namespace cifs
