#include "cifs/words.hpp"

#include <cstdlib>

namespace cifs {

void push(Word& w, Letter l) {
  if (l.exp == 0) return;
  if (!w.empty() && w.back().map == l.map) {
    w.back().exp += l.exp;
    if (w.back().exp == 0) w.pop_back();
    return;
  }
  w.push_back(l);
}

Word concat(const Word& first, const Word& then) {
  Word out = first;
  for (const auto& l : then) push(out, l);
  return out;
}

Word inverse(const Word& w) {
  Word out;
  for (auto it = w.rbegin(); it != w.rend(); ++it) push(out, {it->map, -it->exp});
  return out;
}

long length(const Word& w) {
  long n = 0;
  for (const auto& l : w) n += std::labs(l.exp);
  return n;
}

std::string to_string(const Word& w) {
  if (w.empty()) return "id";
  std::string s;
  // Printed as a composition, last applied letter first.
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    if (!s.empty()) s += " ";
    s += "f" + std::to_string(it->map) + "^" + std::to_string(it->exp);
  }
  return s;
}

WordJet apply(const MapPair& maps, const Word& w, double x) {
  WordJet j{x, 1.0};
  for (const auto& l : w) {
    const CircleMap f = l.exp > 0 ? maps[l.map] : maps[l.map].inverse();
    for (long k = std::labs(l.exp); k > 0; --k) {
      Jet s = f.jet(j.value);
      j.value = s.value;
      j.d1 *= s.d1;
    }
  }
  return j;
}

double apply_value(const MapPair& maps, const Word& w, double x) {
  for (const auto& l : w) {
    const CircleMap f = l.exp > 0 ? maps[l.map] : maps[l.map].inverse();
    for (long k = std::labs(l.exp); k > 0; --k) x = f.lift(x);
  }
  return x;
}

}  // namespace cifs
