#pragma once

#include "symeu/oracle.hpp"

#include <random>

namespace symeu {

// A full numeric specification with small-denominator values: every
// probability block is a random distribution, utilities lie in [0,1], weights
// in (0,1), and h (when symbolic) in [-1, 2].
inline NumericSpec random_numeric_spec(const Mid& mid, std::mt19937_64& rng) {
  NumericSpec s;
  std::uniform_int_distribution<int> weight(1, 9), tenth(0, 10), hpick(-10, 20);
  for (int pos = 1; pos <= mid.n(); ++pos) {
    if (!mid.is_chance(pos)) continue;
    std::map<Config, std::vector<Indeterminate>> blocks;
    for (auto& x : probability_vector(mid, pos).entries) blocks[x.config()].push_back(x);
    for (auto& [_, members] : blocks) {
      std::vector<int> w;
      int total = 0;
      for (std::size_t t = 0; t < members.size(); ++t) total += w.emplace_back(weight(rng));
      for (std::size_t t = 0; t < members.size(); ++t) s[members[t]] = Rational(w[t], total);
    }
  }
  for (int u = 1; u <= mid.m(); ++u)
    for (auto& x : utility_vector(mid, u).entries) s[x] = Rational(tenth(rng), 10);
  for (auto& x : all_indeterminates(mid)) {
    if (x.kind() == Indeterminate::Kind::weight) s[x] = Rational(weight(rng), 10);
    if (x.kind() == Indeterminate::Kind::interaction) s[x] = Rational(hpick(rng), 10);
  }
  return s;
}

}  // namespace symeu
