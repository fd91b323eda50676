#pragma once

#include "symeu/rational.hpp"

#include <boost/container/small_vector.hpp>

#include <compare>
#include <cstdint>
#include <string>
#include <utility>

namespace symeu {

// (variable label, value); configs are kept in strictly decreasing label order
using Assignment = std::pair<int, int>;
using Config = boost::container::small_vector<Assignment, 6>;

class Indeterminate {
 public:
  // declaration order is the sort order
  enum class Kind : std::uint8_t { interaction, weight, utility, probability };

  static Indeterminate interaction() { return Indeterminate(Kind::interaction, 0, 0, {}, 0); }
  static Indeterminate weight(int utility) { return Indeterminate(Kind::weight, utility, 0, {}, 0); }
  static Indeterminate utility(int utility, Config args) {
    return Indeterminate(Kind::utility, utility, 0, std::move(args), 0);
  }
  static Indeterminate probability(int node, int value, Config parents, int generation = 0) {
    return Indeterminate(Kind::probability, node, value, std::move(parents), generation);
  }

  Kind kind() const { return kind_; }
  int node() const { return node_; }
  int value() const { return value_; }
  int generation() const { return generation_; }
  const Config& config() const { return config_; }

  // every (variable, value) this parameter is conditioned on or about
  Config annotations() const {
    Config out;
    if (kind_ == Kind::probability) out.emplace_back(node_, value_);
    out.insert(out.end(), config_.begin(), config_.end());
    return out;
  }

  std::string name() const {
    bool compact = node_ <= 9 && value_ <= 9;
    for (auto& [l, v] : config_) compact = compact && l <= 9 && v <= 9;
    std::string out;
    auto put = [&](int x) {
      if (!compact) out += '_';
      out += std::to_string(x);
    };
    switch (kind_) {
      case Kind::interaction:
        return "h";
      case Kind::weight:
        return "k" + std::to_string(node_);
      case Kind::utility:
        out = "psi";
        put(node_);
        break;
      case Kind::probability:
        out = "p" + std::string(generation_, '\'');
        put(node_);
        put(value_);
        break;
    }
    for (auto& a : config_) put(a.second);
    return out;
  }

  friend bool operator==(const Indeterminate&, const Indeterminate&) = default;

  friend std::strong_ordering operator<=>(const Indeterminate& a, const Indeterminate& b) {
    if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
    if (auto c = a.node_ <=> b.node_; c != 0) return c;
    if (auto c = a.generation_ <=> b.generation_; c != 0) return c;
    if (auto c = a.config_.size() <=> b.config_.size(); c != 0) return c;
    for (std::size_t t = 0; t < a.config_.size(); ++t)
      if (auto c = a.config_[t].first <=> b.config_[t].first; c != 0) return c;
    // reverse lex over (value, config values): last differing slot decides,
    // the larger value first. Matches the position order inside a parameter vector.
    for (std::size_t t = a.config_.size(); t-- > 0;)
      if (a.config_[t].second != b.config_[t].second)
        return a.config_[t].second > b.config_[t].second ? std::strong_ordering::less
                                                         : std::strong_ordering::greater;
    if (a.value_ != b.value_)
      return a.value_ > b.value_ ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  Indeterminate(Kind k, int node, int value, Config cfg, int gen)
      : kind_(k), generation_(static_cast<std::uint8_t>(gen)), node_(node), value_(value),
        config_(std::move(cfg)) {}

  Kind kind_;
  std::uint8_t generation_;
  int node_;
  int value_;
  Config config_;
};

}  // namespace symeu
