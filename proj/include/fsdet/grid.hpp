#pragma once

#include <span>
#include <string>
#include <vector>

#include "fsdet/factor_model.hpp"

namespace fsdet {

/// q in {3,6,9} x sl in {.40,...,.70} x phi in {.00,...,.60} x p/q in {5,10}
/// x var_sl x nl, q outermost: 672 conditions.
std::vector<LoadingCondition> enumerate_population_grid();

struct SampleCondition {
  LoadingCondition base;
  int n = 300;

  bool operator==(const SampleCondition&) const = default;
  std::string label() const;
};

/// n in {300,600,900} x q in {3,6,9} x sl in {.40,.50,.60} x phi in
/// {.00,.30,.50} x var_sl x nl at p/q = 5, n outermost: 324 conditions.
std::vector<SampleCondition> enumerate_sample_grid();

/// Conjunction of key=value restrictions; a value may be a comma list.
/// Keys: q, sl, phi, p_per_q (alias ppq), var_sl, nl, n.
class ConditionFilter {
 public:
  ConditionFilter() = default;
  static ConditionFilter parse(std::span<const std::string> expressions);

  bool matches(const LoadingCondition& cond) const;
  bool matches(const SampleCondition& cond) const;
  bool empty() const noexcept { return terms_.empty(); }

 private:
  struct Term {
    std::string key;
    std::vector<double> values;
  };
  bool matches_key(const std::string& key, double value) const;

  std::vector<Term> terms_;
};

std::vector<LoadingCondition> filter_conditions(std::span<const LoadingCondition> grid, const ConditionFilter& f);
std::vector<SampleCondition> filter_conditions(std::span<const SampleCondition> grid, const ConditionFilter& f);

}  // namespace fsdet
