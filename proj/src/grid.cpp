#include "fsdet/grid.hpp"

#include <charconv>
#include <cmath>
#include <string_view>

#include "fsdet/errors.hpp"

namespace fsdet {

namespace {

constexpr int kFactorLevels[] = {3, 6, 9};

double parse_value(std::string_view text, const std::string& expr) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(ErrorKind::InvalidArgument, "bad filter value in '" + expr + "'");
  return v;
}

std::string canonical_key(std::string key, const std::string& expr) {
  if (key == "ppq" || key == "p/q") key = "p_per_q";
  if (key == "var" || key == "var(sl)") key = "var_sl";
  if (key == "phi_pop") key = "phi";
  static const char* known[] = {"q", "sl", "phi", "p_per_q", "var_sl", "nl", "n"};
  for (const char* k : known) {
    if (key == k) return key;
  }
  fail(ErrorKind::InvalidArgument, "unknown filter key in '" + expr + "'");
}

}  // namespace

std::vector<LoadingCondition> enumerate_population_grid() {
  std::vector<LoadingCondition> grid;
  grid.reserve(672);
  for (const int q : kFactorLevels) {
    for (const double sl : {0.40, 0.50, 0.60, 0.70}) {
      for (int phi10 = 0; phi10 <= 6; ++phi10) {
        for (const int ppq : {5, 10}) {
          for (const bool var_sl : {false, true}) {
            for (const bool nl : {false, true}) {
              grid.push_back({q, sl, phi10 / 10.0, ppq, var_sl, nl});
            }
          }
        }
      }
    }
  }
  return grid;
}

std::string SampleCondition::label() const { return base.label() + " n=" + std::to_string(n); }

std::vector<SampleCondition> enumerate_sample_grid() {
  std::vector<SampleCondition> grid;
  grid.reserve(324);
  for (const int n : {300, 600, 900}) {
    for (const int q : kFactorLevels) {
      for (const double sl : {0.40, 0.50, 0.60}) {
        for (const double phi : {0.0, 0.30, 0.50}) {
          for (const bool var_sl : {false, true}) {
            for (const bool nl : {false, true}) {
              grid.push_back({{q, sl, phi, 5, var_sl, nl}, n});
            }
          }
        }
      }
    }
  }
  return grid;
}

ConditionFilter ConditionFilter::parse(std::span<const std::string> expressions) {
  ConditionFilter f;
  for (const std::string& expr : expressions) {
    const auto eq = expr.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == expr.size()) {
      fail(ErrorKind::InvalidArgument, "filter must look like key=value, got '" + expr + "'");
    }
    Term term{canonical_key(expr.substr(0, eq), expr), {}};
    std::string_view rest(expr);
    rest.remove_prefix(eq + 1);
    for (;;) {
      const auto comma = rest.find(',');
      term.values.push_back(parse_value(rest.substr(0, comma), expr));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    f.terms_.push_back(std::move(term));
  }
  return f;
}

bool ConditionFilter::matches_key(const std::string& key, double value) const {
  for (const Term& t : terms_) {
    if (t.key != key) continue;
    bool any = false;
    for (const double v : t.values) any = any || std::abs(v - value) < 1e-9;
    if (!any) return false;
  }
  return true;
}

bool ConditionFilter::matches(const LoadingCondition& c) const {
  for (const Term& t : terms_) {
    if (t.key == "n") return false;
  }
  return matches_key("q", c.q) && matches_key("sl", c.sl) && matches_key("phi", c.phi) &&
         matches_key("p_per_q", c.p_per_q) && matches_key("var_sl", c.var_sl ? 1 : 0) && matches_key("nl", c.nl ? 1 : 0);
}

bool ConditionFilter::matches(const SampleCondition& c) const {
  return matches_key("q", c.base.q) && matches_key("sl", c.base.sl) && matches_key("phi", c.base.phi) &&
         matches_key("p_per_q", c.base.p_per_q) && matches_key("var_sl", c.base.var_sl ? 1 : 0) &&
         matches_key("nl", c.base.nl ? 1 : 0) && matches_key("n", c.n);
}

std::vector<LoadingCondition> filter_conditions(std::span<const LoadingCondition> grid, const ConditionFilter& f) {
  std::vector<LoadingCondition> out;
  for (const auto& c : grid) {
    if (f.matches(c)) out.push_back(c);
  }
  return out;
}

std::vector<SampleCondition> filter_conditions(std::span<const SampleCondition> grid, const ConditionFilter& f) {
  std::vector<SampleCondition> out;
  for (const auto& c : grid) {
    if (f.matches(c)) out.push_back(c);
  }
  return out;
}

}  // namespace fsdet
