#pragma once

#include <regex>
#include <string>
#include <vector>

namespace revguard {

/// A weighted instruction-likeness rule. Patterns are case-insensitive
/// ECMAScript regexes, compiled once at construction.
struct ScreenerRule {
  std::string id;
  std::string pattern;
  double weight = 0.0;
  std::regex compiled;

  ScreenerRule(std::string rule_id, double w, std::string pat);
};

struct ScreenResult {
  int block_id = -1;
  double score = 0.0;
  std::vector<std::string> matched_rules;
  bool flagged = false;
};

/// The shipped rule set. Weights sum to 2.4, so a saturated match clamps to
/// score 1.0.
const std::vector<ScreenerRule>& default_rules();

/// Loads rules from a line-oriented UTF-8 file: `id<TAB>weight<TAB>pattern`.
/// Blank lines and lines starting with '#' are skipped.
std::vector<ScreenerRule> load_rules(const std::string& path);

/// Scores text against the rules: sum of matched weights clamped to 1,
/// flagged when score > theta_cls.
ScreenResult screen_text(const std::string& text, const std::vector<ScreenerRule>& rules,
                         double theta_cls);

}  // namespace revguard
