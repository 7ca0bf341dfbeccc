#include "revguard/screener.hpp"

#include <algorithm>
#include <fstream>

#include "revguard/errors.hpp"

namespace revguard {

ScreenerRule::ScreenerRule(std::string rule_id, double w, std::string pat)
    : id(std::move(rule_id)), pattern(std::move(pat)), weight(w) {
  try {
    compiled = std::regex(pattern, std::regex::ECMAScript | std::regex::icase);
  } catch (const std::regex_error& e) {
    throw InvalidRule(id + ": " + e.what());
  }
  if (weight <= 0.0 || weight > 1.0) throw InvalidRule(id + ": weight must be in (0,1]");
}

const std::vector<ScreenerRule>& default_rules() {
  static const std::vector<ScreenerRule> rules = [] {
    std::vector<ScreenerRule> r;
    r.emplace_back("override-directive", 0.5,
                   "ignore (all |any |the )?(previous |prior )?instructions");
    r.emplace_back("reviewer-address", 0.3, "as (an? )?(ai|llm|language model|reviewer)");
    r.emplace_back("rating-directive", 0.5,
                   "(overall )?(rating|score) (of )?(9|10)|rate .{0,20}(highly|10)");
    r.emplace_back("acceptance-directive", 0.4,
                   "\\b(accept|strong accept|weak accept)\\b.{0,40}\\b(recommend|give|assign)|"
                   "recommend .{0,20}accept");
    r.emplace_back("praise-template", 0.3,
                   "excellent paper|this paper is (outstanding|exceptional)");
    r.emplace_back("suppression", 0.4, "do not (mention|criticize|list weaknesses)");
    return r;
  }();
  return rules;
}

std::vector<ScreenerRule> load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidRule("cannot open rule file: " + path);
  std::vector<ScreenerRule> rules;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) {
      throw InvalidRule(path + ":" + std::to_string(lineno) + ": expected id<TAB>weight<TAB>pattern");
    }
    std::string id = line.substr(0, t1);
    std::string weight_str = line.substr(t1 + 1, t2 - t1 - 1);
    std::string pattern = line.substr(t2 + 1);
    char* end = nullptr;
    double weight = std::strtod(weight_str.c_str(), &end);
    if (end == weight_str.c_str()) {
      throw InvalidRule(path + ":" + std::to_string(lineno) + ": bad weight '" + weight_str + "'");
    }
    rules.emplace_back(id, weight, pattern);
  }
  if (rules.empty()) throw InvalidRule(path + ": no rules");
  return rules;
}

ScreenResult screen_text(const std::string& text, const std::vector<ScreenerRule>& rules,
                         double theta_cls) {
  if (rules.empty()) throw InvalidRule("rule set is empty");
  if (theta_cls < 0.0 || theta_cls > 1.0) {
    throw PreconditionViolation("theta_cls must be in [0,1]");
  }
  ScreenResult res;
  if (!text.empty()) {
    for (const auto& rule : rules) {
      if (std::regex_search(text, rule.compiled)) {
        res.score += rule.weight;
        res.matched_rules.push_back(rule.id);
      }
    }
  }
  res.score = std::min(1.0, res.score);
  res.flagged = res.score > theta_cls;
  return res;
}

}  // namespace revguard
