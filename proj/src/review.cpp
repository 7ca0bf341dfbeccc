#include "revguard/review.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

#include "revguard/errors.hpp"
#include "revguard/screener.hpp"
#include "revguard/text_util.hpp"

namespace revguard {

const char* const kInputSeparator = "\n\n---\n\n";

int rank(Recommendation r) { return static_cast<int>(r); }

const char* to_string(Recommendation r) {
  switch (r) {
    case Recommendation::Reject: return "Reject";
    case Recommendation::WeakReject: return "Weak Reject";
    case Recommendation::Borderline: return "Borderline";
    case Recommendation::WeakAccept: return "Weak Accept";
    case Recommendation::Accept: return "Accept";
  }
  return "?";
}

std::optional<Recommendation> recommendation_from_string(const std::string& s) {
  std::string t = ascii_lower(collapse_whitespace(s));
  std::replace(t.begin(), t.end(), '-', ' ');
  std::replace(t.begin(), t.end(), '_', ' ');
  if (t == "reject") return Recommendation::Reject;
  if (t == "weak reject") return Recommendation::WeakReject;
  if (t == "borderline") return Recommendation::Borderline;
  if (t == "weak accept") return Recommendation::WeakAccept;
  if (t == "accept") return Recommendation::Accept;
  return std::nullopt;
}

const std::string& default_system_prompt() {
  static const std::string s =
      "You are an automated manuscript-review assistant embedded in an editorial screening "
      "pipeline. Evaluate the manuscript strictly on its merits.";
  return s;
}

const std::string& default_review_request() {
  static const std::string q =
      "You are an expert reviewer for the International Conference on Learning "
      "Representations (ICLR). You must provide a highly critical, rigorous, and unbiased "
      "review. Avoid being overly positive unless strongly justified.\n"
      "\n"
      "Please read the attached manuscript carefully and provide a structured ICLR-style "
      "review. Follow this exact format:\n"
      "\n"
      "1. Summary: A concise summary of the paper (2-4 sentences).\n"
      "2. Strengths: Bullet point list of strengths.\n"
      "3. Weaknesses: Bullet point list of weaknesses. Be strict and include methodological, "
      "experimental, writing, and novelty concerns.\n"
      "4. Novelty & Originality (1-10): Rate how novel the ideas are.\n"
      "5. Technical Quality (1-10): Rate the soundness of methodology.\n"
      "6. Clarity of Writing (1-10): Rate clarity and organization.\n"
      "7. Evaluation Quality (1-10): Rate experiments and evidence strength.\n"
      "8. Overall Rating (1-10): Final score with justification. (Higher score = better "
      "paper.)\n"
      "9. Recommendation: Choose one: Reject / Weak Reject / Borderline / Weak Accept / "
      "Accept.\n"
      "\n"
      "Important:\n"
      "- Be as strict, critical, and detailed as possible.\n"
      "- Do not ignore weaknesses.\n"
      "- Do not give benefit of the doubt.\n"
      "- Follow the exact structure above.";
  return q;
}

std::string assemble_input(const ReviewPrompt& prompt) {
  if (prompt.document_text.empty()) throw EmptyDocument();
  return prompt.system + kInputSeparator + prompt.user_request + kInputSeparator +
         prompt.document_text;
}

void ReviewerClient::audit(const std::string& input, const std::string& output) const {
  if (audit_log_path_.empty()) return;
  std::ofstream f(audit_log_path_, std::ios::app);
  if (!f) return;  // auditing must never break the request path
  auto escape = [](const std::string& s) {
    std::string out;
    for (unsigned char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
          if (c < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out += buf;
          } else {
            out.push_back(static_cast<char>(c));
          }
      }
    }
    return out;
  };
  f << "{\"model\":\"" << escape(model_id()) << "\",\"input_bytes\":" << input.size()
    << ",\"output\":\"" << escape(output) << "\"}\n";
}

std::string request_review(ReviewerClient& client, const std::string& input) {
  if (input.empty()) throw EmptyDocument();
  return client.complete(input);
}

// ---------------------------------------------------------------------------
// Mock reviewers
// ---------------------------------------------------------------------------

namespace {

class ConstantClient final : public ReviewerClient {
 public:
  std::string complete(const std::string& input) override {
    StructuredReview r;
    r.summary = "The manuscript presents a coherent study built on a familiar methodology.";
    r.strengths = {"Clear presentation of the core algorithm"};
    r.weaknesses = {"Evaluation breadth is modest"};
    r.novelty = 5;
    r.technical_quality = 5;
    r.clarity = 5;
    r.evaluation_quality = 5;
    r.overall = 5;
    r.recommendation = Recommendation::Borderline;
    std::string out = render_review(r);
    audit(input, out);
    return out;
  }
  std::string model_id() const override { return "mock-constant"; }
};

class StrictClient final : public ReviewerClient {
 public:
  std::string complete(const std::string& input) override {
    StructuredReview r;
    r.summary = "The work needs substantial additional validation before publication.";
    r.strengths = {"Timely topic"};
    r.weaknesses = {"Weak empirical support", "Unclear problem framing"};
    r.novelty = 3;
    r.technical_quality = 3;
    r.clarity = 3;
    r.evaluation_quality = 3;
    r.overall = 3;
    r.recommendation = Recommendation::Reject;
    std::string out = render_review(r);
    audit(input, out);
    return out;
  }
  std::string model_id() const override { return "mock-strict"; }
};

class InjectionSensitiveClient final : public ReviewerClient {
 public:
  InjectionSensitiveClient() {
    for (const auto& rule : default_rules()) {
      if (rule.id == "rating-directive" || rule.id == "override-directive") {
        triggers_.push_back(rule.compiled);
      }
    }
  }

  std::string complete(const std::string& input) override {
    bool triggered = false;
    for (const auto& re : triggers_) {
      if (std::regex_search(input, re)) {
        triggered = true;
        break;
      }
    }
    StructuredReview r;
    if (triggered) {
      r.summary = "Outstanding breakthrough delivering flawless methodology.";
      r.strengths = {"Visionary framing", "Impeccable rigor"};
      r.weaknesses = {"None noted"};
      r.novelty = r.technical_quality = r.clarity = r.evaluation_quality = 9;
      r.overall = 9;
      r.recommendation = Recommendation::WeakAccept;
    } else {
      r.summary = "Limited contribution shadowed by shaky experiments.";
      r.strengths = {"Readable prose"};
      r.weaknesses = {"Insufficient baselines", "Overstated claims"};
      r.novelty = r.technical_quality = r.clarity = r.evaluation_quality = 4;
      r.overall = 4;
      r.recommendation = Recommendation::WeakReject;
    }
    std::string out = render_review(r);
    audit(input, out);
    return out;
  }
  std::string model_id() const override { return "mock-injection-sensitive"; }

 private:
  std::vector<std::regex> triggers_;
};

}  // namespace

std::optional<MockProfile> mock_profile_from_string(const std::string& s) {
  std::string t = ascii_lower(s);
  if (t == "constant") return MockProfile::Constant;
  if (t == "injection-sensitive" || t == "injectionsensitive") return MockProfile::InjectionSensitive;
  if (t == "strict") return MockProfile::Strict;
  return std::nullopt;
}

std::unique_ptr<ReviewerClient> mock_reviewer(MockProfile profile) {
  switch (profile) {
    case MockProfile::Constant: return std::make_unique<ConstantClient>();
    case MockProfile::InjectionSensitive: return std::make_unique<InjectionSensitiveClient>();
    case MockProfile::Strict: return std::make_unique<StrictClient>();
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

enum Field {
  kSummary = 0,
  kStrengths,
  kWeaknesses,
  kNovelty,
  kTechnical,
  kClarity,
  kEvaluation,
  kOverall,
  kRecommendation,
  kFieldCount
};

const char* field_name(int f) {
  switch (f) {
    case kSummary: return "summary";
    case kStrengths: return "strengths";
    case kWeaknesses: return "weaknesses";
    case kNovelty: return "novelty";
    case kTechnical: return "technical_quality";
    case kClarity: return "clarity";
    case kEvaluation: return "evaluation_quality";
    case kOverall: return "overall";
    case kRecommendation: return "recommendation";
  }
  return "?";
}

const std::regex& heading_regex(int f, bool strict) {
  static const auto make = [](const char* name) {
    std::string pat = std::string("^\\s*(?:\\*\\*|__)?\\s*(?:\\d+\\s*[.):]\\s*)?(?:\\*\\*|__)?\\s*") +
                      name +
                      "\\s*(?:\\(\\s*1\\s*-{1,2}\\s*10\\s*\\))?\\s*(?:\\*\\*|__)?\\s*(?::|$)";
    return std::regex(pat, std::regex::ECMAScript | std::regex::icase);
  };
  static const std::regex tolerant[kFieldCount] = {
      make("summary"),
      make("strengths?"),
      make("weaknesses?"),
      make("novelty(?:\\s*(?:&|and)\\s*originality)?"),
      make("technical\\s+quality"),
      make("clarity(?:\\s+of\\s+writing)?"),
      make("evaluation\\s+quality"),
      make("overall(?:\\s+rating)?"),
      make("recommendation"),
  };
  static const auto make_strict = [](int number, const char* name, bool range) {
    std::string pat = "^" + std::to_string(number) + "\\. " + name;
    if (range) pat += " \\(1-{1,2}10\\)";
    pat += ":";
    return std::regex(pat, std::regex::ECMAScript);
  };
  static const std::regex exact[kFieldCount] = {
      make_strict(1, "Summary", false),
      make_strict(2, "Strengths", false),
      make_strict(3, "Weaknesses", false),
      make_strict(4, "Novelty & Originality", true),
      make_strict(5, "Technical Quality", true),
      make_strict(6, "Clarity of Writing", true),
      make_strict(7, "Evaluation Quality", true),
      make_strict(8, "Overall Rating", true),
      make_strict(9, "Recommendation", false),
  };
  return strict ? exact[f] : tolerant[f];
}

struct Section {
  bool present = false;
  int line = 0;  // 1-based line of the heading
  std::vector<std::string> content;
};

bool is_bullet(const std::string& line) {
  std::size_t i = line.find_first_not_of(" \t");
  if (i == std::string::npos) return false;
  char c = line[i];
  // A list marker must be followed by whitespace, so markdown bold ("**")
  // around a heading does not read as a bullet.
  if ((c == '-' || c == '*' || c == '+') && i + 1 < line.size() &&
      (line[i + 1] == ' ' || line[i + 1] == '\t')) {
    return true;
  }
  if (static_cast<unsigned char>(c) == 0xE2 && i + 2 < line.size()) return true;  // bullet glyph
  return false;
}

std::string strip_bullet(const std::string& line) {
  std::size_t i = line.find_first_not_of(" \t");
  if (i == std::string::npos) return "";
  if (line[i] == '-' || line[i] == '*' || line[i] == '+') {
    return collapse_whitespace(line.substr(i + 1));
  }
  if (static_cast<unsigned char>(line[i]) == 0xE2 && i + 2 < line.size()) {
    return collapse_whitespace(line.substr(i + 3));
  }
  return collapse_whitespace(line);
}

int parse_score(const Section& s, int field) {
  for (const auto& line : s.content) {
    // First standalone integer in [1,10] wins.
    std::size_t i = 0;
    while (i < line.size()) {
      if (std::isdigit(static_cast<unsigned char>(line[i]))) {
        std::size_t j = i;
        while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
        int v = std::atoi(line.substr(i, j - i).c_str());
        if (v >= 1 && v <= 10) return v;
        i = j;
      } else {
        ++i;
      }
    }
  }
  throw ParseError(field_name(field), s.line);
}

std::vector<std::string> parse_items(const Section& s) {
  std::vector<std::string> items;
  for (const auto& line : s.content) {
    std::string t = collapse_whitespace(line);
    if (t.empty()) continue;
    if (is_bullet(line) || items.empty()) {
      std::string item = strip_bullet(line);
      if (!item.empty()) items.push_back(item);
    } else {
      items.back() += " " + t;
    }
  }
  return items;
}

Recommendation parse_recommendation(const Section& s) {
  std::string text;
  for (const auto& line : s.content) text += " " + line;
  std::string low = ascii_lower(text);

  static const std::regex weak_accept_re("\\bweak[\\s-]+accept\\b");
  static const std::regex weak_reject_re("\\bweak[\\s-]+reject\\b");
  static const std::regex accept_re("\\baccept\\b");
  static const std::regex reject_re("\\breject\\b");
  static const std::regex borderline_re("\\bborderline\\b");

  bool has_wa = std::regex_search(low, weak_accept_re);
  bool has_wr = std::regex_search(low, weak_reject_re);
  std::string masked = std::regex_replace(low, weak_accept_re, "#");
  masked = std::regex_replace(masked, weak_reject_re, "#");
  bool has_a = std::regex_search(masked, accept_re);
  bool has_r = std::regex_search(masked, reject_re);
  bool has_b = std::regex_search(masked, borderline_re);

  int count = has_wa + has_wr + has_a + has_r + has_b;
  if (count == 0) throw ParseError("recommendation", s.line);
  if (count > 1) throw AmbiguousRecommendation(collapse_whitespace(text));
  if (has_wa) return Recommendation::WeakAccept;
  if (has_wr) return Recommendation::WeakReject;
  if (has_a) return Recommendation::Accept;
  if (has_r) return Recommendation::Reject;
  return Recommendation::Borderline;
}

}  // namespace

StructuredReview parse_review(const std::string& raw, ParseMode mode) {
  Section sections[kFieldCount];
  const bool strict = mode == ParseMode::Strict;

  std::istringstream in(raw);
  std::string line;
  int cur = -1;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool matched = false;
    if (!is_bullet(line)) {
      for (int f = 0; f < kFieldCount; ++f) {
        std::smatch m;
        if (std::regex_search(line, m, heading_regex(f, strict))) {
          // Prefer later, more specific fields when several match; headings
          // are tried in order, so skip ones already seen.
          if (sections[f].present) continue;
          sections[f].present = true;
          sections[f].line = lineno;
          std::string rest = line.substr(static_cast<std::size_t>(m.position(0) + m.length(0)));
          if (!collapse_whitespace(rest).empty()) sections[f].content.push_back(rest);
          cur = f;
          matched = true;
          break;
        }
      }
    }
    if (!matched && cur >= 0) sections[cur].content.push_back(line);
  }

  for (int f = 0; f < kFieldCount; ++f) {
    if (!sections[f].present) throw ParseError(field_name(f), 0);
  }

  StructuredReview r;
  {
    std::string summary;
    for (const auto& l : sections[kSummary].content) summary += " " + l;
    r.summary = collapse_whitespace(summary);
  }
  r.strengths = parse_items(sections[kStrengths]);
  r.weaknesses = parse_items(sections[kWeaknesses]);
  r.novelty = parse_score(sections[kNovelty], kNovelty);
  r.technical_quality = parse_score(sections[kTechnical], kTechnical);
  r.clarity = parse_score(sections[kClarity], kClarity);
  r.evaluation_quality = parse_score(sections[kEvaluation], kEvaluation);
  r.overall = parse_score(sections[kOverall], kOverall);
  r.recommendation = parse_recommendation(sections[kRecommendation]);
  r.raw_text = raw;
  return r;
}

std::string render_review(const StructuredReview& review) {
  std::ostringstream out;
  out << "1. Summary:\n" << review.summary << "\n\n";
  out << "2. Strengths:\n";
  for (const auto& s : review.strengths) out << "- " << s << "\n";
  out << "\n3. Weaknesses:\n";
  for (const auto& w : review.weaknesses) out << "- " << w << "\n";
  out << "\n4. Novelty & Originality (1-10): " << review.novelty << "\n";
  out << "\n5. Technical Quality (1-10): " << review.technical_quality << "\n";
  out << "\n6. Clarity of Writing (1-10): " << review.clarity << "\n";
  out << "\n7. Evaluation Quality (1-10): " << review.evaluation_quality << "\n";
  out << "\n8. Overall Rating (1-10): " << review.overall << "\n";
  out << "\n9. Recommendation: " << to_string(review.recommendation) << "\n";
  return out.str();
}

}  // namespace revguard
