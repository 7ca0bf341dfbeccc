#include "revguard/probe.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "revguard/errors.hpp"
#include "revguard/text_util.hpp"

namespace revguard {

const char* to_string(MutationKind k) {
  switch (k) {
    case MutationKind::ParagraphShuffle: return "paragraph-shuffle";
    case MutationKind::SentenceShuffleWithinParagraph: return "sentence-shuffle";
    case MutationKind::BlockDropout: return "block-dropout";
    case MutationKind::WhitespaceJitter: return "whitespace-jitter";
    case MutationKind::SectionReorder: return "section-reorder";
  }
  return "?";
}

namespace {

std::vector<std::string> split_paragraphs(const std::string& text) {
  std::vector<std::string> paras;
  std::string cur;
  std::size_t i = 0;
  while (i < text.size()) {
    // A blank line (possibly with spaces) ends a paragraph.
    if (text[i] == '\n') {
      std::size_t j = i + 1;
      while (j < text.size() && (text[j] == ' ' || text[j] == '\t' || text[j] == '\r')) ++j;
      if (j < text.size() && text[j] == '\n') {
        if (!collapse_whitespace(cur).empty()) paras.push_back(cur);
        cur.clear();
        i = j + 1;
        continue;
      }
    }
    cur.push_back(text[i]);
    ++i;
  }
  if (!collapse_whitespace(cur).empty()) paras.push_back(cur);
  return paras;
}

std::string join_paragraphs(const std::vector<std::string>& paras) {
  std::string out;
  for (std::size_t i = 0; i < paras.size(); ++i) {
    if (i) out += "\n\n";
    out += paras[i];
  }
  return out;
}

// Splits after '.', '!' or '?' followed by whitespace.
std::vector<std::string> split_sentences(const std::string& para) {
  std::vector<std::string> sentences;
  std::string cur;
  for (std::size_t i = 0; i < para.size(); ++i) {
    cur.push_back(para[i]);
    char c = para[i];
    if ((c == '.' || c == '!' || c == '?') && i + 1 < para.size() &&
        std::isspace(static_cast<unsigned char>(para[i + 1]))) {
      sentences.push_back(collapse_whitespace(cur));
      cur.clear();
      ++i;  // consume one whitespace
    }
  }
  std::string last = collapse_whitespace(cur);
  if (!last.empty()) sentences.push_back(last);
  return sentences;
}

std::string join_sentences(const std::vector<std::string>& sentences) {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i) out += " ";
    out += sentences[i];
  }
  return out;
}

bool is_section_heading(const std::string& para) {
  std::string t = collapse_whitespace(para);
  if (t.empty()) return false;
  // "1. Introduction" / "2 Method" style, or a known top-level marker.
  if (std::isdigit(static_cast<unsigned char>(t[0]))) {
    std::size_t i = 1;
    while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
    if (i < t.size() && (t[i] == '.' || t[i] == ')' || t[i] == ' ')) return true;
  }
  std::string low = ascii_lower(t);
  return low.rfind("abstract", 0) == 0 || low.rfind("references", 0) == 0;
}

std::string paragraph_shuffle(const std::string& text, std::uint64_t seed) {
  auto paras = split_paragraphs(text);
  SplitMix64 rng(seed);
  seeded_shuffle(paras, rng);
  return join_paragraphs(paras);
}

std::string sentence_shuffle(const std::string& text, std::uint64_t seed) {
  auto paras = split_paragraphs(text);
  SplitMix64 rng(seed);
  for (auto& p : paras) {
    auto sentences = split_sentences(p);
    seeded_shuffle(sentences, rng);
    p = join_sentences(sentences);
  }
  return join_paragraphs(paras);
}

std::string block_dropout(const std::string& text, std::uint64_t seed, double rate) {
  auto paras = split_paragraphs(text);
  std::size_t n = paras.size();
  std::size_t k = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
  if (k == 0 || n == 0) return join_paragraphs(paras);
  if (k >= n) k = n - 1;  // never drop everything

  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  SplitMix64 rng(seed);
  seeded_shuffle(indices, rng);
  std::vector<bool> drop(n, false);
  for (std::size_t i = 0; i < k; ++i) drop[indices[i]] = true;

  std::vector<std::string> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (!drop[i]) kept.push_back(paras[i]);
  }
  return join_paragraphs(kept);
}

std::string whitespace_jitter(const std::string& text, std::uint64_t seed) {
  // Doubles or keeps the space after sentence punctuation; never touches
  // spaces inside phrases, so regex-visible word sequences survive.
  SplitMix64 rng(seed);
  std::string out;
  out.reserve(text.size() + 16);
  for (std::size_t i = 0; i < text.size(); ++i) {
    out.push_back(text[i]);
    if ((text[i] == '.' || text[i] == '!' || text[i] == '?') && i + 1 < text.size() &&
        text[i + 1] == ' ') {
      if (rng.bounded(2) == 0) out.push_back(' ');  // widen this gap
    }
  }
  return out;
}

std::string section_reorder(const std::string& text, std::uint64_t seed) {
  auto paras = split_paragraphs(text);
  // Group paragraphs into sections starting at heading paragraphs; the
  // preamble before the first heading stays in place.
  std::vector<std::vector<std::string>> sections;
  std::vector<std::string> preamble;
  for (auto& p : paras) {
    if (is_section_heading(p)) {
      sections.emplace_back();
      sections.back().push_back(p);
    } else if (sections.empty()) {
      preamble.push_back(p);
    } else {
      sections.back().push_back(p);
    }
  }
  SplitMix64 rng(seed);
  seeded_shuffle(sections, rng);
  std::vector<std::string> out = preamble;
  for (const auto& sec : sections) {
    for (const auto& p : sec) out.push_back(p);
  }
  return join_paragraphs(out);
}

double mean_numeric_distance(const StructuredReview& a, const StructuredReview& b) {
  const int da = std::abs(a.novelty - b.novelty) + std::abs(a.technical_quality - b.technical_quality) +
                 std::abs(a.clarity - b.clarity) +
                 std::abs(a.evaluation_quality - b.evaluation_quality) +
                 std::abs(a.overall - b.overall);
  return static_cast<double>(da) / 5.0 / 9.0;
}

std::string free_text(const StructuredReview& r) {
  std::string t = r.summary;
  for (const auto& s : r.strengths) t += " " + s;
  for (const auto& w : r.weaknesses) t += " " + w;
  return t;
}

}  // namespace

std::string apply_mutation(const std::string& text, const MutationOp& op) {
  switch (op.kind) {
    case MutationKind::ParagraphShuffle: return paragraph_shuffle(text, op.seed);
    case MutationKind::SentenceShuffleWithinParagraph: return sentence_shuffle(text, op.seed);
    case MutationKind::BlockDropout: return block_dropout(text, op.seed, op.dropout_rate);
    case MutationKind::WhitespaceJitter: return whitespace_jitter(text, op.seed);
    case MutationKind::SectionReorder: return section_reorder(text, op.seed);
  }
  return text;
}

std::vector<std::string> mutate_input(const std::string& text,
                                      const std::vector<MutationOp>& ops) {
  if (ops.empty()) throw PreconditionViolation("mutation op list must be non-empty");
  std::vector<std::string> variants;
  variants.reserve(ops.size());
  for (const auto& op : ops) variants.push_back(apply_mutation(text, op));
  return variants;
}

double review_distance(const StructuredReview& a, const StructuredReview& b,
                       const ReviewDistanceWeights& weights) {
  double numeric = mean_numeric_distance(a, b);
  double rec = std::abs(rank(a.recommendation) - rank(b.recommendation)) / 4.0;
  double text = 1.0 - jaccard(alnum_word_set(free_text(a)), alnum_word_set(free_text(b)));
  return weights.numeric * numeric + weights.recommendation * rec + weights.free_text * text;
}

std::vector<MutationOp> default_mutation_ops(std::uint64_t seed) {
  return {
      {MutationKind::ParagraphShuffle, seed ^ 0x1u, 0.1},
      {MutationKind::SentenceShuffleWithinParagraph, seed ^ 0x2u, 0.1},
      {MutationKind::BlockDropout, seed ^ 0x3u, 0.1},
      {MutationKind::WhitespaceJitter, seed ^ 0x4u, 0.1},
  };
}

std::pair<StabilityReport, bool> probe_stability(const std::string& doc_text,
                                                 const ReviewPrompt& prompt,
                                                 ReviewerClient& client,
                                                 const std::vector<MutationOp>& ops,
                                                 double theta_rob,
                                                 const ReviewDistanceWeights& weights) {
  if (ops.size() < 2) throw PreconditionViolation("stability probe needs k >= 2 mutations");
  if (theta_rob < 0.0 || theta_rob > 1.0) {
    throw PreconditionViolation("theta_rob must be in [0,1]");
  }

  auto query = [&](const std::string& text) {
    ReviewPrompt p = prompt;
    p.document_text = text;
    return parse_review(request_review(client, assemble_input(p)));
  };

  StructuredReview original = query(doc_text);
  StabilityReport report;
  report.k = static_cast<int>(ops.size());
  double sum = 0.0;
  int idx = 0;
  for (const auto& variant : mutate_input(doc_text, ops)) {
    double d = review_distance(original, query(variant), weights);
    report.per_variant.emplace_back(idx++, d);
    sum += d;
  }
  report.gamma = sum / static_cast<double>(report.k);
  return {report, report.gamma > theta_rob};
}

}  // namespace revguard
