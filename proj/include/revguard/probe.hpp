#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "revguard/review.hpp"

namespace revguard {

enum class MutationKind {
  ParagraphShuffle,
  SentenceShuffleWithinParagraph,
  BlockDropout,  // removes whole paragraphs at `dropout_rate`
  WhitespaceJitter,
  SectionReorder,
};

const char* to_string(MutationKind k);

/// One deterministic input mutation: same (kind, seed, input) always yields
/// the same variant.
struct MutationOp {
  MutationKind kind = MutationKind::ParagraphShuffle;
  std::uint64_t seed = 0;
  double dropout_rate = 0.1;  // BlockDropout only
};

struct StabilityReport {
  double gamma = 0.0;
  std::vector<std::pair<int, double>> per_variant;  // (variant index, d_y)
  int k = 0;
};

/// One variant per op. All kinds except BlockDropout preserve the word
/// multiset exactly; BlockDropout removes round(rate * n) whole paragraphs.
std::vector<std::string> mutate_input(const std::string& text,
                                      const std::vector<MutationOp>& ops);

/// Applies a single op.
std::string apply_mutation(const std::string& text, const MutationOp& op);

/// Weights of the three d_y components; defaults ship as 0.5/0.3/0.2.
struct ReviewDistanceWeights {
  double numeric = 0.5;
  double recommendation = 0.3;
  double free_text = 0.2;
};

/// d_y = w.numeric * mean(|numeric diff|/9 over the 5 scores)
///     + w.recommendation * |rank difference| / 4
///     + w.free_text * (1 - Jaccard(free-text word sets)).
double review_distance(const StructuredReview& a, const StructuredReview& b,
                       const ReviewDistanceWeights& weights = {});

/// Queries the client on the original text and each variant and averages
/// review_distance against the original. verdict = gamma > theta_rob.
/// Throws PreconditionViolation when fewer than 2 ops are given.
std::pair<StabilityReport, bool> probe_stability(const std::string& doc_text,
                                                 const ReviewPrompt& prompt,
                                                 ReviewerClient& client,
                                                 const std::vector<MutationOp>& ops,
                                                 double theta_rob,
                                                 const ReviewDistanceWeights& weights = {});

/// The default probe mutation set (k = 4) derived from one seed.
std::vector<MutationOp> default_mutation_ops(std::uint64_t seed);

}  // namespace revguard
