#include "revguard/structural.hpp"

#include <algorithm>

#include "revguard/errors.hpp"
#include "revguard/text_util.hpp"

namespace revguard {

double block_distance(const std::string& parser_text, const std::string& render_text,
                      DistanceMetric metric) {
  if (metric == DistanceMetric::NormalizedLevenshtein) {
    std::size_t longest = std::max(parser_text.size(), render_text.size());
    if (longest == 0) return 0.0;
    return static_cast<double>(levenshtein(parser_text, render_text)) /
           static_cast<double>(longest);
  }

  WordMultiset parser_words = word_multiset(parser_text);
  long total = multiset_size(parser_words);
  if (total == 0) return 0.0;
  long shared = multiset_intersection_size(parser_words, word_multiset(render_text));
  return 1.0 - static_cast<double>(shared) / static_cast<double>(total);
}

std::vector<BlockDelta> scan_structure(const PdfDocument& doc, const RenderBackend& renderer,
                                       double theta_struct, DistanceMetric metric) {
  if (theta_struct < 0.0 || theta_struct > 1.0) {
    throw PreconditionViolation("theta_struct must be in [0,1]");
  }
  std::vector<BlockDelta> deltas;
  for (const auto& block : segment_blocks(doc)) {
    ViewPair views = extract_view_pair(doc, block, renderer);

    BlockDelta d;
    d.block_id = block.id;
    d.delta = block_distance(views.parser_text, views.render_text, metric);
    d.alert = d.delta > theta_struct;

    // Parser words with no counterpart left in the render view, original
    // order preserved.
    WordMultiset remaining = word_multiset(views.render_text);
    std::string recovered;
    for (const auto& w : split_words(views.parser_text)) {
      auto it = remaining.find(w);
      if (it != remaining.end() && it->second > 0) {
        --it->second;
      } else {
        if (!recovered.empty()) recovered.push_back(' ');
        recovered += w;
      }
    }
    d.recovered_hidden_text = std::move(recovered);
    deltas.push_back(std::move(d));
  }
  return deltas;
}

}  // namespace revguard
