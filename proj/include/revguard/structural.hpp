#pragma once

#include <string>
#include <vector>

#include "revguard/pdf_model.hpp"

namespace revguard {

/// Per-block dual-view distance and the recovered parser-only words.
struct BlockDelta {
  int block_id = 0;
  double delta = 0.0;
  bool alert = false;
  std::string recovered_hidden_text;
};

enum class DistanceMetric {
  WordContainment,        // 1 - |W1 n W2| / max(|W1|, 1); insensitive to OCR reordering
  NormalizedLevenshtein,  // char-level edit distance / max length
};

/// Distance between the parser view and the render view of one block, in
/// [0,1]. An empty parser view scores 0 (nothing can be hidden).
double block_distance(const std::string& parser_text, const std::string& render_text,
                      DistanceMetric metric = DistanceMetric::WordContainment);

/// Runs the dual-view comparison over every block of the document, in block
/// id order. recovered_hidden_text keeps parser words missing from the
/// render view in their original order.
std::vector<BlockDelta> scan_structure(const PdfDocument& doc, const RenderBackend& renderer,
                                       double theta_struct,
                                       DistanceMetric metric = DistanceMetric::WordContainment);

}  // namespace revguard
