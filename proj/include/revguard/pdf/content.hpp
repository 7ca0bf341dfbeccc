#pragma once

#include <string>
#include <vector>

#include "revguard/pdf/object.hpp"
#include "revguard/pdf/reader.hpp"
#include "revguard/pdf_model.hpp"

namespace revguard::pdf {

/// Runs the text/graphics subset of the content-stream language for one page
/// and collects text spans and rectangle fills in paint order.
struct PageContent {
  std::vector<TextSpan> spans;
  std::vector<FillRect> rects;
};

PageContent interpret_page(const PdfFile& file, const PdfObject& page_dict, int page_index);

}  // namespace revguard::pdf
