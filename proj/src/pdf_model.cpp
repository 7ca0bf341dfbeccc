#include "revguard/pdf_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "revguard/errors.hpp"
#include "revguard/pdf/content.hpp"
#include "revguard/pdf/reader.hpp"
#include "revguard/text_util.hpp"

namespace revguard {

const char* to_string(VisReason r) {
  switch (r) {
    case VisReason::WhiteOnWhite: return "WhiteOnWhite";
    case VisReason::TinyFont: return "TinyFont";
    case VisReason::OffPage: return "OffPage";
    case VisReason::InvisibleRenderMode: return "InvisibleRenderMode";
    case VisReason::Overlapped: return "Overlapped";
  }
  return "?";
}

PdfDocument load_document(const std::string& bytes) {
  auto file = pdf::PdfFile::parse(bytes);

  PdfDocument doc;
  doc.source_bytes = bytes;
  doc.file = file;

  int index = 0;
  for (const auto& rec : file->pages()) {
    Page page;
    page.index = index;

    const pdf::PdfObject& mb = file->resolve(rec.dict.get("MediaBox"));
    if (mb.kind == pdf::PdfObject::Kind::Array && mb.array.size() >= 4) {
      page.media_box = Rect::from_corners(
          file->resolve(mb.array[0]).as_number(), file->resolve(mb.array[1]).as_number(),
          file->resolve(mb.array[2]).as_number(), file->resolve(mb.array[3]).as_number());
    } else {
      page.media_box = Rect{0, 0, 612, 792};  // US Letter default
    }
    if (page.media_box.width() <= 0 || page.media_box.height() <= 0) {
      throw MalformedPdf("page media box is degenerate");
    }

    pdf::PageContent content = pdf::interpret_page(*file, rec.dict, index);
    page.spans = std::move(content.spans);
    page.rects = std::move(content.rects);
    doc.pages.push_back(std::move(page));
    ++index;
  }
  doc.page_count = static_cast<int>(doc.pages.size());
  return doc;
}

PdfDocument load_document_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_document(ss.str());
}

// ---------------------------------------------------------------------------
// Block segmentation
// ---------------------------------------------------------------------------

namespace {

struct Line {
  double baseline_y = 0.0;  // representative y (bottom of bbox + descent offset)
  Rect bbox;
  std::vector<TextSpan> spans;
};

double span_baseline(const TextSpan& s) {
  // bbox spans [baseline - 0.2 size, baseline + 0.8 size]
  return s.bbox.y0 + 0.2 * s.font_size;
}

std::vector<Line> group_lines(std::vector<TextSpan> spans) {
  std::sort(spans.begin(), spans.end(), [](const TextSpan& a, const TextSpan& b) {
    double ya = span_baseline(a), yb = span_baseline(b);
    if (ya != yb) return ya > yb;  // top first
    if (a.bbox.x0 != b.bbox.x0) return a.bbox.x0 < b.bbox.x0;
    return a.paint_index < b.paint_index;
  });

  std::vector<Line> lines;
  for (auto& s : spans) {
    double y = span_baseline(s);
    bool joined = false;
    if (!lines.empty()) {
      Line& last = lines.back();
      double tol = 0.4 * std::max({s.font_size, last.spans.back().font_size, 1.0});
      if (std::fabs(last.baseline_y - y) <= tol) {
        last.bbox = last.bbox.united(s.bbox);
        last.spans.push_back(std::move(s));
        joined = true;
      }
    }
    if (!joined) {
      Line l;
      l.baseline_y = y;
      l.bbox = s.bbox;
      l.spans.push_back(std::move(s));
      lines.push_back(std::move(l));
    }
  }
  // Within each line, order by x.
  for (auto& l : lines) {
    std::sort(l.spans.begin(), l.spans.end(), [](const TextSpan& a, const TextSpan& b) {
      if (a.bbox.x0 != b.bbox.x0) return a.bbox.x0 < b.bbox.x0;
      return a.paint_index < b.paint_index;
    });
  }
  return lines;
}

double median_line_height(const std::vector<Line>& lines) {
  std::vector<double> heights;
  heights.reserve(lines.size());
  for (const auto& l : lines) heights.push_back(std::max(l.bbox.height(), 1.0));
  std::sort(heights.begin(), heights.end());
  if (heights.empty()) return 1.0;
  std::size_t n = heights.size();
  return n % 2 == 1 ? heights[n / 2] : 0.5 * (heights[n / 2 - 1] + heights[n / 2]);
}

}  // namespace

std::vector<Block> segment_blocks(const PdfDocument& doc) {
  std::vector<Block> blocks;
  for (const auto& page : doc.pages) {
    if (page.spans.empty()) continue;
    std::vector<Line> lines = group_lines(page.spans);
    double median_h = median_line_height(lines);
    double gap_limit = 1.5 * median_h;

    Block cur;
    cur.page_index = page.index;
    bool have_cur = false;
    double prev_bottom = 0.0;
    for (auto& line : lines) {
      bool new_block = false;
      if (have_cur) {
        double gap = prev_bottom - line.bbox.y1;  // whitespace between lines
        if (gap > gap_limit) new_block = true;
      }
      if (new_block) {
        blocks.push_back(std::move(cur));
        cur = Block{};
        cur.page_index = page.index;
        have_cur = false;
      }
      prev_bottom = line.bbox.y0;
      if (!have_cur) {
        cur.bbox = line.bbox;
        have_cur = true;
      } else {
        cur.bbox = cur.bbox.united(line.bbox);
      }
      for (auto& s : line.spans) cur.spans.push_back(std::move(s));
    }
    if (have_cur) blocks.push_back(std::move(cur));
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].id = static_cast<int>(i);
  return blocks;
}

// ---------------------------------------------------------------------------
// Views
// ---------------------------------------------------------------------------

namespace {

std::string join_spans_in_reading_order(const std::vector<TextSpan>& spans_in) {
  std::vector<const TextSpan*> spans;
  spans.reserve(spans_in.size());
  for (const auto& s : spans_in) spans.push_back(&s);
  std::sort(spans.begin(), spans.end(), [](const TextSpan* a, const TextSpan* b) {
    double ya = span_baseline(*a), yb = span_baseline(*b);
    if (ya != yb) return ya > yb;
    if (a->bbox.x0 != b->bbox.x0) return a->bbox.x0 < b->bbox.x0;
    return a->paint_index < b->paint_index;
  });
  std::string joined;
  for (const auto* s : spans) {
    if (!joined.empty()) joined.push_back(' ');
    joined += s->text;
  }
  return normalize_nfc(collapse_whitespace(joined));
}

}  // namespace

std::string extract_parser_view(const Block& block) {
  return join_spans_in_reading_order(block.spans);
}

std::string SyntheticRenderBackend::render_text(const PdfDocument& doc, const Block& block) const {
  const Page& page = doc.page(block.page_index);
  std::vector<TextSpan> visible;
  for (const auto& s : block.spans) {
    if (classify_visibility(s, page, cfg_).visible) visible.push_back(s);
  }
  return join_spans_in_reading_order(visible);
}

std::string extract_render_view(const PdfDocument& doc, const Block& block,
                                const RenderBackend& backend) {
  return normalize_nfc(collapse_whitespace(backend.render_text(doc, block)));
}

ViewPair extract_view_pair(const PdfDocument& doc, const Block& block,
                           const RenderBackend& backend) {
  ViewPair pair;
  pair.block_id = block.id;
  pair.parser_text = extract_parser_view(block);
  pair.render_text = extract_render_view(doc, block, backend);
  return pair;
}

// ---------------------------------------------------------------------------
// Visibility
// ---------------------------------------------------------------------------

VisibilityVerdict classify_visibility(const TextSpan& span, const Page& page,
                                      const VisibilityConfig& cfg) {
  VisibilityVerdict v;
  v.page_index = page.index;
  for (std::size_t i = 0; i < page.spans.size(); ++i) {
    if (page.spans[i].paint_index == span.paint_index) {
      v.span_ordinal = static_cast<int>(i);
      break;
    }
  }

  // Background is white unless an earlier opaque rectangle covers the span.
  Rgb background{1, 1, 1};
  for (const auto& r : page.rects) {
    if (r.paint_index < span.paint_index &&
        span.bbox.covered_fraction_by(r.rect) >= cfg.overlap_fraction) {
      background = r.color;
    }
  }
  if (color_distance(span.fill_color, background) < cfg.white_distance) {
    v.reasons.insert(VisReason::WhiteOnWhite);
  }

  if (span.font_size < cfg.tiny_font_pt) {
    v.reasons.insert(VisReason::TinyFont);
  }

  double bbox_area = span.bbox.area();
  if (bbox_area > 0.0) {
    double onpage = span.bbox.intersected(page.media_box).area();
    if (onpage < cfg.min_onpage_fraction * bbox_area) {
      v.reasons.insert(VisReason::OffPage);
    }
  }

  if (span.render_mode == 3) {
    v.reasons.insert(VisReason::InvisibleRenderMode);
  }

  for (const auto& r : page.rects) {
    if (r.paint_index > span.paint_index &&
        span.bbox.covered_fraction_by(r.rect) >= cfg.overlap_fraction) {
      v.reasons.insert(VisReason::Overlapped);
      break;
    }
  }

  v.visible = v.reasons.empty();
  return v;
}

std::string document_parser_text(const PdfDocument& doc) {
  std::string out;
  for (const auto& block : segment_blocks(doc)) {
    std::string t = extract_parser_view(block);
    if (t.empty()) continue;
    if (!out.empty()) out += "\n\n";
    out += t;
  }
  return out;
}

std::string document_render_text(const PdfDocument& doc, const RenderBackend& backend) {
  std::string out;
  for (const auto& block : segment_blocks(doc)) {
    std::string t = extract_render_view(doc, block, backend);
    if (t.empty()) continue;
    if (!out.empty()) out += "\n\n";
    out += t;
  }
  return out;
}

}  // namespace revguard
