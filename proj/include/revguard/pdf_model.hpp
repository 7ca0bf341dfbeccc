#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "revguard/geometry.hpp"

namespace revguard::pdf {
class PdfFile;
}

namespace revguard {

/// One text-showing run from a content stream, with everything the
/// visibility rules need resolved.
struct TextSpan {
  std::string text;  // NFC-normalized UTF-8
  Rect bbox;
  double font_size = 0.0;  // effective size in points, >= 0
  Rgb fill_color;
  int render_mode = 0;  // PDF text rendering mode, 0..7
  int page_index = 0;
  int paint_index = 0;  // paint order within the page, shared with rect fills
};

/// An opaque rectangle fill painted by the page content (re ... f).
struct FillRect {
  Rect rect;
  Rgb color;
  int paint_index = 0;
};

struct Page {
  int index = 0;
  Rect media_box;
  std::vector<TextSpan> spans;
  std::vector<FillRect> rects;
};

/// A loaded document. Immutable after load; cheap to copy (pages by value,
/// parse state shared).
struct PdfDocument {
  std::vector<Page> pages;
  std::string source_bytes;
  int page_count = 0;
  std::shared_ptr<const pdf::PdfFile> file;  // parse state, used by the editor

  const Page& page(int idx) const { return pages.at(static_cast<std::size_t>(idx)); }
};

/// A group of spans on one page, the unit the dual-view scan works on.
struct Block {
  int id = 0;
  int page_index = 0;
  Rect bbox;
  std::vector<TextSpan> spans;
};

/// The two independent reconstructions of a block's text.
struct ViewPair {
  int block_id = 0;
  std::string parser_text;
  std::string render_text;
};

enum class VisReason { WhiteOnWhite, TinyFont, OffPage, InvisibleRenderMode, Overlapped };

const char* to_string(VisReason r);

struct VisibilityVerdict {
  int page_index = 0;
  int span_ordinal = 0;
  bool visible = true;
  std::set<VisReason> reasons;  // non-empty iff !visible
};

/// Numeric cutoffs for the visibility rules. Defaults match the shipped
/// configuration; all overridable.
struct VisibilityConfig {
  double white_distance = 0.02;   // max-component color distance to background
  double tiny_font_pt = 2.0;      // sizes strictly below are unreadable
  double min_onpage_fraction = 0.10;
  double overlap_fraction = 0.90;
};

/// Produces a block's render-side text view.
class RenderBackend {
 public:
  virtual ~RenderBackend() = default;
  virtual std::string render_text(const PdfDocument& doc, const Block& block) const = 0;
};

/// Hermetic backend: reconstructs the render view from the visibility rules
/// without rasterizing, returning exactly the visible spans' text.
class SyntheticRenderBackend : public RenderBackend {
 public:
  explicit SyntheticRenderBackend(VisibilityConfig cfg = {}) : cfg_(cfg) {}
  std::string render_text(const PdfDocument& doc, const Block& block) const override;

 private:
  VisibilityConfig cfg_;
};

/// Real-world backend: rasterizes the block region at 300 DPI to a PNG and
/// pipes it through an external OCR command. The command receives the PNG
/// path (either replacing a "{png}" placeholder or appended) and must print
/// UTF-8 text on stdout; a nonzero exit raises OcrUnavailable.
class OcrRenderBackend : public RenderBackend {
 public:
  explicit OcrRenderBackend(std::string command, int dpi = 300)
      : command_(std::move(command)), dpi_(dpi) {}
  std::string render_text(const PdfDocument& doc, const Block& block) const override;

 private:
  std::string command_;
  int dpi_;
};

/// Parses PDF bytes into the span model. Throws MalformedPdf or EncryptedPdf.
PdfDocument load_document(const std::string& bytes);

/// Loads a document from disk. Throws IoFailure on read errors.
PdfDocument load_document_file(const std::string& path);

/// Splits every page's spans into blocks by vertical-gap clustering: a gap
/// wider than 1.5x the page's median line height starts a new block. Ids are
/// dense 0..n-1 in reading order across the document.
std::vector<Block> segment_blocks(const PdfDocument& doc);

/// Parser view: every span (visible or not) in reading order, whitespace
/// collapsed, NFC-normalized.
std::string extract_parser_view(const Block& block);

/// Render view through the given backend; NFC-normalized and collapsed.
std::string extract_render_view(const PdfDocument& doc, const Block& block,
                                const RenderBackend& backend);

/// Applies the visibility rules to one span.
VisibilityVerdict classify_visibility(const TextSpan& span, const Page& page,
                                      const VisibilityConfig& cfg = {});

/// Both views of one block.
ViewPair extract_view_pair(const PdfDocument& doc, const Block& block,
                           const RenderBackend& backend);

/// Convenience: full-document render view (blocks joined with newlines).
std::string document_render_text(const PdfDocument& doc, const RenderBackend& backend);

/// Convenience: full-document parser view (blocks joined with newlines).
std::string document_parser_text(const PdfDocument& doc);

}  // namespace revguard
