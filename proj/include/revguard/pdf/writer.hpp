#pragma once

#include <string>
#include <vector>

#include "revguard/geometry.hpp"
#include "revguard/pdf/reader.hpp"

namespace revguard::pdf {

/// Builds simple text PDFs (classic xref, uncompressed streams) with fully
/// deterministic bytes. Fonts available: F1 = Helvetica, F2 = Courier,
/// F3 = Helvetica-Bold, all WinAnsi-encoded.
class DocumentBuilder {
 public:
  explicit DocumentBuilder(double page_width = 612.0, double page_height = 792.0);

  /// Starts a new page; the builder begins with page 0 already open.
  void new_page();

  /// Emits one text-showing run at baseline (x, y).
  void add_text(double x, double y, double size, const std::string& font_res,
                const std::string& utf8_text, Rgb fill = {0, 0, 0}, int render_mode = 0);

  /// Emits an axis-aligned filled rectangle.
  void add_rect(double x, double y, double w, double h, Rgb fill);

  double page_width() const { return page_w_; }
  double page_height() const { return page_h_; }
  int page_count() const { return static_cast<int>(pages_.size()); }

  std::string build() const;

 private:
  double page_w_;
  double page_h_;
  std::vector<std::string> pages_;  // content stream text per page
};

/// One hidden (or visible) span to splice into an existing document via an
/// incremental update. Text is written in Courier under a private resource
/// name so advance widths stay exact on reload.
struct SpanUpdate {
  int page_index = 0;
  double x = 0.0;
  double y = 0.0;  // baseline
  double font_size = 9.0;
  std::string text;  // UTF-8
  Rgb fill{0, 0, 0};
  int render_mode = 0;
  bool overlay_rect = false;  // paint an opaque white rect over the span afterwards
};

/// Appends an incremental update that adds `update` to the file: a new
/// content stream, a private font resource, and a rewritten page object,
/// followed by a classic xref section or an xref stream matching the
/// original file's style. The original bytes are preserved as a prefix.
std::string append_span_update(const PdfFile& file, const SpanUpdate& update);

/// Advance width of `text` in points when set in Courier at `size`.
double courier_text_width(const std::string& utf8_text, double size);

}  // namespace revguard::pdf
