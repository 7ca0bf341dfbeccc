#include "revguard/pdf/writer.hpp"

#include <algorithm>
#include <cstdio>

#include "revguard/errors.hpp"
#include "revguard/pdf/fonts.hpp"

namespace revguard::pdf {

namespace {

std::string pdf_string_literal(const std::string& utf8) {
  return PdfObject::make_string(encode_winansi(utf8)).serialize();
}

std::string rgb_fill_op(const Rgb& c) {
  return format_pdf_number(c.r) + " " + format_pdf_number(c.g) + " " + format_pdf_number(c.b) +
         " rg";
}

struct XrefRow {
  int num;
  int gen;
  std::size_t offset;
};

std::string classic_xref_sections(std::vector<XrefRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const XrefRow& a, const XrefRow& b) { return a.num < b.num; });
  std::string out = "xref\n";
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    while (j + 1 < rows.size() && rows[j + 1].num == rows[j].num + 1) ++j;
    out += std::to_string(rows[i].num) + " " + std::to_string(j - i + 1) + "\n";
    for (std::size_t k = i; k <= j; ++k) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%010zu %05d n \n", rows[k].offset, rows[k].gen);
      out += buf;
    }
    i = j + 1;
  }
  return out;
}

}  // namespace

double courier_text_width(const std::string& utf8_text, double size) {
  std::string bytes = encode_winansi(utf8_text);
  return 0.6 * size * static_cast<double>(bytes.size());
}

// ---------------------------------------------------------------------------
// DocumentBuilder
// ---------------------------------------------------------------------------

DocumentBuilder::DocumentBuilder(double page_width, double page_height)
    : page_w_(page_width), page_h_(page_height) {
  pages_.emplace_back();
}

void DocumentBuilder::new_page() { pages_.emplace_back(); }

void DocumentBuilder::add_text(double x, double y, double size, const std::string& font_res,
                               const std::string& utf8_text, Rgb fill, int render_mode) {
  std::string& c = pages_.back();
  c += "BT\n/" + font_res + " " + format_pdf_number(size) + " Tf\n";
  c += rgb_fill_op(fill) + "\n";
  if (render_mode != 0) c += std::to_string(render_mode) + " Tr\n";
  c += "1 0 0 1 " + format_pdf_number(x) + " " + format_pdf_number(y) + " Tm\n";
  c += pdf_string_literal(utf8_text) + " Tj\n";
  if (render_mode != 0) c += "0 Tr\n";
  c += "ET\n";
}

void DocumentBuilder::add_rect(double x, double y, double w, double h, Rgb fill) {
  std::string& c = pages_.back();
  c += rgb_fill_op(fill) + "\n";
  c += format_pdf_number(x) + " " + format_pdf_number(y) + " " + format_pdf_number(w) + " " +
       format_pdf_number(h) + " re f\n";
}

std::string DocumentBuilder::build() const {
  // Object plan: 1 catalog, 2 pages, 3/4/5 fonts, then per page i:
  // 6+2i page dict, 7+2i content stream.
  const int n = static_cast<int>(pages_.size());
  std::string out = "%PDF-1.4\n%\xB5\xB5\xB5\xB5\n";
  std::vector<XrefRow> rows;

  auto emit = [&](int num, const std::string& body) {
    rows.push_back({num, 0, out.size()});
    out += std::to_string(num) + " 0 obj\n" + body + "\nendobj\n";
  };

  emit(1, "<< /Type /Catalog /Pages 2 0 R >>");
  {
    std::string kids = "[";
    for (int i = 0; i < n; ++i) {
      if (i) kids += " ";
      kids += std::to_string(6 + 2 * i) + " 0 R";
    }
    kids += "]";
    emit(2, "<< /Type /Pages /Kids " + kids + " /Count " + std::to_string(n) + " >>");
  }
  emit(3,
       "<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica /Encoding /WinAnsiEncoding >>");
  emit(4, "<< /Type /Font /Subtype /Type1 /BaseFont /Courier /Encoding /WinAnsiEncoding >>");
  emit(5,
       "<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica-Bold /Encoding /WinAnsiEncoding "
       ">>");

  std::string media = "[0 0 " + format_pdf_number(page_w_) + " " + format_pdf_number(page_h_) + "]";
  for (int i = 0; i < n; ++i) {
    int page_num = 6 + 2 * i;
    int content_num = 7 + 2 * i;
    emit(page_num, "<< /Type /Page /Parent 2 0 R /MediaBox " + media +
                       " /Resources << /Font << /F1 3 0 R /F2 4 0 R /F3 5 0 R >> >> /Contents " +
                       std::to_string(content_num) + " 0 R >>");
    const std::string& content = pages_[static_cast<std::size_t>(i)];
    emit(content_num, "<< /Length " + std::to_string(content.size()) + " >>\nstream\n" + content +
                          "endstream");
  }

  std::size_t xref_pos = out.size();
  std::string xref = "xref\n0 " + std::to_string(5 + 2 * n + 1) + "\n";
  xref += "0000000000 65535 f \n";
  for (const auto& row : rows) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%010zu %05d n \n", row.offset, row.gen);
    xref += buf;
  }
  out += xref;
  out += "trailer\n<< /Size " + std::to_string(5 + 2 * n + 1) + " /Root 1 0 R >>\n";
  out += "startxref\n" + std::to_string(xref_pos) + "\n%%EOF\n";
  return out;
}

// ---------------------------------------------------------------------------
// Incremental update
// ---------------------------------------------------------------------------

namespace {

// Deep-copies a resources dict, inlining the top level and the /Font subdict
// so a new font entry can be added without touching shared objects.
PdfObject inline_resources(const PdfFile& file, const PdfObject& resources) {
  const PdfObject& res = file.resolve(resources);
  PdfObject out = PdfObject::make_dict();
  if (res.kind == PdfObject::Kind::Dict) out.dict = res.dict;
  const PdfObject& fonts = file.resolve(out.get("Font"));
  PdfObject font_dict = PdfObject::make_dict();
  if (fonts.kind == PdfObject::Kind::Dict) font_dict.dict = fonts.dict;
  out.set("Font", font_dict);
  return out;
}

std::string free_font_name(const PdfObject& font_dict) {
  for (int i = 0; i < 1000; ++i) {
    std::string name = "RVF" + std::to_string(i);
    if (font_dict.get(name).is_null()) return name;
  }
  throw WriteFailure("no free font resource name");
}

}  // namespace

std::string append_span_update(const PdfFile& file, const SpanUpdate& update) {
  const auto& pages = file.pages();
  if (update.page_index < 0 || update.page_index >= static_cast<int>(pages.size())) {
    throw AnchorNotFound("page " + std::to_string(update.page_index) + " of " +
                         std::to_string(pages.size()) + "-page document");
  }
  const auto& rec = pages[static_cast<std::size_t>(update.page_index)];
  if (rec.object_number <= 0) throw WriteFailure("page is not an indirect object");

  int page_gen = 0;
  auto xe = file.xref().find(rec.object_number);
  if (xe != file.xref().end()) page_gen = xe->second.gen;

  // Rebuild the page dict: explicit resources with our font, contents array
  // with the new stream appended.
  PdfObject page_dict = PdfObject::make_dict();
  page_dict.dict = rec.dict.dict;

  PdfObject resources = inline_resources(file, page_dict.get("Resources"));
  PdfObject* font_dict = resources.find("Font");
  std::string font_name = free_font_name(*font_dict);

  int font_num = file.max_object_number() + 1;
  int stream_num = file.max_object_number() + 2;
  int xref_stream_num = file.max_object_number() + 3;  // only used for xref-stream files

  font_dict->set(font_name, PdfObject::make_ref(font_num));
  page_dict.set("Resources", resources);

  PdfObject contents = PdfObject::make_array();
  const PdfObject& orig_contents = page_dict.get("Contents");
  if (orig_contents.kind == PdfObject::Kind::Ref) {
    contents.array.push_back(orig_contents);
  } else if (orig_contents.kind == PdfObject::Kind::Array) {
    contents.array = orig_contents.array;
  }
  contents.array.push_back(PdfObject::make_ref(stream_num));
  page_dict.set("Contents", contents);

  // Content stream for the injected span.
  std::string c = "q\nBT\n/" + font_name + " " + format_pdf_number(update.font_size) + " Tf\n";
  c += rgb_fill_op(update.fill) + "\n";
  if (update.render_mode != 0) c += std::to_string(update.render_mode) + " Tr\n";
  c += "1 0 0 1 " + format_pdf_number(update.x) + " " + format_pdf_number(update.y) + " Tm\n";
  c += pdf_string_literal(update.text) + " Tj\n";
  c += "ET\n";
  if (update.overlay_rect) {
    double w = courier_text_width(update.text, update.font_size);
    double x0 = update.x - 1.0;
    double y0 = update.y - 0.25 * update.font_size;
    double h = 1.15 * update.font_size;
    c += "1 1 1 rg\n";
    c += format_pdf_number(x0) + " " + format_pdf_number(y0) + " " + format_pdf_number(w + 2.0) +
         " " + format_pdf_number(h) + " re f\n";
  }
  c += "Q\n";

  std::string out = file.bytes();
  if (out.empty() || out.back() != '\n') out += "\n";

  std::vector<XrefRow> rows;
  auto emit = [&](int num, int gen, const std::string& body) {
    rows.push_back({num, gen, out.size()});
    out += std::to_string(num) + " " + std::to_string(gen) + " obj\n" + body + "\nendobj\n";
  };

  emit(font_num, 0,
       "<< /Type /Font /Subtype /Type1 /BaseFont /Courier /Encoding /WinAnsiEncoding >>");
  emit(stream_num, 0,
       "<< /Length " + std::to_string(c.size()) + " >>\nstream\n" + c + "endstream");
  emit(rec.object_number, page_gen, page_dict.serialize());

  if (!file.uses_xref_stream()) {
    std::size_t xref_pos = out.size();
    out += classic_xref_sections(rows);
    PdfObject trailer = PdfObject::make_dict();
    trailer.dict = file.trailer().dict;
    trailer.erase("XRefStm");
    trailer.erase("DocChecksum");
    trailer.set("Size", PdfObject::make_int(stream_num + 1));
    trailer.set("Prev", PdfObject::make_int(file.last_startxref()));
    out += "trailer\n" + trailer.serialize() + "\n";
    out += "startxref\n" + std::to_string(xref_pos) + "\n%%EOF\n";
  } else {
    // The original chain is made of xref streams; append one of those.
    std::size_t xref_pos = out.size();
    rows.push_back({xref_stream_num, 0, xref_pos});
    std::sort(rows.begin(), rows.end(),
              [](const XrefRow& a, const XrefRow& b) { return a.num < b.num; });

    std::string data;
    PdfObject index = PdfObject::make_array();
    std::size_t i = 0;
    while (i < rows.size()) {
      std::size_t j = i;
      while (j + 1 < rows.size() && rows[j + 1].num == rows[j].num + 1) ++j;
      index.array.push_back(PdfObject::make_int(rows[i].num));
      index.array.push_back(PdfObject::make_int(static_cast<std::int64_t>(j - i + 1)));
      for (std::size_t k = i; k <= j; ++k) {
        data.push_back(1);  // type 1: offset entry
        std::uint64_t off = rows[k].offset;
        for (int b = 7; b >= 0; --b) data.push_back(static_cast<char>((off >> (8 * b)) & 0xFF));
        data.push_back(static_cast<char>((rows[k].gen >> 8) & 0xFF));
        data.push_back(static_cast<char>(rows[k].gen & 0xFF));
      }
      i = j + 1;
    }

    PdfObject xs;
    xs.kind = PdfObject::Kind::Stream;
    xs.set("Type", PdfObject::make_name("XRef"));
    xs.set("Size", PdfObject::make_int(xref_stream_num + 1));
    PdfObject w = PdfObject::make_array();
    w.array.push_back(PdfObject::make_int(1));
    w.array.push_back(PdfObject::make_int(8));
    w.array.push_back(PdfObject::make_int(2));
    xs.set("W", w);
    xs.set("Index", index);
    const PdfObject& root = file.trailer().get("Root");
    if (!root.is_null()) xs.set("Root", root);
    const PdfObject& info = file.trailer().get("Info");
    if (!info.is_null()) xs.set("Info", info);
    xs.set("Prev", PdfObject::make_int(file.last_startxref()));
    xs.set("Length", PdfObject::make_int(static_cast<std::int64_t>(data.size())));
    xs.stream_data = data;

    out += std::to_string(xref_stream_num) + " 0 obj\n" + xs.serialize() + "\nendobj\n";
    out += "startxref\n" + std::to_string(xref_pos) + "\n%%EOF\n";
  }
  return out;
}

}  // namespace revguard::pdf
