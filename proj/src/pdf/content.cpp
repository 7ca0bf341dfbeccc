#include "revguard/pdf/content.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "revguard/errors.hpp"
#include "revguard/pdf/fonts.hpp"
#include "revguard/text_util.hpp"

namespace revguard::pdf {

namespace {

// Row-vector 2D affine: (x', y') = (a x + c y + e, b x + d y + f).
struct Matrix {
  double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;

  static Matrix identity() { return {}; }

  Matrix mul(const Matrix& m) const {  // this * m
    return Matrix{a * m.a + b * m.c,         a * m.b + b * m.d,
                  c * m.a + d * m.c,         c * m.b + d * m.d,
                  e * m.a + f * m.c + m.e,   e * m.b + f * m.d + m.f};
  }

  void apply(double x, double y, double& ox, double& oy) const {
    ox = a * x + c * y + e;
    oy = b * x + d * y + f;
  }

  double x_scale() const { return std::hypot(a, b); }
  double y_scale() const { return std::hypot(c, d); }
};

struct FontState {
  FontMetrics metrics;
  double size = 0.0;
};

struct GraphicsState {
  Matrix ctm;
  Rgb fill{0, 0, 0};
  FontState font;
  double char_spacing = 0.0;
  double word_spacing = 0.0;
  double horiz_scale = 1.0;
  double leading = 0.0;
  double rise = 0.0;
  int render_mode = 0;
};

struct PendingRect {
  Rect r;  // in current user space (already CTM-transformed corners' bbox)
};

class Interpreter {
 public:
  Interpreter(const PdfFile& file, int page_index, PageContent& out)
      : file_(file), page_index_(page_index), out_(out) {}

  void run(const std::string& content, const PdfObject& resources, const Matrix& base_ctm,
           int depth) {
    if (depth > 8) return;  // guard against form recursion cycles
    GraphicsState gs;
    gs.ctm = base_ctm;
    std::vector<GraphicsState> gs_stack;
    Matrix tm, tlm;
    bool in_text = false;
    std::vector<PendingRect> path_rects;
    std::vector<PdfObject> operands;

    Lexer lx(content, 0);
    while (true) {
      auto tok = lx.next();
      if (tok.type == Lexer::Token::Type::End) break;
      switch (tok.type) {
        case Lexer::Token::Type::Number:
          operands.push_back(tok.is_integer ? PdfObject::make_int(static_cast<std::int64_t>(tok.number))
                                            : PdfObject::make_real(tok.number));
          continue;
        case Lexer::Token::Type::String:
          operands.push_back(PdfObject::make_string(tok.text));
          continue;
        case Lexer::Token::Type::Name:
          operands.push_back(PdfObject::make_name(tok.text));
          continue;
        case Lexer::Token::Type::ArrayOpen:
          operands.push_back(lx.parse_value(tok));
          continue;
        case Lexer::Token::Type::DictOpen:
          operands.push_back(lx.parse_value(tok));
          continue;
        default:
          break;
      }

      const std::string& op = tok.text;
      auto num = [&](std::size_t i) -> double {
        return i < operands.size() ? operands[i].as_number() : 0.0;
      };

      if (op == "q") {
        gs_stack.push_back(gs);
      } else if (op == "Q") {
        if (!gs_stack.empty()) {
          gs = gs_stack.back();
          gs_stack.pop_back();
        }
      } else if (op == "cm" && operands.size() >= 6) {
        Matrix m{num(0), num(1), num(2), num(3), num(4), num(5)};
        gs.ctm = m.mul(gs.ctm);
      } else if (op == "BT") {
        tm = Matrix::identity();
        tlm = tm;
        in_text = true;
      } else if (op == "ET") {
        in_text = false;
      } else if (op == "Tf" && operands.size() >= 2) {
        gs.font.size = num(1);
        gs.font.metrics = lookup_font(resources, operands[0].text);
      } else if (op == "Td" && operands.size() >= 2) {
        Matrix t{1, 0, 0, 1, num(0), num(1)};
        tlm = t.mul(tlm);
        tm = tlm;
      } else if (op == "TD" && operands.size() >= 2) {
        gs.leading = -num(1);
        Matrix t{1, 0, 0, 1, num(0), num(1)};
        tlm = t.mul(tlm);
        tm = tlm;
      } else if (op == "Tm" && operands.size() >= 6) {
        tlm = Matrix{num(0), num(1), num(2), num(3), num(4), num(5)};
        tm = tlm;
      } else if (op == "T*") {
        Matrix t{1, 0, 0, 1, 0, -gs.leading};
        tlm = t.mul(tlm);
        tm = tlm;
      } else if (op == "TL" && !operands.empty()) {
        gs.leading = num(0);
      } else if (op == "Tc" && !operands.empty()) {
        gs.char_spacing = num(0);
      } else if (op == "Tw" && !operands.empty()) {
        gs.word_spacing = num(0);
      } else if (op == "Tz" && !operands.empty()) {
        gs.horiz_scale = num(0) / 100.0;
      } else if (op == "Ts" && !operands.empty()) {
        gs.rise = num(0);
      } else if (op == "Tr" && !operands.empty()) {
        gs.render_mode = static_cast<int>(num(0));
      } else if (op == "Tj" && !operands.empty()) {
        show_text(operands[0].text, gs, tm);
      } else if (op == "'" && !operands.empty()) {
        Matrix t{1, 0, 0, 1, 0, -gs.leading};
        tlm = t.mul(tlm);
        tm = tlm;
        show_text(operands[0].text, gs, tm);
      } else if (op == "\"" && operands.size() >= 3) {
        gs.word_spacing = num(0);
        gs.char_spacing = num(1);
        Matrix t{1, 0, 0, 1, 0, -gs.leading};
        tlm = t.mul(tlm);
        tm = tlm;
        show_text(operands[2].text, gs, tm);
      } else if (op == "TJ" && !operands.empty() &&
                 operands[0].kind == PdfObject::Kind::Array) {
        show_text_array(operands[0].array, gs, tm);
      } else if (op == "rg" && operands.size() >= 3) {
        gs.fill = Rgb{num(0), num(1), num(2)};
      } else if (op == "g" && !operands.empty()) {
        gs.fill = Rgb{num(0), num(0), num(0)};
      } else if (op == "k" && operands.size() >= 4) {
        double c = num(0), m = num(1), y = num(2), k = num(3);
        gs.fill = Rgb{(1 - std::min(1.0, c + k)), (1 - std::min(1.0, m + k)),
                      (1 - std::min(1.0, y + k))};
      } else if ((op == "sc" || op == "scn") && !operands.empty()) {
        std::size_t n = operands.size();
        if (operands[n - 1].kind == PdfObject::Kind::Name) --n;  // pattern name
        if (n == 1) {
          gs.fill = Rgb{num(0), num(0), num(0)};
        } else if (n == 3) {
          gs.fill = Rgb{num(0), num(1), num(2)};
        } else if (n == 4) {
          double c = num(0), m = num(1), y = num(2), k = num(3);
          gs.fill = Rgb{(1 - std::min(1.0, c + k)), (1 - std::min(1.0, m + k)),
                        (1 - std::min(1.0, y + k))};
        }
      } else if (op == "re" && operands.size() >= 4) {
        double x = num(0), y = num(1), w = num(2), h = num(3);
        double x0, y0, x1, y1, x2, y2, x3, y3;
        gs.ctm.apply(x, y, x0, y0);
        gs.ctm.apply(x + w, y, x1, y1);
        gs.ctm.apply(x + w, y + h, x2, y2);
        gs.ctm.apply(x, y + h, x3, y3);
        Rect r = Rect::from_corners(std::min({x0, x1, x2, x3}), std::min({y0, y1, y2, y3}),
                                    std::max({x0, x1, x2, x3}), std::max({y0, y1, y2, y3}));
        path_rects.push_back({r});
      } else if (op == "f" || op == "F" || op == "f*" || op == "b" || op == "B" ||
                 op == "b*" || op == "B*") {
        for (const auto& pr : path_rects) {
          out_.rects.push_back(FillRect{pr.r, gs.fill, paint_counter_++});
        }
        path_rects.clear();
      } else if (op == "n" || op == "S" || op == "s") {
        path_rects.clear();
      } else if (op == "Do" && !operands.empty()) {
        run_xobject(operands[0].text, resources, gs, depth);
      } else if (op == "BI") {
        // Inline image: skip to EI.
        skip_inline_image(lx);
      }
      operands.clear();
      (void)in_text;
    }
  }

 private:
  void show_text(const std::string& raw, GraphicsState& gs, Matrix& tm) {
    emit_run(raw, gs, tm);
  }

  void show_text_array(const std::vector<PdfObject>& elems, GraphicsState& gs, Matrix& tm) {
    // One span per TJ array; numeric adjustments only move the pen. A gap of
    // more than ~0.18 em is treated as an implicit word space.
    std::string combined;
    double start_valid = false;
    Matrix start_tm = tm;
    for (const auto& e : elems) {
      if (e.kind == PdfObject::Kind::String) {
        if (!start_valid) {
          start_tm = tm;
          start_valid = true;
        }
        combined += e.text;
        advance_pen(e.text, gs, tm);
      } else if (e.is_number()) {
        double adj = e.as_number();
        double tx = -adj / 1000.0 * gs.font.size * gs.horiz_scale;
        Matrix t{1, 0, 0, 1, tx, 0};
        tm = t.mul(tm);
        if (adj <= -180.0 && !combined.empty() && combined.back() != ' ') combined.push_back(' ');
      }
    }
    if (start_valid && !combined.empty()) emit_span(combined, gs, start_tm, tm);
  }

  void emit_run(const std::string& raw, GraphicsState& gs, Matrix& tm) {
    Matrix start = tm;
    advance_pen(raw, gs, tm);
    if (!raw.empty()) emit_span(raw, gs, start, tm);
  }

  // Moves the text matrix past `raw`.
  void advance_pen(const std::string& raw, const GraphicsState& gs, Matrix& tm) {
    double tx = 0.0;
    for (unsigned char c : raw) {
      double w = gs.font.metrics.width(c) / 1000.0 * gs.font.size;
      w += gs.char_spacing;
      if (c == ' ') w += gs.word_spacing;
      tx += w * gs.horiz_scale;
    }
    Matrix t{1, 0, 0, 1, tx, 0};
    tm = t.mul(tm);
  }

  void emit_span(const std::string& raw, const GraphicsState& gs, const Matrix& start_tm,
                 const Matrix& end_tm) {
    Matrix trm_start = start_tm.mul(gs.ctm);
    Matrix trm_end = end_tm.mul(gs.ctm);

    // Text-space glyph extent: descent 0.2 em below, ascent 0.8 em above.
    double asc = 0.8 * gs.font.size;
    double desc = 0.2 * gs.font.size;
    double c0x, c0y, c1x, c1y, c2x, c2y, c3x, c3y;
    trm_start.apply(0, gs.rise - desc, c0x, c0y);
    trm_start.apply(0, gs.rise + asc, c1x, c1y);
    trm_end.apply(0, gs.rise - desc, c2x, c2y);
    trm_end.apply(0, gs.rise + asc, c3x, c3y);

    TextSpan span;
    span.text = normalize_nfc(decode_winansi(raw));
    span.bbox = Rect::from_corners(std::min({c0x, c1x, c2x, c3x}), std::min({c0y, c1y, c2y, c3y}),
                                   std::max({c0x, c1x, c2x, c3x}), std::max({c0y, c1y, c2y, c3y}));
    if (!span.bbox.finite()) return;  // degenerate matrix; nothing a viewer could place
    // y scale of the full text rendering matrix covers both Tm and CTM.
    span.font_size = std::fabs(gs.font.size) * trm_start.y_scale();
    span.fill_color = gs.fill;
    span.render_mode = std::clamp(gs.render_mode, 0, 7);
    span.page_index = page_index_;
    span.paint_index = paint_counter_++;
    out_.spans.push_back(std::move(span));
  }

  FontMetrics lookup_font(const PdfObject& resources, const std::string& name) {
    const PdfObject& res = file_.resolve(resources);
    const PdfObject& fonts = file_.resolve(res.get("Font"));
    const PdfObject& fd = file_.resolve(fonts.get(name));
    if (fd.kind != PdfObject::Kind::Dict && fd.kind != PdfObject::Kind::Stream) {
      return builtin_metrics("");
    }
    std::string base = file_.resolve(fd.get("BaseFont")).text;
    FontMetrics m = builtin_metrics(base);
    const PdfObject& widths = file_.resolve(fd.get("Widths"));
    if (widths.kind == PdfObject::Kind::Array) {
      int first = static_cast<int>(file_.resolve(fd.get("FirstChar")).as_int());
      for (std::size_t i = 0; i < widths.array.size(); ++i) {
        int code = first + static_cast<int>(i);
        if (code >= 0 && code < 256) {
          int w = static_cast<int>(file_.resolve(widths.array[i]).as_number());
          if (w > 0) m.widths[static_cast<std::size_t>(code)] = w;
        }
      }
    }
    const PdfObject& desc = file_.resolve(fd.get("FontDescriptor"));
    if (desc.kind == PdfObject::Kind::Dict) {
      const PdfObject& mw = file_.resolve(desc.get("MissingWidth"));
      if (mw.is_number() && mw.as_number() > 0) m.default_width = static_cast<int>(mw.as_number());
    }
    return m;
  }

  void run_xobject(const std::string& name, const PdfObject& resources, GraphicsState& gs,
                   int depth) {
    const PdfObject& res = file_.resolve(resources);
    const PdfObject& xobjects = file_.resolve(res.get("XObject"));
    const PdfObject& xo = file_.resolve(xobjects.get(name));
    if (xo.kind != PdfObject::Kind::Stream) return;
    if (!file_.resolve(xo.get("Subtype")).is_name("Form")) return;  // images ignored
    Matrix form_matrix;
    const PdfObject& mtx = file_.resolve(xo.get("Matrix"));
    if (mtx.kind == PdfObject::Kind::Array && mtx.array.size() >= 6) {
      form_matrix = Matrix{mtx.array[0].as_number(), mtx.array[1].as_number(),
                           mtx.array[2].as_number(), mtx.array[3].as_number(),
                           mtx.array[4].as_number(), mtx.array[5].as_number()};
    }
    const PdfObject& form_res = xo.get("Resources").is_null() ? resources : xo.get("Resources");
    std::string content = file_.decoded_stream(xo);
    run(content, form_res, form_matrix.mul(gs.ctm), depth + 1);
  }

  static void skip_inline_image(Lexer& lx) {
    // Consume tokens up to ID, then raw data until "EI" delimited by
    // whitespace on both sides.
    const std::string& data = lx.data();
    while (true) {
      auto t = lx.next();
      if (t.type == Lexer::Token::Type::End) return;
      if (t.type == Lexer::Token::Type::Keyword && t.text == "ID") break;
    }
    std::size_t p = lx.pos();
    if (p < data.size() && is_pdf_whitespace(static_cast<unsigned char>(data[p]))) ++p;
    while (p + 1 < data.size()) {
      if (data[p] == 'E' && data[p + 1] == 'I' &&
          (p == 0 || is_pdf_whitespace(static_cast<unsigned char>(data[p - 1]))) &&
          (p + 2 >= data.size() || is_pdf_whitespace(static_cast<unsigned char>(data[p + 2])))) {
        lx.seek(p + 2);
        return;
      }
      ++p;
    }
    lx.seek(data.size());
  }

  const PdfFile& file_;
  int page_index_;
  PageContent& out_;
  int paint_counter_ = 0;
};

}  // namespace

PageContent interpret_page(const PdfFile& file, const PdfObject& page_dict, int page_index) {
  PageContent out;

  // Gather the page's content stream(s).
  std::string content;
  const PdfObject& contents = file.resolve(page_dict.get("Contents"));
  if (contents.kind == PdfObject::Kind::Stream) {
    content = file.decoded_stream(contents);
  } else if (contents.kind == PdfObject::Kind::Array) {
    for (const auto& part : contents.array) {
      const PdfObject& st = file.resolve(part);
      if (st.kind == PdfObject::Kind::Stream) {
        content += file.decoded_stream(st);
        content += "\n";
      }
    }
  }

  Interpreter interp(file, page_index, out);
  interp.run(content, page_dict.get("Resources"), {}, 0);
  return out;
}

}  // namespace revguard::pdf
