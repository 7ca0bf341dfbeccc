#include "revguard/raster.hpp"

#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "revguard/errors.hpp"

namespace revguard {

namespace {

// 8x8 bitmap face for ASCII 32..126; bit 0 of each row byte is the leftmost
// pixel (font8x8 layout). Coarse but legible at 300 DPI.
const std::uint8_t kFont8x8[95][8] = {
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // ' '
    {0x18, 0x3C, 0x3C, 0x18, 0x18, 0x00, 0x18, 0x00},  // !
    {0x36, 0x36, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // "
    {0x36, 0x36, 0x7F, 0x36, 0x7F, 0x36, 0x36, 0x00},  // #
    {0x0C, 0x3E, 0x03, 0x1E, 0x30, 0x1F, 0x0C, 0x00},  // $
    {0x00, 0x63, 0x33, 0x18, 0x0C, 0x66, 0x63, 0x00},  // %
    {0x1C, 0x36, 0x1C, 0x6E, 0x3B, 0x33, 0x6E, 0x00},  // &
    {0x06, 0x06, 0x03, 0x00, 0x00, 0x00, 0x00, 0x00},  // '
    {0x18, 0x0C, 0x06, 0x06, 0x06, 0x0C, 0x18, 0x00},  // (
    {0x06, 0x0C, 0x18, 0x18, 0x18, 0x0C, 0x06, 0x00},  // )
    {0x00, 0x66, 0x3C, 0xFF, 0x3C, 0x66, 0x00, 0x00},  // *
    {0x00, 0x0C, 0x0C, 0x3F, 0x0C, 0x0C, 0x00, 0x00},  // +
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C, 0x06},  // ,
    {0x00, 0x00, 0x00, 0x3F, 0x00, 0x00, 0x00, 0x00},  // -
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C, 0x00},  // .
    {0x60, 0x30, 0x18, 0x0C, 0x06, 0x03, 0x01, 0x00},  // /
    {0x3E, 0x63, 0x73, 0x7B, 0x6F, 0x67, 0x3E, 0x00},  // 0
    {0x0C, 0x0E, 0x0C, 0x0C, 0x0C, 0x0C, 0x3F, 0x00},  // 1
    {0x1E, 0x33, 0x30, 0x1C, 0x06, 0x33, 0x3F, 0x00},  // 2
    {0x1E, 0x33, 0x30, 0x1C, 0x30, 0x33, 0x1E, 0x00},  // 3
    {0x38, 0x3C, 0x36, 0x33, 0x7F, 0x30, 0x78, 0x00},  // 4
    {0x3F, 0x03, 0x1F, 0x30, 0x30, 0x33, 0x1E, 0x00},  // 5
    {0x1C, 0x06, 0x03, 0x1F, 0x33, 0x33, 0x1E, 0x00},  // 6
    {0x3F, 0x33, 0x30, 0x18, 0x0C, 0x0C, 0x0C, 0x00},  // 7
    {0x1E, 0x33, 0x33, 0x1E, 0x33, 0x33, 0x1E, 0x00},  // 8
    {0x1E, 0x33, 0x33, 0x3E, 0x30, 0x18, 0x0E, 0x00},  // 9
    {0x00, 0x0C, 0x0C, 0x00, 0x00, 0x0C, 0x0C, 0x00},  // :
    {0x00, 0x0C, 0x0C, 0x00, 0x00, 0x0C, 0x0C, 0x06},  // ;
    {0x18, 0x0C, 0x06, 0x03, 0x06, 0x0C, 0x18, 0x00},  // <
    {0x00, 0x00, 0x3F, 0x00, 0x00, 0x3F, 0x00, 0x00},  // =
    {0x06, 0x0C, 0x18, 0x30, 0x18, 0x0C, 0x06, 0x00},  // >
    {0x1E, 0x33, 0x30, 0x18, 0x0C, 0x00, 0x0C, 0x00},  // ?
    {0x3E, 0x63, 0x7B, 0x7B, 0x7B, 0x03, 0x1E, 0x00},  // @
    {0x0C, 0x1E, 0x33, 0x33, 0x3F, 0x33, 0x33, 0x00},  // A
    {0x3F, 0x66, 0x66, 0x3E, 0x66, 0x66, 0x3F, 0x00},  // B
    {0x3C, 0x66, 0x03, 0x03, 0x03, 0x66, 0x3C, 0x00},  // C
    {0x1F, 0x36, 0x66, 0x66, 0x66, 0x36, 0x1F, 0x00},  // D
    {0x7F, 0x46, 0x16, 0x1E, 0x16, 0x46, 0x7F, 0x00},  // E
    {0x7F, 0x46, 0x16, 0x1E, 0x16, 0x06, 0x0F, 0x00},  // F
    {0x3C, 0x66, 0x03, 0x03, 0x73, 0x66, 0x7C, 0x00},  // G
    {0x33, 0x33, 0x33, 0x3F, 0x33, 0x33, 0x33, 0x00},  // H
    {0x1E, 0x0C, 0x0C, 0x0C, 0x0C, 0x0C, 0x1E, 0x00},  // I
    {0x78, 0x30, 0x30, 0x30, 0x33, 0x33, 0x1E, 0x00},  // J
    {0x67, 0x66, 0x36, 0x1E, 0x36, 0x66, 0x67, 0x00},  // K
    {0x0F, 0x06, 0x06, 0x06, 0x46, 0x66, 0x7F, 0x00},  // L
    {0x63, 0x77, 0x7F, 0x7F, 0x6B, 0x63, 0x63, 0x00},  // M
    {0x63, 0x67, 0x6F, 0x7B, 0x73, 0x63, 0x63, 0x00},  // N
    {0x1C, 0x36, 0x63, 0x63, 0x63, 0x36, 0x1C, 0x00},  // O
    {0x3F, 0x66, 0x66, 0x3E, 0x06, 0x06, 0x0F, 0x00},  // P
    {0x1E, 0x33, 0x33, 0x33, 0x3B, 0x1E, 0x38, 0x00},  // Q
    {0x3F, 0x66, 0x66, 0x3E, 0x36, 0x66, 0x67, 0x00},  // R
    {0x1E, 0x33, 0x07, 0x0E, 0x38, 0x33, 0x1E, 0x00},  // S
    {0x3F, 0x2D, 0x0C, 0x0C, 0x0C, 0x0C, 0x1E, 0x00},  // T
    {0x33, 0x33, 0x33, 0x33, 0x33, 0x33, 0x3F, 0x00},  // U
    {0x33, 0x33, 0x33, 0x33, 0x33, 0x1E, 0x0C, 0x00},  // V
    {0x63, 0x63, 0x63, 0x6B, 0x7F, 0x77, 0x63, 0x00},  // W
    {0x63, 0x63, 0x36, 0x1C, 0x1C, 0x36, 0x63, 0x00},  // X
    {0x33, 0x33, 0x33, 0x1E, 0x0C, 0x0C, 0x1E, 0x00},  // Y
    {0x7F, 0x63, 0x31, 0x18, 0x4C, 0x66, 0x7F, 0x00},  // Z
    {0x1E, 0x06, 0x06, 0x06, 0x06, 0x06, 0x1E, 0x00},  // [
    {0x03, 0x06, 0x0C, 0x18, 0x30, 0x60, 0x40, 0x00},  // backslash
    {0x1E, 0x18, 0x18, 0x18, 0x18, 0x18, 0x1E, 0x00},  // ]
    {0x08, 0x1C, 0x36, 0x63, 0x00, 0x00, 0x00, 0x00},  // ^
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xFF},  // _
    {0x0C, 0x0C, 0x18, 0x00, 0x00, 0x00, 0x00, 0x00},  // `
    {0x00, 0x00, 0x1E, 0x30, 0x3E, 0x33, 0x6E, 0x00},  // a
    {0x07, 0x06, 0x06, 0x3E, 0x66, 0x66, 0x3B, 0x00},  // b
    {0x00, 0x00, 0x1E, 0x33, 0x03, 0x33, 0x1E, 0x00},  // c
    {0x38, 0x30, 0x30, 0x3E, 0x33, 0x33, 0x6E, 0x00},  // d
    {0x00, 0x00, 0x1E, 0x33, 0x3F, 0x03, 0x1E, 0x00},  // e
    {0x1C, 0x36, 0x06, 0x0F, 0x06, 0x06, 0x0F, 0x00},  // f
    {0x00, 0x00, 0x6E, 0x33, 0x33, 0x3E, 0x30, 0x1F},  // g
    {0x07, 0x06, 0x36, 0x6E, 0x66, 0x66, 0x67, 0x00},  // h
    {0x0C, 0x00, 0x0E, 0x0C, 0x0C, 0x0C, 0x1E, 0x00},  // i
    {0x30, 0x00, 0x30, 0x30, 0x30, 0x33, 0x33, 0x1E},  // j
    {0x07, 0x06, 0x66, 0x36, 0x1E, 0x36, 0x67, 0x00},  // k
    {0x0E, 0x0C, 0x0C, 0x0C, 0x0C, 0x0C, 0x1E, 0x00},  // l
    {0x00, 0x00, 0x33, 0x7F, 0x7F, 0x6B, 0x63, 0x00},  // m
    {0x00, 0x00, 0x1F, 0x33, 0x33, 0x33, 0x33, 0x00},  // n
    {0x00, 0x00, 0x1E, 0x33, 0x33, 0x33, 0x1E, 0x00},  // o
    {0x00, 0x00, 0x3B, 0x66, 0x66, 0x3E, 0x06, 0x0F},  // p
    {0x00, 0x00, 0x6E, 0x33, 0x33, 0x3E, 0x30, 0x78},  // q
    {0x00, 0x00, 0x3B, 0x6E, 0x66, 0x06, 0x0F, 0x00},  // r
    {0x00, 0x00, 0x3E, 0x03, 0x1E, 0x30, 0x1F, 0x00},  // s
    {0x08, 0x0C, 0x3E, 0x0C, 0x0C, 0x2C, 0x18, 0x00},  // t
    {0x00, 0x00, 0x33, 0x33, 0x33, 0x33, 0x6E, 0x00},  // u
    {0x00, 0x00, 0x33, 0x33, 0x33, 0x1E, 0x0C, 0x00},  // v
    {0x00, 0x00, 0x63, 0x6B, 0x7F, 0x7F, 0x36, 0x00},  // w
    {0x00, 0x00, 0x63, 0x36, 0x1C, 0x36, 0x63, 0x00},  // x
    {0x00, 0x00, 0x33, 0x33, 0x33, 0x3E, 0x30, 0x1F},  // y
    {0x00, 0x00, 0x3F, 0x19, 0x0C, 0x26, 0x3F, 0x00},  // z
    {0x38, 0x0C, 0x0C, 0x07, 0x0C, 0x0C, 0x38, 0x00},  // {
    {0x18, 0x18, 0x18, 0x00, 0x18, 0x18, 0x18, 0x00},  // |
    {0x07, 0x0C, 0x0C, 0x38, 0x0C, 0x0C, 0x07, 0x00},  // }
    {0x6E, 0x3B, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // ~
};

struct Mapper {
  Rect region;
  double scale;  // px per pt
  int w, h;

  int to_px_x(double x_pt) const {
    return static_cast<int>(std::lround((x_pt - region.x0) * scale));
  }
  int to_px_y(double y_pt) const {
    return static_cast<int>(std::lround((region.y1 - y_pt) * scale));
  }
};

void fill_rect_px(Image& img, int x0, int y0, int x1, int y1, const Rgb& c) {
  x0 = std::max(0, x0);
  y0 = std::max(0, y0);
  x1 = std::min(img.width, x1);
  y1 = std::min(img.height, y1);
  auto to8 = [](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  };
  std::uint8_t r = to8(c.r), g = to8(c.g), b = to8(c.b);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) img.set(x, y, r, g, b);
  }
}

void draw_span(Image& img, const Mapper& m, const TextSpan& span) {
  // Modes 3 (invisible) and 7 (clip-only) paint nothing.
  if (span.render_mode == 3 || span.render_mode == 7) return;
  if (span.text.empty()) return;

  std::size_t n = span.text.size();
  double cell_w = span.bbox.width() / static_cast<double>(n);
  double baseline = span.bbox.y0 + 0.2 * span.font_size;
  double top = baseline + 0.8 * span.font_size;

  for (std::size_t i = 0; i < n; ++i) {
    unsigned char c = static_cast<unsigned char>(span.text[i]);
    if (c < 32 || c > 126 || c == ' ') continue;
    const std::uint8_t* glyph = kFont8x8[c - 32];
    double gx0 = span.bbox.x0 + cell_w * static_cast<double>(i);
    for (int row = 0; row < 8; ++row) {
      std::uint8_t bits = glyph[row];
      if (!bits) continue;
      double ry0 = top - (row + 1) / 8.0 * span.font_size;
      double ry1 = top - row / 8.0 * span.font_size;
      for (int col = 0; col < 8; ++col) {
        if (!(bits & (1u << col))) continue;
        double rx0 = gx0 + col / 8.0 * cell_w;
        double rx1 = gx0 + (col + 1) / 8.0 * cell_w;
        fill_rect_px(img, m.to_px_x(rx0), m.to_px_y(ry1), std::max(m.to_px_x(rx1), m.to_px_x(rx0) + 1),
                     std::max(m.to_px_y(ry0), m.to_px_y(ry1) + 1), span.fill_color);
      }
    }
  }
}

std::uint32_t png_crc(const std::string& chunk_type, const std::string& data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(chunk_type.data()), chunk_type.size());
  crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data()), data.size());
  return static_cast<std::uint32_t>(crc);
}

void append_u32(std::string& s, std::uint32_t v) {
  s.push_back(static_cast<char>((v >> 24) & 0xFF));
  s.push_back(static_cast<char>((v >> 16) & 0xFF));
  s.push_back(static_cast<char>((v >> 8) & 0xFF));
  s.push_back(static_cast<char>(v & 0xFF));
}

void append_chunk(std::string& out, const std::string& type, const std::string& data) {
  append_u32(out, static_cast<std::uint32_t>(data.size()));
  out += type;
  out += data;
  append_u32(out, png_crc(type, data));
}

}  // namespace

void Image::fill(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  for (std::size_t i = 0; i + 2 < pixels.size(); i += 3) {
    pixels[i] = r;
    pixels[i + 1] = g;
    pixels[i + 2] = b;
  }
}

void Image::set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  pixels[i] = r;
  pixels[i + 1] = g;
  pixels[i + 2] = b;
}

Image rasterize_region(const Page& page, const Rect& region, int dpi) {
  if (region.empty() || !region.finite()) throw RenderFailure("degenerate raster region");
  Mapper m;
  m.region = region;
  m.scale = dpi / 72.0;
  m.w = std::max(1, static_cast<int>(std::lround(region.width() * m.scale)));
  m.h = std::max(1, static_cast<int>(std::lround(region.height() * m.scale)));
  if (static_cast<long long>(m.w) * m.h > 64LL * 1024 * 1024) {
    throw RenderFailure("raster region too large");
  }

  Image img;
  img.width = m.w;
  img.height = m.h;
  img.pixels.assign(static_cast<std::size_t>(m.w) * m.h * 3, 255);

  // Interleave rect fills and spans by paint order.
  std::size_t ri = 0, si = 0;
  std::vector<const FillRect*> rects;
  std::vector<const TextSpan*> spans;
  for (const auto& r : page.rects) rects.push_back(&r);
  for (const auto& s : page.spans) spans.push_back(&s);
  auto by_paint = [](auto* a, auto* b) { return a->paint_index < b->paint_index; };
  std::sort(rects.begin(), rects.end(), by_paint);
  std::sort(spans.begin(), spans.end(), by_paint);
  while (ri < rects.size() || si < spans.size()) {
    bool take_rect = si >= spans.size() ||
                     (ri < rects.size() && rects[ri]->paint_index < spans[si]->paint_index);
    if (take_rect) {
      const FillRect* r = rects[ri++];
      if (!r->rect.intersected(region).empty()) {
        fill_rect_px(img, m.to_px_x(r->rect.x0), m.to_px_y(r->rect.y1), m.to_px_x(r->rect.x1),
                     m.to_px_y(r->rect.y0), r->color);
      }
    } else {
      const TextSpan* s = spans[si++];
      if (!s->bbox.intersected(region).empty()) draw_span(img, m, *s);
    }
  }
  return img;
}

std::string encode_png(const Image& img) {
  std::string out("\x89PNG\r\n\x1a\n", 8);

  std::string ihdr;
  append_u32(ihdr, static_cast<std::uint32_t>(img.width));
  append_u32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // color type: truecolor
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter
  ihdr.push_back(0);   // interlace
  append_chunk(out, "IHDR", ihdr);

  std::string raw;
  raw.reserve(static_cast<std::size_t>(img.height) * (img.width * 3 + 1));
  for (int y = 0; y < img.height; ++y) {
    raw.push_back(0);  // filter type none
    raw.append(reinterpret_cast<const char*>(&img.pixels[static_cast<std::size_t>(y) * img.width * 3]),
               static_cast<std::size_t>(img.width) * 3);
  }
  uLongf bound = compressBound(raw.size());
  std::string compressed(bound, '\0');
  if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &bound,
                reinterpret_cast<const Bytef*>(raw.data()), raw.size(), 6) != Z_OK) {
    throw RenderFailure("png compression failed");
  }
  compressed.resize(bound);
  append_chunk(out, "IDAT", compressed);
  append_chunk(out, "IEND", "");
  return out;
}

void write_region_png(const Page& page, const Rect& region, int dpi, const std::string& path) {
  Image img = rasterize_region(page, region, dpi);
  std::string png = encode_png(img);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoFailure("cannot write " + path);
  f.write(png.data(), static_cast<std::streamsize>(png.size()));
  if (!f) throw IoFailure("short write to " + path);
}

std::string OcrRenderBackend::render_text(const PdfDocument& doc, const Block& block) const {
  if (block.bbox.empty() || !block.bbox.finite()) throw RenderFailure("block bbox degenerate");
  const Page& page = doc.page(block.page_index);

  // Only the on-page part exists for a viewer; a block that lies entirely
  // outside the page renders to nothing.
  Rect region = block.bbox.intersected(page.media_box);
  if (region.empty()) return "";
  region = Rect{region.x0 - 2, region.y0 - 2, region.x1 + 2, region.y1 + 2}
               .intersected(page.media_box);

  static std::atomic<unsigned> counter{0};
  std::string path = (std::filesystem::temp_directory_path() /
                      ("revguard_ocr_" + std::to_string(::getpid()) + "_" +
                       std::to_string(counter.fetch_add(1)) + ".png"))
                         .string();
  struct Cleanup {
    const std::string& p;
    ~Cleanup() { std::remove(p.c_str()); }
  } cleanup{path};

  write_region_png(page, region, dpi_, path);
  return run_ocr_command(command_, path);
}

std::string run_ocr_command(const std::string& command, const std::string& png_path) {
  std::string cmd = command;
  std::size_t ph = cmd.find("{png}");
  if (ph != std::string::npos) {
    cmd.replace(ph, 5, "'" + png_path + "'");
  } else {
    cmd += " '" + png_path + "'";
  }
  cmd += " 2>/dev/null";

  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) throw OcrUnavailable("cannot spawn: " + command);
  std::string output;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, n);
  int status = pclose(pipe);
  if (status == -1 || status != 0) {
    throw OcrUnavailable("ocr command exited with status " + std::to_string(status));
  }
  return output;
}

}  // namespace revguard
