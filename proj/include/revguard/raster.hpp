#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "revguard/geometry.hpp"
#include "revguard/pdf_model.hpp"

namespace revguard {

/// 8-bit RGB raster image.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // rgb, row-major, top-down

  void fill(std::uint8_t r, std::uint8_t g, std::uint8_t b);
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);
};

/// Paints the given page region (PDF points) at `dpi`: white background,
/// then rectangle fills and text spans in paint order. Glyphs come from a
/// built-in 8x8 bitmap face scaled to the span's metrics, so occlusion,
/// color, and geometry behave like a viewer even though shapes are coarse.
Image rasterize_region(const Page& page, const Rect& region, int dpi);

/// Encodes an Image as a PNG byte string (RGB8, zlib-compressed).
std::string encode_png(const Image& img);

/// rasterize_region + encode_png + write to path. Throws IoFailure.
void write_region_png(const Page& page, const Rect& region, int dpi, const std::string& path);

/// Runs `command` (with "{png}" replaced by the path, or the path appended),
/// capturing stdout. Nonzero exit or spawn failure throws OcrUnavailable.
std::string run_ocr_command(const std::string& command, const std::string& png_path);

}  // namespace revguard
