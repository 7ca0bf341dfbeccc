#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace revguard::pdf {

/// Per-byte advance widths in 1/1000 em for a simple (single-byte) font.
struct FontMetrics {
  std::array<int, 256> widths{};
  int default_width = 500;

  int width(unsigned char code) const {
    int w = widths[code];
    return w > 0 ? w : default_width;
  }
};

/// Metrics for a base-font name ("Helvetica", "Times-Roman", "Courier",
/// subset prefixes and style suffixes tolerated). Unknown families get a
/// flat 500/1000 em.
FontMetrics builtin_metrics(const std::string& base_font);

/// Decodes a single-byte string as WinAnsi (cp1252) to UTF-8. Bytes in
/// 0x80..0x9F map to their cp1252 codepoints; everything else is Latin-1.
std::string decode_winansi(const std::string& bytes);

/// Encodes UTF-8 text to WinAnsi bytes; codepoints outside the repertoire
/// become '?'. Inverse of decode_winansi on its image.
std::string encode_winansi(const std::string& utf8);

}  // namespace revguard::pdf
