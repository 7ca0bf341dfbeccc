#include "revguard/pdf/fonts.hpp"

#include <cstring>

namespace revguard::pdf {

namespace {

// AFM widths for the printable ASCII range (codes 32..126).
const int kHelvetica[95] = {
    278, 278, 355, 556, 556, 889, 667, 191, 333, 333, 389, 584, 278, 333, 278, 278,  // !"#$%&'()*+,-./
    556, 556, 556, 556, 556, 556, 556, 556, 556, 556,                                // 0-9
    278, 278, 584, 584, 584, 556, 1015,                                              // :;<=>?@
    667, 667, 722, 722, 667, 611, 778, 722, 278, 500, 667, 556, 833, 722, 778,       // A-O
    667, 778, 722, 667, 611, 722, 667, 944, 667, 667, 611,                           // P-Z
    278, 278, 278, 469, 556, 333,                                                    // [\]^_`
    556, 556, 500, 556, 556, 278, 556, 556, 222, 222, 500, 222, 833, 556, 556,       // a-o
    556, 556, 333, 500, 278, 556, 500, 722, 500, 500, 500,                           // p-z
    334, 260, 334, 584,                                                              // {|}~
};

const int kTimesRoman[95] = {
    250, 333, 408, 500, 500, 833, 778, 180, 333, 333, 500, 564, 250, 333, 250, 278,
    500, 500, 500, 500, 500, 500, 500, 500, 500, 500,
    278, 278, 564, 564, 564, 444, 921,
    722, 667, 667, 722, 611, 556, 722, 722, 333, 389, 722, 611, 889, 722, 722,
    556, 722, 667, 556, 611, 722, 722, 944, 722, 722, 611,
    333, 278, 333, 469, 500, 333,
    444, 500, 444, 500, 444, 333, 500, 500, 278, 278, 500, 278, 778, 500, 500,
    500, 500, 333, 389, 278, 500, 500, 722, 500, 500, 444,
    480, 200, 480, 541,
};

// cp1252 codepoints for bytes 0x80..0x9F (0 = undefined).
const char32_t kCp1252High[32] = {
    0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
    0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0,      0x017D, 0,
    0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
    0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178,
};

void append_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool contains_nocase(const std::string& hay, const char* needle) {
  std::string low;
  low.reserve(hay.size());
  for (char c : hay) low.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
  return low.find(needle) != std::string::npos;
}

}  // namespace

FontMetrics builtin_metrics(const std::string& base_font) {
  // Strip a subset prefix like "ABCDEF+".
  std::string name = base_font;
  if (name.size() > 7 && name[6] == '+') name = name.substr(7);

  FontMetrics m;
  if (contains_nocase(name, "courier") || contains_nocase(name, "mono")) {
    m.widths.fill(600);
    m.default_width = 600;
    return m;
  }
  const int* table = nullptr;
  if (contains_nocase(name, "helvetica") || contains_nocase(name, "arial")) {
    table = kHelvetica;
    m.default_width = 556;
  } else if (contains_nocase(name, "times")) {
    table = kTimesRoman;
    m.default_width = 500;
  }
  if (table != nullptr) {
    for (int c = 32; c <= 126; ++c) m.widths[c] = table[c - 32];
  } else {
    m.widths.fill(500);
    m.default_width = 500;
  }
  return m;
}

std::string decode_winansi(const std::string& bytes) {
  std::string out;
  out.reserve(bytes.size());
  for (unsigned char c : bytes) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0xA0) {
      char32_t cp = kCp1252High[c - 0x80];
      append_utf8(cp == 0 ? c : cp, out);
    } else {
      append_utf8(c, out);
    }
  }
  return out;
}

std::string encode_winansi(const std::string& utf8) {
  std::string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  while (i < utf8.size()) {
    unsigned char c = static_cast<unsigned char>(utf8[i]);
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
      ++i;
      continue;
    }
    // Decode one UTF-8 codepoint.
    char32_t cp = 0;
    int extra = 0;
    if ((c & 0xE0) == 0xC0) {
      cp = c & 0x1F;
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      cp = c & 0x0F;
      extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
      cp = c & 0x07;
      extra = 3;
    } else {
      out.push_back('?');
      ++i;
      continue;
    }
    if (i + 1 + extra > utf8.size()) {
      out.push_back('?');
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      unsigned char cc = static_cast<unsigned char>(utf8[i + k]);
      if ((cc & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back('?');
      ++i;
      continue;
    }
    i += 1 + extra;
    if (cp >= 0xA0 && cp <= 0xFF) {
      out.push_back(static_cast<char>(cp));
      continue;
    }
    // cp1252 high range.
    bool mapped = false;
    for (int k = 0; k < 32; ++k) {
      if (kCp1252High[k] == cp) {
        out.push_back(static_cast<char>(0x80 + k));
        mapped = true;
        break;
      }
    }
    if (!mapped) out.push_back('?');
  }
  return out;
}

}  // namespace revguard::pdf
