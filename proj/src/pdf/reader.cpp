#include "revguard/pdf/reader.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cstring>

#include "revguard/errors.hpp"

namespace revguard::pdf {

bool is_pdf_whitespace(unsigned char c) {
  return c == 0x00 || c == 0x09 || c == 0x0A || c == 0x0C || c == 0x0D || c == 0x20;
}

bool is_pdf_delimiter(unsigned char c) {
  switch (c) {
    case '(':
    case ')':
    case '<':
    case '>':
    case '[':
    case ']':
    case '{':
    case '}':
    case '/':
    case '%':
      return true;
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

void Lexer::skip_ws_and_comments() {
  while (pos_ < data_.size()) {
    unsigned char c = static_cast<unsigned char>(data_[pos_]);
    if (is_pdf_whitespace(c)) {
      ++pos_;
    } else if (c == '%') {
      while (pos_ < data_.size() && data_[pos_] != '\n' && data_[pos_] != '\r') ++pos_;
    } else {
      break;
    }
  }
}

Lexer::Token Lexer::next() {
  skip_ws_and_comments();
  Token t;
  if (pos_ >= data_.size()) return t;

  unsigned char c = static_cast<unsigned char>(data_[pos_]);

  if (c == '[') {
    ++pos_;
    t.type = Token::Type::ArrayOpen;
    return t;
  }
  if (c == ']') {
    ++pos_;
    t.type = Token::Type::ArrayClose;
    return t;
  }
  if (c == '<') {
    if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '<') {
      pos_ += 2;
      t.type = Token::Type::DictOpen;
      return t;
    }
    // Hex string.
    ++pos_;
    std::string out;
    int hi = -1;
    while (pos_ < data_.size() && data_[pos_] != '>') {
      unsigned char h = static_cast<unsigned char>(data_[pos_++]);
      if (is_pdf_whitespace(h)) continue;
      int v = -1;
      if (h >= '0' && h <= '9') v = h - '0';
      else if (h >= 'a' && h <= 'f') v = h - 'a' + 10;
      else if (h >= 'A' && h <= 'F') v = h - 'A' + 10;
      else continue;
      if (hi < 0) {
        hi = v;
      } else {
        out.push_back(static_cast<char>((hi << 4) | v));
        hi = -1;
      }
    }
    if (hi >= 0) out.push_back(static_cast<char>(hi << 4));
    if (pos_ < data_.size()) ++pos_;  // '>'
    t.type = Token::Type::String;
    t.text = std::move(out);
    return t;
  }
  if (c == '>') {
    if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '>') {
      pos_ += 2;
      t.type = Token::Type::DictClose;
      return t;
    }
    ++pos_;  // stray '>', treat as keyword noise
    t.type = Token::Type::Keyword;
    t.text = ">";
    return t;
  }
  if (c == '(') {
    ++pos_;
    std::string out;
    int depth = 1;
    while (pos_ < data_.size() && depth > 0) {
      char ch = data_[pos_++];
      if (ch == '\\') {
        if (pos_ >= data_.size()) break;
        char esc = data_[pos_++];
        switch (esc) {
          case 'n': out.push_back('\n'); break;
          case 'r': out.push_back('\r'); break;
          case 't': out.push_back('\t'); break;
          case 'b': out.push_back('\b'); break;
          case 'f': out.push_back('\f'); break;
          case '(': out.push_back('('); break;
          case ')': out.push_back(')'); break;
          case '\\': out.push_back('\\'); break;
          case '\r':
            if (pos_ < data_.size() && data_[pos_] == '\n') ++pos_;
            break;  // line continuation
          case '\n':
            break;
          default:
            if (esc >= '0' && esc <= '7') {
              int v = esc - '0';
              for (int k = 0; k < 2 && pos_ < data_.size(); ++k) {
                char d = data_[pos_];
                if (d < '0' || d > '7') break;
                v = (v << 3) | (d - '0');
                ++pos_;
              }
              out.push_back(static_cast<char>(v & 0xFF));
            } else {
              out.push_back(esc);
            }
        }
      } else if (ch == '(') {
        ++depth;
        out.push_back(ch);
      } else if (ch == ')') {
        --depth;
        if (depth > 0) out.push_back(ch);
      } else {
        out.push_back(ch);
      }
    }
    t.type = Token::Type::String;
    t.text = std::move(out);
    return t;
  }
  if (c == '/') {
    ++pos_;
    std::string out;
    while (pos_ < data_.size()) {
      unsigned char nc = static_cast<unsigned char>(data_[pos_]);
      if (is_pdf_whitespace(nc) || is_pdf_delimiter(nc)) break;
      if (nc == '#' && pos_ + 2 < data_.size() && std::isxdigit((unsigned char)data_[pos_ + 1]) &&
          std::isxdigit((unsigned char)data_[pos_ + 2])) {
        auto hexv = [](char h) {
          if (h >= '0' && h <= '9') return h - '0';
          if (h >= 'a' && h <= 'f') return h - 'a' + 10;
          return h - 'A' + 10;
        };
        out.push_back(static_cast<char>((hexv(data_[pos_ + 1]) << 4) | hexv(data_[pos_ + 2])));
        pos_ += 3;
      } else {
        out.push_back(static_cast<char>(nc));
        ++pos_;
      }
    }
    t.type = Token::Type::Name;
    t.text = std::move(out);
    return t;
  }
  if (c == '+' || c == '-' || c == '.' || std::isdigit(c)) {
    std::string num;
    bool is_int = true;
    while (pos_ < data_.size()) {
      char nc = data_[pos_];
      if (std::isdigit(static_cast<unsigned char>(nc)) || nc == '+' || nc == '-') {
        num.push_back(nc);
        ++pos_;
      } else if (nc == '.') {
        is_int = false;
        num.push_back(nc);
        ++pos_;
      } else {
        break;
      }
    }
    t.type = Token::Type::Number;
    t.number = num.empty() ? 0.0 : std::strtod(num.c_str(), nullptr);
    t.is_integer = is_int;
    t.text = std::move(num);
    return t;
  }

  // Keyword / operator: run of regular characters.
  std::string kw;
  while (pos_ < data_.size()) {
    unsigned char nc = static_cast<unsigned char>(data_[pos_]);
    if (is_pdf_whitespace(nc) || is_pdf_delimiter(nc)) break;
    kw.push_back(static_cast<char>(nc));
    ++pos_;
  }
  if (kw.empty()) {  // lone delimiter we do not handle ('{' '}')
    ++pos_;
    kw.push_back(static_cast<char>(c));
  }
  t.type = Token::Type::Keyword;
  t.text = std::move(kw);
  return t;
}

PdfObject Lexer::parse_value() { return parse_value(next()); }

PdfObject Lexer::parse_value(const Token& first) {
  switch (first.type) {
    case Token::Type::Number: {
      if (first.is_integer) {
        // Could be the start of an "N G R" reference.
        std::size_t save = pos_;
        Token t2 = next();
        if (t2.type == Token::Type::Number && t2.is_integer) {
          std::size_t save2 = pos_;
          Token t3 = next();
          if (t3.type == Token::Type::Keyword && t3.text == "R") {
            return PdfObject::make_ref(static_cast<int>(first.number), static_cast<int>(t2.number));
          }
          seek(save2);
          seek(save);  // not a ref; rewind fully
          return PdfObject::make_int(static_cast<std::int64_t>(first.number));
        }
        seek(save);
        return PdfObject::make_int(static_cast<std::int64_t>(first.number));
      }
      return PdfObject::make_real(first.number);
    }
    case Token::Type::String:
      return PdfObject::make_string(first.text);
    case Token::Type::Name:
      return PdfObject::make_name(first.text);
    case Token::Type::ArrayOpen: {
      PdfObject arr = PdfObject::make_array();
      while (true) {
        Token t = next();
        if (t.type == Token::Type::ArrayClose || t.type == Token::Type::End) break;
        arr.array.push_back(parse_value(t));
      }
      return arr;
    }
    case Token::Type::DictOpen: {
      PdfObject d = PdfObject::make_dict();
      while (true) {
        Token t = next();
        if (t.type == Token::Type::DictClose || t.type == Token::Type::End) break;
        if (t.type != Token::Type::Name) {
          // Skip malformed key; consume its value to stay in sync.
          parse_value(t);
          continue;
        }
        std::string key = t.text;
        d.set(key, parse_value());
      }
      return d;
    }
    case Token::Type::Keyword: {
      if (first.text == "true") return PdfObject::make_bool(true);
      if (first.text == "false") return PdfObject::make_bool(false);
      if (first.text == "null") return PdfObject::make_null();
      PdfObject o;
      o.kind = PdfObject::Kind::Name;  // surface keyword as name-ish value
      o.text = first.text;
      return o;
    }
    default:
      return PdfObject::make_null();
  }
}

// ---------------------------------------------------------------------------
// Filters
// ---------------------------------------------------------------------------

namespace {

std::string flate_decode(const std::string& in) {
  if (in.empty()) return {};
  z_stream zs;
  std::memset(&zs, 0, sizeof(zs));
  if (inflateInit(&zs) != Z_OK) throw MalformedPdf("inflateInit failed");
  std::string out;
  out.reserve(in.size() * 4);
  char buf[16384];
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  int ret = Z_OK;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof(buf);
    ret = inflate(&zs, Z_NO_FLUSH);
    if (ret != Z_OK && ret != Z_STREAM_END && ret != Z_BUF_ERROR) {
      inflateEnd(&zs);
      throw MalformedPdf("flate stream corrupt");
    }
    out.append(buf, sizeof(buf) - zs.avail_out);
    if (ret == Z_BUF_ERROR && zs.avail_in == 0) break;  // truncated; keep what we have
  } while (ret != Z_STREAM_END);
  inflateEnd(&zs);
  return out;
}

std::string ascii85_decode(const std::string& in) {
  std::string out;
  std::uint32_t group = 0;
  int count = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    char c = in[i];
    if (is_pdf_whitespace(static_cast<unsigned char>(c))) continue;
    if (c == '~') break;  // "~>" terminator
    if (c == 'z' && count == 0) {
      out.append(4, '\0');
      continue;
    }
    if (c < '!' || c > 'u') continue;
    group = group * 85 + static_cast<std::uint32_t>(c - '!');
    if (++count == 5) {
      for (int b = 3; b >= 0; --b) out.push_back(static_cast<char>((group >> (8 * b)) & 0xFF));
      group = 0;
      count = 0;
    }
  }
  if (count > 1) {
    // Partial group: pad with 'u' and keep count-1 bytes.
    for (int i = count; i < 5; ++i) group = group * 85 + 84;
    for (int b = 3; b >= 4 - (count - 1); --b) {
      out.push_back(static_cast<char>((group >> (8 * b)) & 0xFF));
    }
  }
  return out;
}

std::string ascii_hex_decode(const std::string& in) {
  std::string out;
  int hi = -1;
  for (char c : in) {
    if (c == '>') break;
    int v = -1;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else continue;
    if (hi < 0) {
      hi = v;
    } else {
      out.push_back(static_cast<char>((hi << 4) | v));
      hi = -1;
    }
  }
  if (hi >= 0) out.push_back(static_cast<char>(hi << 4));
  return out;
}

std::string apply_png_predictor(const std::string& data, int colors, int bpc, int columns) {
  const int bpp = std::max(1, colors * bpc / 8);
  const std::size_t row_len = static_cast<std::size_t>(columns) * colors * bpc / 8;
  std::string out;
  std::vector<unsigned char> prev(row_len, 0);
  std::vector<unsigned char> cur(row_len, 0);
  std::size_t pos = 0;
  while (pos + 1 + row_len <= data.size() + row_len && pos < data.size()) {
    unsigned char filter = static_cast<unsigned char>(data[pos++]);
    std::size_t avail = std::min(row_len, data.size() - pos);
    if (avail == 0) break;
    for (std::size_t i = 0; i < avail; ++i) cur[i] = static_cast<unsigned char>(data[pos + i]);
    for (std::size_t i = avail; i < row_len; ++i) cur[i] = 0;
    pos += avail;
    switch (filter) {
      case 0:
        break;
      case 1:
        for (std::size_t i = bpp; i < row_len; ++i) cur[i] = static_cast<unsigned char>(cur[i] + cur[i - bpp]);
        break;
      case 2:
        for (std::size_t i = 0; i < row_len; ++i) cur[i] = static_cast<unsigned char>(cur[i] + prev[i]);
        break;
      case 3:
        for (std::size_t i = 0; i < row_len; ++i) {
          unsigned left = i >= static_cast<std::size_t>(bpp) ? cur[i - bpp] : 0;
          cur[i] = static_cast<unsigned char>(cur[i] + ((left + prev[i]) >> 1));
        }
        break;
      case 4:
        for (std::size_t i = 0; i < row_len; ++i) {
          int a = i >= static_cast<std::size_t>(bpp) ? cur[i - bpp] : 0;
          int b = prev[i];
          int c = i >= static_cast<std::size_t>(bpp) ? prev[i - bpp] : 0;
          int p = a + b - c;
          int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
          int pred = (pa <= pb && pa <= pc) ? a : (pb <= pc ? b : c);
          cur[i] = static_cast<unsigned char>(cur[i] + pred);
        }
        break;
      default:
        throw MalformedPdf("unsupported png predictor filter");
    }
    out.append(reinterpret_cast<char*>(cur.data()), row_len);
    prev = cur;
  }
  return out;
}

}  // namespace

std::string PdfFile::decoded_stream(const PdfObject& stream) const {
  std::string data = stream.stream_data;
  const PdfObject& filter = resolve(stream.get("Filter"));
  const PdfObject& parms = resolve(stream.get("DecodeParms"));

  std::vector<std::string> filters;
  if (filter.kind == PdfObject::Kind::Name) filters.push_back(filter.text);
  if (filter.kind == PdfObject::Kind::Array) {
    for (const auto& f : filter.array) {
      const PdfObject& rf = resolve(f);
      if (rf.kind == PdfObject::Kind::Name) filters.push_back(rf.text);
    }
  }
  std::vector<const PdfObject*> parm_list;
  if (parms.kind == PdfObject::Kind::Dict) parm_list.push_back(&parms);
  if (parms.kind == PdfObject::Kind::Array) {
    for (const auto& p : parms.array) parm_list.push_back(&resolve(p));
  }

  for (std::size_t i = 0; i < filters.size(); ++i) {
    const std::string& f = filters[i];
    if (f == "FlateDecode" || f == "Fl") {
      data = flate_decode(data);
    } else if (f == "ASCIIHexDecode" || f == "AHx") {
      data = ascii_hex_decode(data);
    } else if (f == "ASCII85Decode" || f == "A85") {
      data = ascii85_decode(data);
    } else {
      throw MalformedPdf("unsupported stream filter: " + f);
    }
    if (i < parm_list.size() && parm_list[i]->kind == PdfObject::Kind::Dict) {
      const PdfObject& p = *parm_list[i];
      int predictor = static_cast<int>(resolve(p.get("Predictor")).as_int());
      if (predictor >= 10) {
        int colors = p.has("Colors") ? static_cast<int>(resolve(p.get("Colors")).as_int()) : 1;
        int bpc = p.has("BitsPerComponent")
                      ? static_cast<int>(resolve(p.get("BitsPerComponent")).as_int())
                      : 8;
        int columns = p.has("Columns") ? static_cast<int>(resolve(p.get("Columns")).as_int()) : 1;
        data = apply_png_predictor(data, colors, bpc, columns);
      } else if (predictor > 1) {
        throw MalformedPdf("unsupported TIFF predictor");
      }
    }
  }
  return data;
}

// ---------------------------------------------------------------------------
// Xref / object loading
// ---------------------------------------------------------------------------

namespace {

std::size_t find_last(const std::string& hay, const std::string& needle) {
  std::size_t p = hay.rfind(needle);
  if (p == std::string::npos) throw MalformedPdf("missing " + needle);
  return p;
}

}  // namespace

std::shared_ptr<PdfFile> PdfFile::parse(std::string bytes) {
  auto f = std::shared_ptr<PdfFile>(new PdfFile());
  f->bytes_ = std::move(bytes);
  if (f->bytes_.size() < 16) throw MalformedPdf("file too small");
  if (f->bytes_.compare(0, 5, "%PDF-") != 0) {
    // Allow junk before the header within the first 1 KiB.
    std::size_t p = f->bytes_.find("%PDF-");
    if (p == std::string::npos || p > 1024) throw MalformedPdf("missing %PDF header");
  }
  try {
    f->parse_xref_chain();
  } catch (const EncryptedPdf&) {
    throw;
  } catch (const Error&) {
    f->xref_.clear();
    f->trailer_ = PdfObject::make_dict();
    f->rebuild_xref_by_scan();
  }
  if (!f->trailer_.get("Encrypt").is_null()) throw EncryptedPdf();
  f->collect_pages();
  return f;
}

void PdfFile::parse_xref_chain() {
  std::size_t sx = find_last(bytes_, "startxref");
  Lexer lx(bytes_, sx + 9);
  auto tok = lx.next();
  if (tok.type != Lexer::Token::Type::Number) throw MalformedPdf("bad startxref");
  last_startxref_ = static_cast<std::int64_t>(tok.number);

  std::vector<std::int64_t> queue{last_startxref_};
  std::vector<std::int64_t> seen;
  bool first = true;
  while (!queue.empty()) {
    std::int64_t off = queue.back();
    queue.pop_back();
    if (off < 0 || static_cast<std::size_t>(off) >= bytes_.size()) throw MalformedPdf("xref offset out of range");
    if (std::find(seen.begin(), seen.end(), off) != seen.end()) continue;
    seen.push_back(off);

    PdfObject trailer;
    Lexer peek(bytes_, static_cast<std::size_t>(off));
    auto t = peek.next();
    if (t.type == Lexer::Token::Type::Keyword && t.text == "xref") {
      parse_xref_classic(peek.pos(), trailer);
      // Hybrid files carry /XRefStm alongside the classic table.
      const PdfObject& hyb = trailer.get("XRefStm");
      if (hyb.is_number()) queue.push_back(hyb.as_int());
    } else {
      parse_xref_stream_at(static_cast<std::size_t>(off), trailer);
      uses_xref_stream_ = uses_xref_stream_ || first;
    }
    const PdfObject& prev = trailer.get("Prev");
    if (prev.is_number()) queue.push_back(prev.as_int());
    if (first) {
      trailer_ = trailer;
      first = false;
    } else {
      // Merge older trailer keys that the newest one lacks (Root/Info).
      for (const auto& [k, v] : trailer.dict) {
        if (!trailer_.has(k)) trailer_.set(k, v);
      }
    }
  }
  if (trailer_.get("Root").is_null()) throw MalformedPdf("trailer has no Root");
  const PdfObject& size = trailer_.get("Size");
  if (size.is_number()) max_obj_num_ = static_cast<int>(size.as_int()) - 1;
  for (const auto& [num, e] : xref_) max_obj_num_ = std::max(max_obj_num_, num);
}

void PdfFile::parse_xref_classic(std::size_t pos, PdfObject& trailer_out) {
  Lexer lx(bytes_, pos);
  while (true) {
    std::size_t save = lx.pos();
    auto t = lx.next();
    if (t.type == Lexer::Token::Type::Keyword && t.text == "trailer") {
      trailer_out = lx.parse_value();
      return;
    }
    if (t.type != Lexer::Token::Type::Number) throw MalformedPdf("bad xref section header");
    auto t2 = lx.next();
    if (t2.type != Lexer::Token::Type::Number) throw MalformedPdf("bad xref section header");
    int start = static_cast<int>(t.number);
    int count = static_cast<int>(t2.number);
    (void)save;
    for (int i = 0; i < count; ++i) {
      auto o = lx.next();
      auto g = lx.next();
      auto k = lx.next();
      if (o.type != Lexer::Token::Type::Number || g.type != Lexer::Token::Type::Number ||
          k.type != Lexer::Token::Type::Keyword) {
        throw MalformedPdf("bad xref entry");
      }
      int num = start + i;
      if (xref_.count(num)) continue;  // newest wins
      XrefEntry e;
      e.gen = static_cast<int>(g.number);
      if (k.text == "n") {
        e.where = XrefEntry::Where::Offset;
        e.offset = static_cast<std::int64_t>(o.number);
      } else {
        e.where = XrefEntry::Where::Free;
      }
      xref_[num] = e;
    }
  }
}

void PdfFile::parse_xref_stream_at(std::size_t pos, PdfObject& trailer_out) {
  PdfObject obj = parse_object_at(pos, -1);
  if (obj.kind != PdfObject::Kind::Stream) throw MalformedPdf("xref stream expected");
  trailer_out = PdfObject::make_dict();
  trailer_out.dict = obj.dict;

  const PdfObject& w = obj.get("W");
  if (w.kind != PdfObject::Kind::Array || w.array.size() < 3) throw MalformedPdf("xref stream W");
  int w0 = static_cast<int>(w.array[0].as_int());
  int w1 = static_cast<int>(w.array[1].as_int());
  int w2 = static_cast<int>(w.array[2].as_int());

  std::vector<std::pair<int, int>> index_ranges;
  const PdfObject& index = obj.get("Index");
  if (index.kind == PdfObject::Kind::Array) {
    for (std::size_t i = 0; i + 1 < index.array.size(); i += 2) {
      index_ranges.emplace_back(static_cast<int>(index.array[i].as_int()),
                                static_cast<int>(index.array[i + 1].as_int()));
    }
  } else {
    int size = static_cast<int>(obj.get("Size").as_int());
    index_ranges.emplace_back(0, size);
  }

  std::string data = decoded_stream(obj);
  std::size_t entry_len = static_cast<std::size_t>(w0 + w1 + w2);
  if (entry_len == 0) throw MalformedPdf("xref stream entry width 0");
  std::size_t p = 0;
  auto read_field = [&](int width) -> std::int64_t {
    std::int64_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 8) | static_cast<unsigned char>(data[p++]);
    return v;
  };
  for (const auto& [start, count] : index_ranges) {
    for (int i = 0; i < count; ++i) {
      if (p + entry_len > data.size()) return;
      std::int64_t type = w0 == 0 ? 1 : read_field(w0);
      std::int64_t f2 = read_field(w1);
      std::int64_t f3 = w2 == 0 ? 0 : read_field(w2);
      int num = start + i;
      if (xref_.count(num)) continue;
      XrefEntry e;
      if (type == 1) {
        e.where = XrefEntry::Where::Offset;
        e.offset = f2;
        e.gen = static_cast<int>(f3);
      } else if (type == 2) {
        e.where = XrefEntry::Where::InObjectStream;
        e.container_num = static_cast<int>(f2);
        e.index_in_stream = static_cast<int>(f3);
      } else {
        e.where = XrefEntry::Where::Free;
      }
      xref_[num] = e;
    }
  }
}

void PdfFile::rebuild_xref_by_scan() {
  // Last-resort recovery: scan for "N G obj" headers; later definitions win.
  const std::string& b = bytes_;
  std::size_t pos = 0;
  while ((pos = b.find(" obj", pos)) != std::string::npos) {
    // Walk backwards over "N G".
    std::size_t q = pos;
    auto skip_back_ws = [&](std::size_t i) {
      while (i > 0 && is_pdf_whitespace(static_cast<unsigned char>(b[i - 1]))) --i;
      return i;
    };
    auto read_back_int = [&](std::size_t i, long& out) -> std::size_t {
      std::size_t end = i;
      while (i > 0 && std::isdigit(static_cast<unsigned char>(b[i - 1]))) --i;
      if (i == end) return std::string::npos;
      out = std::strtol(b.substr(i, end - i).c_str(), nullptr, 10);
      return i;
    };
    long gen = 0, num = 0;
    std::size_t i = skip_back_ws(q);
    i = read_back_int(i, gen);
    if (i == std::string::npos) {
      pos += 4;
      continue;
    }
    i = skip_back_ws(i);
    i = read_back_int(i, num);
    if (i == std::string::npos) {
      pos += 4;
      continue;
    }
    XrefEntry e;
    e.where = XrefEntry::Where::Offset;
    e.offset = static_cast<std::int64_t>(i);
    e.gen = static_cast<int>(gen);
    xref_[static_cast<int>(num)] = e;  // later wins
    max_obj_num_ = std::max(max_obj_num_, static_cast<int>(num));
    pos += 4;
  }
  if (xref_.empty()) throw MalformedPdf("no objects found");

  // Recover the trailer for /Root: prefer an explicit trailer dict, else any
  // object with /Type /Catalog.
  std::size_t tp = b.rfind("trailer");
  if (tp != std::string::npos) {
    Lexer lx(b, tp + 7);
    PdfObject t = lx.parse_value();
    if (t.kind == PdfObject::Kind::Dict) trailer_ = t;
  }
  if (trailer_.get("Root").is_null()) {
    for (const auto& [num, e] : xref_) {
      try {
        const PdfObject& o = object(num);
        if ((o.kind == PdfObject::Kind::Dict || o.kind == PdfObject::Kind::Stream) &&
            resolve(o.get("Type")).is_name("Catalog")) {
          trailer_ = PdfObject::make_dict();
          trailer_.set("Root", PdfObject::make_ref(num));
          break;
        }
      } catch (const Error&) {
        continue;
      }
    }
  }
  if (trailer_.get("Root").is_null()) throw MalformedPdf("no document catalog");
}

PdfObject PdfFile::parse_object_at(std::size_t offset, int expected_num) const {
  if (offset >= bytes_.size()) throw MalformedPdf("object offset out of range");
  Lexer lx(bytes_, offset);
  auto t1 = lx.next();
  auto t2 = lx.next();
  auto t3 = lx.next();
  if (t1.type != Lexer::Token::Type::Number || t2.type != Lexer::Token::Type::Number ||
      t3.type != Lexer::Token::Type::Keyword || t3.text != "obj") {
    throw MalformedPdf("expected 'N G obj'");
  }
  if (expected_num >= 0 && static_cast<int>(t1.number) != expected_num) {
    throw MalformedPdf("xref points to wrong object");
  }
  PdfObject value = lx.parse_value();

  std::size_t save = lx.pos();
  auto t4 = lx.next();
  if (t4.type == Lexer::Token::Type::Keyword && t4.text == "stream") {
    // Data starts after CRLF or LF.
    std::size_t p = lx.pos();
    if (p < bytes_.size() && bytes_[p] == '\r') ++p;
    if (p < bytes_.size() && bytes_[p] == '\n') ++p;
    std::int64_t length = -1;
    const PdfObject& len_obj = value.get("Length");
    if (len_obj.is_number()) {
      length = len_obj.as_int();
    } else if (len_obj.kind == PdfObject::Kind::Ref) {
      try {
        length = object(len_obj.ref_num).as_int();
      } catch (const Error&) {
        length = -1;
      }
    }
    std::size_t data_end;
    if (length >= 0 && p + static_cast<std::size_t>(length) <= bytes_.size()) {
      data_end = p + static_cast<std::size_t>(length);
      // Sanity: an "endstream" should follow (possibly after EOL).
      std::size_t check = bytes_.find("endstream", data_end);
      if (check == std::string::npos || check > data_end + 4) {
        std::size_t scan = bytes_.find("endstream", p);
        if (scan == std::string::npos) throw MalformedPdf("unterminated stream");
        data_end = scan;
        while (data_end > p && (bytes_[data_end - 1] == '\n' || bytes_[data_end - 1] == '\r')) --data_end;
      }
    } else {
      std::size_t scan = bytes_.find("endstream", p);
      if (scan == std::string::npos) throw MalformedPdf("unterminated stream");
      data_end = scan;
      while (data_end > p && (bytes_[data_end - 1] == '\n' || bytes_[data_end - 1] == '\r')) --data_end;
    }
    PdfObject stream;
    stream.kind = PdfObject::Kind::Stream;
    stream.dict = value.dict;
    stream.stream_data = bytes_.substr(p, data_end - p);
    return stream;
  }
  lx.seek(save);
  return value;
}

PdfObject PdfFile::extract_from_object_stream(int container, int index) const {
  const PdfObject& stm = object(container);
  if (stm.kind != PdfObject::Kind::Stream) throw MalformedPdf("object stream missing");
  std::string data = decoded_stream(stm);
  int n = static_cast<int>(resolve(stm.get("N")).as_int());
  std::int64_t first = resolve(stm.get("First")).as_int();
  Lexer lx(data, 0);
  std::vector<std::pair<int, std::int64_t>> offsets;
  offsets.reserve(n);
  for (int i = 0; i < n; ++i) {
    auto a = lx.next();
    auto b = lx.next();
    if (a.type != Lexer::Token::Type::Number || b.type != Lexer::Token::Type::Number) {
      throw MalformedPdf("object stream header corrupt");
    }
    offsets.emplace_back(static_cast<int>(a.number), static_cast<std::int64_t>(b.number));
  }
  if (index < 0 || index >= n) throw MalformedPdf("object stream index out of range");
  Lexer vx(data, static_cast<std::size_t>(first + offsets[index].second));
  return vx.parse_value();
}

const PdfObject& PdfFile::object(int num) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(num);
    if (it != cache_.end()) return it->second;
  }
  auto xe = xref_.find(num);
  static const PdfObject null_obj;
  if (xe == xref_.end() || xe->second.where == XrefEntry::Where::Free) return null_obj;
  PdfObject obj;
  if (xe->second.where == XrefEntry::Where::Offset) {
    obj = parse_object_at(static_cast<std::size_t>(xe->second.offset), num);
  } else {
    obj = extract_from_object_stream(xe->second.container_num, xe->second.index_in_stream);
  }
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto [ins, ok] = cache_.emplace(num, std::move(obj));
  return ins->second;
}

const PdfObject& PdfFile::resolve(const PdfObject& o) const {
  const PdfObject* cur = &o;
  for (int depth = 0; depth < 32 && cur->kind == PdfObject::Kind::Ref; ++depth) {
    cur = &object(cur->ref_num);
  }
  return *cur;
}

void PdfFile::collect_pages() {
  const PdfObject& root = resolve(trailer_.get("Root"));
  const PdfObject& pages_ref = root.get("Pages");
  if (pages_ref.is_null()) throw MalformedPdf("catalog has no /Pages");

  struct Frame {
    PdfObject node_ref;
    PdfObject inherited_resources;
    PdfObject inherited_mediabox;
  };
  std::vector<Frame> stack;
  stack.push_back({pages_ref, PdfObject::make_null(), PdfObject::make_null()});
  int guard = 0;
  while (!stack.empty()) {
    if (++guard > 100000) throw MalformedPdf("page tree too deep or cyclic");
    Frame fr = stack.back();
    stack.pop_back();
    const PdfObject& node = resolve(fr.node_ref);
    if (node.kind != PdfObject::Kind::Dict && node.kind != PdfObject::Kind::Stream) continue;

    PdfObject res = node.get("Resources").is_null() ? fr.inherited_resources : node.get("Resources");
    PdfObject mb = node.get("MediaBox").is_null() ? fr.inherited_mediabox : node.get("MediaBox");

    const PdfObject& type = resolve(node.get("Type"));
    bool is_page = type.is_name("Page") || (!node.has("Kids") && !type.is_name("Pages"));
    if (is_page) {
      PageRecord rec;
      rec.object_number = fr.node_ref.kind == PdfObject::Kind::Ref ? fr.node_ref.ref_num : 0;
      rec.dict = node;
      if (rec.dict.get("Resources").is_null() && !res.is_null()) rec.dict.set("Resources", res);
      if (rec.dict.get("MediaBox").is_null() && !mb.is_null()) rec.dict.set("MediaBox", mb);
      pages_.push_back(std::move(rec));
      continue;
    }
    const PdfObject& kids = resolve(node.get("Kids"));
    if (kids.kind != PdfObject::Kind::Array) continue;
    // Push in reverse so document order pops first.
    for (auto it = kids.array.rbegin(); it != kids.array.rend(); ++it) {
      stack.push_back({*it, res, mb});
    }
  }
  if (pages_.empty()) throw MalformedPdf("document has no pages");
}

}  // namespace revguard::pdf
