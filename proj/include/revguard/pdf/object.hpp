#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace revguard::pdf {

/// A COS object. Dictionaries keep insertion order so serialization is
/// deterministic and round-trips are stable.
class PdfObject {
 public:
  enum class Kind { Null, Bool, Int, Real, String, Name, Array, Dict, Stream, Ref };

  Kind kind = Kind::Null;
  bool bool_v = false;
  std::int64_t int_v = 0;
  double real_v = 0.0;
  std::string text;  // String bytes or Name text (without the leading '/')
  std::vector<PdfObject> array;
  std::vector<std::pair<std::string, PdfObject>> dict;  // also the stream dict
  std::string stream_data;                              // raw (still encoded) bytes
  int ref_num = 0;
  int ref_gen = 0;

  PdfObject() = default;

  static PdfObject make_null() { return PdfObject{}; }
  static PdfObject make_bool(bool b) {
    PdfObject o;
    o.kind = Kind::Bool;
    o.bool_v = b;
    return o;
  }
  static PdfObject make_int(std::int64_t v) {
    PdfObject o;
    o.kind = Kind::Int;
    o.int_v = v;
    return o;
  }
  static PdfObject make_real(double v) {
    PdfObject o;
    o.kind = Kind::Real;
    o.real_v = v;
    return o;
  }
  static PdfObject make_string(std::string s) {
    PdfObject o;
    o.kind = Kind::String;
    o.text = std::move(s);
    return o;
  }
  static PdfObject make_name(std::string s) {
    PdfObject o;
    o.kind = Kind::Name;
    o.text = std::move(s);
    return o;
  }
  static PdfObject make_array() {
    PdfObject o;
    o.kind = Kind::Array;
    return o;
  }
  static PdfObject make_dict() {
    PdfObject o;
    o.kind = Kind::Dict;
    return o;
  }
  static PdfObject make_ref(int num, int gen = 0) {
    PdfObject o;
    o.kind = Kind::Ref;
    o.ref_num = num;
    o.ref_gen = gen;
    return o;
  }

  bool is_null() const { return kind == Kind::Null; }
  bool is_number() const { return kind == Kind::Int || kind == Kind::Real; }
  bool is_name(const std::string& n) const { return kind == Kind::Name && text == n; }

  double as_number() const {
    if (kind == Kind::Int) return static_cast<double>(int_v);
    if (kind == Kind::Real) return real_v;
    return 0.0;
  }
  std::int64_t as_int() const {
    if (kind == Kind::Int) return int_v;
    if (kind == Kind::Real) return static_cast<std::int64_t>(real_v);
    return 0;
  }

  /// Dict lookup; returns a Null object when absent.
  const PdfObject& get(const std::string& key) const;
  PdfObject* find(const std::string& key);
  bool has(const std::string& key) const;
  void set(const std::string& key, PdfObject value);
  void erase(const std::string& key);

  /// Serializes this object in PDF syntax (no leading/trailing whitespace).
  std::string serialize() const;
};

/// Formats a number the way the writer emits it: integers without a dot,
/// reals trimmed of trailing zeros.
std::string format_pdf_number(double v);

}  // namespace revguard::pdf
