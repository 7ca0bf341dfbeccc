#include "revguard/pdf/object.hpp"

#include <cmath>
#include <cstdio>

namespace revguard::pdf {

namespace {
const PdfObject kNull;

bool name_char_needs_escape(unsigned char c) {
  if (c <= 0x20 || c >= 0x7F) return true;
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
    case '#':
      return true;
    default:
      return false;
  }
}
}  // namespace

const PdfObject& PdfObject::get(const std::string& key) const {
  for (const auto& [k, v] : dict) {
    if (k == key) return v;
  }
  return kNull;
}

PdfObject* PdfObject::find(const std::string& key) {
  for (auto& [k, v] : dict) {
    if (k == key) return &v;
  }
  return nullptr;
}

bool PdfObject::has(const std::string& key) const {
  for (const auto& [k, v] : dict) {
    if (k == key) return true;
  }
  return false;
}

void PdfObject::set(const std::string& key, PdfObject value) {
  for (auto& [k, v] : dict) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  dict.emplace_back(key, std::move(value));
}

void PdfObject::erase(const std::string& key) {
  for (auto it = dict.begin(); it != dict.end(); ++it) {
    if (it->first == key) {
      dict.erase(it);
      return;
    }
  }
}

std::string format_pdf_number(double v) {
  if (std::floor(v) == v && std::fabs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.5f", v);
  std::string s = buf;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

std::string PdfObject::serialize() const {
  switch (kind) {
    case Kind::Null:
      return "null";
    case Kind::Bool:
      return bool_v ? "true" : "false";
    case Kind::Int:
      return std::to_string(int_v);
    case Kind::Real:
      return format_pdf_number(real_v);
    case Kind::String: {
      std::string out = "(";
      for (unsigned char c : text) {
        switch (c) {
          case '(':
            out += "\\(";
            break;
          case ')':
            out += "\\)";
            break;
          case '\\':
            out += "\\\\";
            break;
          case '\r':
            out += "\\r";
            break;
          case '\n':
            out += "\\n";
            break;
          default:
            if (c < 0x20 || c >= 0x7F) {
              char buf[8];
              std::snprintf(buf, sizeof(buf), "\\%03o", c);
              out += buf;
            } else {
              out.push_back(static_cast<char>(c));
            }
        }
      }
      out += ")";
      return out;
    }
    case Kind::Name: {
      std::string out = "/";
      for (unsigned char c : text) {
        if (name_char_needs_escape(c)) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "#%02X", c);
          out += buf;
        } else {
          out.push_back(static_cast<char>(c));
        }
      }
      return out;
    }
    case Kind::Array: {
      std::string out = "[";
      for (std::size_t i = 0; i < array.size(); ++i) {
        if (i) out.push_back(' ');
        out += array[i].serialize();
      }
      out += "]";
      return out;
    }
    case Kind::Dict:
    case Kind::Stream: {
      std::string out = "<<";
      for (const auto& [k, v] : dict) {
        out += " " + PdfObject::make_name(k).serialize() + " " + v.serialize();
      }
      out += " >>";
      if (kind == Kind::Stream) {
        out += "\nstream\n";
        out += stream_data;
        out += "\nendstream";
      }
      return out;
    }
    case Kind::Ref:
      return std::to_string(ref_num) + " " + std::to_string(ref_gen) + " R";
  }
  return "null";
}

}  // namespace revguard::pdf
