#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "revguard/pdf/object.hpp"

namespace revguard::pdf {

struct XrefEntry {
  enum class Where { Free, Offset, InObjectStream };
  Where where = Where::Free;
  std::int64_t offset = 0;  // byte offset for Where::Offset
  int gen = 0;
  int container_num = 0;  // object-stream number for Where::InObjectStream
  int index_in_stream = 0;
};

/// Parsed cross-reference state of a PDF file plus object access. Immutable
/// after parse; shared by the document model and the incremental updater.
class PdfFile {
 public:
  /// Parses the xref chain and trailer. Throws MalformedPdf / EncryptedPdf.
  static std::shared_ptr<PdfFile> parse(std::string bytes);

  const std::string& bytes() const { return bytes_; }
  const PdfObject& trailer() const { return trailer_; }
  bool uses_xref_stream() const { return uses_xref_stream_; }
  std::int64_t last_startxref() const { return last_startxref_; }
  int max_object_number() const { return max_obj_num_; }
  const std::map<int, XrefEntry>& xref() const { return xref_; }

  /// Fetches and caches an indirect object; resolves object-stream entries.
  const PdfObject& object(int num) const;

  /// Follows a Ref (possibly chained) to the concrete object.
  const PdfObject& resolve(const PdfObject& o) const;

  /// Fully decoded stream payload (applies FlateDecode / ASCIIHexDecode and
  /// PNG predictors). Throws MalformedPdf on unsupported filters.
  std::string decoded_stream(const PdfObject& stream) const;

  /// Page dictionaries in document order with inherited attributes
  /// (/Resources, /MediaBox) merged in, plus their object numbers.
  struct PageRecord {
    int object_number;
    PdfObject dict;
  };
  const std::vector<PageRecord>& pages() const { return pages_; }

 private:
  PdfFile() = default;
  void parse_xref_chain();
  void parse_xref_classic(std::size_t pos, PdfObject& trailer_out);
  void parse_xref_stream_at(std::size_t pos, PdfObject& trailer_out);
  void rebuild_xref_by_scan();
  void collect_pages();
  PdfObject parse_object_at(std::size_t offset, int expected_num) const;
  PdfObject extract_from_object_stream(int container, int index) const;

  std::string bytes_;
  std::map<int, XrefEntry> xref_;
  PdfObject trailer_;
  std::vector<PageRecord> pages_;
  std::int64_t last_startxref_ = 0;
  int max_obj_num_ = 0;
  bool uses_xref_stream_ = false;
  mutable std::mutex cache_mutex_;  // object() may run from concurrent readers
  mutable std::map<int, PdfObject> cache_;
};

/// Low-level tokenizer shared by the object parser and the content-stream
/// interpreter.
class Lexer {
 public:
  Lexer(const std::string& data, std::size_t pos = 0) : data_(data), pos_(pos) {}

  struct Token {
    enum class Type {
      End,
      Number,
      String,
      Name,
      ArrayOpen,
      ArrayClose,
      DictOpen,
      DictClose,
      Keyword,  // obj, endobj, stream, R, true, false, null, operators...
    };
    Type type = Type::End;
    std::string text;   // string bytes / name text / keyword
    double number = 0;
    bool is_integer = false;
  };

  Token next();
  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }
  const std::string& data() const { return data_; }

  /// Parses a complete object starting at the current position (no stream
  /// handling; the caller deals with `stream` keywords).
  PdfObject parse_value(const Token& first);
  PdfObject parse_value();

 private:
  void skip_ws_and_comments();
  const std::string& data_;
  std::size_t pos_ = 0;
};

bool is_pdf_whitespace(unsigned char c);
bool is_pdf_delimiter(unsigned char c);

}  // namespace revguard::pdf
