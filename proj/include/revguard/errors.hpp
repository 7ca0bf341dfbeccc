#pragma once

#include <stdexcept>
#include <string>

namespace revguard {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A documented precondition was violated by the caller.
class PreconditionViolation : public Error {
 public:
  explicit PreconditionViolation(const std::string& why)
      : Error("precondition violated: " + why) {}
};

// ---- pdf_model ----
class MalformedPdf : public Error {
 public:
  explicit MalformedPdf(const std::string& why) : Error("malformed pdf: " + why) {}
};
class EncryptedPdf : public Error {
 public:
  EncryptedPdf() : Error("encrypted pdf: password-protected input is not supported") {}
};
class RenderFailure : public Error {
 public:
  explicit RenderFailure(const std::string& why) : Error("render failure: " + why) {}
};
class OcrUnavailable : public Error {
 public:
  explicit OcrUnavailable(const std::string& why) : Error("ocr unavailable: " + why) {}
};

// ---- attack_toolkit ----
class AnchorNotFound : public Error {
 public:
  explicit AnchorNotFound(const std::string& why) : Error("anchor not found: " + why) {}
};
class WriteFailure : public Error {
 public:
  explicit WriteFailure(const std::string& why) : Error("write failure: " + why) {}
};
class SurrogateUnavailable : public Error {
 public:
  explicit SurrogateUnavailable(const std::string& why)
      : Error("surrogate unavailable: " + why) {}
};

// ---- prompt_screener ----
class InvalidRule : public Error {
 public:
  explicit InvalidRule(const std::string& why) : Error("invalid rule: " + why) {}
};

// ---- review_client ----
class EmptyDocument : public Error {
 public:
  EmptyDocument() : Error("empty document text") {}
};
class ClientUnavailable : public Error {
 public:
  explicit ClientUnavailable(const std::string& why) : Error("client unavailable: " + why) {}
};
class Timeout : public Error {
 public:
  explicit Timeout(const std::string& why) : Error("timeout: " + why) {}
};
class ParseError : public Error {
 public:
  ParseError(const std::string& field, int line)
      : Error("parse error: missing or invalid field '" + field + "' (line " +
              std::to_string(line) + ")"),
        field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};
class AmbiguousRecommendation : public Error {
 public:
  explicit AmbiguousRecommendation(const std::string& line)
      : Error("ambiguous recommendation: '" + line + "'") {}
};

// ---- trap_engine ----
class NonceCollisionExhausted : public Error {
 public:
  NonceCollisionExhausted() : Error("nonce collision retries exhausted") {}
};

// ---- pipeline / corpus ----
class IoFailure : public Error {
 public:
  explicit IoFailure(const std::string& why) : Error("io failure: " + why) {}
};
class UnknownDocumentId : public Error {
 public:
  explicit UnknownDocumentId(const std::string& id)
      : Error("unknown document id: " + id) {}
};
class NoData : public Error {
 public:
  explicit NoData(const std::string& why) : Error("no data: " + why) {}
};

}  // namespace revguard
