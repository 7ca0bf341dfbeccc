#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "revguard/pdf_model.hpp"

namespace revguard {

enum class TrapPlacement { AppendToText, HiddenPdfSpan };

/// An editor-issued canary: a directive instructing a language model to echo
/// a nonce that a human reviewer would never reproduce.
struct TrapPattern {
  std::string nonce;      // 12 chars, unambiguous alphabet (no 0/O/1/l/I)
  std::string directive;  // contains the nonce exactly once
  TrapPlacement placement = TrapPlacement::AppendToText;
  std::uint64_t seed = 0;
};

struct TrapVerdict {
  bool z = false;
  std::string evidence;   // matched substring from the review
  std::size_t offset = 0; // char offset of the match
};

/// The nonce alphabet (A-Z without I/O, digits 2-9).
const std::string& trap_alphabet();

/// Deterministic trap from seed. If the nonce happens to occur in
/// `host_text` (under the same tolerant matching used by detect_trap), it is
/// re-derived, up to 8 times, then NonceCollisionExhausted.
TrapPattern make_trap(std::uint64_t seed, const std::string& host_text);

/// AppendToText realization: host text, a blank line, then the directive.
/// The original text is a prefix of the result.
std::string inject_trap(const std::string& text, const TrapPattern& trap);

/// Counts nonce occurrences under tolerant matching; callers use this to
/// avoid double injection.
int count_trap_occurrences(const std::string& text, const TrapPattern& trap);

/// HiddenPdfSpan realization: plants the directive inside the PDF as an
/// invisible white-text span, deliberately reusing the attack toolkit's
/// embedding primitive.
PdfDocument inject_trap_pdf(const PdfDocument& doc, const TrapPattern& trap);

/// z = true iff the nonce appears after case-folding with any run of
/// non-alphanumeric characters allowed between nonce characters (so
/// "ZE-PH..." style line-break mangling still matches).
TrapVerdict detect_trap(const std::string& review_text, const TrapPattern& trap);

/// Trap registry: document-id -> issued trap. Serialized as JSON so editors
/// can audit which trap went to which manuscript.
struct TrapRecord {
  std::string nonce;
  std::uint64_t seed = 0;
  std::int64_t issued_at = 0;  // unix seconds
};

using TrapRegistry = std::map<std::string, TrapRecord>;

TrapRegistry load_trap_registry(const std::string& path);  // missing file -> empty
void save_trap_registry(const TrapRegistry& registry, const std::string& path);

}  // namespace revguard
