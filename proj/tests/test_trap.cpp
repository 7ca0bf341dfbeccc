#include "revguard/trap.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "revguard/corpus.hpp"
#include "revguard/errors.hpp"
#include "support.hpp"

using namespace revguard;

namespace {
std::string fixture(const char* rel) { return std::string(REVGUARD_SOURCE_DIR) + "/" + rel; }
}  // namespace

TEST_CASE("make_trap: deterministic under seed") {
  TrapPattern a = make_trap(42, "host text");
  TrapPattern b = make_trap(42, "host text");
  CHECK(a.nonce == b.nonce);
  CHECK(a.directive == b.directive);
}

TEST_CASE("make_trap: nonce shape and alphabet") {
  for (std::uint64_t seed : {1ULL, 42ULL, 999ULL, 123456789ULL}) {
    TrapPattern t = make_trap(seed, "");
    CHECK(t.nonce.size() == 12);
    for (char c : t.nonce) {
      CAPTURE(c);
      CHECK(trap_alphabet().find(c) != std::string::npos);
    }
    // Excluded confusable characters never appear.
    CHECK(t.nonce.find_first_of("0O1lI") == std::string::npos);
    // Nonce occurs exactly once in its directive.
    CHECK(count_trap_occurrences(t.directive, t) == 1);
  }
}

TEST_CASE("make_trap: collision with the host forces a different nonce") {
  TrapPattern original = make_trap(42, "");
  std::string host = "preface " + original.nonce + " trailer";
  TrapPattern replacement = make_trap(42, host);
  CHECK(replacement.nonce != original.nonce);
  CHECK(detect_trap(host, replacement).z == false);
}

TEST_CASE("make_trap: a host swallowing the whole retry chain exhausts the retries") {
  // Append whatever nonce the next attempt would produce, eight times; the
  // ninth call has nowhere left to go.
  std::string host;
  for (int i = 0; i < 8; ++i) host += " " + make_trap(42, host).nonce;
  CHECK_THROWS_AS(make_trap(42, host), NonceCollisionExhausted);
}

TEST_CASE("inject_trap: appends after a blank line, host is a prefix") {
  TrapPattern t = make_trap(7, "abc");
  std::string out = inject_trap("abc", t);
  CHECK(out.rfind("abc", 0) == 0);
  CHECK(out.find("\n\n") == 3);
  CHECK(count_trap_occurrences(out, t) == 1);
}

TEST_CASE("inject_trap: empty host") {
  TrapPattern t = make_trap(7, "");
  CHECK(inject_trap("", t) == "\n\n" + t.directive);
}

TEST_CASE("inject_trap: double injection is observable via the occurrence count") {
  TrapPattern t = make_trap(7, "body");
  std::string once = inject_trap("body", t);
  std::string twice = inject_trap(once, t);
  CHECK(count_trap_occurrences(once, t) == 1);
  CHECK(count_trap_occurrences(twice, t) == 2);
}

TEST_CASE("detect_trap: exact echo and absence") {
  TrapPattern t = make_trap(11, "");
  std::string review = "The paper is fine. Token " + t.nonce + " appears here.";
  TrapVerdict v = detect_trap(review, t);
  CHECK(v.z);
  CHECK(v.evidence == t.nonce);
  CHECK(review.substr(v.offset, t.nonce.size()) == t.nonce);

  CHECK_FALSE(detect_trap("No canary in this text at all.", t).z);
}

TEST_CASE("detect_trap: hyphen-split and case-mangled echoes still match") {
  TrapPattern t = make_trap(23, "");
  // Split the nonce across a line break with a hyphen.
  std::string mangled = t.nonce.substr(0, 5) + "-\n" + t.nonce.substr(5);
  for (auto& c : mangled) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::string review = "Verdict follows " + mangled + " end of report.";
  TrapVerdict v = detect_trap(review, t);
  CHECK(v.z);
  CHECK(v.evidence.find('-') != std::string::npos);
}

TEST_CASE("detect_trap: appended nonce always detected, human corpus never") {
  TrapPattern t = make_trap(42, "");
  namespace fs = std::filesystem;
  int reviews = 0;
  for (const auto& entry : fs::directory_iterator(fixture("data/human_reviews"))) {
    std::ifstream in(entry.path());
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string review = ss.str();
    ++reviews;
    CHECK_FALSE(detect_trap(review, t).z);
    CHECK(detect_trap(review + " " + t.nonce, t).z);
  }
  CHECK(reviews == 10);
}

TEST_CASE("inject_trap_pdf: directive is parser-visible only") {
  PdfDocument clean = load_document(build_synthetic_paper(51, 0));
  SyntheticRenderBackend synth;
  std::string clean_render = document_render_text(clean, synth);

  TrapPattern t = make_trap(9, "");
  PdfDocument trapped = inject_trap_pdf(clean, t);
  CHECK(document_parser_text(trapped).find(t.directive) != std::string::npos);
  CHECK(document_render_text(trapped, synth) == clean_render);
  CHECK(detect_trap(document_parser_text(trapped), t).z);
}

TEST_CASE("trap registry: save and reload round-trips") {
  std::string path = revguard::testing::temp_path(".json");
  TrapRegistry reg;
  reg["paper-001"] = {"ABCDEFGHJKMN", 42, 1700000000};
  reg["paper-002"] = {"PQRSTUVWXYZ2", 43, 1700000001};
  save_trap_registry(reg, path);
  TrapRegistry loaded = load_trap_registry(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded["paper-001"].nonce == "ABCDEFGHJKMN");
  CHECK(loaded["paper-001"].seed == 42);
  CHECK(loaded["paper-002"].issued_at == 1700000001);
  std::remove(path.c_str());

  CHECK(load_trap_registry("/nonexistent/registry.json").empty());
}
