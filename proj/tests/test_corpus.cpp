#include "revguard/corpus.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "revguard/errors.hpp"
#include "revguard/pdf_model.hpp"

using namespace revguard;
namespace fs = std::filesystem;

namespace {

std::string unique_dir(const char* tag) {
  static int counter = 0;
  auto p = fs::temp_directory_path() /
           (std::string("revguard_corpus_") + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct DirCleanup {
  std::string dir;
  ~DirCleanup() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
};

}  // namespace

TEST_CASE("generate_corpus: minimal 1+1 spec produces two files and a manifest") {
  std::string dir = unique_dir("minimal");
  DirCleanup cleanup{dir};
  CorpusSpec spec;
  spec.n_clean = 1;
  spec.n_attacked = 1;
  spec.seed = 3;
  CorpusManifest m = generate_corpus(spec, dir);
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0].label == "clean");
  CHECK(m.entries[1].label == "attacked");
  CHECK(fs::exists(m.resolve_path(m.entries[0])));
  CHECK(fs::exists(m.resolve_path(m.entries[1])));
  CHECK(fs::exists(fs::path(dir) / "manifest.json"));
  CHECK_FALSE(m.entries[1].instruction->empty());
  CHECK(m.entries[1].technique.has_value());
}

TEST_CASE("generate_corpus: identical specs produce byte-identical corpora") {
  CorpusSpec spec;
  spec.n_clean = 3;
  spec.n_attacked = 3;
  spec.seed = 7;
  std::string d1 = unique_dir("det_a");
  std::string d2 = unique_dir("det_b");
  DirCleanup c1{d1}, c2{d2};
  CorpusManifest m1 = generate_corpus(spec, d1);
  CorpusManifest m2 = generate_corpus(spec, d2);
  REQUIRE(m1.entries.size() == m2.entries.size());
  for (std::size_t i = 0; i < m1.entries.size(); ++i) {
    CHECK(slurp(m1.resolve_path(m1.entries[i])) == slurp(m2.resolve_path(m2.entries[i])));
  }
}

TEST_CASE("generate_corpus: ground truth holds by construction") {
  std::string dir = unique_dir("truth");
  DirCleanup cleanup{dir};
  CorpusSpec spec;
  spec.n_clean = 4;
  spec.n_attacked = 4;
  spec.seed = 11;
  CorpusManifest m = generate_corpus(spec, dir);
  for (const auto& entry : m.entries) {
    PdfDocument doc = load_document(slurp(m.resolve_path(entry)));
    if (entry.label == "attacked") {
      CHECK(document_parser_text(doc).find(*entry.instruction) != std::string::npos);
    } else {
      for (const auto& page : doc.pages) {
        for (const auto& span : page.spans) {
          CHECK(classify_visibility(span, page).visible);
        }
      }
    }
  }
}

TEST_CASE("synthetic papers span multiple pages and carry the expected outline") {
  PdfDocument doc = load_document(build_synthetic_paper(7, 0));
  CHECK(doc.page_count >= 2);
  std::string text = document_parser_text(doc);
  CHECK(text.find("Abstract") != std::string::npos);
  CHECK(text.find("1. Introduction") != std::string::npos);
  CHECK(text.find("References") != std::string::npos);
}

TEST_CASE("manifest json round-trips") {
  std::string dir = unique_dir("manifest");
  DirCleanup cleanup{dir};
  CorpusSpec spec;
  spec.n_clean = 2;
  spec.n_attacked = 2;
  spec.seed = 19;
  CorpusManifest m = generate_corpus(spec, dir);
  CorpusManifest loaded = load_manifest((fs::path(dir) / "manifest.json").string());
  CHECK(loaded.seed == m.seed);
  REQUIRE(loaded.entries.size() == m.entries.size());
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    CHECK(loaded.entries[i].path == m.entries[i].path);
    CHECK(loaded.entries[i].label == m.entries[i].label);
    CHECK(loaded.entries[i].technique == m.entries[i].technique);
    CHECK(loaded.entries[i].instruction == m.entries[i].instruction);
    CHECK(loaded.entries[i].seed == m.entries[i].seed);
  }
}

TEST_CASE("shipped phrase bank file matches the built-in bank") {
  std::ifstream in(std::string(REVGUARD_SOURCE_DIR) + "/data/attack_phrases.txt");
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  CHECK(lines == attack_phrase_bank());
}

TEST_CASE("generate_corpus: more attacked twins than clean bases cycles the bases") {
  std::string dir = unique_dir("cycle");
  DirCleanup cleanup{dir};
  CorpusSpec spec;
  spec.n_clean = 2;
  spec.n_attacked = 5;
  spec.seed = 23;
  CorpusManifest m = generate_corpus(spec, dir);
  REQUIRE(m.entries.size() == 7);
  int attacked = 0;
  for (const auto& e : m.entries) {
    if (e.label == "attacked") {
      ++attacked;
      PdfDocument doc = load_document(slurp(m.resolve_path(e)));
      CHECK(document_parser_text(doc).find(*e.instruction) != std::string::npos);
    }
  }
  CHECK(attacked == 5);
}

TEST_CASE("generate_corpus: degenerate spec is rejected") {
  CorpusSpec spec;
  spec.n_clean = 0;
  spec.n_attacked = 1;
  CHECK_THROWS_AS(generate_corpus(spec, unique_dir("bad")), PreconditionViolation);
}
