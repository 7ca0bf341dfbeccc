#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "revguard/attack.hpp"

namespace revguard {

struct CorpusSpec {
  int n_clean = 10;
  int n_attacked = 10;
  std::uint64_t seed = 0;
  /// Sampling weights per technique; empty means uniform over all five.
  std::vector<std::pair<HidingTechnique, double>> technique_weights;
};

struct CorpusEntry {
  std::string path;  // relative to the manifest's directory
  std::string label;  // "clean" | "attacked"
  std::optional<std::string> technique;
  std::optional<std::string> instruction;
  std::uint64_t seed = 0;
};

struct CorpusManifest {
  int version = 1;
  std::uint64_t seed = 0;
  std::string base_dir;  // set on load/generate; not serialized
  std::vector<CorpusEntry> entries;

  std::string resolve_path(const CorpusEntry& e) const;
};

/// Instructions used for the attacked half of the corpus. Every phrase trips
/// at least two screener rules (score > 0.5), at least one of which is the
/// override or rating directive.
const std::vector<std::string>& attack_phrase_bank();

/// Deterministic multi-page synthetic manuscript (title, abstract, three
/// sections, references) as PDF bytes.
std::string build_synthetic_paper(std::uint64_t seed, int index);

/// Generates n_clean papers plus n_attacked compromised twins under out_dir
/// and writes manifest.json. Fully determined by the spec. Throws IoFailure.
CorpusManifest generate_corpus(const CorpusSpec& spec, const std::string& out_dir);

CorpusManifest load_manifest(const std::string& manifest_path);
void save_manifest(const CorpusManifest& manifest, const std::string& manifest_path);

}  // namespace revguard
