#pragma once

// Shared helpers for the unit and acceptance suites.

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <string>

#include "revguard/review.hpp"

namespace revguard::testing {

/// Collision-free temp file path (not created).
inline std::string temp_path(const std::string& suffix) {
  static int counter = 0;
  return (std::filesystem::temp_directory_path() /
          ("revguard_t_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + suffix))
      .string();
}

/// Surrogate that rewards each "MUST" token in its input with +1 overall on
/// top of a base rating of 4, capped at 10.
class MustCountingClient final : public ReviewerClient {
 public:
  std::string complete(const std::string& input) override {
    int musts = 0;
    for (std::size_t pos = input.find("MUST"); pos != std::string::npos;
         pos = input.find("MUST", pos + 4)) {
      ++musts;
    }
    StructuredReview r;
    r.summary = "Surrogate evaluation of the draft.";
    r.strengths = {"None recorded"};
    r.weaknesses = {"None recorded"};
    int overall = std::min(10, 4 + musts);
    r.novelty = r.technical_quality = r.clarity = r.evaluation_quality = overall;
    r.overall = overall;
    r.recommendation = overall >= 9 ? Recommendation::WeakAccept : Recommendation::Borderline;
    return render_review(r);
  }
  std::string model_id() const override { return "mock-must-counter"; }
};

}  // namespace revguard::testing
