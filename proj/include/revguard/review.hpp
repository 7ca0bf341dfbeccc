#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace revguard {

enum class Recommendation { Reject, WeakReject, Borderline, WeakAccept, Accept };

/// Ordering rank: Reject=0 .. Accept=4.
int rank(Recommendation r);
const char* to_string(Recommendation r);
std::optional<Recommendation> recommendation_from_string(const std::string& s);

/// The nine-field structured review the reviewer prompt asks for.
struct StructuredReview {
  std::string summary;
  std::vector<std::string> strengths;
  std::vector<std::string> weaknesses;
  int novelty = 1;
  int technical_quality = 1;
  int clarity = 1;
  int evaluation_quality = 1;
  int overall = 1;
  Recommendation recommendation = Recommendation::Borderline;
  std::string raw_text;
};

/// Reviewer input triple: X = system || request || document.
struct ReviewPrompt {
  std::string system;
  std::string user_request;
  std::string document_text;
};

/// Separator used between the three input segments.
extern const char* const kInputSeparator;

/// The default structured-review request handed to reviewer models.
const std::string& default_review_request();

/// The default reviewer system prompt.
const std::string& default_system_prompt();

/// system || sep || request || sep || document. Throws EmptyDocument when the
/// document text is empty.
std::string assemble_input(const ReviewPrompt& prompt);

/// Transport-agnostic reviewer handle. Implementations must be safe to share
/// as read-only handles across threads.
class ReviewerClient {
 public:
  virtual ~ReviewerClient() = default;

  /// Returns the raw completion text for one assembled input.
  virtual std::string complete(const std::string& input) = 0;

  virtual std::string model_id() const = 0;

  /// When set, every completion is appended to this file as one JSON object
  /// per line.
  void set_audit_log(std::string path) { audit_log_path_ = std::move(path); }

 protected:
  void audit(const std::string& input, const std::string& output) const;
  std::string audit_log_path_;
};

/// Validates the input and performs the request. Raw completion text back.
std::string request_review(ReviewerClient& client, const std::string& input);

/// Config for the HTTP transport: single-turn completion over a JSON body
/// {"model": ..., "input": ...} answered by {"output": ...}.
struct HttpClientConfig {
  std::string endpoint;  // e.g. http://host:port/v1/review
  std::string model_id;
  double timeout_seconds = 30.0;
  int max_in_flight = 2;
  std::string api_key_env;  // name of the env var holding the credential
};

/// HTTP reviewer with up-to-2 idempotent retries on transport failure.
/// Throws ClientUnavailable after retries are exhausted and Timeout on
/// deadline overrun.
std::unique_ptr<ReviewerClient> make_http_client(const HttpClientConfig& config);

enum class MockProfile { Constant, InjectionSensitive, Strict };
std::optional<MockProfile> mock_profile_from_string(const std::string& s);

/// Deterministic stand-ins for the commercial reviewer models. Every profile
/// is a pure function of the input string.
std::unique_ptr<ReviewerClient> mock_reviewer(MockProfile profile);

enum class ParseMode {
  Tolerant,  // headings may drift in numbering, markdown markers, punctuation
  Strict,    // the exact numbered canonical headings are required
};

/// Parses a raw completion against the nine headings. Throws ParseError
/// (naming the missing field) or AmbiguousRecommendation.
StructuredReview parse_review(const std::string& raw, ParseMode mode = ParseMode::Tolerant);

/// Canonical rendering; parse_review(render_review(r)) preserves all
/// structured fields.
std::string render_review(const StructuredReview& review);

}  // namespace revguard
