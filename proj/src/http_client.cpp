#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <regex>

#include "httplib.h"
#include "json.hpp"
#include "revguard/errors.hpp"
#include "revguard/review.hpp"

namespace revguard {

namespace {

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(url, m, re)) {
    throw ClientUnavailable("bad endpoint url: " + url);
  }
  ParsedUrl p;
  p.base = m[1];
  p.path = m[2].matched && m[2].length() > 0 ? std::string(m[2]) : "/";
  return p;
}

// Bounds concurrent requests to the configured max_in_flight.
class InFlightGate {
 public:
  explicit InFlightGate(int limit) : limit_(std::max(1, limit)) {}

  struct Ticket {
    InFlightGate& gate;
    ~Ticket() {
      std::lock_guard<std::mutex> lock(gate.mu_);
      --gate.active_;
      gate.cv_.notify_one();
    }
  };

  Ticket acquire() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return active_ < limit_; });
    ++active_;
    return Ticket{*this};
  }

 private:
  int limit_;
  int active_ = 0;
  std::mutex mu_;
  std::condition_variable cv_;
};

class HttpReviewerClient final : public ReviewerClient {
 public:
  explicit HttpReviewerClient(HttpClientConfig config)
      : config_(std::move(config)), gate_(config_.max_in_flight) {
    if (config_.timeout_seconds <= 0) throw ClientUnavailable("timeout must be positive");
    url_ = split_url(config_.endpoint);
  }

  std::string complete(const std::string& input) override {
    auto ticket = gate_.acquire();
    nlohmann::json body{{"model", config_.model_id}, {"input", input}};
    const std::string payload = body.dump();

    std::string last_error;
    bool timed_out = false;
    // One attempt plus up to two idempotent retries on transport failure.
    for (int attempt = 0; attempt < 3; ++attempt) {
      httplib::Client cli(url_.base);
      cli.set_connection_timeout(static_cast<time_t>(config_.timeout_seconds),
                                 suseconds(config_.timeout_seconds));
      cli.set_read_timeout(static_cast<time_t>(config_.timeout_seconds),
                           suseconds(config_.timeout_seconds));
      if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key != nullptr && *key != '\0') {
          cli.set_default_headers({{"Authorization", std::string("Bearer ") + key}});
        }
      }
      auto res = cli.Post(url_.path, payload, "application/json");
      if (!res) {
        timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                    res.error() == httplib::Error::Read;
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status >= 500) {
        last_error = "server status " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        throw ClientUnavailable("endpoint returned status " + std::to_string(res->status));
      }
      std::string output;
      try {
        auto parsed = nlohmann::json::parse(res->body);
        output = parsed.at("output").get<std::string>();
      } catch (const std::exception& e) {
        throw ClientUnavailable(std::string("bad response body: ") + e.what());
      }
      audit(input, output);
      return output;
    }
    if (timed_out) throw Timeout(config_.endpoint + ": " + last_error);
    throw ClientUnavailable(config_.endpoint + ": " + last_error);
  }

  std::string model_id() const override { return config_.model_id; }

 private:
  static time_t suseconds(double seconds) {
    double frac = seconds - static_cast<time_t>(seconds);
    return static_cast<time_t>(frac * 1e6);
  }

  HttpClientConfig config_;
  ParsedUrl url_;
  InFlightGate gate_;
};

}  // namespace

std::unique_ptr<ReviewerClient> make_http_client(const HttpClientConfig& config) {
  return std::make_unique<HttpReviewerClient>(config);
}

}  // namespace revguard
