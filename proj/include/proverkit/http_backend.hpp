#pragma once

// HTTP generation/verification clients.
//
//   POST /v1/generate {"statement","mode","n","max_tokens","temperature","seed"}
//     -> {"completions":[{"text","tokens"}]}
//   POST /v1/verify {"theorem","code","timeout_s"}
//     -> {"status","messages"}
//
// Transport failures retry with exponential backoff; verdicts and malformed
// payloads never retry. Request timeouts surface as BackendErrc::Timeout for
// generation and as a timeout verdict for verification.

#include <memory>

#include "proverkit/backend.hpp"

namespace proverkit::backend {

struct HttpConfig {
  std::string base_url;         // e.g. "http://127.0.0.1:8546"
  int max_retries = 3;          // additional tries after the first
  int backoff_initial_ms = 50;  // doubles per retry
  int max_inflight = 8;
  double request_timeout_s = 120.0;
};

namespace detail {
class InflightGate;
}

class HttpGenerator : public Generator {
 public:
  explicit HttpGenerator(HttpConfig cfg);
  std::vector<GenCompletion> generate(const GenRequest& req) override;

 private:
  HttpConfig cfg_;
  std::shared_ptr<detail::InflightGate> gate_;
};

class HttpVerifier : public Verifier {
 public:
  explicit HttpVerifier(HttpConfig cfg);
  Verdict verify_code(const std::string& theorem_text, const std::string& code,
                      double timeout_s) override;

 private:
  HttpConfig cfg_;
  std::shared_ptr<detail::InflightGate> gate_;
};

}  // namespace proverkit::backend
