#include "proverkit/http_backend.hpp"

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace proverkit::backend {

namespace detail {

class InflightGate {
 public:
  explicit InflightGate(int n) : slots_(n > 0 ? n : 1) {}

  void acquire() {
    std::unique_lock lk(m_);
    cv_.wait(lk, [&] { return slots_ > 0; });
    --slots_;
  }

  void release() {
    std::lock_guard lk(m_);
    ++slots_;
    cv_.notify_one();
  }

 private:
  std::mutex m_;
  std::condition_variable cv_;
  int slots_;
};

}  // namespace detail

namespace {

using nlohmann::json;

struct GateHold {
  detail::InflightGate& gate;
  explicit GateHold(detail::InflightGate& g) : gate(g) { gate.acquire(); }
  ~GateHold() { gate.release(); }
};

bool is_timeout_error(httplib::Error e) {
  return e == httplib::Error::ConnectionTimeout || e == httplib::Error::Read ||
         e == httplib::Error::Write;
}

void set_timeouts(httplib::Client& cli, double seconds) {
  auto usec = static_cast<time_t>(seconds * 1e6);
  cli.set_connection_timeout(0, usec);
  cli.set_read_timeout(0, usec);
  cli.set_write_timeout(0, usec);
}

void backoff_sleep(int initial_ms, int attempt) {
  std::this_thread::sleep_for(std::chrono::milliseconds(initial_ms << attempt));
}

std::optional<VerdictStatus> status_from_string(std::string_view s) {
  if (s == "pass") return VerdictStatus::Pass;
  if (s == "fail") return VerdictStatus::Fail;
  if (s == "timeout") return VerdictStatus::Timeout;
  if (s == "lint_reject") return VerdictStatus::LintReject;
  return std::nullopt;
}

}  // namespace

HttpGenerator::HttpGenerator(HttpConfig cfg)
    : cfg_(std::move(cfg)),
      gate_(std::make_shared<detail::InflightGate>(cfg_.max_inflight)) {}

std::vector<GenCompletion> HttpGenerator::generate(const GenRequest& req) {
  json body = {
      {"statement", req.statement_text}, {"mode", to_string(req.mode)},
      {"n", req.n},                      {"max_tokens", req.max_tokens},
      {"temperature", req.temperature},
  };
  if (req.seed) body["seed"] = *req.seed;
  const std::string payload = body.dump();

  GateHold hold(*gate_);
  for (int attempt = 0;; ++attempt) {
    httplib::Client cli(cfg_.base_url);
    set_timeouts(cli, cfg_.request_timeout_s);
    auto res = cli.Post("/v1/generate", payload, "application/json");

    if (!res) {
      if (is_timeout_error(res.error()))
        throw BackendError(BackendErrc::Timeout,
                           "generation timed out against " + cfg_.base_url);
      if (attempt >= cfg_.max_retries)
        throw BackendError(BackendErrc::Unavailable,
                           "generator unreachable: " + httplib::to_string(res.error()));
      backoff_sleep(cfg_.backoff_initial_ms, attempt);
      continue;
    }
    if (res->status >= 500) {
      if (attempt >= cfg_.max_retries)
        throw BackendError(BackendErrc::Unavailable,
                           "generator returned HTTP " + std::to_string(res->status));
      backoff_sleep(cfg_.backoff_initial_ms, attempt);
      continue;
    }
    if (res->status != 200)
      throw BackendError(BackendErrc::Unavailable,
                         "generator rejected the request: HTTP " +
                             std::to_string(res->status));

    json j = json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("completions") || !j["completions"].is_array())
      throw BackendError(BackendErrc::MalformedResponse,
                         "generator response is not the expected JSON shape");

    std::vector<GenCompletion> out;
    for (const auto& item : j["completions"]) {
      if (!item.contains("text") || !item["text"].is_string())
        throw BackendError(BackendErrc::MalformedResponse,
                           "completion entry lacks a text field");
      GenCompletion c;
      c.full_text = item["text"].get<std::string>();
      c.extracted_code = extract_code(c.full_text);
      c.token_count = (item.contains("tokens") && item["tokens"].is_number_integer())
                          ? item["tokens"].get<int>()
                          : count_proxy_tokens(c.full_text);
      out.push_back(std::move(c));
    }
    return out;
  }
}

HttpVerifier::HttpVerifier(HttpConfig cfg)
    : cfg_(std::move(cfg)),
      gate_(std::make_shared<detail::InflightGate>(cfg_.max_inflight)) {}

Verdict HttpVerifier::verify_code(const std::string& theorem_text,
                                  const std::string& code, double timeout_s) {
  json body = {{"theorem", theorem_text}, {"code", code}, {"timeout_s", timeout_s}};
  const std::string payload = body.dump();

  GateHold hold(*gate_);
  auto started = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - started)
        .count();
  };

  for (int attempt = 0;; ++attempt) {
    httplib::Client cli(cfg_.base_url);
    // small margin so a server honoring timeout_s can answer first
    set_timeouts(cli, timeout_s + 0.25);
    auto res = cli.Post("/v1/verify", payload, "application/json");

    if (!res) {
      if (is_timeout_error(res.error())) {
        Verdict v;
        v.status = VerdictStatus::Timeout;
        v.messages.push_back("verification timed out after " +
                             std::to_string(timeout_s) + "s");
        v.wall_time_ms = elapsed_ms();
        return v;
      }
      if (attempt >= cfg_.max_retries)
        throw BackendError(BackendErrc::Unavailable,
                           "verifier unreachable: " + httplib::to_string(res.error()));
      backoff_sleep(cfg_.backoff_initial_ms, attempt);
      continue;
    }
    if (res->status >= 500) {
      if (attempt >= cfg_.max_retries)
        throw BackendError(BackendErrc::Unavailable,
                           "verifier returned HTTP " + std::to_string(res->status));
      backoff_sleep(cfg_.backoff_initial_ms, attempt);
      continue;
    }
    if (res->status != 200)
      throw BackendError(BackendErrc::Unavailable,
                         "verifier rejected the request: HTTP " +
                             std::to_string(res->status));

    json j = json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("status") || !j["status"].is_string())
      throw BackendError(BackendErrc::MalformedResponse,
                         "verifier response is not the expected JSON shape");
    auto status = status_from_string(j["status"].get<std::string>());
    if (!status)
      throw BackendError(BackendErrc::MalformedResponse,
                         "verifier returned unknown status '" +
                             j["status"].get<std::string>() + "'");

    Verdict v;
    v.status = *status;
    if (j.contains("messages") && j["messages"].is_array())
      for (const auto& m : j["messages"])
        if (m.is_string()) v.messages.push_back(m.get<std::string>());
    v.wall_time_ms = elapsed_ms();
    return v;
  }
}

}  // namespace proverkit::backend
