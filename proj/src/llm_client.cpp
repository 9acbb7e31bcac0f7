#include <memory>
#include <semaphore>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "simhra/backend.hpp"
#include "simhra/errors.hpp"

namespace simhra {

using nlohmann::json;

namespace {

// Splits "https://host:port/v1" into the client origin and a path prefix.
struct EndpointParts {
  std::string origin;
  std::string path_prefix;
};

EndpointParts split_endpoint(const std::string& base) {
  std::string rest = base;
  std::string scheme;
  if (auto pos = rest.find("://"); pos != std::string::npos) {
    scheme = rest.substr(0, pos + 3);
    rest = rest.substr(pos + 3);
  }
  EndpointParts parts;
  if (auto slash = rest.find('/'); slash != std::string::npos) {
    parts.origin = scheme + rest.substr(0, slash);
    parts.path_prefix = rest.substr(slash);
    while (!parts.path_prefix.empty() && parts.path_prefix.back() == '/') {
      parts.path_prefix.pop_back();
    }
  } else {
    parts.origin = scheme + rest;
  }
  return parts;
}

bool retryable_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

}  // namespace

struct LlmChatClient::Impl {
  LlmOptions options;
  EndpointParts endpoint;
  httplib::Client http;
  std::counting_semaphore<> in_flight;

  explicit Impl(LlmOptions opts)
      : options(std::move(opts)),
        endpoint(split_endpoint(options.endpoint_base)),
        http(endpoint.origin),
        in_flight(std::max(1, options.max_in_flight)) {
    http.set_connection_timeout(30, 0);
    http.set_read_timeout(300, 0);
    http.set_default_headers({{"Authorization", "Bearer " + options.api_key}});
  }
};

LlmChatClient::LlmChatClient(LlmOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

LlmChatClient::~LlmChatClient() = default;

std::string LlmChatClient::complete(const std::vector<ChatMessage>& messages,
                                    const DecodingParams& decoding, std::optional<long> seed) {
  json payload{{"model", impl_->options.model},
               {"temperature", decoding.temperature},
               {"max_tokens", decoding.max_tokens_per_turn},
               {"stream", false}};
  json msgs = json::array();
  for (const auto& m : messages) {
    msgs.push_back(json{{"role", m.role}, {"content", m.content}});
  }
  payload["messages"] = std::move(msgs);
  if (seed) payload["seed"] = *seed;
  const std::string body = payload.dump();
  const std::string path = impl_->endpoint.path_prefix + "/chat/completions";

  impl_->in_flight.acquire();
  struct Release {
    std::counting_semaphore<>& sem;
    ~Release() { sem.release(); }
  } release{impl_->in_flight};

  const RetryPolicy& retry = impl_->options.retry;
  std::string last_error = "no attempt made";
  auto backoff = retry.initial_backoff;
  for (int attempt = 1; attempt <= retry.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto result = impl_->http.Post(path, body, "application/json");
    if (!result) {
      last_error = "connection failed: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status < 200 || result->status >= 300) {
      last_error = "HTTP " + std::to_string(result->status);
      if (retryable_status(result->status)) continue;
      throw TransportError("chat completion failed (" + last_error + ")");
    }
    try {
      const json doc = json::parse(result->body);
      const std::string content =
          doc.at("choices").at(0).at("message").at("content").get<std::string>();
      if (content.empty()) {
        last_error = "empty completion content";
        continue;
      }
      return content;
    } catch (const json::exception& e) {
      last_error = std::string("malformed completion response: ") + e.what();
      continue;
    }
  }
  throw TransportError("chat completion failed after " + std::to_string(retry.max_attempts) +
                       " attempts (" + last_error + ")");
}

}  // namespace simhra
