#pragma once

// HTTP client for the language-model generation service.
//
//   POST /generate       {greedy, max_new_tokens, prompt, stop, temperature}
//                     -> {stop_reason, subword_count_of_prompt, text}
//   POST /subword_count  {text} -> {subword_count}
//   GET  /manifest       -> {model_id, registry_version}
//
// Bodies are JSON with keys in sorted order.

#include <memory>
#include <string>

#include "json.hpp"
#include "ubar/orchestrator.hpp"

namespace ubar {

// Environment variable that overrides the configured endpoint.
inline constexpr const char* kLmEndpointEnv = "UBAR_LM_ENDPOINT";

struct LmParams {
  std::string endpoint = "http://127.0.0.1:8765";
  bool greedy = true;
  double temperature = 0.7;  // only meaningful when greedy is false
  int retries = 2;           // extra attempts after a transport failure
  int timeout_seconds = 60;
};

// `configured` unless the override variable is set and non-empty.
std::string resolve_endpoint(const std::string& configured);

class LmClient final : public Decoder {
 public:
  // Fetches the manifest and checks its registry version against
  // kRegistryVersion. Throws DecoderError if the service is unreachable and
  // ConfigError on a registry mismatch.
  static std::shared_ptr<LmClient> connect(const LmParams& params);

  Decoded generate_until(const DecodeRequest& request) const override;
  Measurer measurer() const override;

  // Exact subword count of `seq` under the service tokenizer.
  std::size_t subword_count(const TokenSeq& seq) const;

  const std::string& model_id() const { return model_id_; }
  const LmParams& params() const { return params_; }

  // Request body for a decode request, as sent on the wire.
  static std::string generate_body(const DecodeRequest& request, const LmParams& params);

 private:
  explicit LmClient(LmParams params) : params_(std::move(params)) {}
  nlohmann::json call(const std::string& method, const std::string& path, const std::string& body) const;

  LmParams params_;
  std::string model_id_;
};

// Interprets a /generate response: cuts the text at the first stop token and
// appends the stop token when the service reports stop_token without it.
Decoded decode_generate_response(const nlohmann::json& response, const std::string& stop);

}  // namespace ubar
