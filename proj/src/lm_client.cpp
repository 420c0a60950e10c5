#include "ubar/lm_client.hpp"

#include <cstdlib>

#include "httplib.h"
#include "ubar/error.hpp"

namespace ubar {

std::string resolve_endpoint(const std::string& configured) {
  const char* env = std::getenv(kLmEndpointEnv);
  return env && *env ? std::string(env) : configured;
}

std::shared_ptr<LmClient> LmClient::connect(const LmParams& params) {
  std::shared_ptr<LmClient> client(new LmClient(params));
  nlohmann::json manifest = client->call("GET", "/manifest", "");
  if (!manifest.contains("registry_version") || !manifest["registry_version"].is_string()) {
    throw DecoderError("manifest from " + params.endpoint + " has no registry_version");
  }
  const std::string version = manifest["registry_version"].get<std::string>();
  if (version != kRegistryVersion) {
    throw ConfigError("LM service registry " + version + " does not match " + std::string(kRegistryVersion));
  }
  client->model_id_ = manifest.value("model_id", "");
  return client;
}

nlohmann::json LmClient::call(const std::string& method, const std::string& path, const std::string& body) const {
  std::string last_error;
  for (int attempt = 0; attempt <= params_.retries; ++attempt) {
    httplib::Client cli(params_.endpoint);
    cli.set_connection_timeout(params_.timeout_seconds, 0);
    cli.set_read_timeout(params_.timeout_seconds, 0);
    cli.set_write_timeout(params_.timeout_seconds, 0);
    httplib::Result res = method == "GET" ? cli.Get(path) : cli.Post(path, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw DecoderError(method + " " + path + " returned HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw DecoderError(method + " " + path + " returned malformed JSON: " + e.what());
    }
  }
  throw DecoderError(method + " " + params_.endpoint + path + " failed after " +
                     std::to_string(params_.retries + 1) + " attempts: " + last_error);
}

std::string LmClient::generate_body(const DecodeRequest& request, const LmParams& params) {
  nlohmann::json body;  // std::map storage: keys serialize sorted
  body["greedy"] = params.greedy;
  body["max_new_tokens"] = request.max_new;
  body["prompt"] = request.context.str();
  body["stop"] = request.stop;
  body["temperature"] = params.temperature;
  return body.dump();
}

Decoded decode_generate_response(const nlohmann::json& response, const std::string& stop) {
  for (const char* key : {"text", "stop_reason", "subword_count_of_prompt"}) {
    if (!response.contains(key)) throw DecoderError(std::string("generate response lacks '") + key + "'");
  }
  if (!response["text"].is_string() || !response["stop_reason"].is_string()) {
    throw DecoderError("generate response has mistyped fields");
  }
  const std::string reason = response["stop_reason"].get<std::string>();
  if (reason != "stop_token" && reason != "length") {
    throw DecoderError("generate response has unknown stop_reason '" + reason + "'");
  }
  TokenSeq all = TokenSeq::from_text(response["text"].get<std::string>());
  Decoded out;
  out.reason = StopReason::kLength;
  for (const auto& tok : all) {
    out.tokens.push_back(tok);
    if (tok == stop) {
      out.reason = StopReason::kStopToken;
      return out;
    }
  }
  if (reason == "stop_token") {
    out.tokens.push_back(stop);
    out.reason = StopReason::kStopToken;
  }
  return out;
}

Decoded LmClient::generate_until(const DecodeRequest& request) const {
  nlohmann::json res = call("POST", "/generate", generate_body(request, params_));
  return decode_generate_response(res, request.stop);
}

std::size_t LmClient::subword_count(const TokenSeq& seq) const {
  nlohmann::json body;
  body["text"] = seq.str();
  nlohmann::json res = call("POST", "/subword_count", body.dump());
  if (!res.contains("subword_count") || !res["subword_count"].is_number_unsigned()) {
    throw DecoderError("subword_count response lacks an unsigned subword_count");
  }
  return res["subword_count"].get<std::size_t>();
}

Measurer LmClient::measurer() const {
  return [this](const TokenSeq& seq) { return subword_count(seq); };
}

}  // namespace ubar
