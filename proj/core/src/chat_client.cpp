// sga/chat_client.cpp

#include <cstdlib>

#include <httplib.h>

#include "sga/genai.hpp"
#include "sga/transcript_io.hpp"

namespace sga {

namespace {

std::string env_or(const char *name, std::string fallback) {
  const char *v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

LlmSettings LlmSettings::from_env() {
  LlmSettings s;
  s.endpoint = env_or("SGA_LLM_ENDPOINT", "");
  s.api_key = env_or("SGA_LLM_API_KEY", "");
  s.model = env_or("SGA_LLM_MODEL", s.model);
  s.timeout_seconds = std::atoi(env_or("SGA_LLM_TIMEOUT", "60").c_str());
  if (s.timeout_seconds <= 0) s.timeout_seconds = 60;
  return s;
}

LlmSettings LlmSettings::from_json(const nlohmann::json &j) {
  LlmSettings s = from_env();
  s.endpoint = j.value("endpoint", s.endpoint);
  s.api_key = j.value("api_key", s.api_key);
  s.model = j.value("model", s.model);
  s.timeout_seconds = j.value("timeout_seconds", s.timeout_seconds);
  return s;
}

HttpChatClient::HttpChatClient(LlmSettings settings) : settings_(std::move(settings)) {
  if (!settings_.configured()) throw ChatClientError("LLM endpoint is not configured");
}

std::string HttpChatClient::complete(const ChatMessages &messages) {
  // Split "scheme://host[:port]/path".
  const std::string &url = settings_.endpoint;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ChatClientError("endpoint URL needs a scheme: " + url);
  auto path_begin = url.find('/', scheme_end + 3);
  std::string origin = url.substr(0, path_begin);
  std::string path = path_begin == std::string::npos ? "/" : url.substr(path_begin);

  httplib::Client cli(origin);
  cli.set_connection_timeout(settings_.timeout_seconds, 0);
  cli.set_read_timeout(settings_.timeout_seconds, 0);
  cli.set_write_timeout(settings_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!settings_.api_key.empty())
    headers.emplace("Authorization", "Bearer " + settings_.api_key);

  nlohmann::json body = {{"model", settings_.model}, {"messages", to_json(messages)}};
  auto res = cli.Post(path, headers, body.dump(), "application/json");
  if (!res) throw ChatClientError("chat endpoint request failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw ChatClientError("chat endpoint returned HTTP " + std::to_string(res->status));
  auto reply = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.is_discarded()) throw ChatClientError("chat endpoint returned invalid JSON");
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception &) {
    throw ChatClientError("chat endpoint reply lacks choices[0].message.content");
  }
}

ReplayChatClient::ReplayChatClient(std::vector<std::string> responses, std::string model)
    : responses_(std::move(responses)), model_(std::move(model)) {}

ReplayChatClient ReplayChatClient::from_fixture(const nlohmann::json &fixture) {
  if (!fixture.is_array()) throw ChatClientError("replay fixture must be a JSON array");
  std::vector<std::string> responses;
  for (const auto &item : fixture) responses.push_back(item.at("response").get<std::string>());
  return ReplayChatClient(std::move(responses));
}

ReplayChatClient ReplayChatClient::from_file(const std::filesystem::path &path) {
  auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw ChatClientError("replay fixture is not valid JSON: " + path.string());
  return from_fixture(j);
}

std::string ReplayChatClient::complete(const ChatMessages &messages) {
  requests_.push_back(messages);
  if (next_ >= responses_.size()) throw ChatClientError("replay fixture exhausted");
  return responses_[next_++];
}

}  // namespace sga
