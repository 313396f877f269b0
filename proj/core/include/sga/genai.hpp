// sga/genai.hpp
//
// Paragraph generation through a chat-completion endpoint with a one-shot
// prompt, validation and corrective retries, plus a deterministic offline
// generator.

#ifndef SGA_GENAI_HPP_
#define SGA_GENAI_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sga/paragraph.hpp"

namespace sga {

struct ChatMessage {
  std::string role;  // "system", "user" or "assistant"
  std::string content;
  bool operator==(const ChatMessage &) const = default;
};

using ChatMessages = std::vector<ChatMessage>;

nlohmann::json to_json(const ChatMessages &messages);
ChatMessages messages_from_json(const nlohmann::json &j);

class GenerationError : public Error {
 public:
  using Error::Error;
};

class ChatClientError : public GenerationError {
 public:
  using GenerationError::GenerationError;
};

// Messages in, reply text out.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const ChatMessages &messages) = 0;
  virtual std::string model_name() const = 0;
};

struct LlmSettings {
  std::string endpoint;  // full URL of an OpenAI-compatible chat completions route
  std::string api_key;
  std::string model = "gpt-3.5-turbo";
  int timeout_seconds = 60;

  bool configured() const { return !endpoint.empty(); }
  // SGA_LLM_ENDPOINT, SGA_LLM_API_KEY, SGA_LLM_MODEL, SGA_LLM_TIMEOUT
  static LlmSettings from_env();
  static LlmSettings from_json(const nlohmann::json &j);
};

class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(LlmSettings settings);
  std::string complete(const ChatMessages &messages) override;
  std::string model_name() const override { return settings_.model; }

 private:
  LlmSettings settings_;
};

// Replays recorded responses in order. Fixture format:
//   [{"request": [{"role": "user", "content": "..."}, ...], "response": "..."}]
class ReplayChatClient : public ChatClient {
 public:
  explicit ReplayChatClient(std::vector<std::string> responses,
                            std::string model = "replay");
  static ReplayChatClient from_fixture(const nlohmann::json &fixture);
  static ReplayChatClient from_file(const std::filesystem::path &path);

  std::string complete(const ChatMessages &messages) override;
  std::string model_name() const override { return model_; }
  const std::vector<ChatMessages> &requests() const { return requests_; }

 private:
  std::vector<std::string> responses_;
  std::vector<ChatMessages> requests_;
  std::size_t next_ = 0;
  std::string model_;
};

struct PromptTemplate {
  std::string exemplar;              // tag-format paragraph
  std::string instruction_first;
  std::string instruction_generate;
  std::string subject_clause;        // "{subject}" is replaced

  static PromptTemplate standard();
  // Throws GenerationError unless the exemplar parses with >= 1 slot.
  void validate() const;
};

struct GenerationRequest {
  std::optional<std::string> subject;
  int max_retries = 3;
  std::size_t min_slots = 8;
  std::size_t max_slots = 12;

  void validate() const;
};

ChatMessages build_prompt(const PromptTemplate &t, const GenerationRequest &r);

struct GenerationAttempt {
  std::string raw;
  std::vector<ValidationIssue> issues;
  bool accepted = false;
};

struct GenerationRecord {
  std::vector<GenerationAttempt> attempts;
  std::optional<TaggedParagraph> accepted;
  std::string failure;
  std::string model;
  std::string started_at;
  std::string finished_at;

  nlohmann::json to_json() const;
};

// Strips code fences and triple quotes an LLM may wrap around the reply.
std::string extract_paragraph(std::string_view reply);

GenerationRecord generate_paragraph(ChatClient &client, const PromptTemplate &t,
                                    const GenerationRequest &r);

// Deterministic per (seed, request); always parses cleanly with a slot
// count inside the requested range.
TaggedParagraph offline_generate(std::uint64_t seed, const GenerationRequest &r);
std::string offline_generate_text(std::uint64_t seed, const GenerationRequest &r);

std::string utc_timestamp();

nlohmann::json to_json(const ValidationIssue &issue);

}  // namespace sga

#endif  // SGA_GENAI_HPP_
