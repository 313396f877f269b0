// sga/prompt.cpp

#include <ctime>

#include "sga/genai.hpp"

namespace sga {

namespace {

constexpr const char *kExemplar =
    "For <grammar><correct>a</correct>/an/the</grammar> student, "
    "<grammar>study/ studied/<correct>studying</correct></grammar> poetry can "
    "be a roller coaster ride. This journey <grammar><correct>is "
    "punctuated</correct>/ punctuates/ punctuated</grammar> by moments of "
    "profound appreciation <grammar>with/<correct>for</correct>/from</grammar> "
    "simpler pieces and intermittent frustration with more complex works. Some "
    "poems <grammar>were/ have been/<correct>are</correct></grammar> just "
    "plain confusing and no amount of re-reading  "
    "<grammar>seeming/<correct>seems</correct>/is seeming</grammar> to help "
    "decipher <grammar><correct>the</correct>/an /a</grammar> intended "
    "meaning. The puzzlement <grammar><correct>that</correct>/those/ "
    "these</grammar> results from such "
    "<grammar>institutions/<correct>instances</correct>/instigations</grammar> "
    "can be both vexing and "
    "<grammar><correct>demotivating</correct>/motivating/enthusing "
    "</grammar>.";

}  // namespace

PromptTemplate PromptTemplate::standard() {
  PromptTemplate t;
  t.exemplar = kExemplar;
  t.instruction_first =
      "Generate paragraphs like the example above. One <correct></correct> "
      "tag within <grammar> </grammar> tags. Each <grammar> tag has three "
      "options separated by \"/\".";
  t.instruction_generate = "Generate a paragraph similar to the example shown.";
  t.subject_clause = "Use subject \"{subject}\".";
  return t;
}

void PromptTemplate::validate() const {
  auto r = parse_tagged(exemplar);
  if (!r.ok()) throw GenerationError("prompt exemplar does not parse as a tagged paragraph");
  if (r.paragraph->slot_count() == 0)
    throw GenerationError("prompt exemplar must contain at least one option group");
}

void GenerationRequest::validate() const {
  if (max_retries < 0) throw GenerationError("max_retries must be >= 0");
  if (min_slots == 0 || min_slots > max_slots)
    throw GenerationError("slot count range must be positive and ordered");
}

ChatMessages build_prompt(const PromptTemplate &t, const GenerationRequest &r) {
  t.validate();
  ChatMessages messages;
  messages.push_back({"user", "\"\"\"\n" + t.exemplar + "\n\"\"\"\n" + t.instruction_first});
  std::string last = t.instruction_generate;
  if (r.subject && !trim(*r.subject).empty()) {
    std::string clause = t.subject_clause;
    auto at = clause.find("{subject}");
    if (at != std::string::npos) clause.replace(at, 9, std::string(trim(*r.subject)));
    last += " " + clause;
  }
  messages.push_back({"user", last});
  return messages;
}

nlohmann::json to_json(const ChatMessages &messages) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto &m : messages) j.push_back({{"role", m.role}, {"content", m.content}});
  return j;
}

ChatMessages messages_from_json(const nlohmann::json &j) {
  ChatMessages out;
  for (const auto &m : j)
    out.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
  return out;
}

nlohmann::json to_json(const ValidationIssue &issue) {
  return {{"severity", to_string(issue.severity)},
          {"kind", to_string(issue.kind)},
          {"begin", issue.begin},
          {"end", issue.end},
          {"message", issue.message}};
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace sga
