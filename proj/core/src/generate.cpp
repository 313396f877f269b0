// sga/generate.cpp

#include "sga/genai.hpp"

namespace sga {

std::string extract_paragraph(std::string_view reply) {
  std::string s(trim(reply));
  // ```lang\n ... \n```
  if (s.rfind("```", 0) == 0) {
    auto nl = s.find('\n');
    s = nl == std::string::npos ? s.substr(3) : s.substr(nl + 1);
    auto close = s.rfind("```");
    if (close != std::string::npos) s.resize(close);
    s = std::string(trim(s));
  }
  if (s.size() >= 6 && s.rfind("\"\"\"", 0) == 0 && s.compare(s.size() - 3, 3, "\"\"\"") == 0)
    s = std::string(trim(std::string_view(s).substr(3, s.size() - 6)));
  return s;
}

namespace {

std::string describe(const ValidationIssue &issue) {
  return std::string(to_string(issue.kind)) + " at byte " + std::to_string(issue.begin) + ": " +
         issue.message;
}

std::string corrective_message(const std::vector<ValidationIssue> &issues,
                               std::size_t slots, const GenerationRequest &r) {
  std::string problem;
  for (const auto &i : issues)
    if (i.severity == Severity::error) {
      problem = describe(i);
      break;
    }
  if (problem.empty())
    problem = "the paragraph has " + std::to_string(slots) +
              " <grammar> groups but needs between " + std::to_string(r.min_slots) + " and " +
              std::to_string(r.max_slots);
  return "The paragraph is malformed (" + problem +
         "). Generate just the paragraph again, with every <grammar> group closed and exactly "
         "one <correct></correct> option in each.";
}

}  // namespace

GenerationRecord generate_paragraph(ChatClient &client, const PromptTemplate &t,
                                    const GenerationRequest &r) {
  r.validate();
  GenerationRecord rec;
  rec.model = client.model_name();
  rec.started_at = utc_timestamp();
  ChatMessages messages = build_prompt(t, r);

  for (int attempt = 0; attempt <= r.max_retries; ++attempt) {
    std::string reply;
    try {
      reply = client.complete(messages);
    } catch (const ChatClientError &e) {
      rec.finished_at = utc_timestamp();
      throw ChatClientError("attempt " + std::to_string(attempt + 1) + ": " + e.what());
    }
    GenerationAttempt a;
    a.raw = reply;
    auto parsed = parse_tagged(extract_paragraph(reply));
    a.issues = parsed.issues;
    std::size_t slots = parsed.ok() ? parsed.paragraph->slot_count() : 0;
    if (parsed.ok() && slots >= r.min_slots && slots <= r.max_slots) {
      a.accepted = true;
      rec.attempts.push_back(std::move(a));
      rec.accepted = std::move(parsed.paragraph);
      rec.finished_at = utc_timestamp();
      return rec;
    }
    rec.attempts.push_back(std::move(a));
    messages.push_back({"assistant", reply});
    messages.push_back({"user", corrective_message(parsed.issues, slots, r)});
  }

  std::string why = "no valid paragraph after " + std::to_string(rec.attempts.size()) + " attempts";
  std::vector<std::string> all;
  for (const auto &a : rec.attempts)
    for (const auto &i : a.issues)
      if (i.severity == Severity::error) all.push_back(describe(i));
  if (!all.empty()) why += ": " + join(all, "; ");
  rec.failure = why;
  rec.finished_at = utc_timestamp();
  return rec;
}

nlohmann::json GenerationRecord::to_json() const {
  nlohmann::json attempts_j = nlohmann::json::array();
  for (const auto &a : attempts) {
    nlohmann::json issues_j = nlohmann::json::array();
    for (const auto &i : a.issues) issues_j.push_back(sga::to_json(i));
    attempts_j.push_back({{"raw", a.raw}, {"issues", issues_j}, {"accepted", a.accepted}});
  }
  nlohmann::json j = {{"model", model},
                      {"started_at", started_at},
                      {"finished_at", finished_at},
                      {"attempts", attempts_j}};
  if (accepted)
    j["accepted"] = serialize_tagged(*accepted);
  else
    j["failure"] = failure;
  return j;
}

}  // namespace sga
