// sga/transcript_io.cpp

#include "sga/transcript_io.hpp"

#include <fstream>
#include <sstream>

namespace sga {

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Transcript parse_transcript(std::string_view payload) {
  auto body = trim(payload);
  if (!body.empty() && (body.front() == '{' || body.front() == '[')) {
    auto j = nlohmann::json::parse(body, nullptr, false);
    if (!j.is_discarded()) {
      if (j.is_object() && j.contains("entries"))
        throw PayloadError(
            "payload is an N-best JSON document; load it as an N-best list "
            "instead of a transcript");
      throw PayloadError("payload is JSON, expected plain transcript text");
    }
  }
  Transcript t = Transcript::from_text(payload, TranscriptSource::manual);
  if (t.tokens.empty()) throw PayloadError("transcript has no tokens");
  return t;
}

Transcript load_transcript(const std::filesystem::path &path) {
  return parse_transcript(read_file(path));
}

NBestList parse_nbest(const nlohmann::json &j) {
  if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array())
    throw PayloadError("N-best payload must be an object with an 'entries' array");
  NBestList list;
  for (const auto &e : j["entries"]) {
    if (!e.is_object() || !e.contains("text") || !e["text"].is_string() ||
        !e.contains("acoustic_log") || !e["acoustic_log"].is_number())
      throw PayloadError("each N-best entry needs 'text' (string) and 'acoustic_log' (number)");
    list.entries.push_back(
        NBestEntry{tokenize(e["text"].get<std::string>()), e["acoustic_log"].get<double>()});
  }
  try {
    list.validate();
  } catch (const DecodeError &err) {
    throw PayloadError(err.what());
  }
  return list;
}

NBestList parse_nbest(std::string_view payload) {
  auto j = nlohmann::json::parse(payload, nullptr, false);
  if (j.is_discarded()) throw PayloadError("N-best payload is not valid JSON");
  return parse_nbest(j);
}

NBestList load_nbest(const std::filesystem::path &path) {
  std::string text = read_file(path);
  return parse_nbest(std::string_view(text));
}

nlohmann::json to_json(const NBestList &nbest) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto &e : nbest.entries)
    entries.push_back({{"text", join(e.tokens)}, {"acoustic_log", e.acoustic_log}});
  return {{"entries", entries}};
}

}  // namespace sga
