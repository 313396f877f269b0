// sga/transcript_io.hpp

#ifndef SGA_TRANSCRIPT_IO_HPP_
#define SGA_TRANSCRIPT_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "sga/decode.hpp"

namespace sga {

class PayloadError : public Error {
 public:
  using Error::Error;
};

// A file could not be opened or read.
class IoError : public PayloadError {
 public:
  using PayloadError::PayloadError;
};

// Plain UTF-8 text -> tokenized manual transcript. Rejects empty input and
// N-best JSON payloads (use parse_nbest for those).
Transcript parse_transcript(std::string_view payload);
Transcript load_transcript(const std::filesystem::path &path);

// {"entries": [{"text": "...", "acoustic_log": -1.5}, ...]}
NBestList parse_nbest(const nlohmann::json &j);
NBestList parse_nbest(std::string_view payload);
NBestList load_nbest(const std::filesystem::path &path);
nlohmann::json to_json(const NBestList &nbest);

std::string read_file(const std::filesystem::path &path);

}  // namespace sga

#endif  // SGA_TRANSCRIPT_IO_HPP_
