// sga/ngram_lm.hpp
//
// Backoff n-gram language model with Witten-Bell smoothing. Probabilities
// are log10 throughout, as in ARPA files.

#ifndef SGA_NGRAM_LM_HPP_
#define SGA_NGRAM_LM_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sga/text.hpp"

namespace sga {

inline constexpr std::string_view kSentenceStart = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";
inline constexpr std::string_view kUnknown = "<unk>";

class LmError : public Error {
 public:
  using Error::Error;
};

class ArpaParseError : public LmError {
 public:
  ArpaParseError(std::size_t line, const std::string &what)
      : LmError("ARPA line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct FusionConfig {
  double gamma = 0.5;

  // Throws LmError when gamma is negative or not finite.
  void validate() const;
};

// acoustic_log + gamma * lm_log
double fusion_score(double acoustic_log, double lm_log, const FusionConfig &cfg);

class NGramLM {
 public:
  using WordId = std::int32_t;

  struct Entry {
    double log_prob = 0.0;
    double backoff = 0.0;
    bool has_backoff = false;
  };

  // Trains on `corpus` (one sentence per element). Throws LmError on an
  // empty corpus or an order outside 1..5.
  static NGramLM train(const std::vector<TokenList> &corpus, int order = 3);

  static NGramLM read_arpa(std::istream &is);
  void write_arpa(std::ostream &os) const;

  int order() const { return order_; }
  double unk_floor() const { return unk_floor_; }
  std::size_t vocabulary_size() const { return vocab_.size(); }
  const std::vector<std::string> &vocabulary() const { return vocab_; }

  // Maps OOV words to <unk>.
  WordId id(std::string_view word) const;
  const std::string &word(WordId id) const { return vocab_.at(id); }
  WordId start_id() const { return start_id_; }
  WordId end_id() const { return end_id_; }
  WordId unk_id() const { return unk_id_; }

  // log10 p(word | context); context is oldest-first and may be longer
  // than order-1 (extra history is ignored).
  double log_prob(std::span<const WordId> context, WordId word) const;

  // Sum of conditional log10 probabilities for `tokens` framed by <s> and
  // </s>. Always finite.
  double score_sequence(std::span<const std::string> tokens) const;

  // History state for incremental scoring. Holds at most order-1 ids.
  using State = std::vector<WordId>;
  State start_state() const;
  // Returns log10 p(token | state) and advances the state.
  double advance(State &state, std::string_view token) const;
  double end_score(const State &state) const;

  std::size_t ngram_count(int n) const { return tables_.at(n - 1).size(); }
  const Entry *find(std::span<const WordId> ngram) const;

  // Stored n-grams of length n that act as contexts (have a backoff).
  std::vector<std::vector<WordId>> contexts(int n) const;

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<WordId> &k) const noexcept;
  };
  using Table = std::unordered_map<std::vector<WordId>, Entry, KeyHash>;

  NGramLM() = default;
  WordId intern(std::string_view word);
  void finalize_reserved();

  int order_ = 3;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, WordId> index_;
  std::vector<Table> tables_;  // tables_[n-1] holds n-grams
  double unk_floor_ = -99.0;
  WordId start_id_ = -1;
  WordId end_id_ = -1;
  WordId unk_id_ = -1;

};

}  // namespace sga

#endif  // SGA_NGRAM_LM_HPP_
