// sga/ngram_lm.cpp

#include "sga/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace sga {

void FusionConfig::validate() const {
  if (!std::isfinite(gamma) || gamma < 0.0)
    throw LmError("fusion gamma must be a finite non-negative number");
}

double fusion_score(double acoustic_log, double lm_log,
                    const FusionConfig &cfg) {
  return acoustic_log + cfg.gamma * lm_log;
}

std::size_t NGramLM::KeyHash::operator()(
    const std::vector<WordId> &k) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (auto w : k) {
    h ^= static_cast<std::size_t>(w) + 0x9e3779b97f4a7c15ull + (h << 6) +
         (h >> 2);
  }
  return h;
}

NGramLM::WordId NGramLM::intern(std::string_view word) {
  auto it = index_.find(std::string(word));
  if (it != index_.end()) return it->second;
  auto id = static_cast<WordId>(vocab_.size());
  vocab_.emplace_back(word);
  index_.emplace(vocab_.back(), id);
  return id;
}

void NGramLM::finalize_reserved() {
  start_id_ = intern(kSentenceStart);
  end_id_ = intern(kSentenceEnd);
  unk_id_ = intern(kUnknown);
}

NGramLM::WordId NGramLM::id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? unk_id_ : it->second;
}

const NGramLM::Entry *NGramLM::find(std::span<const WordId> ngram) const {
  if (ngram.empty() || ngram.size() > tables_.size()) return nullptr;
  const auto &table = tables_[ngram.size() - 1];
  auto it = table.find(std::vector<WordId>(ngram.begin(), ngram.end()));
  return it == table.end() ? nullptr : &it->second;
}

double NGramLM::log_prob(std::span<const WordId> context, WordId word) const {
  std::size_t k = std::min<std::size_t>(context.size(), order_ - 1);
  std::vector<WordId> key;
  double backoff = 0.0;
  while (true) {
    auto ctx = context.subspan(context.size() - k);
    key.assign(ctx.begin(), ctx.end());
    key.push_back(word);
    if (const auto *e = find(key)) return backoff + e->log_prob;
    if (k == 0) return backoff + unk_floor_;
    if (const auto *c = find(ctx); c && c->has_backoff) backoff += c->backoff;
    --k;
  }
}

NGramLM::State NGramLM::start_state() const {
  State s;
  if (order_ > 1) s.push_back(start_id_);
  return s;
}

double NGramLM::advance(State &state, std::string_view token) const {
  WordId w = id(token);
  double lp = log_prob(state, w);
  if (order_ > 1) {
    state.push_back(w);
    if (state.size() > static_cast<std::size_t>(order_ - 1))
      state.erase(state.begin());
  }
  return lp;
}

double NGramLM::end_score(const State &state) const {
  return log_prob(state, end_id_);
}

double NGramLM::score_sequence(std::span<const std::string> tokens) const {
  State state = start_state();
  double total = 0.0;
  for (const auto &t : tokens) total += advance(state, t);
  return total + end_score(state);
}

std::vector<std::vector<NGramLM::WordId>> NGramLM::contexts(int n) const {
  std::vector<std::vector<WordId>> out;
  for (const auto &[key, e] : tables_.at(n - 1))
    if (e.has_backoff) out.push_back(key);
  std::sort(out.begin(), out.end());
  return out;
}

NGramLM NGramLM::train(const std::vector<TokenList> &corpus, int order) {
  if (corpus.empty()) throw LmError("cannot train on an empty corpus");
  if (order < 1 || order > 5) throw LmError("n-gram order must be in 1..5");

  NGramLM lm;
  lm.order_ = order;
  lm.finalize_reserved();

  // counts[n-1]: n-gram -> count. std::map keeps iteration deterministic.
  std::vector<std::map<std::vector<WordId>, std::uint64_t>> counts(order);
  for (const auto &sentence : corpus) {
    std::vector<WordId> seq;
    seq.reserve(sentence.size() + 2);
    seq.push_back(lm.start_id_);
    for (const auto &tok : sentence) seq.push_back(lm.intern(tok));
    seq.push_back(lm.end_id_);
    for (std::size_t i = 1; i < seq.size(); ++i) {
      for (int n = 1; n <= order && static_cast<std::size_t>(n) <= i + 1; ++n) {
        std::vector<WordId> key(seq.begin() + (i + 1 - n), seq.begin() + i + 1);
        ++counts[n - 1][key];
      }
    }
  }

  lm.tables_.assign(order, Table{});

  // Unigrams: interpolate with the uniform distribution over every word
  // that can be predicted (all but <s>), including <unk>.
  double total = 0.0;
  for (const auto &[key, c] : counts[0]) total += static_cast<double>(c);
  const auto types = static_cast<double>(counts[0].size());
  const auto predictable = static_cast<double>(lm.vocab_.size() - 1);
  for (WordId w = 0; w < static_cast<WordId>(lm.vocab_.size()); ++w) {
    if (w == lm.start_id_) {
      lm.tables_[0][{w}] = Entry{-99.0, 0.0, false};
      continue;
    }
    auto it = counts[0].find({w});
    double c = it == counts[0].end() ? 0.0 : static_cast<double>(it->second);
    double p = (c + types / predictable) / (total + types);
    lm.tables_[0][{w}] = Entry{std::log10(p), 0.0, false};
  }
  lm.unk_floor_ = lm.tables_[0][{lm.unk_id_}].log_prob;

  for (int n = 2; n <= order; ++n) {
    struct ContextStats {
      double total = 0.0;
      double types = 0.0;
    };
    std::map<std::vector<WordId>, ContextStats> stats;
    for (const auto &[key, c] : counts[n - 1]) {
      auto &s = stats[std::vector<WordId>(key.begin(), key.end() - 1)];
      s.total += static_cast<double>(c);
      s.types += 1.0;
    }
    for (const auto &[key, c] : counts[n - 1]) {
      std::vector<WordId> ctx(key.begin(), key.end() - 1);
      const auto &s = stats.at(ctx);
      std::span<const WordId> lower_ctx(ctx.data() + 1, ctx.size() - 1);
      double lower = std::pow(10.0, lm.log_prob(lower_ctx, key.back()));
      double p = (static_cast<double>(c) + s.types * lower) / (s.total + s.types);
      lm.tables_[n - 1][key] = Entry{std::log10(p), 0.0, false};
    }
    // With interpolated Witten-Bell the mass left for unseen words is
    // types / (total + types) of the lower-order distribution.
    for (const auto &[ctx, s] : stats) {
      auto it = lm.tables_[n - 2].find(ctx);
      if (it == lm.tables_[n - 2].end())
        throw LmError("internal: context missing from lower-order table");
      it->second.backoff = std::log10(s.types / (s.total + s.types));
      it->second.has_backoff = true;
    }
  }
  return lm;
}

}  // namespace sga
