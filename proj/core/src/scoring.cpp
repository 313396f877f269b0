// sga/scoring.cpp

#include "sga/scoring.hpp"

#include <algorithm>
#include <cstdlib>

namespace sga {

std::string_view to_string(EditKind k) {
  switch (k) {
    case EditKind::match: return "match";
    case EditKind::substitution: return "substitute";
    case EditKind::insertion: return "insert";
    case EditKind::deletion: return "delete";
  }
  return "match";
}

std::size_t Alignment::count(EditKind k) const {
  return static_cast<std::size_t>(std::count_if(
      ops.begin(), ops.end(), [k](const AlignmentOp &op) { return op.kind == k; }));
}

std::size_t Alignment::cost() const { return ops.size() - count(EditKind::match); }

Alignment align(std::span<const std::string> ref, std::span<const std::string> hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  const std::size_t w = m + 1;
  // Key = edits * scale - matches: minimal edit count first, then the most
  // exact matches among equally cheap alignments.
  const long long scale = static_cast<long long>(n + m + 2);
  auto key = [&](long long edits, long long matches) { return edits * scale - matches; };
  std::vector<long long> d((n + 1) * w);
  for (std::size_t i = 0; i <= n; ++i) d[i * w] = key(static_cast<long long>(i), 0);
  for (std::size_t j = 0; j <= m; ++j) d[j] = key(static_cast<long long>(j), 0);
  auto diag_step = [&](std::size_t i, std::size_t j) {
    return ref[i - 1] == hyp[j - 1] ? key(0, 1) : key(1, 0);
  };
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      long long diag = d[(i - 1) * w + j - 1] + diag_step(i, j);
      long long del = d[(i - 1) * w + j] + key(1, 0);
      long long ins = d[i * w + j - 1] + key(1, 0);
      d[i * w + j] = std::min({diag, del, ins});
    }
  }

  Alignment a;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    long long here = d[i * w + j];
    if (i > 0 && j > 0 && d[(i - 1) * w + j - 1] + diag_step(i, j) == here) {
      bool same = ref[i - 1] == hyp[j - 1];
      a.ops.push_back({same ? EditKind::match : EditKind::substitution, i - 1, j - 1});
      --i;
      --j;
      continue;
    }
    if (i > 0 && d[(i - 1) * w + j] + key(1, 0) == here) {
      a.ops.push_back({EditKind::deletion, i - 1, std::nullopt});
      --i;
      continue;
    }
    a.ops.push_back({EditKind::insertion, std::nullopt, j - 1});
    --j;
  }
  std::reverse(a.ops.begin(), a.ops.end());
  return a;
}

double wer(std::span<const std::string> ref, std::span<const std::string> hyp) {
  if (ref.empty()) throw ScoringError("WER needs a non-empty reference");
  return static_cast<double>(align(ref, hyp).cost()) / static_cast<double>(ref.size());
}

double wer(const Transcript &ref, const Transcript &hyp) {
  return wer(std::span<const std::string>(ref.tokens), std::span<const std::string>(hyp.tokens));
}

GrammarReport g_score(const Transcript &hyp, const RenderedForms &forms) {
  const auto &gold = forms.gold_tokens;
  Alignment a = align(gold, hyp.tokens);

  // Per gold position: matched? and which op index it sits at.
  std::vector<bool> matched(gold.size(), false);
  std::vector<std::size_t> op_of(gold.size(), 0);
  for (std::size_t k = 0; k < a.ops.size(); ++k) {
    const auto &op = a.ops[k];
    if (!op.ref) continue;
    op_of[*op.ref] = k;
    matched[*op.ref] = op.kind == EditKind::match;
  }

  GrammarReport r;
  r.p1_size = static_cast<std::size_t>(std::count(matched.begin(), matched.end(), false));
  for (const auto &gw : forms.grammar_words) {
    const TokenSpan &span = forms.slot_spans.at(gw.slot);
    SlotCredit credit;
    credit.index = gw.slot;
    credit.correct = gw.phrase.text;
    credit.credited = span.size() > 0;
    for (std::size_t i = span.begin; i < span.end; ++i)
      credit.credited = credit.credited && matched[i];
    if (span.size() > 0) {
      for (std::size_t k = op_of[span.begin]; k <= op_of[span.end - 1]; ++k)
        if (a.ops[k].hyp) credit.observed.push_back(hyp.tokens[*a.ops[k].hyp]);
    }
    if (credit.credited) ++r.p2_size;
    r.slots.push_back(std::move(credit));
  }
  r.score = static_cast<int>(r.p2_size);
  return r;
}

int grammar_error(GrammarReport &report, const GrammarReport &gold) {
  bool same = report.slots.size() == gold.slots.size();
  for (std::size_t i = 0; same && i < report.slots.size(); ++i)
    same = report.slots[i].index == gold.slots[i].index &&
           report.slots[i].correct == gold.slots[i].correct;
  if (!same) throw ScoringError("grammar reports belong to different paragraphs");
  int eps = std::abs(report.score - gold.score);
  report.gold_score = gold.score;
  report.epsilon_g = eps;
  return eps;
}

nlohmann::json to_json(const GrammarReport &r) {
  nlohmann::json slots = nlohmann::json::array();
  for (const auto &s : r.slots) {
    slots.push_back({{"index", s.index},
                     {"correct", s.correct},
                     {"credited", s.credited},
                     {"observed", s.observed}});
  }
  nlohmann::json j = {{"score", r.score},
                      {"slots", slots},
                      {"p1_size", r.p1_size},
                      {"p2_size", r.p2_size}};
  if (r.gold_score) j["gold_score"] = *r.gold_score;
  if (r.epsilon_g) j["epsilon_g"] = *r.epsilon_g;
  return j;
}

GrammarReport report_from_json(const nlohmann::json &j) {
  GrammarReport r;
  r.score = j.at("score").get<int>();
  for (const auto &s : j.at("slots")) {
    SlotCredit c;
    c.index = s.at("index").get<std::size_t>();
    c.correct = s.at("correct").get<std::string>();
    c.credited = s.at("credited").get<bool>();
    c.observed = s.at("observed").get<TokenList>();
    r.slots.push_back(std::move(c));
  }
  r.p1_size = j.value("p1_size", std::size_t{0});
  r.p2_size = j.value("p2_size", static_cast<std::size_t>(r.score));
  if (j.contains("gold_score")) r.gold_score = j["gold_score"].get<int>();
  if (j.contains("epsilon_g")) r.epsilon_g = j["epsilon_g"].get<int>();
  return r;
}

}  // namespace sga
