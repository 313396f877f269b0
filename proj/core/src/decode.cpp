// sga/decode.cpp

#include "sga/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace sga {

std::string_view to_string(TranscriptSource s) {
  switch (s) {
    case TranscriptSource::manual: return "manual";
    case TranscriptSource::nbest_rescored: return "nbest-rescored";
    case TranscriptSource::constrained_decode: return "constrained-decode";
    case TranscriptSource::simulator: return "simulator";
  }
  return "manual";
}

std::string_view to_string(BiasMode b) {
  return b == BiasMode::none ? "none" : "grammar-correcting";
}

BiasMode bias_mode_from_string(std::string_view s) {
  if (s == "none") return BiasMode::none;
  if (s == "grammar-correcting" || s == "grammar_correcting") return BiasMode::grammar_correcting;
  throw DecodeError("unknown bias mode '" + std::string(s) +
                    "' (expected none or grammar-correcting)");
}

Transcript Transcript::from_text(std::string_view text, TranscriptSource source) {
  return Transcript{tokenize(text), source};
}

void NBestList::validate() const {
  if (entries.empty()) throw DecodeError("N-best list is empty");
  for (const auto &e : entries)
    if (!std::isfinite(e.acoustic_log))
      throw DecodeError("N-best acoustic score is not finite");
}

void ChannelConfig::validate() const {
  for (double c : {substitution_cost, insertion_cost, deletion_cost})
    if (!std::isfinite(c) || c < 0.0)
      throw DecodeError("channel costs must be finite and non-negative");
  for (double p : {p_sub, p_del, p_ins})
    if (!(p >= 0.0 && p <= 1.0))
      throw DecodeError("channel noise rates must lie in [0, 1]");
}

RescoreResult rescore_nbest_detailed(const NBestList &nbest, const NGramLM &lm,
                                     const FusionConfig &cfg) {
  nbest.validate();
  cfg.validate();
  RescoreResult r;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nbest.entries.size(); ++i) {
    const auto &e = nbest.entries[i];
    double s = fusion_score(e.acoustic_log, lm.score_sequence(e.tokens), cfg);
    r.fused.push_back(s);
    if (s > best) {
      best = s;
      r.index = i;
    }
  }
  r.transcript = Transcript{nbest.entries[r.index].tokens,
                            TranscriptSource::nbest_rescored};
  return r;
}

Transcript rescore_nbest(const NBestList &nbest, const NGramLM &lm,
                         const FusionConfig &cfg) {
  return rescore_nbest_detailed(nbest, lm, cfg).transcript;
}

std::vector<VariantLattice> paragraph_lattices(const TaggedParagraph &p) {
  std::vector<VariantLattice> out;
  for (const auto &s : split_sentences(p)) out.push_back(build_lattice(s));
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTolerance = 1e-9;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct ExpandedArc {
  std::size_t from = 0;
  std::size_t to = 0;
  std::size_t lattice = 0;
  std::size_t arc = kNone;  // kNone for a sentence boundary
  double lm_cost = 0.0;
};

struct ExpandedGraph {
  std::vector<std::vector<std::size_t>> incoming;  // per state
  std::vector<ExpandedArc> arcs;
  std::vector<std::size_t> order;                  // topological
  std::vector<std::pair<std::size_t, double>> finals;
  std::size_t start = 0;
};

// Expands lattice nodes by LM history so the LM term is exact along any
// path.
ExpandedGraph expand(std::span<const VariantLattice> lattices, const NGramLM *lm,
                     double gamma) {
  ExpandedGraph g;
  using Key = std::tuple<std::size_t, std::size_t, NGramLM::State>;
  std::map<Key, std::size_t> ids;
  std::vector<NGramLM::State> history;
  std::vector<std::vector<std::vector<std::size_t>>> at(lattices.size());
  for (std::size_t l = 0; l < lattices.size(); ++l)
    at[l].resize(lattices[l].num_nodes);

  auto state = [&](std::size_t l, std::size_t node, NGramLM::State h) {
    Key key{l, node, h};
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    std::size_t id = history.size();
    ids.emplace(std::move(key), id);
    history.push_back(std::move(h));
    g.incoming.emplace_back();
    at[l][node].push_back(id);
    return id;
  };

  NGramLM::State initial = lm ? lm->start_state() : NGramLM::State{};
  g.start = state(0, lattices[0].source, initial);

  for (std::size_t l = 0; l < lattices.size(); ++l) {
    const auto &lat = lattices[l];
    auto out = lat.outgoing();
    for (std::size_t v = 0; v < lat.num_nodes; ++v) {
      // at[l][v] only grows from nodes < v, so it is complete here.
      for (std::size_t k = 0; k < at[l][v].size(); ++k) {
        std::size_t s = at[l][v][k];
        g.order.push_back(s);
        for (auto a : out[v]) {
          NGramLM::State h = history[s];
          double cost = lm ? -gamma * lm->advance(h, lat.arcs[a].token) : 0.0;
          std::size_t t = state(l, lat.arcs[a].to, std::move(h));
          g.arcs.push_back(ExpandedArc{s, t, l, a, cost});
          g.incoming[t].push_back(g.arcs.size() - 1);
        }
        if (v == lat.sink) {
          double end = lm ? -gamma * lm->end_score(history[s]) : 0.0;
          if (l + 1 < lattices.size()) {
            std::size_t t = state(l + 1, lattices[l + 1].source, initial);
            g.arcs.push_back(ExpandedArc{s, t, l, kNone, end});
            g.incoming[t].push_back(g.arcs.size() - 1);
          } else {
            g.finals.emplace_back(s, end);
          }
        }
      }
    }
  }
  return g;
}

enum class Step : unsigned char { none, match, substitute, remove, boundary, insert };

struct Cell {
  double cost = kInf;
  Step step = Step::none;
  std::size_t arc = kNone;
};

struct PathEvent {
  std::size_t lattice = 0;
  std::size_t arc = kNone;         // kNone: insertion
  std::size_t observed = kNone;    // kNone: deletion
};

}  // namespace

DecodeResult constrained_decode(const Transcript &observed,
                                std::span<const VariantLattice> lattices,
                                const NGramLM *lm, const FusionConfig &cfg,
                                const ChannelConfig &ch) {
  if (lattices.empty()) throw DecodeError("no lattices to decode against");
  cfg.validate();
  ch.validate();
  const NGramLM *scorer = cfg.gamma > 0.0 ? lm : nullptr;
  ExpandedGraph g = expand(lattices, scorer, cfg.gamma);

  const auto &obs = observed.tokens;
  const std::size_t m = obs.size();
  const std::size_t width = m + 1;
  std::vector<Cell> dp(g.incoming.size() * width);
  auto cell = [&](std::size_t s, std::size_t j) -> Cell & { return dp[s * width + j]; };

  auto token_of = [&](const ExpandedArc &a) -> const std::string & {
    return lattices[a.lattice].arcs[a.arc].token;
  };

  for (std::size_t s : g.order) {
    for (std::size_t j = 0; j <= m; ++j) {
      Cell best;
      if (s == g.start && j == 0) best.cost = 0.0;
      auto offer = [&](double c, Step step, std::size_t arc) {
        if (c < best.cost - kTieTolerance) best = Cell{c, step, arc};
      };
      const auto &in = g.incoming[s];
      if (j > 0) {
        for (auto ai : in) {
          const auto &a = g.arcs[ai];
          if (a.arc != kNone && token_of(a) == obs[j - 1])
            offer(cell(a.from, j - 1).cost + a.lm_cost, Step::match, ai);
        }
        for (auto ai : in) {
          const auto &a = g.arcs[ai];
          if (a.arc != kNone && token_of(a) != obs[j - 1])
            offer(cell(a.from, j - 1).cost + a.lm_cost + ch.substitution_cost,
                  Step::substitute, ai);
        }
      }
      for (auto ai : in) {
        const auto &a = g.arcs[ai];
        if (a.arc != kNone)
          offer(cell(a.from, j).cost + a.lm_cost + ch.deletion_cost, Step::remove, ai);
      }
      for (auto ai : in) {
        const auto &a = g.arcs[ai];
        if (a.arc == kNone) offer(cell(a.from, j).cost + a.lm_cost, Step::boundary, ai);
      }
      if (j > 0) offer(cell(s, j - 1).cost + ch.insertion_cost, Step::insert, kNone);
      cell(s, j) = best;
    }
  }

  std::size_t final_state = kNone;
  double best_total = kInf;
  for (const auto &[s, end] : g.finals) {
    double c = cell(s, m).cost + end;
    if (c < best_total - kTieTolerance) {
      best_total = c;
      final_state = s;
    }
  }
  if (final_state == kNone) throw DecodeError("no complete lattice path");

  std::vector<PathEvent> events;
  double channel = 0.0;
  std::size_t s = final_state, j = m;
  while (!(s == g.start && j == 0)) {
    const Cell &c = cell(s, j);
    switch (c.step) {
      case Step::match:
      case Step::substitute: {
        const auto &a = g.arcs[c.arc];
        if (c.step == Step::substitute) channel += ch.substitution_cost;
        events.push_back(PathEvent{a.lattice, a.arc, j - 1});
        s = a.from;
        --j;
        break;
      }
      case Step::remove: {
        const auto &a = g.arcs[c.arc];
        channel += ch.deletion_cost;
        events.push_back(PathEvent{a.lattice, a.arc, kNone});
        s = a.from;
        break;
      }
      case Step::boundary:
        s = g.arcs[c.arc].from;
        break;
      case Step::insert:
        channel += ch.insertion_cost;
        events.push_back(PathEvent{0, kNone, j - 1});
        --j;
        break;
      case Step::none:
        throw DecodeError("internal: broken decode backtrace");
    }
  }
  std::reverse(events.begin(), events.end());

  DecodeResult result;
  result.channel_cost = channel;
  std::vector<TokenList> sentences(lattices.size());
  std::size_t consumed = 0;
  for (std::size_t e = 0; e < events.size(); ++e) {
    const auto &ev = events[e];
    if (ev.arc == kNone) {
      ++consumed;
      continue;
    }
    const auto &arc = lattices[ev.lattice].arcs[ev.arc];
    result.tokens.push_back(arc.token);
    sentences[ev.lattice].push_back(arc.token);
    if (!arc.slot) {
      if (ev.observed != kNone) ++consumed;
      continue;
    }
    // First arc of an option: walk to its last arc, counting observed
    // tokens (aligned or inserted) in between.
    const auto &slot_arcs = lattices[ev.lattice].slot_arcs;
    std::size_t option_len = 0;
    for (const auto &[slot, per_option] : slot_arcs)
      if (slot == *arc.slot) option_len = per_option.at(arc.option).size();
    SlotChoice choice{*arc.slot, arc.option, consumed, consumed};
    std::size_t seen_arcs = 0;
    std::size_t k = e;
    for (; k < events.size(); ++k) {
      const auto &ek = events[k];
      if (ek.arc != kNone) {
        if (k != e) {
          const auto &ak = lattices[ek.lattice].arcs[ek.arc];
          result.tokens.push_back(ak.token);
          sentences[ek.lattice].push_back(ak.token);
        }
        ++seen_arcs;
      }
      if (ek.observed != kNone) ++consumed;
      if (seen_arcs == option_len) break;
    }
    choice.observed_end = consumed;
    result.choices.push_back(choice);
    e = k;
  }
  std::sort(result.choices.begin(), result.choices.end(),
            [](const SlotChoice &a, const SlotChoice &b) { return a.slot < b.slot; });

  if (lm) {
    for (const auto &sentence : sentences) result.lm_log10 += lm->score_sequence(sentence);
  }
  result.cost = result.channel_cost - cfg.gamma * result.lm_log10;
  return result;
}

}  // namespace sga
