// sga/variants.cpp

#include "sga/variants.hpp"

#include <limits>
#include <ostream>

namespace sga {

namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

// Offsets just past each sentence terminator in `text`: a run of
// terminators followed by optional closing quotes/brackets, then
// whitespace or end of text.
std::vector<std::size_t> boundaries(std::string_view text) {
  std::vector<std::size_t> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_terminator(text[j])) ++j;
    while (j < text.size() &&
           (text[j] == '"' || text[j] == '\'' || text[j] == ')' ||
            text[j] == ']'))
      ++j;
    if (j == text.size() || is_space(text[j])) out.push_back(j);
    i = j;
  }
  return out;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

bool has_tokens(const SentenceUnit &s) {
  for (const auto &piece : s.pieces) {
    if (std::holds_alternative<GrammarSlot>(piece)) return true;
    if (!std::get<FixedText>(piece).tokens.empty()) return true;
  }
  return false;
}

}  // namespace

std::size_t SentenceUnit::slot_count() const {
  std::size_t n = 0;
  for (const auto &piece : pieces)
    n += std::holds_alternative<GrammarSlot>(piece) ? 1 : 0;
  return n;
}

TokenList SentenceUnit::gold_tokens() const {
  TokenList out;
  for (const auto &piece : pieces) {
    const TokenList &t =
        std::holds_alternative<FixedText>(piece)
            ? std::get<FixedText>(piece).tokens
            : std::get<GrammarSlot>(piece).correct().tokens;
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

std::vector<SentenceUnit> split_sentences(const TaggedParagraph &p) {
  std::vector<SentenceUnit> out;
  SentenceUnit current;

  auto close_sentence = [&] {
    if (has_tokens(current)) {
      current.index = out.size();
      out.push_back(std::move(current));
    }
    current = SentenceUnit{};
  };

  for (const auto &seg : p.segments) {
    if (const auto *ref = std::get_if<SlotRef>(&seg)) {
      const auto &slot = p.slots.at(ref->index);
      for (const auto &opt : slot.options) {
        for (char c : opt.text) {
          if (is_terminator(c)) {
            throw SentenceSplitError(
                "slot " + std::to_string(slot.index) + " option \"" +
                opt.text + "\" contains a sentence terminator");
          }
        }
      }
      current.pieces.emplace_back(slot);
      continue;
    }
    std::string_view text = std::get<FixedText>(seg).text;
    std::size_t start = 0;
    for (std::size_t cut : boundaries(text)) {
      current.pieces.emplace_back(FixedText::from_text(text.substr(start, cut - start)));
      close_sentence();
      start = cut;
    }
    if (start < text.size())
      current.pieces.emplace_back(FixedText::from_text(text.substr(start)));
  }
  close_sentence();
  return out;
}

VariantCapExceeded::VariantCapExceeded(std::uint64_t count)
    : Error("variant count " + std::to_string(count) + " exceeds the cap"),
      count_(count) {}

std::uint64_t variant_count(const SentenceUnit &s) {
  std::uint64_t n = 1;
  for (const auto &piece : s.pieces) {
    if (const auto *slot = std::get_if<GrammarSlot>(&piece))
      n = saturating_mul(n, slot->options.size());
  }
  return n;
}

std::vector<TokenList> enumerate_variants(const SentenceUnit &s,
                                          std::uint64_t cap) {
  std::uint64_t count = variant_count(s);
  if (count > cap) throw VariantCapExceeded(count);

  std::vector<TokenList> out(1);
  for (const auto &piece : s.pieces) {
    if (const auto *f = std::get_if<FixedText>(&piece)) {
      for (auto &v : out) v.insert(v.end(), f->tokens.begin(), f->tokens.end());
      continue;
    }
    const auto &slot = std::get<GrammarSlot>(piece);
    std::vector<TokenList> next;
    next.reserve(out.size() * slot.options.size());
    for (const auto &prefix : out) {
      for (const auto &opt : slot.options) {
        next.push_back(prefix);
        next.back().insert(next.back().end(), opt.tokens.begin(),
                           opt.tokens.end());
      }
    }
    out = std::move(next);
  }
  return out;
}

VariantCounts variant_count(const TaggedParagraph &p) {
  VariantCounts counts;
  for (const auto &s : split_sentences(p)) {
    auto n = variant_count(s);
    counts.per_sentence.push_back(n);
    counts.total = counts.total > std::numeric_limits<std::uint64_t>::max() - n
                       ? std::numeric_limits<std::uint64_t>::max()
                       : counts.total + n;
  }
  return counts;
}

VariantLattice build_lattice(const SentenceUnit &s) {
  VariantLattice lat;
  std::size_t tail = 0;
  auto add_arc = [&](std::size_t from, std::size_t to, const std::string &tok,
                     std::optional<std::size_t> slot, std::size_t option) {
    lat.arcs.push_back(LatticeArc{from, to, tok, slot, option});
    return lat.arcs.size() - 1;
  };

  for (const auto &piece : s.pieces) {
    if (const auto *f = std::get_if<FixedText>(&piece)) {
      for (const auto &tok : f->tokens) {
        std::size_t next = lat.num_nodes++;
        add_arc(tail, next, tok, std::nullopt, 0);
        tail = next;
      }
      continue;
    }
    const auto &slot = std::get<GrammarSlot>(piece);
    std::vector<std::vector<std::size_t>> per_option(slot.options.size());
    // Interior nodes of multi-token options are allocated before the join
    // node's id is known, so arcs into the join are patched afterwards.
    std::vector<std::size_t> into_join;
    for (std::size_t o = 0; o < slot.options.size(); ++o) {
      const auto &toks = slot.options[o].tokens;
      std::size_t at = tail;
      for (std::size_t t = 0; t < toks.size(); ++t) {
        bool last = t + 1 == toks.size();
        std::size_t to = last ? 0 : lat.num_nodes++;
        std::size_t id = add_arc(at, to, toks[t], slot.index, o);
        per_option[o].push_back(id);
        if (last) into_join.push_back(id);
        at = to;
      }
    }
    std::size_t join = lat.num_nodes++;
    for (auto id : into_join) lat.arcs[id].to = join;
    lat.slot_arcs.emplace_back(slot.index, std::move(per_option));
    tail = join;
  }
  lat.sink = tail;
  return lat;
}

std::vector<std::vector<std::size_t>> VariantLattice::outgoing() const {
  std::vector<std::vector<std::size_t>> out(num_nodes);
  for (std::size_t i = 0; i < arcs.size(); ++i) out[arcs[i].from].push_back(i);
  return out;
}

std::uint64_t VariantLattice::path_count() const {
  std::vector<std::uint64_t> n(num_nodes, 0);
  n[source] = 1;
  auto out = outgoing();
  for (std::size_t v = 0; v < num_nodes; ++v) {
    for (auto id : out[v]) {
      auto &dst = n[arcs[id].to];
      dst = dst > std::numeric_limits<std::uint64_t>::max() - n[v]
                ? std::numeric_limits<std::uint64_t>::max()
                : dst + n[v];
    }
  }
  return n[sink];
}

std::vector<TokenList> VariantLattice::paths() const {
  std::vector<TokenList> result;
  auto out = outgoing();
  TokenList prefix;
  auto walk = [&](auto &self, std::size_t v) -> void {
    if (v == sink) {
      result.push_back(prefix);
      return;
    }
    for (auto id : out[v]) {
      prefix.push_back(arcs[id].token);
      self(self, arcs[id].to);
      prefix.pop_back();
    }
  };
  walk(walk, source);
  return result;
}

void write_corpus(std::ostream &os, const std::vector<TokenList> &variants) {
  for (const auto &v : variants) os << join(v) << '\n';
}

std::vector<TokenList> variant_corpus(const TaggedParagraph &p,
                                      std::uint64_t cap) {
  std::vector<TokenList> corpus;
  for (const auto &s : split_sentences(p)) {
    auto v = enumerate_variants(s, cap);
    corpus.insert(corpus.end(), std::make_move_iterator(v.begin()),
                  std::make_move_iterator(v.end()));
  }
  return corpus;
}

}  // namespace sga
