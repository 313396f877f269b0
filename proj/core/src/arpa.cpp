// sga/arpa.cpp

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "sga/ngram_lm.hpp"

namespace sga {

namespace {

std::string format_log10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.7f", v);
  return buf;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t b = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > b) out.push_back(line.substr(b, i - b));
  }
  return out;
}

bool parse_double(std::string_view s, double &out) {
  // std::from_chars for double is available in libstdc++ 11.
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

class LineReader {
 public:
  explicit LineReader(std::istream &is) : is_(is) {}

  bool next(std::string &line) {
    if (!std::getline(is_, line)) return false;
    ++number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
  std::size_t number() const { return number_; }

 private:
  std::istream &is_;
  std::size_t number_ = 0;
};

}  // namespace

void NGramLM::write_arpa(std::ostream &os) const {
  os << "\\data\\\n";
  for (int n = 1; n <= order_; ++n)
    os << "ngram " << n << "=" << tables_[n - 1].size() << "\n";

  for (int n = 1; n <= order_; ++n) {
    os << "\n\\" << n << "-grams:\n";
    std::vector<std::pair<std::string, const Entry *>> rows;
    rows.reserve(tables_[n - 1].size());
    for (const auto &[key, e] : tables_[n - 1]) {
      std::string words;
      for (std::size_t i = 0; i < key.size(); ++i) {
        if (i) words += ' ';
        words += vocab_[key[i]];
      }
      rows.emplace_back(std::move(words), &e);
    }
    std::sort(rows.begin(), rows.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    for (const auto &[words, e] : rows) {
      os << format_log10(e->log_prob) << '\t' << words;
      if (e->has_backoff && n < order_) os << '\t' << format_log10(e->backoff);
      os << '\n';
    }
  }
  os << "\n\\end\\\n";
}

NGramLM NGramLM::read_arpa(std::istream &is) {
  LineReader reader(is);
  std::string line;

  bool found_data = false;
  while (reader.next(line)) {
    if (trim(line) == "\\data\\") {
      found_data = true;
      break;
    }
  }
  if (!found_data) throw ArpaParseError(reader.number(), "missing \\data\\ header");

  std::vector<std::size_t> declared;
  std::size_t header_line = reader.number();
  while (reader.next(line)) {
    auto t = trim(line);
    if (t.empty()) {
      if (declared.empty()) continue;
      break;
    }
    if (t.front() == '\\') break;
    if (!t.starts_with("ngram ")) throw ArpaParseError(reader.number(), "expected 'ngram N=count'");
    auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ArpaParseError(reader.number(), "expected 'ngram N=count'");
    std::size_t n = 0, count = 0;
    auto ns = trim(t.substr(6, eq - 6));
    auto cs = trim(t.substr(eq + 1));
    if (std::from_chars(ns.data(), ns.data() + ns.size(), n).ec != std::errc() ||
        std::from_chars(cs.data(), cs.data() + cs.size(), count).ec != std::errc())
      throw ArpaParseError(reader.number(), "bad n-gram count line");
    if (n != declared.size() + 1)
      throw ArpaParseError(reader.number(), "n-gram orders must be declared in sequence");
    if (count == 0)
      throw ArpaParseError(reader.number(), "empty " + std::to_string(n) + "-gram section declared");
    declared.push_back(count);
  }
  if (declared.empty()) throw ArpaParseError(header_line, "no n-gram counts declared");
  if (declared.size() > 5) throw ArpaParseError(header_line, "n-gram order above 5 is not supported");

  NGramLM lm;
  lm.order_ = static_cast<int>(declared.size());
  lm.tables_.assign(lm.order_, Table{});

  // `line` may already hold the first section header.
  bool pending = !trim(line).empty() && trim(line).front() == '\\';
  auto next_nonblank = [&]() -> bool {
    if (pending) {
      pending = false;
      return true;
    }
    while (reader.next(line))
      if (!trim(line).empty()) return true;
    return false;
  };

  int expected = 1;
  bool saw_end = false;
  while (next_nonblank()) {
    auto t = trim(line);
    if (t == "\\end\\") {
      saw_end = true;
      break;
    }
    std::string want = "\\" + std::to_string(expected) + "-grams:";
    if (t != want) {
      throw ArpaParseError(reader.number(), "expected section " + want + ", got '" + std::string(t) + "'");
    }
    std::size_t section_line = reader.number();
    auto &table = lm.tables_[expected - 1];
    std::size_t found = 0;
    while (reader.next(line)) {
      auto row = trim(line);
      if (row.empty()) break;
      if (row.front() == '\\') {
        pending = true;
        break;
      }
      auto fields = split_ws(row);
      std::size_t n = static_cast<std::size_t>(expected);
      if (fields.size() != n + 1 && fields.size() != n + 2)
        throw ArpaParseError(reader.number(), "wrong number of fields for a " + std::to_string(n) + "-gram");
      Entry e;
      if (!parse_double(fields[0], e.log_prob))
        throw ArpaParseError(reader.number(), "bad log probability '" + std::string(fields[0]) + "'");
      if (e.log_prob > 0.0)
        throw ArpaParseError(reader.number(), "positive log probability");
      if (fields.size() == n + 2) {
        if (!parse_double(fields[n + 1], e.backoff))
          throw ArpaParseError(reader.number(), "bad backoff weight '" + std::string(fields[n + 1]) + "'");
        e.has_backoff = true;
      }
      std::vector<WordId> key;
      for (std::size_t i = 1; i <= n; ++i) key.push_back(lm.intern(fields[i]));
      table[std::move(key)] = e;
      ++found;
    }
    if (found != declared[expected - 1]) {
      throw ArpaParseError(section_line, "count mismatch for " + std::to_string(expected) +
                                             "-grams: declared " + std::to_string(declared[expected - 1]) +
                                             ", found " + std::to_string(found));
    }
    ++expected;
  }
  if (expected <= lm.order_) {
    throw ArpaParseError(reader.number(), "count mismatch: " + std::to_string(expected) +
                                              "-grams declared but section missing");
  }
  if (!saw_end) throw ArpaParseError(reader.number(), "missing \\end\\ marker");

  lm.finalize_reserved();
  if (auto it = lm.tables_[0].find({lm.unk_id_}); it != lm.tables_[0].end()) {
    lm.unk_floor_ = it->second.log_prob;
  } else {
    double lowest = 0.0;
    for (const auto &[key, e] : lm.tables_[0])
      if (key[0] != lm.start_id_) lowest = std::min(lowest, e.log_prob);
    lm.unk_floor_ = lowest - 1.0;
    lm.tables_[0][{lm.unk_id_}] = Entry{lm.unk_floor_, 0.0, false};
  }
  return lm;
}

}  // namespace sga
