// sga/offline_generator.cpp
//
// Skeleton markers:
//   {T}          topic phrase
//   {N}          plural noun drawn from a small pool
//   [ART]        article slot; a/an picked from the following word
//   [x|*y|z]     option slot, '*' marks the correct option

#include <cctype>
#include <random>

#include "sga/genai.hpp"

namespace sga {

namespace {

const char *const kOpening =
    "For [ART] {T} enthusiast, [study|studied|*studying] {T} can be a rewarding journey.";

const std::vector<std::string> &skeletons() {
  static const std::vector<std::string> bank = {
      "This journey [*is marked|marks|marked] by moments of real progress.",
      "Many beginners [*are|is|be] surprised by how quickly their {N} improve.",
      "Right now, some {N} [*are|was|is being] simple to grasp, while others take patience.",
      "No amount of reading [*seems|seem|seeming] to replace hands-on practice.",
      "The satisfaction [*that|those|these] comes from steady effort is hard to describe.",
      "Experienced teachers [*have|has|having] often said that mistakes are part of learning.",
      "She [*has been|have been|be] interested in {T} since she was a child.",
      "Yesterday we [*spent|spend|spending] the whole afternoon talking about {T}.",
      "The best way to improve is [*by|with|from] doing rather than only watching.",
      "Progress in {T} depends [*on|in|at] consistent habits.",
      "There [*are|is|be] many {N} worth exploring in {T}.",
      "Tomorrow the club [*will meet|met|meeting] to share new {N}.",
      "Each member [*brings|bring|bringing] a fresh perspective to the group.",
      "Nobody [*knows|know|knowing] exactly where curiosity will lead.",
      "The most [*difficult|difficulty|difficultly] part is getting started.",
      "Over time, the {N} become [*easier|easy|easiest] to understand.",
      "Learning {T} [*requires|require|requiring] patience and a sense of humour.",
      "We were [*interested|interesting|interest] in the history behind {T}.",
      "It was [ART] unforgettable experience for everyone involved.",
      "Reading about {T} is [*quite|quiet|quit] different from doing it.",
      "The instructor gave us [*advice|advise|advices] on how to avoid common mistakes.",
      "Small [*successes|success|successful] keep motivation high.",
      "She asked [*whether|weather|wether] we had tried {T} before.",
      "Once you begin, you will [*find|found|finding] it hard to stop.",
      "In the end, [ART] honest effort is [*its|it's|their] own reward.",
      "Last year I [*joined|join|joining] [ART] local group devoted to {T}.",
  };
  return bank;
}

const std::vector<std::string> kNouns = {"ideas",   "skills",  "techniques", "concepts",
                                         "lessons", "methods", "habits",     "routines"};

const std::vector<std::string> kTopics = {"cooking",   "astronomy", "gardening", "music",
                                          "chess",     "painting",  "history",   "photography",
                                          "geography", "robotics",  "poetry",    "economics"};

double unit(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t pick(std::mt19937_64 &rng, std::size_t n) {
  return static_cast<std::size_t>(unit(rng) * static_cast<double>(n));
}

template <typename T>
void shuffle(std::vector<T> &v, std::mt19937_64 &rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[pick(rng, i)]);
}

// Keeps letters, digits, spaces, hyphens and apostrophes so the topic can
// never inject tags, separators or sentence breaks.
std::string sanitize_topic(std::string_view s) {
  std::string out;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '-' || c == '\'' || u >= 0x80)
      out += static_cast<char>(std::tolower(u));
    else
      out += ' ';
  }
  out = squeeze_spaces(out);
  return std::string(trim(out));
}

std::size_t count_slots(const std::string &skeleton) {
  std::size_t n = 0;
  for (char c : skeleton) n += c == '[';
  return n;
}

std::string group(std::vector<std::pair<std::string, bool>> options, std::mt19937_64 &rng) {
  shuffle(options, rng);
  std::string out = "<grammar>";
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i) out += "/";
    out += options[i].second ? "<correct>" + options[i].first + "</correct>" : options[i].first;
  }
  return out + "</grammar>";
}

bool starts_with_vowel(std::string_view s) {
  s = trim(s);
  if (s.empty()) return false;
  char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s.front())));
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

std::string fill(const std::string &skeleton, const std::string &topic, std::mt19937_64 &rng) {
  // Substitute words first so [ART] can see what follows it.
  std::string s;
  for (std::size_t i = 0; i < skeleton.size();) {
    if (skeleton.compare(i, 3, "{T}") == 0) {
      s += topic;
      i += 3;
    } else if (skeleton.compare(i, 3, "{N}") == 0) {
      s += kNouns[pick(rng, kNouns.size())];
      i += 3;
    } else {
      s += skeleton[i++];
    }
  }
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] != '[') {
      out += s[i++];
      continue;
    }
    auto close = s.find(']', i);
    std::string body = s.substr(i + 1, close - i - 1);
    i = close + 1;
    std::vector<std::pair<std::string, bool>> options;
    if (body == "ART") {
      bool an = starts_with_vowel(std::string_view(s).substr(i));
      options = {{"a", !an}, {"an", an}, {"the", false}};
    } else {
      std::size_t from = 0;
      while (true) {
        auto bar = body.find('|', from);
        std::string opt = body.substr(from, bar == std::string::npos ? bar : bar - from);
        bool correct = !opt.empty() && opt.front() == '*';
        options.emplace_back(correct ? opt.substr(1) : opt, correct);
        if (bar == std::string::npos) break;
        from = bar + 1;
      }
    }
    out += group(std::move(options), rng);
  }
  return out;
}

}  // namespace

std::string offline_generate_text(std::uint64_t seed, const GenerationRequest &r) {
  r.validate();
  std::mt19937_64 rng(seed);
  std::string topic = r.subject ? sanitize_topic(*r.subject) : "";
  if (topic.empty()) topic = kTopics[pick(rng, kTopics.size())];

  std::size_t target = r.min_slots + pick(rng, r.max_slots - r.min_slots + 1);
  std::vector<std::string> chosen;
  std::size_t slots = 0;
  if (target >= count_slots(kOpening)) {
    chosen.push_back(kOpening);
    slots += count_slots(kOpening);
  }
  while (slots < target) {
    auto order = skeletons();
    shuffle(order, rng);
    for (const auto &sk : order) {
      std::size_t n = count_slots(sk);
      if (slots + n > target) continue;
      chosen.push_back(sk);
      slots += n;
      if (slots == target) break;
    }
  }

  std::string text;
  for (const auto &sk : chosen) {
    if (!text.empty()) text += ' ';
    text += fill(sk, topic, rng);
  }
  return text;
}

TaggedParagraph offline_generate(std::uint64_t seed, const GenerationRequest &r) {
  return parse_tagged_or_throw(offline_generate_text(seed, r));
}

}  // namespace sga
