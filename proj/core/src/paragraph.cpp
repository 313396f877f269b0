// sga/paragraph.cpp

#include "sga/paragraph.hpp"

#include <algorithm>
#include <array>

namespace sga {

namespace {

enum class Tag { grammar_open, grammar_close, correct_open, correct_close };

constexpr std::array<std::pair<Tag, std::string_view>, 4> kTags = {{
    {Tag::grammar_open, "<grammar>"},
    {Tag::grammar_close, "</grammar>"},
    {Tag::correct_open, "<correct>"},
    {Tag::correct_close, "</correct>"},
}};

constexpr std::string_view kCorrectOpen = "<correct>";
constexpr std::string_view kCorrectClose = "</correct>";

// Finds the next grammar/correct tag at or after `from`.
std::optional<std::pair<Tag, std::size_t>> next_tag(std::string_view text,
                                                    std::size_t from) {
  for (std::size_t i = text.find('<', from); i != std::string_view::npos;
       i = text.find('<', i + 1)) {
    for (const auto &[tag, lit] : kTags) {
      if (text.compare(i, lit.size(), lit) == 0) return std::make_pair(tag, i);
    }
  }
  return std::nullopt;
}

std::size_t tag_length(Tag t) {
  for (const auto &[tag, lit] : kTags)
    if (tag == t) return lit.size();
  return 0;
}

ValidationIssue make_issue(Severity sev, IssueKind kind, std::size_t begin,
                           std::size_t end, std::string message) {
  return ValidationIssue{sev, kind, begin, end, std::move(message)};
}

std::size_t count_of(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto i = hay.find(needle); i != std::string_view::npos;
       i = hay.find(needle, i + needle.size()))
    ++n;
  return n;
}

// Parses the text between <grammar> and </grammar>. `base` is the byte
// offset of `content` in the source.
std::optional<GrammarSlot> parse_group(std::string_view content,
                                       std::size_t base,
                                       std::size_t group_begin,
                                       std::size_t group_end,
                                       std::vector<ValidationIssue> &issues) {
  GrammarSlot slot;
  slot.source_begin = group_begin;
  slot.source_end = group_end;
  std::size_t n_correct = 0;
  bool failed = false;

  std::size_t piece_begin = 0;
  while (true) {
    // Option separator: a '/' that does not open a closing tag.
    std::size_t slash = content.find('/', piece_begin);
    while (slash != std::string_view::npos && slash > 0 && content[slash - 1] == '<')
      slash = content.find('/', slash + 1);
    std::size_t piece_end =
        slash == std::string_view::npos ? content.size() : slash;
    std::string_view piece =
        trim(content.substr(piece_begin, piece_end - piece_begin));
    std::size_t at = base + piece_begin;

    std::size_t opens = count_of(piece, kCorrectOpen);
    std::size_t closes = count_of(piece, kCorrectClose);
    bool is_correct = false;
    if (opens == 0 && closes == 0) {
      // plain option
    } else if (opens == 1 && closes == 1 && piece.starts_with(kCorrectOpen) &&
               piece.ends_with(kCorrectClose)) {
      piece = trim(piece.substr(kCorrectOpen.size(),
                                piece.size() - kCorrectOpen.size() -
                                    kCorrectClose.size()));
      is_correct = true;
    } else {
      issues.push_back(make_issue(Severity::error, IssueKind::unclosed_tag, at,
                                  base + piece_end,
                                  "unbalanced <correct> tag in option group"));
      failed = true;
    }

    if (!failed) {
      if (piece.empty()) {
        issues.push_back(make_issue(Severity::error, IssueKind::empty_option,
                                    at, base + piece_end,
                                    "empty option in option group"));
        failed = true;
      } else {
        if (is_correct) {
          ++n_correct;
          slot.correct_index = slot.options.size();
        }
        slot.options.push_back(OptionPhrase::from_text(piece));
        if (slot.options.back().tokens.empty()) {
          issues.push_back(make_issue(Severity::error, IssueKind::empty_option,
                                      at, base + piece_end,
                                      "option has no word tokens"));
          failed = true;
        }
      }
    }

    if (slash == std::string_view::npos) break;
    piece_begin = slash + 1;
  }

  if (failed) return std::nullopt;
  if (n_correct == 0) {
    issues.push_back(make_issue(Severity::error, IssueKind::missing_correct,
                                group_begin, group_end,
                                "option group has no <correct> option"));
    return std::nullopt;
  }
  if (n_correct > 1) {
    issues.push_back(make_issue(Severity::error, IssueKind::multiple_correct,
                                group_begin, group_end,
                                "option group has more than one <correct>"));
    return std::nullopt;
  }
  if (slot.options.size() < 2) {
    issues.push_back(make_issue(Severity::error,
                                IssueKind::fewer_than_two_options, group_begin,
                                group_end,
                                "option group needs at least two options"));
    return std::nullopt;
  }
  return slot;
}

}  // namespace

OptionPhrase OptionPhrase::from_text(std::string_view raw) {
  OptionPhrase o;
  o.text = squeeze_spaces(raw);
  o.tokens = tokenize(o.text);
  return o;
}

FixedText FixedText::from_text(std::string_view raw) {
  FixedText f;
  f.text = std::string(raw);
  f.tokens = tokenize(raw);
  return f;
}

std::string_view to_string(Severity s) {
  return s == Severity::error ? "error" : "warning";
}

std::string_view to_string(IssueKind k) {
  switch (k) {
    case IssueKind::unclosed_tag: return "unclosed-tag";
    case IssueKind::missing_correct: return "missing-correct";
    case IssueKind::multiple_correct: return "multiple-correct";
    case IssueKind::fewer_than_two_options: return "fewer-than-two-options";
    case IssueKind::duplicate_option: return "duplicate-option";
    case IssueKind::empty_option: return "empty-option";
    case IssueKind::stray_tag_text: return "stray-tag-text";
  }
  return "unknown";
}

bool has_errors(const std::vector<ValidationIssue> &issues) {
  return std::any_of(issues.begin(), issues.end(), [](const auto &i) {
    return i.severity == Severity::error;
  });
}

ParseResult parse_tagged(std::string_view text) {
  ParseResult result;
  if (trim(text).empty()) {
    result.issues.push_back(make_issue(Severity::error,
                                       IssueKind::stray_tag_text, 0,
                                       text.size(), "paragraph text is empty"));
    return result;
  }

  TaggedParagraph p;
  p.source_text = std::string(text);
  auto &issues = result.issues;

  auto flush_fixed = [&](std::size_t b, std::size_t e) {
    if (e > b) p.segments.emplace_back(FixedText::from_text(text.substr(b, e - b)));
  };

  std::size_t fixed_begin = 0;
  constexpr std::size_t kNone = std::string_view::npos;
  std::size_t group_begin = kNone;
  std::size_t pos = 0;
  while (auto found = next_tag(text, pos)) {
    auto [tag, at] = *found;
    std::size_t len = tag_length(tag);
    pos = at + len;
    if (group_begin == kNone) {
      if (tag == Tag::grammar_open) {
        flush_fixed(fixed_begin, at);
        group_begin = at;
      } else {
        issues.push_back(make_issue(Severity::error, IssueKind::stray_tag_text,
                                    at, at + len,
                                    "tag outside of an option group"));
      }
      continue;
    }
    if (tag == Tag::grammar_open) {
      issues.push_back(make_issue(
          Severity::error, IssueKind::unclosed_tag, group_begin, at,
          "option group is not closed before the next <grammar>"));
      group_begin = at;
      continue;
    }
    if (tag == Tag::grammar_close) {
      std::size_t content_begin = group_begin + tag_length(Tag::grammar_open);
      auto slot = parse_group(text.substr(content_begin, at - content_begin),
                              content_begin, group_begin, at + len, issues);
      if (slot) {
        slot->index = p.slots.size();
        p.segments.emplace_back(SlotRef{slot->index});
        p.slots.push_back(std::move(*slot));
      }
      group_begin = kNone;
      fixed_begin = at + len;
    }
    // <correct> / </correct> inside a group are handled by parse_group.
  }
  if (group_begin != kNone) {
    issues.push_back(make_issue(Severity::error, IssueKind::unclosed_tag,
                                group_begin, text.size(),
                                "option group is never closed"));
  } else {
    flush_fixed(fixed_begin, text.size());
  }

  if (has_errors(issues)) return result;

  for (auto &issue : validate(p)) issues.push_back(std::move(issue));
  if (!has_errors(issues)) result.paragraph = std::move(p);
  return result;
}

TaggedParagraph parse_tagged_or_throw(std::string_view text) {
  auto r = parse_tagged(text);
  if (!r.ok()) {
    std::string what = "malformed tagged paragraph";
    for (const auto &i : r.issues) {
      if (i.severity != Severity::error) continue;
      what += ": " + std::string(to_string(i.kind)) + " at " +
              std::to_string(i.begin) + " (" + i.message + ")";
      break;
    }
    throw ParagraphError(what, std::move(r.issues));
  }
  return std::move(*r.paragraph);
}

std::vector<ValidationIssue> validate(const TaggedParagraph &p) {
  std::vector<ValidationIssue> issues;
  for (const auto &slot : p.slots) {
    auto b = slot.source_begin, e = slot.source_end;
    std::string label = "slot " + std::to_string(slot.index);
    if (slot.options.size() < 2) {
      issues.push_back(make_issue(Severity::error,
                                  IssueKind::fewer_than_two_options, b, e,
                                  label + " has fewer than two options"));
    }
    if (slot.correct_index >= slot.options.size()) {
      issues.push_back(make_issue(Severity::error, IssueKind::missing_correct,
                                  b, e, label + " has no valid correct option"));
    }
    for (std::size_t i = 0; i < slot.options.size(); ++i) {
      if (slot.options[i].tokens.empty()) {
        issues.push_back(make_issue(Severity::error, IssueKind::empty_option, b,
                                    e, label + " has an empty option"));
        continue;
      }
      for (std::size_t j = 0; j < i; ++j) {
        const auto &a = slot.options[j].text;
        const auto &c = slot.options[i].text;
        if (a == c) {
          issues.push_back(make_issue(
              Severity::warning, IssueKind::duplicate_option, b, e,
              label + " repeats option \"" + c + "\""));
          break;
        }
        if (to_lower(a) == to_lower(c)) {
          issues.push_back(make_issue(
              Severity::warning, IssueKind::duplicate_option, b, e,
              label + " options \"" + a + "\" and \"" + c +
                  "\" differ only by case"));
          break;
        }
      }
    }
  }
  return issues;
}

std::string serialize_tagged(const TaggedParagraph &p) {
  std::string out;
  for (const auto &seg : p.segments) {
    if (const auto *f = std::get_if<FixedText>(&seg)) {
      out += f->text;
      continue;
    }
    const auto &slot = p.slots.at(std::get<SlotRef>(seg).index);
    out += "<grammar>";
    for (std::size_t i = 0; i < slot.options.size(); ++i) {
      if (i) out += "/";
      if (i == slot.correct_index)
        out += "<correct>" + slot.options[i].text + "</correct>";
      else
        out += slot.options[i].text;
    }
    out += "</grammar>";
  }
  return out;
}

std::string render_display(const TaggedParagraph &p) {
  std::string out;
  for (const auto &seg : p.segments) {
    if (const auto *f = std::get_if<FixedText>(&seg)) {
      out += f->text;
      continue;
    }
    const auto &slot = p.slots.at(std::get<SlotRef>(seg).index);
    out += "(";
    for (std::size_t i = 0; i < slot.options.size(); ++i) {
      if (i) out += "/";
      out += slot.options[i].text;
    }
    out += ")";
  }
  return out;
}

RenderedForms render_gold(const TaggedParagraph &p) {
  RenderedForms forms;
  forms.display_text = render_display(p);
  forms.slot_spans.resize(p.slots.size());
  for (const auto &seg : p.segments) {
    if (const auto *f = std::get_if<FixedText>(&seg)) {
      forms.gold_text += f->text;
      forms.gold_tokens.insert(forms.gold_tokens.end(), f->tokens.begin(),
                               f->tokens.end());
      continue;
    }
    const auto &slot = p.slots.at(std::get<SlotRef>(seg).index);
    const auto &correct = slot.correct();
    forms.gold_text += correct.text;
    TokenSpan span{forms.gold_tokens.size(), 0};
    forms.gold_tokens.insert(forms.gold_tokens.end(), correct.tokens.begin(),
                             correct.tokens.end());
    span.end = forms.gold_tokens.size();
    forms.slot_spans[slot.index] = span;
    forms.grammar_words.push_back(GrammarWord{slot.index, correct});
  }
  forms.gold_text = std::string(trim(forms.gold_text));
  return forms;
}

}  // namespace sga
