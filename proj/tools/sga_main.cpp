// tools/sga_main.cpp
//
// sga: one subcommand per pipeline stage.
//
// Exit codes: 0 success, 1 validation failure, 2 I/O failure,
// 3 configuration / usage error. Data goes to stdout, diagnostics to
// stderr; --json switches stdout to machine-readable output.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sga/cohort.hpp"
#include "sga/decode.hpp"
#include "sga/genai.hpp"
#include "sga/ngram_lm.hpp"
#include "sga/paragraph.hpp"
#include "sga/scoring.hpp"
#include "sga/service.hpp"
#include "sga/simulate.hpp"
#include "sga/transcript_io.hpp"
#include "sga/variants.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kValidation = 1, kIo = 2, kConfig = 3 };

bool g_json = false;

void emit(const json &j, const std::string &text) {
  if (g_json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

// A T argument names a file when one exists at that path, otherwise it is
// the text itself.
std::string text_arg(const std::string &arg) {
  std::error_code ec;
  if (fs::is_regular_file(arg, ec)) return sga::read_file(arg);
  return arg;
}

sga::TaggedParagraph load_paragraph(const std::string &path) {
  auto r = sga::parse_tagged(sga::read_file(path));
  if (!r.ok()) throw sga::ParagraphError("paragraph " + path + " failed validation", r.issues);
  for (const auto &i : r.issues)
    std::cerr << "warning: " << sga::to_string(i.kind) << ": " << i.message << "\n";
  return std::move(*r.paragraph);
}

sga::NGramLM load_lm(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw sga::IoError("cannot open " + path);
  return sga::NGramLM::read_arpa(in);
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

json slots_json(const sga::TaggedParagraph &p) {
  json out = json::array();
  for (const auto &s : p.slots) {
    json options = json::array();
    for (const auto &o : s.options) options.push_back(o.text);
    out.push_back({{"index", s.index}, {"options", options}, {"correct", s.correct_index}});
  }
  return out;
}

json issues_json(const std::vector<sga::ValidationIssue> &issues) {
  json out = json::array();
  for (const auto &i : issues) out.push_back(sga::to_json(i));
  return out;
}

std::string report_text(const sga::GrammarReport &r) {
  std::ostringstream os;
  for (const auto &s : r.slots)
    os << "slot " << s.index << "  " << (s.credited ? "+" : "-") << "  " << s.correct
       << "  [" << sga::join(s.observed) << "]\n";
  os << "score: " << r.score << " / " << r.slots.size() << "\n";
  if (r.gold_score) os << "gold: " << *r.gold_score << "\n";
  if (r.epsilon_g) os << "epsilon_g: " << *r.epsilon_g << "\n";
  return os.str();
}

// --- subcommands -----------------------------------------------------------

int cmd_parse(const std::string &file) {
  auto r = sga::parse_tagged(sga::read_file(file));
  std::ostringstream os;
  if (r.ok()) {
    for (const auto &s : r.paragraph->slots) {
      os << s.index << ":";
      for (std::size_t k = 0; k < s.options.size(); ++k)
        os << (k ? " / " : " ") << (k == s.correct_index ? "*" : "") << s.options[k].text;
      os << "\n";
    }
    os << "slots: " << r.paragraph->slot_count() << "\n";
  }
  for (const auto &i : r.issues)
    os << sga::to_string(i.severity) << ": " << sga::to_string(i.kind) << " [" << i.begin << ","
       << i.end << ") " << i.message << "\n";
  json j = {{"ok", r.ok()}, {"issues", issues_json(r.issues)}};
  if (r.ok()) j["slots"] = slots_json(*r.paragraph);
  emit(j, os.str());
  return r.ok() ? kOk : kValidation;
}

int cmd_display(const std::string &file) {
  auto p = load_paragraph(file);
  auto f = sga::render_gold(p);
  emit({{"display_text", f.display_text}, {"slot_count", p.slot_count()}}, f.display_text + "\n");
  return kOk;
}

int cmd_gold(const std::string &file) {
  auto p = load_paragraph(file);
  auto f = sga::render_gold(p);
  json words = json::array(), spans = json::array();
  std::ostringstream os;
  os << f.gold_text << "\n" << "tokens: " << f.gold_tokens.size() << "\n" << "G_w:";
  for (const auto &w : f.grammar_words) {
    words.push_back(w.phrase.text);
    os << " [" << w.phrase.text << "]";
  }
  os << "\n";
  for (const auto &s : f.slot_spans) spans.push_back({s.begin, s.end});
  emit({{"gold_text", f.gold_text},
        {"tokens", f.gold_tokens},
        {"token_count", f.gold_tokens.size()},
        {"slot_spans", spans},
        {"grammar_words", words}},
       os.str());
  return kOk;
}

int cmd_variants(const std::string &file, int sentence, std::uint64_t cap,
                 const std::string &corpus_out) {
  auto p = load_paragraph(file);
  auto units = sga::split_sentences(p);
  if (sentence >= static_cast<int>(units.size()))
    throw sga::ConfigError("--sentence " + std::to_string(sentence) + " out of range; paragraph has " +
                           std::to_string(units.size()) + " sentences");
  json sentences = json::array();
  std::ostringstream os;
  std::uint64_t total = 0;
  std::vector<sga::TokenList> corpus;
  for (const auto &u : units) {
    if (sentence >= 0 && u.index != static_cast<std::size_t>(sentence)) continue;
    auto vs = sga::enumerate_variants(u, cap);
    json list = json::array();
    for (const auto &v : vs) {
      os << sga::join(v) << "\n";
      list.push_back(sga::join(v));
      corpus.push_back(v);
    }
    total += vs.size();
    sentences.push_back({{"index", u.index}, {"count", vs.size()}, {"variants", list}});
  }
  os << "count: " << total << "\n";
  if (!corpus_out.empty()) {
    std::ofstream out(corpus_out);
    if (!out) throw sga::IoError("cannot write " + corpus_out);
    sga::write_corpus(out, corpus);
  }
  emit({{"sentences", sentences}, {"count", total}}, os.str());
  return kOk;
}

int cmd_lm_train(const std::string &input, const std::string &out_path, int order,
                 bool from_paragraph) {
  std::vector<sga::TokenList> corpus;
  if (from_paragraph) {
    corpus = sga::variant_corpus(load_paragraph(input));
  } else {
    std::istringstream in(sga::read_file(input));
    std::string line;
    while (std::getline(in, line)) {
      auto toks = sga::tokenize(line);
      if (!toks.empty()) corpus.push_back(std::move(toks));
    }
  }
  auto lm = sga::NGramLM::train(corpus, order);
  std::ofstream out(out_path);
  if (!out) throw sga::IoError("cannot write " + out_path);
  lm.write_arpa(out);
  out.close();
  if (!out) throw sga::IoError("write failed: " + out_path);
  json counts = json::array();
  std::ostringstream os;
  for (int n = 1; n <= lm.order(); ++n) {
    counts.push_back(lm.ngram_count(n));
    os << "ngram " << n << "=" << lm.ngram_count(n) << "\n";
  }
  emit({{"model", out_path}, {"order", lm.order()}, {"sentences", corpus.size()}, {"ngrams", counts}},
       os.str());
  return kOk;
}

int cmd_lm_score(const std::string &model, const std::string &text) {
  auto lm = load_lm(model);
  std::istringstream in(text_arg(text));
  std::string line;
  json rows = json::array();
  std::ostringstream os;
  double total = 0;
  while (std::getline(in, line)) {
    auto toks = sga::tokenize(line);
    if (toks.empty()) continue;
    double s = lm.score_sequence(toks);
    total += s;
    rows.push_back({{"text", sga::join(toks)}, {"log10", s}});
    os << fmt(s) << "\t" << sga::join(toks) << "\n";
  }
  os << "total: " << fmt(total) << "\n";
  emit({{"sentences", rows}, {"total_log10", total}}, os.str());
  return kOk;
}

int cmd_rescore(const std::string &model, const std::string &nbest_path, double gamma) {
  auto lm = load_lm(model);
  auto nbest = sga::load_nbest(nbest_path);
  auto r = sga::rescore_nbest_detailed(nbest, lm, sga::FusionConfig{gamma});
  std::ostringstream os;
  for (std::size_t i = 0; i < r.fused.size(); ++i)
    os << (i == r.index ? "* " : "  ") << fmt(r.fused[i]) << "\t"
       << sga::join(nbest.entries[i].tokens) << "\n";
  emit({{"index", r.index}, {"text", sga::join(r.transcript.tokens)}, {"fused", r.fused}},
       os.str());
  return kOk;
}

int cmd_decode(const std::string &file, const std::string &observed, double gamma,
               const std::string &model, int sentence, int order) {
  auto p = load_paragraph(file);
  auto lattices = sga::paragraph_lattices(p);
  if (sentence >= 0) {
    if (sentence >= static_cast<int>(lattices.size()))
      throw sga::ConfigError("--sentence out of range");
    lattices = {lattices[sentence]};
  }
  auto lm = model.empty() ? sga::NGramLM::train(sga::variant_corpus(p), order) : load_lm(model);
  auto obs = sga::parse_transcript(text_arg(observed));
  auto r = sga::constrained_decode(obs, lattices, &lm, sga::FusionConfig{gamma}, sga::ChannelConfig{});
  json choices = json::array();
  std::ostringstream os;
  os << sga::join(r.tokens) << "\n";
  for (const auto &c : r.choices) {
    choices.push_back({{"slot", c.slot},
                       {"option", c.option},
                       {"observed", {c.observed_begin, c.observed_end}}});
    os << "slot " << c.slot << " -> " << p.slots.at(c.slot).options.at(c.option).text << "\n";
  }
  os << "cost: " << fmt(r.cost) << " (channel " << fmt(r.channel_cost) << ", lm " << fmt(r.lm_log10)
     << ")\n";
  emit({{"text", sga::join(r.tokens)},
        {"choices", choices},
        {"cost", r.cost},
        {"channel_cost", r.channel_cost},
        {"lm_log10", r.lm_log10}},
       os.str());
  return kOk;
}

struct ChannelFlags {
  double noise = -1;
  double p_sub = -1, p_del = -1, p_ins = -1;
  std::string bias = "none";

  sga::ChannelConfig build() const {
    sga::ChannelConfig ch;
    if (noise >= 0) ch.p_sub = ch.p_del = ch.p_ins = noise;
    if (p_sub >= 0) ch.p_sub = p_sub;
    if (p_del >= 0) ch.p_del = p_del;
    if (p_ins >= 0) ch.p_ins = p_ins;
    ch.bias = sga::bias_mode_from_string(bias);
    ch.validate();
    return ch;
  }
};

int cmd_simulate(const std::string &file, double skill, std::uint64_t seed, const ChannelFlags &cf) {
  auto p = load_paragraph(file);
  auto ch = cf.build();
  auto reading = sga::simulate_reading(p, skill, seed);
  auto heard = sga::simulate_asr(reading.transcript, p, ch, sga::channel_seed(seed));
  std::ostringstream os;
  os << "spoken: " << sga::join(reading.transcript.tokens) << "\n"
     << "recognized: " << sga::join(heard.tokens) << "\n";
  emit({{"spoken", sga::join(reading.transcript.tokens)},
        {"recognized", sga::join(heard.tokens)},
        {"choices", reading.choices}},
       os.str());
  return kOk;
}

int cmd_score(const std::string &file, const std::string &hyp, const std::string &gold_hyp,
              const std::string &decode, double gamma, int order) {
  auto p = load_paragraph(file);
  auto forms = sga::render_gold(p);
  auto h = sga::parse_transcript(text_arg(hyp));
  if (decode == "constrained") {
    auto lm = sga::NGramLM::train(sga::variant_corpus(p), order);
    auto r = sga::constrained_decode(h, sga::paragraph_lattices(p), &lm, sga::FusionConfig{gamma},
                                     sga::ChannelConfig{});
    h = sga::Transcript{r.tokens, sga::TranscriptSource::constrained_decode};
  }
  auto report = sga::g_score(h, forms);
  if (!gold_hyp.empty()) {
    auto gold = sga::g_score(sga::parse_transcript(text_arg(gold_hyp)), forms);
    sga::grammar_error(report, gold);
  }
  emit(sga::to_json(report), report_text(report));
  return kOk;
}

int cmd_wer(const std::string &ref, const std::string &hyp) {
  auto r = sga::parse_transcript(text_arg(ref));
  auto h = sga::parse_transcript(text_arg(hyp));
  auto a = sga::align(r.tokens, h.tokens);
  double w = sga::wer(r, h);
  std::size_t S = a.count(sga::EditKind::substitution), D = a.count(sga::EditKind::deletion),
              I = a.count(sga::EditKind::insertion);
  std::ostringstream os;
  os << "WER: " << fmt(w) << " (" << S << " sub, " << D << " del, " << I << " ins, "
     << r.tokens.size() << " ref words)\n";
  emit({{"wer", w},
        {"substitutions", S},
        {"deletions", D},
        {"insertions", I},
        {"reference_length", r.tokens.size()}},
       os.str());
  return kOk;
}

int cmd_gen(const std::string &subject, bool offline, std::uint64_t seed, int retries,
            std::size_t min_slots, std::size_t max_slots, const std::string &replay,
            const std::string &config) {
  sga::GenerationRequest r;
  if (!subject.empty()) r.subject = subject;
  r.max_retries = retries;
  r.min_slots = min_slots;
  r.max_slots = max_slots;
  try {
    r.validate();
  } catch (const sga::GenerationError &e) {
    throw sga::ConfigError(e.what());
  }
  if (offline) {
    auto text = sga::offline_generate_text(seed, r);
    emit({{"paragraph", text}, {"mode", "offline"}, {"seed", seed}}, text + "\n");
    return kOk;
  }
  std::unique_ptr<sga::ChatClient> client;
  if (!replay.empty()) {
    client = std::make_unique<sga::ReplayChatClient>(sga::ReplayChatClient::from_file(replay));
  } else {
    auto settings = config.empty() ? sga::LlmSettings::from_env()
                                   : sga::ServiceConfig::from_file(config).llm;
    if (!settings.configured())
      throw sga::ConfigError("no LLM endpoint configured (set SGA_LLM_ENDPOINT or use --offline)");
    client = std::make_unique<sga::HttpChatClient>(settings);
  }
  auto rec = sga::generate_paragraph(*client, sga::PromptTemplate::standard(), r);
  for (std::size_t i = 0; i < rec.attempts.size(); ++i)
    if (!rec.attempts[i].accepted)
      std::cerr << "attempt " << i + 1 << " rejected\n";
  if (!rec.accepted) {
    std::cerr << "error: " << rec.failure << "\n";
    if (g_json) std::cout << rec.to_json().dump(2) << "\n";
    return kValidation;
  }
  emit(rec.to_json(), sga::serialize_tagged(*rec.accepted) + "\n");
  return kOk;
}

sga::HttpServer *g_server = nullptr;

int cmd_serve(const std::string &config, const std::string &listen, const std::string &store) {
  sga::ServiceConfig cfg;
  if (!config.empty()) cfg = sga::ServiceConfig::from_file(config);
  if (!listen.empty()) {
    auto colon = listen.rfind(':');
    if (colon == std::string::npos) throw sga::ConfigError("--listen must be host:port");
    cfg.host = listen.substr(0, colon);
    try {
      cfg.port = std::stoi(listen.substr(colon + 1));
    } catch (const std::exception &) {
      throw sga::ConfigError("bad port in --listen");
    }
  }
  if (!store.empty()) cfg.store_path = store;
  cfg.validate();
  sga::AssessmentService service(cfg);
  sga::HttpServer server(service);
  int port = server.bind(cfg.host, cfg.port);
  std::cerr << "sga: " << service.session_count() << " sessions restored from "
            << cfg.store_path.string() << "\n"
            << "sga: listening on " << cfg.host << ":" << port << std::endl;
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  server.listen();
  g_server = nullptr;
  return kOk;
}

int cmd_cohort(const std::string &store, const std::string &format, const std::string &label,
               int simulate, const std::string &paragraph, const sga::CohortSimulation &base) {
  sga::CohortTable table;
  if (simulate > 0) {
    if (paragraph.empty()) throw sga::ConfigError("--simulate needs --paragraph");
    auto cfg = base;
    cfg.students = static_cast<std::size_t>(simulate);
    table = sga::cohort_report(sga::simulate_cohort(load_paragraph(paragraph), cfg));
  } else {
    if (store.empty()) throw sga::ConfigError("cohort needs --store or --simulate");
    if (!fs::exists(store)) throw sga::IoError("no such store: " + store);
    sga::ServiceConfig cfg;
    cfg.store_path = store;
    sga::AssessmentService service(cfg);
    auto r = service.cohort(g_json ? "json" : (format == "text" ? "text" : format), label);
    if (r.status != 200) {
      std::cerr << "error: " << r.body.value("error", "cohort report failed") << "\n";
      return kValidation;
    }
    std::cout << (r.text.empty() ? r.body.dump(2) + "\n" : r.text);
    return kOk;
  }
  if (g_json)
    std::cout << table.to_json().dump(2) << "\n";
  else if (format == "csv")
    std::cout << table.to_csv();
  else if (format == "json")
    std::cout << table.to_json().dump(2) << "\n";
  else
    std::cout << table.to_text("literal", "constrained");
  return kOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Spoken grammar assessment toolkit"};
  app.require_subcommand(1);
  app.add_flag("--json", g_json, "Machine-readable JSON on stdout");
  std::function<int()> run;

  std::string file, text, text2, model, out, corpus_out, config, listen, store, subject, replay,
      format = "text", label, decode = "literal", nbest;
  int order = 3, sentence = -1, retries = 3, simulate = 0;
  double gamma = 0.5, skill = 0.8;
  std::uint64_t seed = 0, cap = sga::kDefaultVariantCap;
  std::size_t min_slots = 8, max_slots = 12;
  bool offline = false, from_paragraph = false;
  ChannelFlags cf;
  sga::CohortSimulation cohort_sim;

  auto *parse = app.add_subcommand("parse", "Parse a tagged paragraph and list slots or issues");
  parse->add_option("file", file, "Tagged paragraph")->required();
  parse->callback([&] { run = [&] { return cmd_parse(file); }; });

  auto *display = app.add_subcommand("display", "Print the display paragraph");
  display->add_option("file", file)->required();
  display->callback([&] { run = [&] { return cmd_display(file); }; });

  auto *gold = app.add_subcommand("gold", "Print the gold paragraph, token count and graded phrases");
  gold->add_option("file", file)->required();
  gold->callback([&] { run = [&] { return cmd_gold(file); }; });

  auto *variants = app.add_subcommand("variants", "Enumerate sentence variants");
  variants->add_option("file", file)->required();
  variants->add_option("--sentence", sentence, "Only this sentence (0-based)");
  variants->add_option("--cap", cap, "Per-sentence enumeration cap");
  variants->add_option("--corpus", corpus_out, "Also write the variants as a training corpus");
  variants->callback([&] { run = [&] { return cmd_variants(file, sentence, cap, corpus_out); }; });

  auto *lm_train = app.add_subcommand("lm-train", "Train a Witten-Bell n-gram model");
  lm_train->add_option("corpus", file, "One sentence per line, or a tagged paragraph")->required();
  lm_train->add_option("-o,--output", out, "ARPA output path")->required();
  lm_train->add_option("--order", order)->check(CLI::Range(1, 5));
  lm_train->add_flag("--from-paragraph", from_paragraph,
                     "Treat the input as a tagged paragraph and train on its variants");
  lm_train->callback([&] { run = [&] { return cmd_lm_train(file, out, order, from_paragraph); }; });

  auto *lm_score = app.add_subcommand("lm-score", "Score sentences (one per line) with an ARPA model");
  lm_score->add_option("--lm", model)->required();
  lm_score->add_option("text", text, "File or literal text")->required();
  lm_score->callback([&] { run = [&] { return cmd_lm_score(model, text); }; });

  auto *rescore = app.add_subcommand("rescore", "Pick the best N-best entry by shallow fusion");
  rescore->add_option("--lm", model)->required();
  rescore->add_option("--nbest", nbest, "N-best JSON")->required();
  rescore->add_option("--gamma", gamma);
  rescore->callback([&] { run = [&] { return cmd_rescore(model, nbest, gamma); }; });

  auto *dec = app.add_subcommand("decode", "Constrained decode of a transcript against a paragraph");
  dec->add_option("--lattice-from", file, "Tagged paragraph")->required();
  dec->add_option("--observed", text, "Observed transcript (file or text)")->required();
  dec->add_option("--gamma", gamma);
  dec->add_option("--lm", model, "ARPA model (default: train on the paragraph's variants)");
  dec->add_option("--order", order)->check(CLI::Range(1, 5));
  dec->add_option("--sentence", sentence, "Decode against a single sentence lattice");
  dec->callback([&] { run = [&] { return cmd_decode(file, text, gamma, model, sentence, order); }; });

  auto add_channel = [&](CLI::App *sub) {
    sub->add_option("--noise", cf.noise, "Set substitution, deletion and insertion rates");
    sub->add_option("--p-sub", cf.p_sub);
    sub->add_option("--p-del", cf.p_del);
    sub->add_option("--p-ins", cf.p_ins);
    sub->add_option("--bias", cf.bias, "none | grammar_correcting");
  };
  auto *sim = app.add_subcommand("simulate", "Simulate a reading and its recognition");
  sim->add_option("--paragraph", file)->required();
  sim->add_option("--skill", skill)->check(CLI::Range(0.0, 1.0));
  sim->add_option("--seed", seed);
  add_channel(sim);
  sim->callback([&] { run = [&] { return cmd_simulate(file, skill, seed, cf); }; });

  auto *score = app.add_subcommand("score", "Grammar-score a transcript");
  score->add_option("--paragraph", file)->required();
  score->add_option("--hyp", text, "Transcript (file or text)")->required();
  score->add_option("--gold-hyp", text2, "Reference transcript for epsilon_g");
  score->add_option("--decode", decode, "literal | constrained")
      ->check(CLI::IsMember({"literal", "constrained"}));
  score->add_option("--gamma", gamma);
  score->add_option("--order", order)->check(CLI::Range(1, 5));
  score->callback([&] { run = [&] { return cmd_score(file, text, text2, decode, gamma, order); }; });

  auto *wer = app.add_subcommand("wer", "Word error rate");
  wer->add_option("ref", text)->required();
  wer->add_option("hyp", text2)->required();
  wer->callback([&] { run = [&] { return cmd_wer(text, text2); }; });

  auto *gen = app.add_subcommand("gen", "Generate a tagged paragraph");
  gen->add_option("--subject", subject);
  gen->add_flag("--offline", offline, "Use the built-in template generator");
  gen->add_option("--seed", seed);
  gen->add_option("--retries", retries);
  gen->add_option("--min-slots", min_slots);
  gen->add_option("--max-slots", max_slots);
  gen->add_option("--replay", replay, "Replay recorded chat responses from a fixture");
  gen->add_option("--config", config, "Service config with LLM settings");
  gen->callback([&] {
    run = [&] { return cmd_gen(subject, offline, seed, retries, min_slots, max_slots, replay, config); };
  });

  auto *serve = app.add_subcommand("serve", "Run the assessment HTTP service");
  serve->add_option("--config", config);
  serve->add_option("--listen", listen, "host:port");
  serve->add_option("--store", store, "Session log path");
  serve->callback([&] { run = [&] { return cmd_serve(config, listen, store); }; });

  auto *cohort = app.add_subcommand("cohort", "Cohort table from a session store or a simulation");
  cohort->add_option("--store", store);
  cohort->add_option("--format", format)->check(CLI::IsMember({"text", "csv", "json"}));
  cohort->add_option("--cohort", label, "Only sessions with this cohort label");
  cohort->add_option("--simulate", simulate, "Simulate N students instead of reading a store");
  cohort->add_option("--paragraph", file);
  cohort->add_option("--seed", cohort_sim.seed);
  cohort->add_option("--skill-min", cohort_sim.skill_min);
  cohort->add_option("--skill-max", cohort_sim.skill_max);
  cohort->add_option("--p-sub", cohort_sim.p_sub);
  cohort->add_option("--p-del", cohort_sim.p_del);
  cohort->add_option("--p-ins", cohort_sim.p_ins);
  cohort->add_option("--gamma", cohort_sim.gamma);
  cohort->callback([&] {
    run = [&] { return cmd_cohort(store, format, label, simulate, file, cohort_sim); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    return run();
  } catch (const sga::ConfigError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const sga::IoError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const sga::StoreError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const sga::ChatClientError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const sga::ParagraphError &e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto &i : e.issues())
      std::cerr << "  " << sga::to_string(i.kind) << " [" << i.begin << "," << i.end << ") "
                << i.message << "\n";
    return kValidation;
  } catch (const sga::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const fs::filesystem_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
}
