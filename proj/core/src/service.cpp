// sga/service.cpp

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

#include "sga/service.hpp"
#include "sga/simulate.hpp"
#include "sga/transcript_io.hpp"

namespace sga {

// ---------------------------------------------------------------------------
// Config

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw ConfigError("port out of range");
  if (store_path.empty()) throw ConfigError("store_path must be set");
  if (!std::isfinite(gamma) || gamma < 0) throw ConfigError("gamma must be finite and >= 0");
  if (lm_order < 1 || lm_order > 5) throw ConfigError("lm_order must be within 1..5");
  if (simulator.skill < 0 || simulator.skill > 1) throw ConfigError("simulator.skill must be within [0, 1]");
  for (double p : {simulator.p_sub, simulator.p_del, simulator.p_ins})
    if (p < 0 || p > 1) throw ConfigError("simulator rates must be within [0, 1]");
  try {
    generation.validate();
  } catch (const GenerationError &e) {
    throw ConfigError(e.what());
  }
}

ServiceConfig ServiceConfig::from_json(const nlohmann::json &j) {
  ServiceConfig c;
  try {
    if (j.contains("listen")) {
      auto listen = j["listen"].get<std::string>();
      auto colon = listen.rfind(':');
      if (colon == std::string::npos) throw ConfigError("listen must be host:port");
      c.host = listen.substr(0, colon);
      c.port = std::stoi(listen.substr(colon + 1));
    }
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.store_path = j.value("store_path", c.store_path.string());
    c.gamma = j.value("gamma", c.gamma);
    c.lm_order = j.value("lm_order", c.lm_order);
    if (j.contains("llm")) c.llm = LlmSettings::from_json(j["llm"]);
    if (j.contains("llm_replay")) c.llm_replay = j["llm_replay"].get<std::string>();
    if (j.contains("generation")) {
      const auto &g = j["generation"];
      c.generation.max_retries = g.value("max_retries", c.generation.max_retries);
      c.generation.min_slots = g.value("min_slots", c.generation.min_slots);
      c.generation.max_slots = g.value("max_slots", c.generation.max_slots);
    }
    if (j.contains("simulator")) {
      const auto &s = j["simulator"];
      c.simulator.skill = s.value("skill", c.simulator.skill);
      c.simulator.p_sub = s.value("p_sub", c.simulator.p_sub);
      c.simulator.p_del = s.value("p_del", c.simulator.p_del);
      c.simulator.p_ins = s.value("p_ins", c.simulator.p_ins);
      if (s.contains("bias")) c.simulator.bias = bias_mode_from_string(s["bias"].get<std::string>());
    }
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("bad service config: ") + e.what());
  } catch (const std::invalid_argument &) {
    throw ConfigError("bad listen port");
  } catch (const DecodeError &e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

ServiceConfig ServiceConfig::from_file(const std::filesystem::path &path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error &e) {
    throw ConfigError(e.what());
  }
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ConfigError("config is not a JSON object: " + path.string());
  return from_json(j);
}

// ---------------------------------------------------------------------------
// Service

struct AssessmentService::Entry {
  std::mutex mu;  // serializes state transitions of this session
  AssessmentSession session;
  TaggedParagraph paragraph;
  RenderedForms forms;
  std::vector<VariantLattice> lattices;
  std::shared_ptr<const NGramLM> lm;
};

namespace {

ApiResponse error(int status, const std::string &message, nlohmann::json extra = {}) {
  nlohmann::json body = {{"error", message}};
  if (extra.is_object())
    for (auto &[k, v] : extra.items()) body[k] = v;
  return {status, body};
}

nlohmann::json issues_json(const std::vector<ValidationIssue> &issues) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto &i : issues) out.push_back(to_json(i));
  return out;
}

// Everything a student may see before scoring: the option groups in
// display order and nothing that singles out the correct one.
nlohmann::json display_body(const AssessmentSession &s,
                            const TaggedParagraph &p, const RenderedForms &forms) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto &slot : p.slots) {
    nlohmann::json options = nlohmann::json::array();
    for (const auto &o : slot.options) options.push_back(o.text);
    groups.push_back({{"index", slot.index}, {"options", options}});
  }
  return {{"id", s.id},
          {"status", to_string(s.status)},
          {"display_text", forms.display_text},
          {"slot_count", p.slot_count()},
          {"groups", groups},
          {"student", s.student},
          {"cohort", s.cohort}};
}

// "#12" sorts after "#9".
bool student_less(const std::string &a, const std::string &b) {
  auto number = [](const std::string &s) -> std::optional<long> {
    std::size_t i = 0;
    while (i < s.size() && !std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == s.size()) return std::nullopt;
    return std::stol(s.substr(i, 9));
  };
  auto na = number(a), nb = number(b);
  if (na && nb && *na != *nb) return *na < *nb;
  return a < b;
}

}  // namespace

AssessmentService::AssessmentService(ServiceConfig cfg, std::shared_ptr<ChatClient> client)
    : cfg_(std::move(cfg)), client_(std::move(client)), store_(cfg_.store_path) {
  cfg_.validate();
  if (!client_) {
    if (cfg_.llm_replay)
      client_ = std::make_shared<ReplayChatClient>(ReplayChatClient::from_file(*cfg_.llm_replay));
    else if (cfg_.llm.configured())
      client_ = std::make_shared<HttpChatClient>(cfg_.llm);
  }
  std::random_device rd;
  id_state_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  for (auto &s : store_.all()) {
    try {
      load(std::move(s));
    } catch (const std::exception &) {
      // A session whose paragraph no longer builds is left out of service.
    }
  }
}

AssessmentService::~AssessmentService() = default;

std::size_t AssessmentService::session_count() const {
  std::shared_lock lock(entries_mu_);
  return entries_.size();
}

std::shared_ptr<AssessmentService::Entry> AssessmentService::find(const std::string &id) const {
  std::shared_lock lock(entries_mu_);
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : it->second;
}

std::shared_ptr<AssessmentService::Entry> AssessmentService::load(AssessmentSession s) {
  auto e = std::make_shared<Entry>();
  e->paragraph = parse_tagged_or_throw(s.paragraph);
  e->forms = render_gold(e->paragraph);
  if (s.status != SessionStatus::scored) {
    e->lattices = paragraph_lattices(e->paragraph);
    e->lm = std::make_shared<const NGramLM>(
        NGramLM::train(variant_corpus(e->paragraph), cfg_.lm_order));
  }
  e->session = std::move(s);
  std::unique_lock lock(entries_mu_);
  entries_[e->session.id] = e;
  return e;
}

std::string AssessmentService::new_id() {
  std::unique_lock lock(entries_mu_);
  while (true) {
    // splitmix64 step
    std::uint64_t z = (id_state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(z));
    if (!entries_.count(buf)) return buf;
  }
}

ApiResponse AssessmentService::create(const nlohmann::json &request) {
  if (!request.is_object()) return error(400, "request body must be a JSON object");
  std::string mode;
  std::optional<std::string> subject;
  std::uint64_t seed = 0;
  try {
    mode = request.value("mode", request.contains("paragraph_text") ? "supplied" : "offline");
    if (request.contains("subject") && !request["subject"].is_null())
      subject = request["subject"].get<std::string>();
    seed = request.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception &e) {
    return error(400, std::string("malformed request: ") + e.what());
  }
  if (mode != "supplied" && mode != "offline" && mode != "llm")
    return error(400, "mode must be one of llm, offline, supplied");
  bool has_text = request.contains("paragraph_text");
  if ((mode == "supplied") != has_text)
    return error(400, mode == "supplied" ? "mode supplied requires paragraph_text"
                                         : "paragraph_text is only accepted with mode supplied");

  nlohmann::json provenance = {{"mode", mode}};
  std::string text;
  GenerationRequest gr = cfg_.generation;
  gr.subject = subject;
  if (subject) provenance["subject"] = *subject;

  if (mode == "supplied") {
    if (!request["paragraph_text"].is_string()) return error(400, "paragraph_text must be a string");
    text = request["paragraph_text"].get<std::string>();
    auto parsed = parse_tagged(text);
    if (!parsed.ok())
      return error(422, "paragraph failed validation", {{"issues", issues_json(parsed.issues)}});
  } else if (mode == "offline") {
    text = offline_generate_text(seed, gr);
    provenance["seed"] = seed;
  } else {
    if (!client_) return error(503, "no LLM endpoint is configured");
    GenerationRecord rec;
    try {
      std::lock_guard lock(client_mu_);
      rec = generate_paragraph(*client_, PromptTemplate::standard(), gr);
    } catch (const ChatClientError &e) {
      return error(502, e.what());
    }
    if (!rec.accepted)
      return error(502, rec.failure, {{"generation", rec.to_json()}});
    text = serialize_tagged(*rec.accepted);
    provenance["generation"] = rec.to_json();
  }

  AssessmentSession s;
  s.id = new_id();
  s.paragraph = text;
  s.created_at = s.updated_at = utc_timestamp();
  s.student = request.value("student", "");
  s.cohort = request.value("cohort", "");
  s.status = SessionStatus::created;
  provenance["lm"] = {{"order", cfg_.lm_order}, {"gamma", cfg_.gamma}};
  s.provenance = provenance;

  std::shared_ptr<Entry> e;
  try {
    e = load(s);
  } catch (const VariantCapExceeded &ex) {
    return error(422, ex.what());
  } catch (const SentenceSplitError &ex) {
    return error(422, ex.what());
  } catch (const ParagraphError &ex) {
    return error(422, ex.what(), {{"issues", issues_json(ex.issues())}});
  }
  std::lock_guard lock(e->mu);
  e->session.provenance["lm"]["ngrams"] = e->lm->ngram_count(1);
  store_.put(e->session);
  e->session.status = SessionStatus::displayed;
  e->session.updated_at = utc_timestamp();
  store_.put(e->session);
  auto body = display_body(e->session, e->paragraph, e->forms);
  return {201, body};
}

ApiResponse AssessmentService::display(const std::string &id) {
  auto e = find(id);
  if (!e) return error(404, "unknown assessment " + id);
  std::lock_guard lock(e->mu);
  return {200, display_body(e->session, e->paragraph, e->forms)};
}

ApiResponse AssessmentService::submit(const std::string &id, const nlohmann::json &payload) {
  auto e = find(id);
  if (!e) return error(404, "unknown assessment " + id);
  if (!payload.is_object()) return error(400, "submission must be a JSON object");

  std::lock_guard lock(e->mu);
  if (e->session.status != SessionStatus::displayed)
    return error(409, "assessment is " + std::string(to_string(e->session.status)) +
                          "; submissions are accepted only once, after display");

  int kinds = payload.contains("transcript") + payload.contains("nbest") + payload.contains("simulate");
  if (kinds != 1)
    return error(400, "submission needs exactly one of transcript, nbest, simulate");

  nlohmann::json record = {{"received_at", utc_timestamp()}};
  if (payload.contains("audio_ref")) record["audio_ref"] = payload["audio_ref"];
  Transcript hyp;
  std::optional<GrammarReport> gold;
  std::optional<int> gold_score;
  std::string decode;
  double gamma = cfg_.gamma;

  try {
    gamma = payload.value("gamma", cfg_.gamma);
    FusionConfig fusion{gamma};
    fusion.validate();
    if (payload.contains("transcript")) {
      record["kind"] = "transcript";
      decode = payload.value("decode", "literal");
      hyp = parse_transcript(payload["transcript"].get<std::string>());
    } else if (payload.contains("nbest")) {
      record["kind"] = "nbest";
      decode = payload.value("decode", "literal");
      auto nbest = parse_nbest(payload["nbest"]);
      auto r = rescore_nbest_detailed(nbest, *e->lm, fusion);
      hyp = r.transcript;
      record["nbest_index"] = r.index;
      record["fused"] = r.fused;
    } else {
      record["kind"] = "simulate";
      decode = payload.value("decode", "constrained");
      const auto &d = payload["simulate"];
      if (!d.is_object()) return error(400, "simulate must be an object");
      double skill = d.value("skill", cfg_.simulator.skill);
      std::uint64_t seed = d.value("seed", std::uint64_t{0});
      ChannelConfig ch;
      ch.p_sub = cfg_.simulator.p_sub;
      ch.p_del = cfg_.simulator.p_del;
      ch.p_ins = cfg_.simulator.p_ins;
      ch.bias = cfg_.simulator.bias;
      if (d.contains("noise")) ch.p_sub = ch.p_del = ch.p_ins = d["noise"].get<double>();
      ch.p_sub = d.value("p_sub", ch.p_sub);
      ch.p_del = d.value("p_del", ch.p_del);
      ch.p_ins = d.value("p_ins", ch.p_ins);
      if (d.contains("bias")) ch.bias = bias_mode_from_string(d["bias"].get<std::string>());
      if (skill < 0 || skill > 1) return error(400, "skill must be within [0, 1]");
      ch.validate();
      auto reading = simulate_reading(e->paragraph, skill, seed);
      hyp = simulate_asr(reading.transcript, e->paragraph, ch, channel_seed(seed));
      gold = g_score(reading.transcript, e->forms);
      record["simulate"] = {{"skill", skill},      {"seed", seed},     {"p_sub", ch.p_sub},
                            {"p_del", ch.p_del},   {"p_ins", ch.p_ins}, {"bias", to_string(ch.bias)}};
      record["spoken"] = join(reading.transcript.tokens);
      record["recognized"] = join(hyp.tokens);
    }
    if (payload.contains("gold_transcript"))
      gold = g_score(parse_transcript(payload["gold_transcript"].get<std::string>()), e->forms);
    if (payload.contains("gold_score")) gold_score = payload["gold_score"].get<int>();
  } catch (const nlohmann::json::exception &ex) {
    return error(400, std::string("malformed submission: ") + ex.what());
  } catch (const PayloadError &ex) {
    return error(400, ex.what());
  } catch (const DecodeError &ex) {
    return error(400, ex.what());
  } catch (const LmError &ex) {
    return error(400, ex.what());
  }
  if (decode != "literal" && decode != "constrained")
    return error(400, "decode must be literal or constrained");

  if (decode == "constrained") {
    auto r = constrained_decode(hyp, e->lattices, e->lm.get(), FusionConfig{gamma}, ChannelConfig{});
    hyp = Transcript{r.tokens, TranscriptSource::constrained_decode};
    record["decode_cost"] = r.cost;
  }
  record["decode"] = decode;
  record["gamma"] = gamma;
  record["transcript"] = join(hyp.tokens);
  if (payload.contains("student")) e->session.student = payload.value("student", e->session.student);
  if (payload.contains("cohort")) e->session.cohort = payload.value("cohort", e->session.cohort);

  GrammarReport report = g_score(hyp, e->forms);
  // An explicit human score wins over a gold transcript, which wins over
  // the simulator's own reading.
  if (gold_score) {
    report.gold_score = *gold_score;
    report.epsilon_g = std::abs(report.score - *gold_score);
  } else if (gold) {
    grammar_error(report, *gold);
  }

  e->session.submission = record;
  e->session.status = SessionStatus::submitted;
  e->session.updated_at = utc_timestamp();
  store_.put(e->session);
  e->session.report = report;
  e->session.status = SessionStatus::scored;
  e->session.updated_at = utc_timestamp();
  store_.put(e->session);
  e->lm.reset();  // no further submissions are possible

  nlohmann::json body = {{"id", id},
                         {"status", "scored"},
                         {"slot_count", e->paragraph.slot_count()},
                         {"transcript", record["transcript"]},
                         {"decode", decode},
                         {"report", to_json(report)}};
  return {200, body};
}

ApiResponse AssessmentService::report(const std::string &id) {
  auto e = find(id);
  if (!e) return error(404, "unknown assessment " + id);
  std::lock_guard lock(e->mu);
  const auto &s = e->session;
  if (s.status != SessionStatus::scored || !s.report)
    return error(409, "assessment is not scored yet");
  return {200,
          {{"id", s.id},
           {"status", to_string(s.status)},
           {"student", s.student},
           {"cohort", s.cohort},
           {"slot_count", e->paragraph.slot_count()},
           {"gold_text", e->forms.gold_text},
           {"submission", s.submission},
           {"report", to_json(*s.report)}}};
}

ApiResponse AssessmentService::cohort(const std::string &format, const std::string &cohort_filter) {
  if (format != "csv" && format != "json" && format != "text")
    return error(400, "format must be csv, json or text");

  struct Pair {
    std::optional<int> baseline, clm, gold;
  };
  std::map<std::string, Pair> by_student;
  std::vector<std::shared_ptr<Entry>> entries;
  {
    std::shared_lock lock(entries_mu_);
    for (const auto &[id, e] : entries_) entries.push_back(e);
  }
  for (const auto &e : entries) {
    std::lock_guard lock(e->mu);
    const auto &s = e->session;
    if (s.status != SessionStatus::scored || !s.report) continue;
    if (!cohort_filter.empty() && s.cohort != cohort_filter) continue;
    std::string label = s.student.empty() ? s.id : s.student;
    auto &p = by_student[label];
    std::string decode = s.submission.value("decode", "literal");
    (decode == "constrained" ? p.clm : p.baseline) = s.report->score;
    if (s.report->gold_score) p.gold = *s.report->gold_score;
  }

  std::vector<CohortRow> rows;
  nlohmann::json incomplete = nlohmann::json::array();
  for (const auto &[student, p] : by_student) {
    if (p.baseline && p.clm && p.gold)
      rows.push_back({student, *p.baseline, *p.clm, *p.gold});
    else
      incomplete.push_back(student);
  }
  if (rows.empty())
    return error(409, "no student has scored literal and constrained sessions with a gold score",
                 {{"incomplete", incomplete}});
  std::sort(rows.begin(), rows.end(),
            [](const CohortRow &a, const CohortRow &b) { return student_less(a.student, b.student); });

  auto table = cohort_report(rows);
  if (format == "csv") return {200, nullptr, table.to_csv(), "text/csv"};
  if (format == "text") return {200, nullptr, table.to_text("literal", "constrained"), "text/plain"};
  auto body = table.to_json();
  body["incomplete"] = incomplete;
  return {200, body};
}

}  // namespace sga
