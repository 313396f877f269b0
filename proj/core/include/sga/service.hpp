// sga/service.hpp
//
// Assessment lifecycle: create (generate or supply a paragraph), display,
// submit a reading, score and report. AssessmentService is transport
// independent; HttpServer maps it onto JSON-over-HTTP routes.

#ifndef SGA_SERVICE_HPP_
#define SGA_SERVICE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sga/cohort.hpp"
#include "sga/genai.hpp"
#include "sga/scoring.hpp"

namespace sga {

enum class SessionStatus { created, displayed, submitted, scored };

std::string_view to_string(SessionStatus s);
SessionStatus session_status_from_string(std::string_view s);

struct AssessmentSession {
  std::string id;
  std::string paragraph;  // tag-format source text
  std::string created_at;
  std::string updated_at;
  SessionStatus status = SessionStatus::created;
  std::string student;  // free-form label used by cohort reports
  std::string cohort;
  nlohmann::json submission;  // null until submitted
  std::optional<GrammarReport> report;
  nlohmann::json provenance = nlohmann::json::object();

  nlohmann::json to_json() const;
  static AssessmentSession from_json(const nlohmann::json &j);
};

class StoreError : public Error {
 public:
  using Error::Error;
};

// Append-only JSON-lines log, one full session per line, latest line per
// id wins. Lines that do not parse (a write cut short by a crash) are
// skipped on replay.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path path);

  void put(const AssessmentSession &s);
  std::optional<AssessmentSession> get(const std::string &id) const;
  std::vector<AssessmentSession> all() const;
  std::size_t skipped_lines() const { return skipped_; }
  const std::filesystem::path &path() const { return path_; }

  static std::map<std::string, AssessmentSession> replay(const std::filesystem::path &path,
                                                         std::size_t *skipped = nullptr);

 private:
  std::filesystem::path path_;
  std::map<std::string, AssessmentSession> latest_;
  std::size_t skipped_ = 0;
  mutable std::mutex mu_;
};

struct SimulatorDefaults {
  double skill = 0.8;
  double p_sub = 0.05;
  double p_del = 0.02;
  double p_ins = 0.02;
  BiasMode bias = BiasMode::grammar_correcting;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path store_path = "sga_sessions.jsonl";
  double gamma = 0.5;
  int lm_order = 3;
  LlmSettings llm = LlmSettings::from_env();
  std::optional<std::filesystem::path> llm_replay;  // recorded chat fixture
  GenerationRequest generation;
  SimulatorDefaults simulator;

  void validate() const;
  static ServiceConfig from_json(const nlohmann::json &j);
  static ServiceConfig from_file(const std::filesystem::path &path);
};

struct ApiResponse {
  ApiResponse() = default;
  ApiResponse(int status, nlohmann::json body, std::string text = {},
              std::string content_type = "application/json")
      : status(status), body(std::move(body)), text(std::move(text)),
        content_type(std::move(content_type)) {}

  int status = 200;
  nlohmann::json body;
  std::string text;  // when set, sent verbatim with content_type
  std::string content_type = "application/json";
};

class AssessmentService {
 public:
  // `client` serves mode "llm"; when null one is built from the config
  // (a replay client if llm_replay is set, else HTTP if configured).
  explicit AssessmentService(ServiceConfig cfg, std::shared_ptr<ChatClient> client = nullptr);
  ~AssessmentService();

  ApiResponse create(const nlohmann::json &request);
  ApiResponse display(const std::string &id);
  ApiResponse submit(const std::string &id, const nlohmann::json &payload);
  ApiResponse report(const std::string &id);
  ApiResponse cohort(const std::string &format, const std::string &cohort_filter = "");

  const ServiceConfig &config() const { return cfg_; }
  std::size_t session_count() const;

 private:
  struct Entry;

  std::shared_ptr<Entry> find(const std::string &id) const;
  std::shared_ptr<Entry> load(AssessmentSession s);
  std::string new_id();

  ServiceConfig cfg_;
  std::shared_ptr<ChatClient> client_;
  std::mutex client_mu_;
  SessionStore store_;
  std::map<std::string, std::shared_ptr<Entry>> entries_;
  mutable std::shared_mutex entries_mu_;
  std::uint64_t id_state_ = 0;
};

// Binds the service's routes onto an HTTP listener.
class HttpServer {
 public:
  explicit HttpServer(AssessmentService &service);
  ~HttpServer();

  // Returns the bound port (useful with port 0). Throws ConfigError.
  int bind(const std::string &host, int port);
  void listen();  // blocks until stop()
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sga

#endif  // SGA_SERVICE_HPP_
