// sga/session_store.cpp

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "sga/service.hpp"

namespace sga {

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::created: return "created";
    case SessionStatus::displayed: return "displayed";
    case SessionStatus::submitted: return "submitted";
    case SessionStatus::scored: return "scored";
  }
  return "created";
}

SessionStatus session_status_from_string(std::string_view s) {
  if (s == "created") return SessionStatus::created;
  if (s == "displayed") return SessionStatus::displayed;
  if (s == "submitted") return SessionStatus::submitted;
  if (s == "scored") return SessionStatus::scored;
  throw StoreError("unknown session status: " + std::string(s));
}

nlohmann::json AssessmentSession::to_json() const {
  nlohmann::json j = {{"id", id},
                      {"paragraph", paragraph},
                      {"created_at", created_at},
                      {"updated_at", updated_at},
                      {"status", to_string(status)},
                      {"student", student},
                      {"cohort", cohort},
                      {"submission", submission},
                      {"provenance", provenance}};
  j["report"] = report ? sga::to_json(*report) : nlohmann::json();
  return j;
}

AssessmentSession AssessmentSession::from_json(const nlohmann::json &j) {
  AssessmentSession s;
  s.id = j.at("id").get<std::string>();
  s.paragraph = j.at("paragraph").get<std::string>();
  s.created_at = j.value("created_at", "");
  s.updated_at = j.value("updated_at", "");
  s.status = session_status_from_string(j.at("status").get<std::string>());
  s.student = j.value("student", "");
  s.cohort = j.value("cohort", "");
  s.submission = j.value("submission", nlohmann::json());
  s.provenance = j.value("provenance", nlohmann::json::object());
  if (j.contains("report") && !j["report"].is_null()) s.report = report_from_json(j["report"]);
  return s;
}

std::map<std::string, AssessmentSession> SessionStore::replay(const std::filesystem::path &path,
                                                              std::size_t *skipped) {
  std::map<std::string, AssessmentSession> out;
  std::size_t bad = 0;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      ++bad;
      continue;
    }
    try {
      auto s = AssessmentSession::from_json(j);
      out[s.id] = std::move(s);
    } catch (const std::exception &) {
      ++bad;
    }
  }
  if (skipped) *skipped = bad;
  return out;
}

SessionStore::SessionStore(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  latest_ = replay(path_, &skipped_);
}

void SessionStore::put(const AssessmentSession &s) {
  std::string line = s.to_json().dump() + "\n";
  std::lock_guard lock(mu_);
  int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw StoreError("cannot open store " + path_.string() + ": " + std::strerror(errno));
  // A torn write from an earlier crash would leave a partial last line;
  // the leading newline check keeps this record on a line of its own.
  struct stat st {};
  if (::fstat(fd, &st) == 0 && st.st_size > 0) {
    char last = '\n';
    if (::pread(fd, &last, 1, st.st_size - 1) == 1 && last != '\n') line.insert(line.begin(), '\n');
  }
  const char *p = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      int err = errno;
      ::close(fd);
      throw StoreError("write to store failed: " + std::string(std::strerror(err)));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  latest_[s.id] = s;
}

std::optional<AssessmentSession> SessionStore::get(const std::string &id) const {
  std::lock_guard lock(mu_);
  auto it = latest_.find(id);
  if (it == latest_.end()) return std::nullopt;
  return it->second;
}

std::vector<AssessmentSession> SessionStore::all() const {
  std::lock_guard lock(mu_);
  std::vector<AssessmentSession> out;
  for (const auto &[id, s] : latest_) out.push_back(s);
  return out;
}

}  // namespace sga
