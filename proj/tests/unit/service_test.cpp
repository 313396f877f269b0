// tests/unit/service_test.cpp

#include <atomic>
#include <fstream>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "oracles.hpp"
#include "sga/service.hpp"

namespace sga {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sga_service_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  ServiceConfig config() const {
    ServiceConfig c;
    c.store_path = dir_ / "sessions.jsonl";
    c.llm = LlmSettings{};
    return c;
  }

  static std::string create_poetry(AssessmentService &svc, const std::string &student = "") {
    auto r = svc.create({{"paragraph_text", oracle::read_fixture("poetry.txt")}, {"student", student}});
    EXPECT_EQ(r.status, 201) << r.body.dump();
    return r.body["id"].get<std::string>();
  }

  fs::path dir_;
};

std::string gold_text() {
  return std::string(trim(oracle::read_fixture("poetry_gold.txt")));
}

TEST_F(ServiceTest, SuppliedParagraphIsDisplayedWithoutAnswers) {
  AssessmentService svc(config());
  auto r = svc.create({{"paragraph_text", oracle::read_fixture("poetry.txt")}});
  ASSERT_EQ(r.status, 201);
  EXPECT_EQ(r.body["slot_count"], 10);
  EXPECT_EQ(r.body["status"], "displayed");
  auto display = r.body["display_text"].get<std::string>();
  EXPECT_EQ(display, render_display(parse_tagged_or_throw(oracle::read_fixture("poetry.txt"))));
  EXPECT_NE(display.find("(study/studied/studying)"), std::string::npos);

  auto d = svc.display(r.body["id"]);
  ASSERT_EQ(d.status, 200);
  for (const auto &body : {r.body.dump(), d.body.dump()}) {
    EXPECT_EQ(body.find("<correct>"), std::string::npos);
    EXPECT_EQ(body.find("correct_index"), std::string::npos);
    EXPECT_EQ(body.find("gold"), std::string::npos);
    EXPECT_EQ(body.find("studying poetry"), std::string::npos);
  }
  EXPECT_EQ(svc.report(r.body["id"]).status, 409);
}

TEST_F(ServiceTest, OfflineModeIsDeterministic) {
  AssessmentService svc(config());
  auto a = svc.create({{"mode", "offline"}, {"seed", 7}, {"subject", "gardening"}});
  auto b = svc.create({{"mode", "offline"}, {"seed", 7}, {"subject", "gardening"}});
  ASSERT_EQ(a.status, 201);
  ASSERT_EQ(b.status, 201);
  EXPECT_NE(a.body["id"], b.body["id"]);
  EXPECT_EQ(a.body["display_text"], b.body["display_text"]);
  EXPECT_GE(a.body["slot_count"].get<int>(), 8);
}

TEST_F(ServiceTest, MalformedParagraphIs422WithIssues) {
  AssessmentService svc(config());
  auto r = svc.create({{"paragraph_text", oracle::read_fixture("generated_unclosed.txt")}});
  EXPECT_EQ(r.status, 422);
  EXPECT_NE(r.body.dump().find("unclosed-tag"), std::string::npos);
  EXPECT_EQ(svc.session_count(), 0u);
}

TEST_F(ServiceTest, BadCreateRequestsAre400) {
  AssessmentService svc(config());
  EXPECT_EQ(svc.create({{"mode", "dream"}}).status, 400);
  EXPECT_EQ(svc.create({{"mode", "offline"}, {"paragraph_text", "x"}}).status, 400);
  EXPECT_EQ(svc.create({{"mode", "supplied"}}).status, 400);
  EXPECT_EQ(svc.create({{"paragraph_text", 5}}).status, 400);
}

TEST_F(ServiceTest, LlmModeWithoutClientIs503) {
  AssessmentService svc(config());
  EXPECT_EQ(svc.create({{"mode", "llm"}}).status, 503);
}

TEST_F(ServiceTest, LlmModeUsesTheChatClient) {
  auto client = std::make_shared<ReplayChatClient>(std::vector<std::string>{
      oracle::read_fixture("generated_unclosed.txt"), oracle::read_fixture("generated_duplicate.txt")});
  AssessmentService svc(config(), client);
  auto r = svc.create({{"mode", "llm"}, {"subject", "poetry"}});
  ASSERT_EQ(r.status, 201) << r.body.dump();
  EXPECT_EQ(r.body["slot_count"], 10);
  EXPECT_EQ(client->requests().size(), 2u);

  auto failing = std::make_shared<ReplayChatClient>(std::vector<std::string>(4, "no tags here"));
  AssessmentService svc2(config(), failing);
  auto f = svc2.create({{"mode", "llm"}});
  EXPECT_EQ(f.status, 502);
  EXPECT_EQ(f.body["generation"]["attempts"].size(), 4u);
}

TEST_F(ServiceTest, GoldTranscriptScoresFull) {
  AssessmentService svc(config());
  auto id = create_poetry(svc);
  auto s = svc.submit(id, {{"transcript", gold_text()}, {"gold_transcript", gold_text()}});
  ASSERT_EQ(s.status, 200) << s.body.dump();
  EXPECT_EQ(s.body["report"]["score"], 10);
  EXPECT_EQ(s.body["report"]["epsilon_g"], 0);

  auto rep = svc.report(id);
  ASSERT_EQ(rep.status, 200);
  EXPECT_EQ(rep.body["report"]["score"], 10);
  EXPECT_EQ(rep.body["gold_text"], gold_text());
}

TEST_F(ServiceTest, PerfectSimulatedReadingScoresFull) {
  AssessmentService svc(config());
  auto id = create_poetry(svc);
  auto s = svc.submit(id, {{"simulate", {{"skill", 1.0}, {"noise", 0.0}, {"bias", "none"}, {"seed", 3}}}});
  ASSERT_EQ(s.status, 200) << s.body.dump();
  EXPECT_EQ(s.body["decode"], "constrained");
  EXPECT_EQ(s.body["report"]["score"], 10);
  EXPECT_EQ(s.body["transcript"], join(tokenize(gold_text())));
}

TEST_F(ServiceTest, NBestIsRescoredWithTheParagraphModel) {
  AssessmentService svc(config());
  auto id = create_poetry(svc);
  // The wrong reading is acoustically preferred; every option is equally
  // likely under the paragraph model, so the first entry is kept.
  std::string wrong = gold_text();
  wrong.replace(wrong.find("studying"), 8, "studied");
  json nbest = {{"entries",
                 {{{"text", wrong}, {"acoustic_log", -1.0}},
                  {{"text", gold_text()}, {"acoustic_log", -1.2}}}}};
  auto s = svc.submit(id, {{"nbest", nbest}});
  ASSERT_EQ(s.status, 200) << s.body.dump();
  EXPECT_EQ(s.body["report"]["score"], 9);
  EXPECT_EQ(s.body["transcript"], join(tokenize(wrong)));
  EXPECT_EQ(svc.report(id).body["submission"]["nbest_index"], 0);
}

TEST_F(ServiceTest, LifecycleErrors) {
  AssessmentService svc(config());
  EXPECT_EQ(svc.display("nope").status, 404);
  EXPECT_EQ(svc.submit("nope", {{"transcript", "x"}}).status, 404);
  EXPECT_EQ(svc.report("nope").status, 404);

  auto id = create_poetry(svc);
  EXPECT_EQ(svc.submit(id, json::object()).status, 400);
  EXPECT_EQ(svc.submit(id, {{"transcript", "a"}, {"simulate", json::object()}}).status, 400);
  EXPECT_EQ(svc.submit(id, {{"transcript", 5}}).status, 400);
  EXPECT_EQ(svc.submit(id, {{"nbest", {{"entries", json::array()}}}}).status, 400);
  EXPECT_EQ(svc.submit(id, {{"transcript", "a"}, {"decode", "magic"}}).status, 400);
  EXPECT_EQ(svc.report(id).status, 409);

  ASSERT_EQ(svc.submit(id, {{"transcript", gold_text()}}).status, 200);
  auto before = svc.report(id).body;
  EXPECT_EQ(svc.submit(id, {{"transcript", "something else"}}).status, 409);
  EXPECT_EQ(svc.report(id).body, before);
}

TEST_F(ServiceTest, CohortPairsLiteralAndConstrainedSessions) {
  AssessmentService svc(config());
  EXPECT_EQ(svc.cohort("csv").status, 409);
  EXPECT_EQ(svc.cohort("xml").status, 400);

  for (int i = 1; i <= 3; ++i) {
    std::string student = "#" + std::to_string(i);
    json sim = {{"skill", 0.7}, {"seed", i}, {"noise", 0.03}};
    auto a = create_poetry(svc, student);
    auto b = create_poetry(svc, student);
    auto sa = svc.submit(a, {{"simulate", sim}, {"decode", "literal"}, {"gold_score", 8}});
    auto sb = svc.submit(b, {{"simulate", sim}, {"decode", "constrained"}, {"gold_score", 8}});
    ASSERT_EQ(sa.status, 200);
    ASSERT_EQ(sb.status, 200);
  }
  auto csv = svc.cohort("csv");
  ASSERT_EQ(csv.status, 200);
  EXPECT_EQ(csv.content_type, "text/csv");
  EXPECT_NE(csv.text.find("#1"), std::string::npos);
  EXPECT_NE(csv.text.find("#3"), std::string::npos);

  auto j = svc.cohort("json");
  ASSERT_EQ(j.status, 200);
  EXPECT_EQ(j.body["rows"].size(), 3u);
  EXPECT_EQ(j.body["rows"][0]["student"], "#1");
  EXPECT_EQ(j.body["rows"][0]["gold"], 8);

  auto t = svc.cohort("text");
  ASSERT_EQ(t.status, 200);
  EXPECT_NE(t.text.find("Total"), std::string::npos);
  EXPECT_EQ(svc.cohort("json", "other-class").status, 409);
}

TEST_F(ServiceTest, StateSurvivesRestart) {
  std::string scored, displayed;
  {
    AssessmentService svc(config());
    scored = create_poetry(svc, "#1");
    displayed = create_poetry(svc, "#2");
    ASSERT_EQ(svc.submit(scored, {{"transcript", gold_text()}}).status, 200);
  }
  AssessmentService svc(config());
  EXPECT_EQ(svc.session_count(), 2u);
  EXPECT_EQ(svc.report(scored).body["report"]["score"], 10);
  EXPECT_EQ(svc.display(displayed).status, 200);
  EXPECT_EQ(svc.submit(displayed, {{"transcript", gold_text()}}).status, 200);
}

TEST_F(ServiceTest, TornLastLineIsSkipped) {
  std::string id;
  {
    AssessmentService svc(config());
    id = create_poetry(svc);
  }
  {
    std::ofstream out(config().store_path, std::ios::app);
    out << R"({"id": "half-written", "paragraph": "The <gram)";
  }
  {
    AssessmentService svc(config());
    EXPECT_EQ(svc.session_count(), 1u);
    ASSERT_EQ(svc.submit(id, {{"transcript", gold_text()}}).status, 200);
  }
  std::size_t skipped = 0;
  auto all = SessionStore::replay(config().store_path, &skipped);
  EXPECT_EQ(skipped, 1u);
  ASSERT_EQ(all.count(id), 1u);
  EXPECT_EQ(all.at(id).status, SessionStatus::scored);
}

TEST_F(ServiceTest, SessionJsonRoundTrip) {
  AssessmentService svc(config());
  auto id = create_poetry(svc);
  svc.submit(id, {{"transcript", gold_text()}});
  auto all = SessionStore::replay(config().store_path);
  const auto &s = all.at(id);
  EXPECT_EQ(AssessmentSession::from_json(s.to_json()).to_json(), s.to_json());
}

TEST(ServiceConfig, ParsesAndValidates) {
  auto c = ServiceConfig::from_json({{"listen", "0.0.0.0:9000"}, {"gamma", 1.5}, {"lm_order", 2}});
  EXPECT_EQ(c.host, "0.0.0.0");
  EXPECT_EQ(c.port, 9000);
  EXPECT_DOUBLE_EQ(c.gamma, 1.5);
  EXPECT_THROW(ServiceConfig::from_json({{"lm_order", 0}}), ConfigError);
  EXPECT_THROW(ServiceConfig::from_json({{"listen", "nohost"}}), ConfigError);
  EXPECT_THROW(ServiceConfig::from_file("/nonexistent/sga.json"), ConfigError);
}

TEST_F(ServiceTest, HttpRoutesDriveTheLifecycle) {
  AssessmentService svc(config());
  HttpServer server(svc);
  int port = server.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen(); });

  httplib::Client cli("127.0.0.1", port);
  cli.set_connection_timeout(5);
  httplib::Result res;
  for (int i = 0; i < 50 && !(res = cli.Get("/health")); ++i)
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);

  json create = {{"paragraph_text", oracle::read_fixture("poetry.txt")}, {"student", "#1"}};
  res = cli.Post("/assessments", create.dump(), "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 201);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  auto id = json::parse(res->body)["id"].get<std::string>();

  res = cli.Get("/assessments/" + id + "/display");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body.find("<correct>"), std::string::npos);

  res = cli.Get("/assessments/" + id + "/report");
  EXPECT_EQ(res->status, 409);

  res = cli.Post("/assessments/" + id + "/submission", "{not json", "application/json");
  EXPECT_EQ(res->status, 400);

  json sub = {{"transcript", gold_text()}, {"gold_transcript", gold_text()}};
  res = cli.Post("/assessments/" + id + "/submission", sub.dump(), "application/json");
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["report"]["score"], 10);

  res = cli.Get("/assessments/" + id + "/report");
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["report"]["score"], 10);

  res = cli.Get("/assessments/unknown/report");
  EXPECT_EQ(res->status, 404);
  res = cli.Get("/cohort/report?format=csv");
  EXPECT_EQ(res->status, 409);
  res = cli.Options("/assessments");
  EXPECT_EQ(res->status, 204);

  server.stop();
  t.join();
}

}  // namespace
}  // namespace sga
