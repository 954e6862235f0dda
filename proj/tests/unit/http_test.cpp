#include "gradarg/http_service.hpp"
#include "gradarg/session.hpp"

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <thread>

using namespace gradarg;
using nlohmann::json;

namespace {

class HttpApi : public ::testing::Test {
protected:
  void SetUp() override {
    service_ = std::make_unique<HttpService>(sessions_);
    port_ = service_->bind_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { service_->listen_after_bind(); });
    service_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }

  void TearDown() override {
    service_->stop();
    thread_.join();
  }

  json post(const std::string& path, const json& body, int expect) {
    auto res = client_->Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << path << " " << res->body;
    return json::parse(res->body);
  }

  json get(const std::string& path, int expect = 200) {
    auto res = client_->Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << path << " " << res->body;
    return json::parse(res->body);
  }

  std::string create(const std::string& corpus) {
    return post("/sessions", {{"corpus", corpus}}, 201)["id"].get<std::string>();
  }

  json toggle(const std::string& id, const std::string& arg, const std::string& actor, int expect = 200) {
    return post("/sessions/" + id + "/events",
                {{"actor", actor}, {"event", {{"type", "set_active"}, {"id", arg}, {"active", true}}}}, expect);
  }

  SessionManager sessions_;
  std::unique_ptr<HttpService> service_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace

TEST_F(HttpApi, ListsCorpora) {
  const auto j = get("/corpora");
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[1]["name"], "frailty_scenario2");
  EXPECT_EQ(j[1]["relations"], 26);
  EXPECT_EQ(j[1]["toggles"].size(), 18u);
}

TEST_F(HttpApi, SessionLifecycle) {
  const auto created = post("/sessions", {{"corpus", "frailty_scenario2"}}, 201);
  const auto id = created["id"].get<std::string>();
  EXPECT_EQ(created["togglable"].size(), 18u);
  EXPECT_TRUE(created["pending_tie"].is_null());
  EXPECT_EQ(get("/sessions")[0], id);

  toggle(id, "CG4", "cg");
  toggle(id, "CG5", "cg");
  const auto view = toggle(id, "CR3", "cr");
  EXPECT_NEAR(view["strengths"]["values"]["R"].get<double>(), 0.6, 1e-9);
  EXPECT_EQ(view["event_log"].size(), 3u);

  const auto s = get("/sessions/" + id + "/strengths?semantics=qe");
  EXPECT_NEAR(s["values"]["not_R"].get<double>(), 0.4, 1e-9);

  const auto d = post("/sessions/" + id + "/decision", json::object(), 200);
  EXPECT_EQ(d["status"], "decision");
  EXPECT_EQ(d["index"], 0);
  EXPECT_EQ(d["decision"]["selected"], "R");
  EXPECT_EQ(d["decision"]["branch"], "C");

  const auto e = get("/sessions/" + id + "/decisions/0/explanation");
  EXPECT_EQ(e["index"], 0);
  EXPECT_EQ(e["attribution"]["entries"].size(), 6u);
  EXPECT_EQ(e["trace"]["selected"], "R");

  auto log = client_->Get("/sessions/" + id + "/log");
  ASSERT_TRUE(log);
  EXPECT_EQ(std::count(log->body.begin(), log->body.end(), '\n'), 5);
}

TEST_F(HttpApi, TiePromptFlow) {
  const auto id = create("frailty_scenario1");
  toggle(id, "CG1", "cg");
  toggle(id, "CR2", "cr");
  const auto tie = post("/sessions/" + id + "/decision", {{"strategy", "interactive"}}, 200);
  EXPECT_EQ(tie["status"], "tie");
  EXPECT_EQ(tie["tie_prompt"]["round"], 1);
  EXPECT_EQ(get("/sessions/" + id)["pending_tie"]["round"], 1);

  post("/sessions/" + id + "/events",
       {{"actor", "robot"},
        {"event",
         {{"type", "add_argument"},
          {"argument", {{"id", "T9"}, {"kind", "task"}, {"active", true}, {"base_score", 0.5}}},
          {"relations", {{{"source", "T9"}, {"target", "R"}, {"polarity", "support"}}}}}}},
       200);
  const auto d = post("/sessions/" + id + "/decision", {{"strategy", "interactive"}}, 200);
  EXPECT_EQ(d["status"], "decision");
  EXPECT_EQ(d["decision"]["selected"], "R");
  EXPECT_EQ(d["decision"]["rounds"], 1);
}

TEST_F(HttpApi, ErrorBodies) {
  const auto id = create("frailty_scenario2");
  const auto forbidden = toggle(id, "CR3", "cg", 403);
  EXPECT_EQ(forbidden["code"], "FORBIDDEN");
  EXPECT_TRUE(forbidden.contains("message"));
  EXPECT_TRUE(forbidden.contains("detail"));

  EXPECT_EQ(get("/sessions/nope", 404)["code"], "NOT_FOUND");
  EXPECT_EQ(get("/sessions/" + id + "/decisions/-1/explanation", 404)["code"], "OUT_OF_RANGE");
  EXPECT_EQ(post("/sessions", {{"corpus", "nope"}}, 404)["code"], "UNKNOWN_CORPUS");
  EXPECT_EQ(post("/sessions", json::object(), 422)["code"], "INVALID_ARGUMENT");
  EXPECT_EQ(post("/sessions/" + id + "/events", {{"actor", "robot"}, {"event", {{"type", "remove_argument"}, {"id", "R"}}}}, 409)["code"],
            "OPTION_EDIT_FORBIDDEN");

  auto bad = client_->Post("/sessions", "{not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(json::parse(bad->body)["code"], "SYNTAX");

  const auto invalid = post("/sessions", {{"af_document", "option R\natt X R\n"}}, 422);
  EXPECT_EQ(invalid["code"], "INVALID_AF");
  ASSERT_TRUE(invalid["detail"].is_array());
  EXPECT_EQ(get("/no/such/route", 404)["code"], "NOT_FOUND");
}

TEST_F(HttpApi, SweepCsv) {
  auto res = client_->Get("/corpora/frailty_scenario1/sweep?target=T1&points=3");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body.substr(0, res->body.find('\n')), "tau,group,mean_gap,std_gap,pct_r,pct_nr,pct_tie");
  EXPECT_EQ(std::count(res->body.begin(), res->body.end(), '\n'), 10);
  auto bad = client_->Get("/corpora/frailty_scenario1/sweep?points=many");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
}
