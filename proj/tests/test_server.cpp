// test_server.cpp : wire format, engine thread and live sockets
//
///////////////////////////////////////////////////////////////////////////
//
// Copyright 2026 The alia-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
///////////////////////////////////////////////////////////////////////////

#include <gtest/gtest.h>

#include <atomic>

#include "alia/server.hpp"

using namespace alia;
using namespace alia::service;

namespace {

const std::string kData = std::string(ALIA_SOURCE_DIR) + "/data";

http::request<http::string_body> request(http::verb v, const std::string& target, const std::string& body = "") {
  http::request<http::string_body> r{v, target, 11};
  r.set(http::field::host, "localhost");
  r.body() = body;
  r.prepare_payload();
  return r;
}

struct Collector {
  std::mutex m;
  std::vector<std::string> frames;
  void operator()(std::shared_ptr<const std::string> s) {
    std::lock_guard lk(m);
    frames.push_back(*s);
  }
  size_t size() {
    std::lock_guard lk(m);
    return frames.size();
  }
};

}  // namespace

TEST(Wire, InstructionReplies) {
  Engine e;
  json ok = instruction_reply(e.instruct("Tigers are animals."));
  EXPECT_EQ(ok["type"], "instruction_result");
  EXPECT_EQ(ok["ok"], true);
  EXPECT_EQ(ok["category"], "rule");
  EXPECT_EQ(ok["badge"], "rule added");
  EXPECT_EQ(ok["id"], 1);
  EXPECT_EQ(ok["text"], "tigers are animals");

  json bad = instruction_reply(e.instruct("if a tiger is peacock"));
  EXPECT_EQ(bad["ok"], false);
  EXPECT_EQ(bad["error"]["prefix"], "if a tiger is");
  EXPECT_EQ(bad["error"]["diagnostic"], "not understood after \"if a tiger is\" at \"peacock\"");
  EXPECT_EQ(bad["error"]["slot"], "");
}

TEST(Runner, StepWhilePausedPublishesExactlyThose) {
  Engine e;
  Runner r(e, 50, true);
  Collector c;
  r.set_listener(std::ref(c));
  r.start();
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  EXPECT_EQ(c.size(), 0u);
  json res = r.control("step", {{"n", 3}});
  EXPECT_EQ(res["ok"], true);
  EXPECT_EQ(res["cycle"], 3);
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  ASSERT_EQ(c.size(), 3u);
  for (int i = 0; i < 3; i++) EXPECT_EQ(json::parse(c.frames[i])["cycle"], i + 1);
  EXPECT_EQ(json::parse(*r.state())["cycle"], 3);
  r.stop();
}

TEST(Runner, StreamedSnapshotEqualsMemoryExport) {
  Engine e(load_scenario(kData + "/scenarios/tiger.scn"));
  Runner r(e, 10, true);
  std::vector<std::pair<std::string, std::string>> seen;   // (streamed, direct)
  r.set_listener([&](std::shared_ptr<const std::string> s) {
    seen.emplace_back(json::parse(*s)["memory"]["export"].get<std::string>(), e.memory().export_text(e.cycle()));
  });
  r.start();
  r.instruct({{"text", "drive forward"}});
  r.instruct({{"text", "If something is close then find out what it is."}});
  r.control("step", {{"n", 12}});
  r.stop();
  ASSERT_EQ(seen.size(), 12u);
  for (const auto& [streamed, direct] : seen) EXPECT_EQ(streamed, direct);
  EXPECT_NE(seen.back().first, seen.front().first);
}

TEST(Runner, ResumeRunsAtRateAndPauseStops) {
  Engine e;
  Runner r(e, 100, true);
  Collector c;
  r.set_listener(std::ref(c));
  r.start();
  r.control("resume", json::object());
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  r.control("pause", json::object());
  size_t n = c.size();
  EXPECT_GT(n, 10u);
  EXPECT_LT(n, 60u);
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  EXPECT_EQ(c.size(), n);
  EXPECT_TRUE(r.paused());
}

TEST(Runner, ControlErrors) {
  Engine e;
  Runner r(e);
  EXPECT_EQ(r.control("warp", {})["ok"], false);
  EXPECT_EQ(r.control("seed", json::object())["ok"], false);
  EXPECT_EQ(r.control("step", {{"n", "many"}})["ok"], false);
  EXPECT_EQ(r.control("step", {{"n", -2}})["ok"], false);
  EXPECT_EQ(r.control("load-scenario", {{"path", "/no/such.scn"}})["ok"], false);
  EXPECT_EQ(r.control("load-scenario", {{"text", "object x 1 2\n"}})["ok"], false);
  EXPECT_EQ(r.instruct({{"words", "hi"}})["ok"], false);
  json s = r.control("seed", {{"seed", 42}});
  EXPECT_EQ(s["ok"], true);
  EXPECT_EQ(e.seed(), 42u);
  json l = r.control("load-scenario", {{"path", kData + "/scenarios/zebra.scn"}});
  EXPECT_EQ(l["ok"], true);
  EXPECT_EQ(e.world().objects.at(0).name, "zebra");
}

TEST(Http, Endpoints) {
  Engine e;
  Runner r(e, 10, true);
  Server s(r, 0, kData + "/web");
  auto state = s.handle(request(http::verb::get, "/api/state"));
  EXPECT_EQ(state.result(), http::status::ok);
  EXPECT_EQ(json::parse(state.body())["type"], "snapshot");

  auto ok = s.handle(request(http::verb::post, "/api/instruction", R"({"text":"Tigers are animals."})"));
  EXPECT_EQ(ok.result(), http::status::ok);
  EXPECT_EQ(json::parse(ok.body())["badge"], "rule added");

  auto rejected = s.handle(request(http::verb::post, "/api/instruction", R"({"text":"peacock"})"));
  EXPECT_EQ(rejected.result(), http::status::ok);
  EXPECT_EQ(json::parse(rejected.body())["ok"], false);

  auto malformed = s.handle(request(http::verb::post, "/api/instruction", "{text:"));
  EXPECT_EQ(malformed.result(), http::status::bad_request);
  EXPECT_EQ(json::parse(malformed.body())["ok"], false);

  EXPECT_EQ(s.handle(request(http::verb::get, "/api/instruction")).result(), http::status::method_not_allowed);
  EXPECT_EQ(s.handle(request(http::verb::post, "/api/control/step", R"({"n":2})")).result(), http::status::ok);
  EXPECT_EQ(e.cycle(), 2);
  EXPECT_EQ(s.handle(request(http::verb::post, "/api/control/fly")).result(), http::status::bad_request);
  EXPECT_EQ(s.handle(request(http::verb::get, "/api/nothing")).result(), http::status::not_found);
  EXPECT_EQ(s.handle(request(http::verb::get, "/../alia.gram")).result(), http::status::bad_request);
  EXPECT_EQ(s.handle(request(http::verb::get, "/missing.js")).result(), http::status::not_found);
  auto index = s.handle(request(http::verb::get, "/"));
  EXPECT_EQ(index.result(), http::status::ok);
  EXPECT_EQ(index[http::field::content_type], "text/html");
}

TEST(Http, StreamFrames) {
  Engine e;
  Runner r(e, 10, true);
  Server s(r, 0);
  EXPECT_EQ(s.handle_frame("nope")["ok"], false);
  EXPECT_EQ(s.handle_frame(R"({"type":"dance"})")["ok"], false);
  EXPECT_EQ(s.handle_frame(R"({"type":"instruction","text":"drive forward"})")["badge"], "command posted");
  EXPECT_EQ(s.handle_frame(R"({"type":"control","action":"step","n":1})")["cycle"], 1);
}

TEST(Socket, HttpKeepAliveAndTwoIdenticalStreams) {
  Engine e(load_scenario(kData + "/scenarios/tiger.scn"));
  Runner runner(e, 10, true);
  Server server(runner, 0);
  runner.start();
  server.start(2);
  const auto port = std::to_string(server.port());

  net::io_context ioc;
  tcp::resolver resolver(ioc);
  auto where = resolver.resolve("127.0.0.1", port);

  // two stream clients, both greeted
  std::vector<std::unique_ptr<websocket::stream<tcp::socket>>> clients;
  for (int i = 0; i < 2; i++) {
    auto ws = std::make_unique<websocket::stream<tcp::socket>>(ioc);
    net::connect(ws->next_layer(), where);
    ws->handshake("127.0.0.1:" + port, "/api/stream");
    beast::flat_buffer b;
    ws->read(b);
    EXPECT_EQ(json::parse(beast::buffers_to_string(b.data()))["type"], "hello");
    clients.push_back(std::move(ws));
  }

  // one connection, a bad request, then a good one
  beast::tcp_stream http_conn(ioc);
  http_conn.connect(where);
  auto roundtrip = [&](http::request<http::string_body> req) {
    http::write(http_conn, req);
    beast::flat_buffer b;
    http::response<http::string_body> res;
    http::read(http_conn, b, res);
    return res;
  };
  auto bad = roundtrip(request(http::verb::post, "/api/instruction", "not json"));
  EXPECT_EQ(bad.result(), http::status::bad_request);
  EXPECT_TRUE(bad.keep_alive());
  auto good = roundtrip(request(http::verb::post, "/api/instruction", R"({"text":"drive forward"})"));
  EXPECT_EQ(good.result(), http::status::ok);
  auto step = roundtrip(request(http::verb::post, "/api/control/step", R"({"n":3})"));
  EXPECT_EQ(json::parse(step.body())["cycle"], 3);

  std::vector<std::vector<std::string>> got(2);
  for (int i = 0; i < 2; i++)
    for (int k = 0; k < 3; k++) {
      beast::flat_buffer b;
      clients[i]->read(b);
      got[i].push_back(beast::buffers_to_string(b.data()));
    }
  EXPECT_EQ(got[0], got[1]);
  for (int k = 0; k < 3; k++) EXPECT_EQ(json::parse(got[0][k])["cycle"], k + 1);

  // instructions over the stream are answered on that stream only
  clients[0]->write(net::buffer(std::string(R"({"type":"instruction","text":"Tigers are animals."})")));
  beast::flat_buffer b;
  clients[0]->read(b);
  EXPECT_EQ(json::parse(beast::buffers_to_string(b.data()))["badge"], "rule added");

  for (auto& c : clients) c->close(websocket::close_code::normal);
  beast::error_code ec;
  http_conn.socket().shutdown(tcp::socket::shutdown_both, ec);
  server.stop();
  runner.stop();
}
