// server.hpp : HTTP and WebSocket service for live dashboards
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
//
// Endpoints (wire formats in docs/api.md):
//
//   POST /api/instruction          {"text": ...}  -> instruction reply
//   GET  /api/state                latest snapshot
//   POST /api/control/pause        {}
//   POST /api/control/resume       {}
//   POST /api/control/step         {"n": 3}
//   POST /api/control/seed         {"seed": 7}
//   POST /api/control/load-scenario {"path": ...} or {"text": ...}
//   GET  /api/stream               WebSocket; one snapshot frame per cycle
//   GET  /*                        static dashboard files
//
// The engine lives on its own thread (Runner). Handlers only queue work
// for it; snapshots flow back through a broadcast callback.
//
///////////////////////////////////////////////////////////////////////////

#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <nlohmann/json.hpp>

#include "alia/engine.hpp"
#include "alia/persist.hpp"
#include "alia/world.hpp"

namespace alia::service {

using nlohmann::json;

///////////////////////////////////////////////////////////////////////////
//                              wire format                              //
///////////////////////////////////////////////////////////////////////////

inline json error_reply(const std::string& diagnostic, const std::string& prefix = "", const std::string& slot = "") {
  return {{"type", "error"}, {"ok", false}, {"error", {{"diagnostic", diagnostic}, {"prefix", prefix}, {"slot", slot}}}};
}

inline json instruction_reply(const InstructionResult& r) {
  if (!r.ok) {
    json j = error_reply(r.diagnostic, r.prefix, r.slot);
    j["type"] = "instruction_result";
    j["text"] = r.text;
    return j;
  }
  return {{"type", "instruction_result"},
          {"ok", true},
          {"text", r.text},
          {"category", std::string(to_string(r.category))},
          {"badge", r.badge},
          {"id", r.id}};
}

///////////////////////////////////////////////////////////////////////////
//                              engine thread                            //
///////////////////////////////////////////////////////////////////////////

class Runner {
 public:
  using Listener = std::function<void(std::shared_ptr<const std::string>)>;

  //= rate is cycles per second; <= 0 runs flat out.
  Runner(Engine& e, double rate = 10, bool paused = false) : e_(e), rate_(rate), paused_(paused) {
    latest_ = std::make_shared<const std::string>(e_.snapshot(0).dump());
  }

  ~Runner() { stop(); }

  void set_listener(Listener l) {
    std::lock_guard lk(m_);
    listener_ = std::move(l);
  }

  void start() {
    if (thread_.joinable()) return;
    {
      std::lock_guard lk(m_);
      stop_ = false;
      accepting_ = true;
    }
    thread_ = std::thread([this] { loop(); });
  }

  void stop() {
    {
      std::lock_guard lk(m_);
      stop_ = true;
    }
    cv_.notify_all();
    if (thread_.joinable()) thread_.join();
  }

  //= Run f(engine) on the engine thread and wait for the result.
  template <class F>
  auto call(F&& f) -> decltype(f(std::declval<Engine&>())) {
    using R = decltype(f(std::declval<Engine&>()));
    auto task = std::make_shared<std::packaged_task<R()>>([this, fn = std::forward<F>(f)]() mutable { return fn(e_); });
    auto fut = task->get_future();
    bool queued = false;
    {
      std::lock_guard lk(m_);
      if (accepting_) {
        tasks_.push_back([task] { (*task)(); });
        queued = true;
      }
    }
    if (queued) {
      cv_.notify_all();
    } else {
      std::lock_guard lk(inline_m_);
      (*task)();
    }
    return fut.get();
  }

  std::shared_ptr<const std::string> state() const {
    std::lock_guard lk(m_);
    return latest_;
  }

  bool paused() const {
    std::lock_guard lk(m_);
    return paused_;
  }

  json instruct(const json& req) {
    if (!req.is_object() || !req.contains("text") || !req["text"].is_string())
      return error_reply("malformed instruction: expected {\"text\": string}");
    std::string text = req["text"].get<std::string>();
    return call([&](Engine& e) { return instruction_reply(e.instruct(text)); });
  }

  //= pause, resume, step, seed, load-scenario
  json control(const std::string& action, const json& req) {
    auto ok = [&](json extra = json::object()) {
      extra["type"] = "control_result";
      extra["ok"] = true;
      extra["action"] = action;
      return extra;
    };
    try {
      if (action == "pause" || action == "resume") {
        {
          std::lock_guard lk(m_);
          paused_ = (action == "pause");
          due_ = std::chrono::steady_clock::now();
        }
        cv_.notify_all();
        return ok({{"paused", action == "pause"}});
      }
      if (action == "step") {
        int n = req.is_object() && req.contains("n") ? req["n"].get<int>() : 1;
        if (n < 0 || n > 100000) return error_reply("step count out of range");
        int cyc = call([&](Engine&) {
          for (int i = 0; i < n; i++) step_and_publish();
          return e_.cycle();
        });
        return ok({{"cycle", cyc}});
      }
      if (action == "seed") {
        if (!req.is_object() || !req.contains("seed")) return error_reply("expected {\"seed\": n}");
        uint64_t s = req["seed"].get<uint64_t>();
        call([&](Engine& e) {
          e.reseed(s);
          return 0;
        });
        return ok({{"seed", s}});
      }
      if (action == "load-scenario") {
        World w;
        std::string label;
        if (req.is_object() && req.contains("path")) {
          label = req["path"].get<std::string>();
          w = load_scenario(label);
        } else if (req.is_object() && req.contains("text")) {
          label = "(inline)";
          w = parse_scenario(req["text"].get<std::string>());
        } else {
          return error_reply("expected {\"path\": ...} or {\"text\": ...}");
        }
        call([&](Engine& e) {
          e.load_world(std::move(w), label);
          return 0;
        });
        return ok({{"scenario", label}});
      }
    } catch (const json::exception& ex) {
      return error_reply(std::string("malformed control request: ") + ex.what());
    } catch (const ConfigError& ex) {
      return error_reply(ex.what());
    }
    return error_reply("unknown control '" + action + "'");
  }

 private:
  void step_and_publish() {
    e_.step();
    auto snap = std::make_shared<const std::string>(e_.snapshot(published_).dump());
    published_ = e_.trace().size();
    Listener l;
    {
      std::lock_guard lk(m_);
      latest_ = snap;
      l = listener_;
    }
    if (l) l(snap);
  }

  void loop() {
    using clock = std::chrono::steady_clock;
    auto period = rate_ > 0 ? std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(1.0 / rate_))
                            : clock::duration::zero();
    {
      std::lock_guard lk(m_);
      due_ = clock::now();
    }
    for (;;) {
      std::deque<std::function<void()>> work;
      bool tick = false;
      {
        std::unique_lock lk(m_);
        auto ready = [&] { return stop_ || !tasks_.empty() || (!paused_ && clock::now() >= due_); };
        if (paused_) cv_.wait(lk, ready);
        else cv_.wait_until(lk, due_, ready);
        if (stop_) break;
        work.swap(tasks_);
        if (!paused_ && clock::now() >= due_) {
          tick = true;
          due_ += period;
          if (period == clock::duration::zero() || due_ < clock::now() - 10 * period) due_ = clock::now();
        }
      }
      for (auto& w : work) w();
      if (tick) step_and_publish();
    }
    // run whatever is still queued; later calls run inline
    std::deque<std::function<void()>> rest;
    {
      std::lock_guard lk(m_);
      accepting_ = false;
      rest.swap(tasks_);
    }
    for (auto& w : rest) w();
  }

  Engine& e_;
  double rate_;
  mutable std::mutex m_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> tasks_;
  bool accepting_ = false;
  std::mutex inline_m_;
  std::thread thread_;
  bool stop_ = false;
  bool paused_;
  std::chrono::steady_clock::time_point due_{};
  Listener listener_;
  std::shared_ptr<const std::string> latest_;
  size_t published_ = 0;
};

///////////////////////////////////////////////////////////////////////////
//                                network                                //
///////////////////////////////////////////////////////////////////////////

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

inline const char* mime_type(const std::string& path) {
  auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".map") return "application/json";
  return "application/octet-stream";
}

class Server;

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& s, Server& srv) : ws_(std::move(s)), srv_(srv) {}

  void run(http::request<http::string_body> req);

  //= Queue a frame; safe from any thread.
  void send(std::shared_ptr<const std::string> msg) {
    net::post(ws_.get_executor(), [self = shared_from_this(), msg] {
      self->queue_.push_back(msg);
      if (self->queue_.size() == 1) self->write_next();
    });
  }

  void close() {
    net::post(ws_.get_executor(), [self = shared_from_this()] {
      beast::error_code ec;
      beast::get_lowest_layer(self->ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
    });
  }

 private:
  void read_next() {
    ws_.async_read(buf_, [self = shared_from_this()](beast::error_code ec, size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec);

  void write_next() {
    ws_.text(true);
    ws_.async_write(net::buffer(*queue_.front()), [self = shared_from_this()](beast::error_code ec, size_t) {
      if (ec) return;
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write_next();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buf_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  Server& srv_;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& s, Server& srv) : stream_(std::move(s)), srv_(srv) {}

  void run() {
    net::dispatch(stream_.get_executor(), [self = shared_from_this()] { self->read_next(); });
  }

 private:
  void read_next() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buf_, req_, [self = shared_from_this()](beast::error_code ec, size_t) {
      self->on_read(ec);
    });
  }

  void on_read(beast::error_code ec);

  void reply(http::response<http::string_body> res) {
    auto sp = std::make_shared<http::response<http::string_body>>(std::move(res));
    bool close = sp->need_eof();
    http::async_write(stream_, *sp, [self = shared_from_this(), sp, close](beast::error_code ec, size_t) {
      if (ec) return;
      if (close) {
        beast::error_code ignore;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignore);
        return;
      }
      self->read_next();
    });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buf_;
  http::request<http::string_body> req_;
  Server& srv_;
};

class Server {
 public:
  Server(Runner& runner, unsigned short port, std::string static_root = "", std::string address = "127.0.0.1")
      : runner_(runner), acceptor_(ioc_), static_root_(std::move(static_root)) {
    tcp::endpoint ep(net::ip::make_address(address), port);
    acceptor_.open(ep.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen(net::socket_base::max_listen_connections);
    runner_.set_listener([this](std::shared_ptr<const std::string> snap) { broadcast(std::move(snap)); });
  }

  ~Server() { stop(); }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }
  Runner& runner() { return runner_; }

  void start(int threads = 2) {
    accept_next();
    for (int i = 0; i < threads; i++) threads_.emplace_back([this] { ioc_.run(); });
  }

  void stop() {
    runner_.set_listener(nullptr);
    {
      std::lock_guard lk(m_);
      for (auto& w : sessions_)
        if (auto s = w.lock()) s->close();
    }
    ioc_.stop();
    for (auto& t : threads_)
      if (t.joinable()) t.join();
    threads_.clear();
    std::unique_lock lk(m_);
    idle_.wait(lk, [&] { return workers_ == 0; });
  }

  //= Run f off the I/O threads. stop() waits for every f to finish and
  // release what it captured.
  void spawn(std::function<void()> f) {
    {
      std::lock_guard lk(m_);
      workers_++;
    }
    std::thread([this, f = std::move(f)]() mutable {
      f();
      f = nullptr;
      std::lock_guard lk(m_);
      workers_--;
      idle_.notify_all();
    }).detach();
  }

  //= Block the calling thread in the I/O loop (CLI use).
  void wait() {
    for (auto& t : threads_)
      if (t.joinable()) t.join();
  }

  void broadcast(std::shared_ptr<const std::string> msg) {
    std::lock_guard lk(m_);
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      if (auto s = it->lock()) {
        s->send(msg);
        ++it;
      } else {
        it = sessions_.erase(it);
      }
    }
  }

  void attach(const std::shared_ptr<WsSession>& s) {
    std::lock_guard lk(m_);
    sessions_.push_back(s);
  }

  //= Answer one plain HTTP request.
  http::response<http::string_body> handle(const http::request<http::string_body>& req) {
    std::string target(req.target());
    if (auto q = target.find('?'); q != std::string::npos) target.erase(q);
    auto json_res = [&](http::status st, const json& body) {
      http::response<http::string_body> res{st, req.version()};
      res.set(http::field::content_type, "application/json");
      res.set(http::field::access_control_allow_origin, "*");
      res.keep_alive(req.keep_alive());
      res.body() = body.dump();
      res.prepare_payload();
      return res;
    };
    auto parse_body = [&](json& out) -> bool {
      if (req.body().empty()) {
        out = json::object();
        return true;
      }
      try {
        out = json::parse(req.body());
        return true;
      } catch (const json::exception& e) {
        out = error_reply(std::string("malformed JSON: ") + e.what());
        return false;
      }
    };
    if (target == "/api/state" && req.method() == http::verb::get) {
      http::response<http::string_body> res{http::status::ok, req.version()};
      res.set(http::field::content_type, "application/json");
      res.keep_alive(req.keep_alive());
      res.body() = *runner_.state();
      res.prepare_payload();
      return res;
    }
    if (target == "/api/instruction") {
      if (req.method() != http::verb::post) return json_res(http::status::method_not_allowed, error_reply("use POST"));
      json body;
      if (!parse_body(body)) return json_res(http::status::bad_request, body);
      json r = runner_.instruct(body);
      return json_res(r.value("type", "") == "error" ? http::status::bad_request : http::status::ok, r);
    }
    const std::string ctl = "/api/control/";
    if (target.rfind(ctl, 0) == 0) {
      if (req.method() != http::verb::post) return json_res(http::status::method_not_allowed, error_reply("use POST"));
      json body;
      if (!parse_body(body)) return json_res(http::status::bad_request, body);
      json r = runner_.control(target.substr(ctl.size()), body);
      return json_res(r.value("ok", false) ? http::status::ok : http::status::bad_request, r);
    }
    if (target.rfind("/api/", 0) == 0) return json_res(http::status::not_found, error_reply("no endpoint " + target));
    return serve_static(req, target);
  }

  //= Text frame from a stream client.
  json handle_frame(const std::string& text) {
    json msg;
    try {
      msg = json::parse(text);
    } catch (const json::exception& e) {
      return error_reply(std::string("malformed JSON: ") + e.what());
    }
    std::string type = msg.is_object() ? msg.value("type", "") : "";
    if (type == "instruction") return runner_.instruct(msg);
    if (type == "control") return runner_.control(msg.value("action", ""), msg);
    return error_reply("unknown message type '" + type + "'");
  }

 private:
  http::response<http::string_body> serve_static(const http::request<http::string_body>& req, std::string target) {
    auto text_res = [&](http::status st, std::string body) {
      http::response<http::string_body> res{st, req.version()};
      res.set(http::field::content_type, "text/plain");
      res.keep_alive(req.keep_alive());
      res.body() = std::move(body);
      res.prepare_payload();
      return res;
    };
    if (req.method() != http::verb::get && req.method() != http::verb::head)
      return text_res(http::status::method_not_allowed, "method not allowed\n");
    if (static_root_.empty()) return text_res(http::status::not_found, "no dashboard bundle configured\n");
    if (target.empty() || target.back() == '/') target += "index.html";
    if (target.find("..") != std::string::npos) return text_res(http::status::bad_request, "bad path\n");
    std::string path = static_root_ + target;
    if (!std::filesystem::is_regular_file(path)) return text_res(http::status::not_found, "not found\n");
    std::string body;
    try {
      body = read_file(path);
    } catch (const ConfigError&) {
      return text_res(http::status::not_found, "not found\n");
    }
    http::response<http::string_body> res{http::status::ok, req.version()};
    res.set(http::field::content_type, mime_type(path));
    res.keep_alive(req.keep_alive());
    res.body() = req.method() == http::verb::head ? std::string() : std::move(body);
    res.prepare_payload();
    return res;
  }

  void accept_next() {
    acceptor_.async_accept(net::make_strand(ioc_), [this](beast::error_code ec, tcp::socket s) {
      if (ec) return;
      std::make_shared<HttpSession>(std::move(s), *this)->run();
      accept_next();
    });
  }

  Runner& runner_;
  net::io_context ioc_;
  tcp::acceptor acceptor_;
  std::string static_root_;
  std::vector<std::thread> threads_;
  std::mutex m_;
  std::condition_variable idle_;
  int workers_ = 0;
  std::vector<std::weak_ptr<WsSession>> sessions_;
};

inline void WsSession::run(http::request<http::string_body> req) {
  ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
  ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
    if (ec) return;
    self->srv_.attach(self);
    json hello{{"type", "hello"}, {"protocol", 1}};
    self->send(std::make_shared<const std::string>(hello.dump()));
    self->read_next();
  });
}

inline void WsSession::on_read(beast::error_code ec) {
  if (ec) return;
  std::string text = beast::buffers_to_string(buf_.data());
  buf_.consume(buf_.size());
  // engine work may block; keep the socket strand free meanwhile
  auto self = shared_from_this();
  srv_.spawn([self, text] {
    json r = self->srv_.handle_frame(text);
    self->send(std::make_shared<const std::string>(r.dump()));
  });
  read_next();
}

inline void HttpSession::on_read(beast::error_code ec) {
  if (ec == http::error::end_of_stream) {
    beast::error_code ignore;
    stream_.socket().shutdown(tcp::socket::shutdown_send, ignore);
    return;
  }
  if (ec) return;
  if (websocket::is_upgrade(req_)) {
    std::string target(req_.target());
    if (target.rfind("/api/stream", 0) == 0) {
      beast::get_lowest_layer(stream_).expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), srv_)->run(std::move(req_));
      return;
    }
  }
  // Runner::call blocks until the engine thread answers
  auto self = shared_from_this();
  srv_.spawn([self] {
    auto res = self->srv_.handle(self->req_);
    net::post(self->stream_.get_executor(), [self, res = std::move(res)]() mutable { self->reply(std::move(res)); });
  });
}

}  // namespace alia::service
