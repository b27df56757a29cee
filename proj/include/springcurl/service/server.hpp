#pragma once

#include <atomic>
#include <chrono>
#include <deque>
#include <filesystem>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "springcurl/service/live_session.hpp"
#include "springcurl/session_io/log.hpp"

namespace springcurl::service {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

struct ServerConfig {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  ///< 0 picks a free port
  /// Session logs go to `<data_root>/<participant>/`; empty disables logging.
  std::filesystem::path data_root;
  /// Optional directory of static client files served under `/`.
  std::filesystem::path static_root;
  LiveConfig live;
};

namespace detail {

inline std::string_view mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

/// "/a/b?x=1&role=y" -> value of `key`, if present.
inline std::optional<std::string> query_param(std::string_view target, std::string_view key) {
  const auto q = target.find('?');
  if (q == std::string_view::npos) return std::nullopt;
  std::string pair;
  std::istringstream in{std::string(target.substr(q + 1))};
  while (std::getline(in, pair, '&')) {
    const auto eq = pair.find('=');
    if (pair.compare(0, eq, key) == 0 && (eq == std::string::npos ? pair.size() : eq) == key.size()) {
      return eq == std::string::npos ? std::string{} : pair.substr(eq + 1);
    }
  }
  return std::nullopt;
}

inline std::string_view path_of(std::string_view target) { return target.substr(0, target.find('?')); }

}  // namespace detail

class Server;

/// One WebSocket client. Lives on the I/O thread only.
class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket socket, Server& server, Role role, std::uint64_t id)
      : ws_(std::move(socket)), server_(server), role_(role), id_(id) {}

  Role role() const { return role_; }
  std::uint64_t id() const { return id_; }

  void accept(http::request<http::string_body> req);

  /// Events queue up; only the newest snapshot is kept.
  void send_event(std::string text) {
    events_.push_back(std::move(text));
    pump();
  }
  void send_snapshot(std::string text) {
    if (snapshot_) ++dropped_;
    snapshot_ = std::move(text);
    pump();
  }

  std::size_t dropped_snapshots() const { return dropped_; }

  void shutdown() {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(ws_).close(ec);
  }

 private:
  void read();
  void closed();

  void pump() {
    if (writing_ || !open_) return;
    std::string next;
    if (!events_.empty()) {
      next = std::move(events_.front());
      events_.pop_front();
    } else if (snapshot_) {
      next = std::move(*snapshot_);
      snapshot_.reset();
    } else {
      return;
    }
    writing_ = true;
    out_ = std::move(next);
    ws_.text(true);
    ws_.async_write(net::buffer(out_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->writing_ = false;
      if (ec) return self->closed();
      self->pump();
    });
  }

  websocket::stream<tcp::socket> ws_;
  Server& server_;
  Role role_;
  std::uint64_t id_;
  beast::flat_buffer in_;
  std::deque<std::string> events_;
  std::optional<std::string> snapshot_;
  std::string out_;
  bool writing_ = false;
  bool open_ = false;
  bool closed_ = false;
  std::size_t dropped_ = 0;
};

/// HTTP + WebSocket front end for one live session. Network I/O runs on its
/// own thread; a separate executor thread owns the LiveSession, paces engine
/// steps to the wall clock and talks to the network only through queues.
class Server {
 public:
  Server(ServerConfig cfg, session_io::SessionManifest manifest)
      : cfg_(std::move(cfg)), manifest_(std::move(manifest)), acceptor_(io_) {
    std::function<void(const session_io::SessionEvent&)> sink;
    if (!cfg_.data_root.empty()) {
      writer_.emplace(cfg_.data_root);
      sink = [this](const session_io::SessionEvent& e) { (*writer_)(e); };
    }
    live_.emplace(manifest_, std::move(sink), cfg_.live);
  }

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;
  ~Server() { stop(); }

  /// Binds and starts both threads; returns the bound port.
  unsigned short start() {
    const tcp::endpoint ep(net::ip::make_address(cfg_.address), cfg_.port);
    acceptor_.open(ep.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen();
    port_ = acceptor_.local_endpoint().port();
    accept();
    publish_status();  // executor not running yet, so this is race-free
    running_ = true;
    io_thread_ = std::thread([this] { io_.run(); });
    exec_thread_ = std::thread([this] { executor_loop(); });
    return port_;
  }

  void stop() {
    if (!running_.exchange(false)) return;
    if (exec_thread_.joinable()) exec_thread_.join();
    // Close sockets on the I/O thread so clients see EOF instead of silence.
    std::promise<void> closed;
    auto done = closed.get_future();
    net::post(io_, [this, &closed] {
      beast::error_code ec;
      acceptor_.close(ec);
      for (const auto& c : connections_) c->shutdown();
      connections_.clear();
      closed.set_value();
    });
    done.wait_for(std::chrono::seconds(2));
    io_.stop();
    if (io_thread_.joinable()) io_thread_.join();
  }

  /// Blocks until stop() is called from another thread or a signal handler.
  void wait() {
    if (exec_thread_.joinable()) exec_thread_.join();
  }

  unsigned short port() const { return port_; }

  /// Snapshot of the live state taken on the executor thread.
  json health() const {
    std::lock_guard lock(status_mutex_);
    return status_;
  }

 private:
  friend class WsConnection;

  struct Connected {
    std::uint64_t id;
    Role role;
  };
  struct Disconnected {
    std::uint64_t id;
    Role role;
  };
  struct Incoming {
    std::uint64_t id;
    Role role;
    std::string text;
  };
  using Command = std::variant<Connected, Disconnected, Incoming>;

  void accept() {
    acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<HttpConnection>(std::move(socket), *this)->read();
      accept();
    });
  }

  // -- HTTP ------------------------------------------------------------------

  struct HttpConnection : std::enable_shared_from_this<HttpConnection> {
    HttpConnection(tcp::socket s, Server& srv) : socket(std::move(s)), server(srv) {}

    void read() {
      req = {};
      http::async_read(socket, buffer, req, [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) return;
        self->server.route(self);
      });
    }

    void reply(http::status status, std::string body, std::string_view type) {
      auto res = std::make_shared<http::response<http::string_body>>(status, req.version());
      res->set(http::field::content_type, beast::string_view(type.data(), type.size()));
      res->set(http::field::server, "springcurl");
      res->keep_alive(req.keep_alive());
      res->body() = std::move(body);
      res->prepare_payload();
      http::async_write(socket, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
        if (ec) return;
        if (!res->keep_alive()) {
          beast::error_code ignored;
          self->socket.shutdown(tcp::socket::shutdown_send, ignored);
          return;
        }
        self->read();
      });
    }

    tcp::socket socket;
    Server& server;
    beast::flat_buffer buffer;
    http::request<http::string_body> req;
  };

  void route(const std::shared_ptr<HttpConnection>& c) {
    const std::string target(c->req.target());
    const std::string_view path = detail::path_of(target);

    if (websocket::is_upgrade(c->req)) {
      if (path != "/ws") return c->reply(http::status::not_found, error_message("no such endpoint").dump(), "application/json");
      const std::string role_name = detail::query_param(target, "role").value_or("participant");
      if (role_name != "participant" && role_name != "experimenter") {
        return c->reply(http::status::bad_request, error_message("unknown role").dump(), "application/json");
      }
      const Role role = role_name == "experimenter" ? Role::Experimenter : Role::Participant;
      if (role == Role::Participant && participant_online_) {
        return c->reply(http::status::conflict, error_message("a participant is already connected").dump(),
                        "application/json");
      }
      if (role == Role::Participant) participant_online_ = true;
      auto ws = std::make_shared<WsConnection>(std::move(c->socket), *this, role, ++next_id_);
      connections_.insert(ws);
      ws->accept(std::move(c->req));
      enqueue(Connected{ws->id(), role});
      return;
    }

    if (c->req.method() != http::verb::get) {
      return c->reply(http::status::method_not_allowed, error_message("GET only").dump(), "application/json");
    }
    if (path == "/health") return c->reply(http::status::ok, health().dump(), "application/json");

    constexpr std::string_view prefix = "/session/";
    constexpr std::string_view suffix = "/manifest";
    if (path.size() > prefix.size() + suffix.size() && path.substr(0, prefix.size()) == prefix &&
        path.substr(path.size() - suffix.size()) == suffix) {
      const std::string id(path.substr(prefix.size(), path.size() - prefix.size() - suffix.size()));
      if (const auto m = find_manifest(id)) return c->reply(http::status::ok, m->dump(2), "application/json");
      return c->reply(http::status::not_found, error_message("unknown session").dump(), "application/json");
    }

    if (!cfg_.static_root.empty()) {
      if (auto file = static_file(path)) {
        std::string body = session_io::read_text(*file);
        return c->reply(http::status::ok, std::move(body), detail::mime_type(*file));
      }
    }
    c->reply(http::status::not_found, error_message("not found").dump(), "application/json");
  }

  std::optional<json> find_manifest(const std::string& id) const {
    if (id.empty() || id.find('/') != std::string::npos || id.find("..") != std::string::npos) return std::nullopt;
    if (id == manifest_.participant_id) {
      std::lock_guard lock(status_mutex_);
      return live_manifest_;
    }
    if (cfg_.data_root.empty()) return std::nullopt;
    const session_io::SessionPaths paths(cfg_.data_root, id);
    if (!std::filesystem::exists(paths.manifest())) return std::nullopt;
    json j = json::parse(session_io::read_text(paths.manifest()), nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    return j;
  }

  std::optional<std::filesystem::path> static_file(std::string_view path) const {
    std::string rel(path == "/" ? "/index.html" : path);
    if (rel.find("..") != std::string::npos) return std::nullopt;
    const auto p = cfg_.static_root / rel.substr(1);
    if (!std::filesystem::is_regular_file(p)) return std::nullopt;
    return p;
  }

  // -- network side of the queues (I/O thread) -------------------------------

  void on_ws_message(const WsConnection& c, std::string text) { enqueue(Incoming{c.id(), c.role(), std::move(text)}); }

  void on_ws_closed(const std::shared_ptr<WsConnection>& c) {
    if (!connections_.erase(c)) return;
    if (c->role() == Role::Participant) participant_online_ = false;
    enqueue(Disconnected{c->id(), c->role()});
  }

  void deliver(std::optional<std::uint64_t> to, Outgoing::Audience audience, std::string text) {
    for (const auto& c : connections_) {
      if (to && c->id() != *to) continue;
      if (audience == Outgoing::Audience::Experimenters && c->role() != Role::Experimenter) continue;
      c->send_event(text);
    }
  }

  void deliver_snapshot(std::string text) {
    for (const auto& c : connections_) c->send_snapshot(text);
  }

  // -- executor side ---------------------------------------------------------

  void enqueue(Command c) {
    std::lock_guard lock(queue_mutex_);
    queue_.push_back(std::move(c));
  }

  void post_out(std::optional<std::uint64_t> to, Outgoing::Audience audience, json body) {
    net::post(io_, [this, to, audience, text = body.dump()]() mutable { deliver(to, audience, std::move(text)); });
  }

  void apply(const Command& cmd) {
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, Connected>) {
            if (c.role == Role::Participant) live_->set_participant_connected(true);
          } else if constexpr (std::is_same_v<T, Disconnected>) {
            if (c.role == Role::Participant) live_->set_participant_connected(false);
          } else {
            try {
              const auto m = parse_client_message(c.text);
              if (const auto why = live_->handle(m, c.role)) {
                post_out(c.id, Outgoing::Audience::All, error_message(*why));
              }
            } catch (const Error& e) {
              post_out(c.id, Outgoing::Audience::All, error_message(e.what()));
            }
          }
        },
        cmd);
  }

  void publish_status() {
    json s = {{"status", "ok"},
              {"version", kWireVersion},
              {"participant_id", manifest_.participant_id},
              {"participant_connected", live_->participant_connected()},
              {"paused", live_->paused()}};
    const Session* session = live_->session();
    s["started"] = session != nullptr;
    s["done"] = session && session->done();
    if (session) {
      s["day"] = session->day();
      s["cursor_position"] = session->cursor().position();
    }
    std::lock_guard lock(status_mutex_);
    status_ = std::move(s);
    live_manifest_ = live_->manifest();
  }

  void executor_loop() {
    using clock = std::chrono::steady_clock;
    const auto step = std::chrono::milliseconds(manifest_.device.step_ms);
    const auto snapshot_every = std::chrono::microseconds(1'000'000 / std::max(1, cfg_.live.snapshot_hz));
    auto next_step = clock::now();
    auto next_snapshot = next_step;
    publish_status();
    while (running_) {
      std::deque<Command> pending;
      {
        std::lock_guard lock(queue_mutex_);
        pending.swap(queue_);
      }
      try {
        for (const auto& c : pending) apply(c);
        // Catch up after scheduler hiccups, but never spiral.
        for (int k = 0; k < 50 && clock::now() >= next_step; ++k) {
          live_->step();
          next_step += step;
        }
        if (clock::now() >= next_step) next_step = clock::now() + step;
      } catch (const std::exception& e) {
        post_out(std::nullopt, Outgoing::Audience::Experimenters, error_message(e.what()));
      }
      for (auto& o : live_->drain()) post_out(std::nullopt, o.audience, std::move(o.body));
      if (clock::now() >= next_snapshot) {
        net::post(io_, [this, text = live_->snapshot().dump()]() mutable { deliver_snapshot(std::move(text)); });
        publish_status();
        next_snapshot += snapshot_every;
        if (clock::now() >= next_snapshot) next_snapshot = clock::now() + snapshot_every;
      }
      std::this_thread::sleep_until(std::min(next_step, next_snapshot));
    }
  }

  ServerConfig cfg_;
  session_io::SessionManifest manifest_;
  std::optional<session_io::SessionDirectoryWriter> writer_;
  std::optional<LiveSession> live_;  // executor thread only

  net::io_context io_;
  tcp::acceptor acceptor_;
  unsigned short port_ = 0;
  std::thread io_thread_;
  std::thread exec_thread_;
  std::atomic<bool> running_{false};

  // I/O thread only.
  std::set<std::shared_ptr<WsConnection>> connections_;
  bool participant_online_ = false;
  std::uint64_t next_id_ = 0;

  std::mutex queue_mutex_;
  std::deque<Command> queue_;

  mutable std::mutex status_mutex_;
  json status_;
  json live_manifest_;
};

inline void WsConnection::accept(http::request<http::string_body> req) {
  ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
  ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
    if (ec) return self->closed();
    self->open_ = true;
    self->read();
    self->pump();
  });
}

inline void WsConnection::read() {
  ws_.async_read(in_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
    if (ec) return self->closed();
    self->server_.on_ws_message(*self, beast::buffers_to_string(self->in_.data()));
    self->in_.consume(self->in_.size());
    self->read();
  });
}

inline void WsConnection::closed() {
  if (closed_) return;
  closed_ = true;
  open_ = false;
  server_.on_ws_closed(shared_from_this());
}

}  // namespace springcurl::service
