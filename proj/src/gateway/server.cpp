#include "interact/gateway/server.hpp"

#include "interact/error.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <deque>
#include <set>

namespace interact::gateway {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

namespace {

struct Shared {
  Gateway& gateway;
  std::ostream& log;
  std::set<std::string> attached;  // sessions with an open stream; touched only on the I/O thread
};

Json error_body(const std::string& code, const std::string& message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

http::status status_for(const std::string& code) {
  if (code == "E_NOT_FOUND" || code == "E_UNKNOWN_DIFFICULTY") return http::status::not_found;
  if (code == "E_INVALID_SCENARIO") return http::status::unprocessable_entity;
  if (code == "E_BAD_INPUT") return http::status::bad_request;
  return http::status::internal_server_error;
}

Response reply(const Request& req, http::status status, std::string body,
               const char* type = "application/json") {
  Response res{status, req.version()};
  res.set(http::field::server, "interact");
  res.set(http::field::content_type, type);
  res.keep_alive(req.keep_alive());
  res.body() = std::move(body);
  res.prepare_payload();
  return res;
}

Response reply_json(const Request& req, http::status status, const Json& j) { return reply(req, status, j.dump()); }

std::string_view target_of(const Request& req) { return {req.target().data(), req.target().size()}; }

std::vector<std::string> split_path(std::string_view target) {
  target = target.substr(0, target.find('?'));
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < target.size()) {
    const std::size_t j = target.find('/', i);
    const std::size_t end = j == std::string_view::npos ? target.size() : j;
    if (end > i) parts.emplace_back(target.substr(i, end - i));
    i = end + 1;
  }
  return parts;
}

Response route(Shared& sh, const Request& req) {
  const auto path = split_path(target_of(req));
  try {
    if (path.size() == 1 && path[0] == "scenarios") {
      if (req.method() != http::verb::get) return reply_json(req, http::status::method_not_allowed, error_body("E_METHOD", "use GET"));
      return reply_json(req, http::status::ok, sh.gateway.list());
    }
    if (path.size() == 1 && path[0] == "sessions") {
      if (req.method() != http::verb::post) return reply_json(req, http::status::method_not_allowed, error_body("E_METHOD", "use POST"));
      const Json body = Json::parse(req.body(), nullptr, false);
      if (!body.is_object() || !body.contains("scenario_id") || !body.at("scenario_id").is_string()) {
        return reply_json(req, http::status::bad_request, error_body("E_BAD_INPUT", "expected {\"scenario_id\": ..., \"difficulty\": ...}"));
      }
      const std::string difficulty = body.contains("difficulty") && body.at("difficulty").is_string()
                                         ? body.at("difficulty").get<std::string>()
                                         : std::string();
      const std::string id = sh.gateway.create_session(body.at("scenario_id").get<std::string>(), difficulty);
      sh.log << "session " << id << " created\n";
      return reply_json(req, http::status::created, {{"id", id}});
    }
    if (path.size() == 3 && path[0] == "sessions") {
      const auto live = sh.gateway.find(path[1]);
      if (!live) return reply_json(req, http::status::not_found, error_body("E_NOT_FOUND", "unknown session '" + path[1] + "'"));
      if (req.method() != http::verb::get) return reply_json(req, http::status::method_not_allowed, error_body("E_METHOD", "use GET"));
      if (path[2] == "state") return reply_json(req, http::status::ok, live->state());
      if (path[2] == "replay") return reply(req, http::status::ok, live->replay_log(), "application/x-ndjson");
      if (path[2] == "stream") {
        return reply_json(req, http::status::upgrade_required, error_body("E_UPGRADE", "the stream needs a WebSocket upgrade"));
      }
    }
    return reply_json(req, http::status::not_found, error_body("E_NOT_FOUND", "no route " + std::string(target_of(req))));
  } catch (const EngineError& e) {
    return reply_json(req, status_for(e.code()), error_body(e.code(), e.what()));
  }
}

class StreamSession : public std::enable_shared_from_this<StreamSession> {
 public:
  StreamSession(tcp::socket&& socket, std::shared_ptr<LiveSession> live, Shared& sh, std::chrono::nanoseconds period)
      : ws_(std::move(socket)), timer_(ws_.get_executor()), live_(std::move(live)), sh_(sh), period_(period) {}

  void start(Request req) {
    sh_.attached.insert(live_->id());
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->finish();
      self->next_ = std::chrono::steady_clock::now() + self->period_;
      self->arm();
      self->read();
    });
  }

 private:
  void arm() {
    timer_.expires_at(next_);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) { self->on_timer(ec); });
  }

  void on_timer(beast::error_code ec) {
    if (ec || closing_ || done_) return;
    const auto out = live_->advance();
    if (out.frame) send(out.frame->dump());
    if (out.final) {
      send(out.final->dump());
      close_after_flush();
      return;
    }
    next_ += period_;
    // After a long stall, resume from now instead of bursting through the backlog.
    const auto now = std::chrono::steady_clock::now();
    if (now - next_ > std::chrono::seconds(1)) next_ = now;
    arm();
  }

  void read() {
    ws_.async_read(buf_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->finish();
      const std::string msg = beast::buffers_to_string(self->buf_.data());
      self->buf_.consume(self->buf_.size());
      self->handle(msg);
      if (!self->closing_) self->read();
    });
  }

  void handle(const std::string& msg) {
    try {
      const Json j = Json::parse(msg);
      if (const auto fin = live_->enqueue(command_from_json(j))) {
        send(fin->dump());
        close_after_flush();
      }
    } catch (const EngineError& e) {
      send(error_body(e.code(), e.what()).dump());
    } catch (const Json::exception& e) {
      send(error_body("E_BAD_INPUT", e.what()).dump());
    }
  }

  void send(std::string text) {
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) write_next();
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->finish();
      self->outbox_.pop_front();
      if (!self->outbox_.empty()) {
        self->write_next();
      } else if (self->closing_) {
        self->do_close();
      }
    });
  }

  void close_after_flush() {
    closing_ = true;
    timer_.cancel();
    if (outbox_.empty()) do_close();
  }

  void do_close() {
    ws_.async_close(websocket::close_reason(websocket::close_code::normal, "session ended"),
                    [self = shared_from_this()](beast::error_code) { self->finish(); });
  }

  void finish() {
    if (done_) return;
    done_ = true;
    timer_.cancel();
    sh_.attached.erase(live_->id());
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  beast::flat_buffer buf_;
  std::deque<std::string> outbox_;
  std::shared_ptr<LiveSession> live_;
  Shared& sh_;
  std::chrono::nanoseconds period_;
  std::chrono::steady_clock::time_point next_;
  bool closing_ = false;
  bool done_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Shared& sh) : stream_(std::move(socket)), sh_(sh) {}

  void start() { read(); }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buf_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec == http::error::end_of_stream) return self->shutdown();
      if (ec) return;
      self->on_request();
    });
  }

  void on_request() {
    if (websocket::is_upgrade(req_)) {
      const auto path = split_path(target_of(req_));
      const auto live = path.size() == 3 && path[0] == "sessions" && path[2] == "stream" ? sh_.gateway.find(path[1]) : nullptr;
      if (!live) return write(reply_json(req_, http::status::not_found, error_body("E_NOT_FOUND", "no such stream")));
      if (live->finished()) {
        return write(reply_json(req_, http::status::gone, error_body("E_SESSION_FINISHED", "session has ended")));
      }
      if (sh_.attached.count(live->id())) {
        return write(reply_json(req_, http::status::conflict, error_body("E_STREAM_BUSY", "a stream is already attached")));
      }
      stream_.expires_never();
      const auto period =
          std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::duration<double>(live->dt()));
      std::make_shared<StreamSession>(stream_.release_socket(), live, sh_, period)->start(std::move(req_));
      return;
    }
    write(route(sh_, req_));
  }

  void write(Response res) {
    auto sp = std::make_shared<Response>(std::move(res));
    http::async_write(stream_, *sp, [self = shared_from_this(), sp](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (!sp->keep_alive()) return self->shutdown();
      self->read();
    });
  }

  void shutdown() {
    beast::error_code ec;
    stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buf_;
  Request req_;
  Shared& sh_;
};

}  // namespace

struct Server::Impl {
  Impl(Gateway& gw, std::ostream& log) : shared{gw, log, {}}, acceptor(ioc) {}

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec == net::error::operation_aborted) return;
        shared.log << "accept failed: " << ec.message() << '\n';
      } else {
        std::make_shared<HttpSession>(std::move(socket), shared)->start();
      }
      accept();
    });
  }

  net::io_context ioc{1};
  Shared shared;
  tcp::acceptor acceptor;
};

Server::Server(Gateway& gateway, unsigned short port, std::ostream& log) : impl_(std::make_unique<Impl>(gateway, log)) {
  beast::error_code ec;
  const tcp::endpoint ep{net::ip::make_address("0.0.0.0"), port};
  impl_->acceptor.open(ep.protocol(), ec);
  if (!ec) impl_->acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) impl_->acceptor.bind(ep, ec);
  if (!ec) impl_->acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) throw EngineError("E_BIND", "cannot listen on port " + std::to_string(port) + ": " + ec.message());
}

Server::~Server() = default;

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
  impl_->accept();
  impl_->ioc.run();
}

void Server::stop() { impl_->ioc.stop(); }

}  // namespace interact::gateway
