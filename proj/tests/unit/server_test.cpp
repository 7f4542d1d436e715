#include "corpus.hpp"
#include "interact/gateway/server.hpp"

#include <doctest.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <sstream>
#include <thread>

using namespace interact;
using namespace interact::gateway;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

struct Reply {
  unsigned status = 0;
  std::string body;
};

Reply request(unsigned short port, http::verb verb, const std::string& target, const std::string& body = "") {
  net::io_context ioc;
  tcp::resolver resolver(ioc);
  beast::tcp_stream stream(ioc);
  stream.connect(resolver.resolve("127.0.0.1", std::to_string(port)));
  http::request<http::string_body> req{verb, target, 11};
  req.set(http::field::host, "127.0.0.1");
  if (!body.empty()) {
    req.set(http::field::content_type, "application/json");
    req.body() = body;
  }
  req.prepare_payload();
  http::write(stream, req);
  beast::flat_buffer buf;
  http::response<http::string_body> res;
  http::read(stream, buf, res);
  beast::error_code ec;
  stream.socket().shutdown(tcp::socket::shutdown_both, ec);
  return {res.result_int(), res.body()};
}

// Runs a server on an ephemeral port for the lifetime of the fixture.
struct LiveServer {
  std::ostringstream log;
  Gateway gateway{{testing_support::corpus_dir(), 6}};
  Server server{gateway, 0, log};
  std::thread thread{[this] { server.run(); }};

  ~LiveServer() {
    server.stop();
    thread.join();
  }
};

}  // namespace

TEST_SUITE("server") {
  TEST_CASE("http routes") {
    LiveServer live;
    const unsigned short port = live.server.port();
    REQUIRE(port != 0);

    const Reply cat = request(port, http::verb::get, "/scenarios");
    CHECK(cat.status == 200);
    const Json catalog = Json::parse(cat.body);
    CHECK(catalog.size() >= 10);

    const Reply created =
        request(port, http::verb::post, "/sessions", R"({"scenario_id":"laser_cutter","difficulty":"standard"})");
    CHECK(created.status == 201);
    const std::string id = Json::parse(created.body)["id"];

    const Reply state = request(port, http::verb::get, "/sessions/" + id + "/state");
    CHECK(state.status == 200);
    CHECK(Json::parse(state.body)["frame"]["tick"] == 0);

    const Reply log = request(port, http::verb::get, "/sessions/" + id + "/replay");
    CHECK(log.status == 200);
    CHECK(log.body.rfind("{\"header\"", 0) == 0);

    const Reply missing = request(port, http::verb::get, "/sessions/zzz/state");
    CHECK(missing.status == 404);
    CHECK(Json::parse(missing.body)["error"]["code"] == "E_NOT_FOUND");

    const Reply bad_diff =
        request(port, http::verb::post, "/sessions", R"({"scenario_id":"laser_cutter","difficulty":"zen"})");
    CHECK(bad_diff.status >= 400);
    CHECK(Json::parse(bad_diff.body)["error"]["message"].get<std::string>().find("guided") != std::string::npos);

    CHECK(request(port, http::verb::post, "/sessions", "{not json").status == 400);
    CHECK(request(port, http::verb::get, "/sessions/" + id + "/stream").status == 426);
  }

  TEST_CASE("stream pushes frames at the configured rate and takes commands") {
    LiveServer live;
    const unsigned short port = live.server.port();
    const Reply created =
        request(port, http::verb::post, "/sessions", R"({"scenario_id":"laser_cutter","difficulty":"expert"})");
    const std::string id = Json::parse(created.body)["id"];

    net::io_context ioc;
    tcp::resolver resolver(ioc);
    websocket::stream<tcp::socket> ws(ioc);
    net::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws.handshake("127.0.0.1", "/sessions/" + id + "/stream");

    // A second stream on the same session is refused.
    {
      websocket::stream<tcp::socket> ws2(ioc);
      net::connect(ws2.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
      beast::error_code ec;
      ws2.handshake("127.0.0.1", "/sessions/" + id + "/stream", ec);
      CHECK(ec);
    }

    int frames = 0;
    const auto start = std::chrono::steady_clock::now();
    beast::flat_buffer buf;
    while (std::chrono::steady_clock::now() - start < std::chrono::seconds(1)) {
      ws.read(buf);
      const Json msg = Json::parse(beast::buffers_to_string(buf.data()));
      buf.consume(buf.size());
      if (msg.contains("tick")) ++frames;
    }
    MESSAGE("frames in one second: " << frames);
    CHECK(frames >= 16);
    CHECK(frames <= 24);

    ws.write(net::buffer(std::string(R"({"kind":"hint","step":"power_off"})")));
    ws.write(net::buffer(std::string(R"({"kind":"teleport"})")));
    bool hinted = false, error_reply = false;
    for (int i = 0; i < 40 && !(hinted && error_reply); ++i) {
      ws.read(buf);
      const Json msg = Json::parse(beast::buffers_to_string(buf.data()));
      buf.consume(buf.size());
      if (msg.contains("error")) error_reply = true;
      if (msg.contains("helpers") && !msg["helpers"].empty() && msg["helpers"][0].contains("hint") &&
          !msg["helpers"][0]["hint"].is_null())
        hinted = true;
    }
    CHECK(hinted);
    CHECK(error_reply);

    ws.write(net::buffer(std::string(R"({"kind":"abandon"})")));
    bool final = false;
    for (int i = 0; i < 40 && !final; ++i) {
      beast::error_code ec;
      ws.read(buf, ec);
      if (ec) break;
      const Json msg = Json::parse(beast::buffers_to_string(buf.data()));
      buf.consume(buf.size());
      if (msg.contains("final")) final = true;
    }
    CHECK(final);
    beast::error_code ec;
    ws.close(websocket::close_code::normal, ec);

    const Reply after = request(port, http::verb::get, "/sessions/" + id + "/state");
    CHECK(Json::parse(after.body)["finished"] == true);
  }
}
