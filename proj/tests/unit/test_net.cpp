#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>

#include "cityzoom/ingest.hpp"
#include "cityzoom/serialization.hpp"
#include "cityzoom/server/net.hpp"

using namespace cityzoom;
namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

class NetTest : public ::testing::Test {
 protected:
  void SetUp() override {
    server::ServerOptions opts;
    opts.address = "127.0.0.1";
    opts.port = 0;
    opts.tick_interval = std::chrono::milliseconds(20);
    srv = std::make_unique<server::Server>(store, opts);
    thread = std::thread([this] { srv->run(); });
  }
  void TearDown() override {
    srv->stop();
    thread.join();
  }

  http::response<http::string_body> request(http::verb verb, const std::string& target, const std::string& body,
                                            const std::string& type = "application/json") {
    asio::io_context ioc;
    beast::tcp_stream stream(ioc);
    stream.connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), srv->port()));
    http::request<http::string_body> req{verb, target, 11};
    req.set(http::field::host, "localhost");
    req.set(http::field::content_type, type);
    req.body() = body;
    req.prepare_payload();
    http::write(stream, req);
    beast::flat_buffer buf;
    http::response<http::string_body> res;
    http::read(stream, buf, res);
    return res;
  }

  server::LandscapeStore store;
  std::unique_ptr<server::Server> srv;
  std::thread thread;
};

class Client {
 public:
  Client(std::uint16_t port, const std::string& path) : ws_(ioc_) {
    tcp::resolver resolver(ioc_);
    asio::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("localhost", path);
  }
  ~Client() {
    beast::error_code ec;
    ws_.close(websocket::close_code::normal, ec);
  }

  void send(const Message& m) { ws_.write(asio::buffer(serialize_message(m))); }

  Message read() {
    beast::flat_buffer buf;
    ws_.read(buf);
    return parse_message(beast::buffers_to_string(buf.data()));
  }

  /// Skips other messages until one of type T arrives.
  template <typename T>
  std::pair<Message, T> wait_for(int limit = 50) {
    for (int i = 0; i < limit; ++i) {
      Message m = read();
      if (auto* p = std::get_if<T>(&m.payload)) {
        T copy = *p;
        return {std::move(m), std::move(copy)};
      }
    }
    throw std::runtime_error("message did not arrive");
  }

 private:
  asio::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
};

LandscapeStructure small_structure() {
  SyntheticParams p;
  p.apps = 2;
  p.packages_per_app = 2;
  p.classes_per_package = 2;
  p.link_density = 0.2;
  return generate_synthetic(3, p);
}

}  // namespace

TEST_F(NetTest, HttpRoutes) {
  auto health = request(http::verb::get, "/healthz", "");
  EXPECT_EQ(health.result_int(), 200);
  EXPECT_EQ(Json::parse(health.body()).at("status"), "ok");

  auto created = request(http::verb::post, "/landscapes", Json(small_structure()).dump());
  ASSERT_EQ(created.result_int(), 201) << created.body();
  const std::string id = Json::parse(created.body()).at("landscapeId");
  auto got = request(http::verb::get, "/landscapes/" + id, "");
  EXPECT_EQ(parse_structure(got.body()), small_structure());
  EXPECT_EQ(request(http::verb::get, "/landscapes/none/layout", "").result_int(), 404);
  EXPECT_EQ(request(http::verb::put, "/landscapes/" + id + "/settings", "{\"zoom\":{\"bandwidth\":0}}").result_int(),
            422);
}

TEST_F(NetTest, RoomOverWebSocket) {
  const std::string id = store.add(small_structure());
  const std::string path = "/rooms/lab?landscape=" + id;
  Client a(srv->port(), path);
  a.send(Message{"lab", 1, Join{"ann", ScreenSize{1200, 900}}});
  const auto [wm, welcome] = a.wait_for<Welcome>();
  EXPECT_EQ(welcome.color, kUserPalette[0]);
  EXPECT_EQ(welcome.snapshot.landscape_id, id);

  Client b(srv->port(), path);
  b.send(Message{"lab", 1, Join{"bob", std::nullopt}});
  const auto [bm, bw] = b.wait_for<Welcome>();
  const auto [jm, joined] = a.wait_for<UserJoined>();
  EXPECT_EQ(joined.user, bw.self_id);
  EXPECT_EQ(joined.name, "bob");
  EXPECT_GT(jm.seq, wm.seq);

  const CameraPose pose{{3, 70, 4}, {3, 0, 0}};
  a.send(Message{"lab", 2, CameraUpdate{std::nullopt, pose}});
  const auto [um, update] = a.wait_for<AppearanceUpdate>();
  EXPECT_FALSE(update.delta.empty());
  const auto [cm, cam] = b.wait_for<CameraUpdate>();
  EXPECT_EQ(cam.user, welcome.self_id);
  EXPECT_EQ(cam.pose, pose);

  a.send(Message{"lab", 3, SyncRequest{}});
  for (;;) {
    const auto [sm, sync] = a.wait_for<StateSync>();
    if (!sync.poses.contains(welcome.self_id)) continue;  // an earlier periodic sync
    EXPECT_EQ(sync.poses.at(welcome.self_id), pose);
    ASSERT_TRUE(sync.frame);
    break;
  }

  a.send(Message{"lab", 4, Leave{}});
  EXPECT_EQ(b.wait_for<UserLeft>().second.user, welcome.self_id);
}

TEST_F(NetTest, RejectedMessageGetsError) {
  const std::string id = store.add(small_structure());
  Client a(srv->port(), "/rooms/x?landscape=" + id);
  a.send(Message{"x", 1, Join{"ann", std::nullopt}});
  a.wait_for<Welcome>();
  a.send(Message{"x", 2, SpectateStart{std::nullopt, 12345}});
  const auto [m, err] = a.wait_for<ErrorReply>();
  EXPECT_EQ(err.code, "invalid_spectate");
  EXPECT_EQ(m.seq, 0u);
}
