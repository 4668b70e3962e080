#include "cityzoom/server/net.hpp"

#include <deque>
#include <map>
#include <utility>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "cityzoom/error.hpp"
#include "cityzoom/serialization.hpp"
#include "cityzoom/server/api.hpp"

namespace cityzoom::server {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

struct RoomTarget {
  std::string room;
  std::string landscape;
};

std::optional<RoomTarget> parse_room_target(std::string_view target) {
  constexpr std::string_view prefix = "/rooms/";
  if (!target.starts_with(prefix)) return std::nullopt;
  target.remove_prefix(prefix.size());
  const auto q = target.find('?');
  RoomTarget out{std::string(target.substr(0, q)), {}};
  if (out.room.empty() || out.room.find('/') != std::string::npos) return std::nullopt;
  if (q != std::string_view::npos) {
    std::string_view query = target.substr(q + 1);
    while (!query.empty()) {
      const auto amp = query.find('&');
      const std::string_view pair = query.substr(0, amp);
      if (pair.starts_with("landscape=")) out.landscape = std::string(pair.substr(10));
      if (amp == std::string_view::npos) break;
      query.remove_prefix(amp + 1);
    }
  }
  return out;
}

}  // namespace

class WsSession;

struct Server::Impl {
  Impl(LandscapeStore& store, ServerOptions opts)
      : options(std::move(opts)),
        acceptor(ioc),
        api(store),
        host(store, options.host),
        tick_timer(ioc),
        signals(ioc) {
    const tcp::endpoint endpoint(asio::ip::make_address(options.address), options.port);
    acceptor.open(endpoint.protocol());
    acceptor.set_option(asio::socket_base::reuse_address(true));
    acceptor.bind(endpoint);
    acceptor.listen(asio::socket_base::max_listen_connections);
  }

  void accept();
  void schedule_tick();
  void dispatch(HostOutput out);

  ServerOptions options;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  Api api;
  RoomHost host;
  asio::steady_timer tick_timer;
  asio::signal_set signals;
  std::map<std::pair<std::string, UserId>, std::weak_ptr<WsSession>> sockets;
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(Server::Impl* server, tcp::socket&& socket, RoomTarget target)
      : server_(server),
        ws_(std::move(socket)),
        target_(std::move(target)),
        ping_timer_(ws_.get_executor()) {}

  void start(http::request<http::string_body> request) {
    ws_.set_option(websocket::stream_base::timeout{std::chrono::seconds(30), websocket::stream_base::none(),
                                                   false});
    ws_.text(true);
    ws_.async_accept(request, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  void send(std::string text) {
    if (closed_) return;
    queue_.push_back(std::move(text));
    if (queue_.size() == 1) write_next();
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    ping_timer_.cancel();
    ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) {});
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    try {
      user_ = server_->host.connect(target_.room, target_.landscape, Clock::now());
    } catch (const Error& e) {
      const Message reply{target_.room, 0, ErrorReply{"room_landscape_mismatch", e.what()}};
      queue_.push_back(serialize_message(reply));
      close_after_write_ = true;
      write_next();
      return;
    }
    server_->sockets[{target_.room, *user_}] = weak_from_this();
    ws_.control_callback([self = weak_from_this()](websocket::frame_type kind, beast::string_view) {
      if (kind != websocket::frame_type::pong) return;
      if (auto s = self.lock(); s && s->user_) s->server_->host.heartbeat(s->target_.room, *s->user_, Clock::now());
    });
    schedule_ping();
    read();
  }

  void schedule_ping() {
    ping_timer_.expires_after(server_->options.ping_interval);
    ping_timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closed_) return;
      self->ws_.async_ping({}, [self](beast::error_code) {});
      self->schedule_ping();
    });
  }

  void read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      finish();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    server_->dispatch(server_->host.receive(target_.room, *user_, text, Clock::now()));
    read();
  }

  void write_next() {
    ws_.async_write(asio::buffer(queue_.front()),
                    beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) return;
    queue_.pop_front();
    if (!queue_.empty()) {
      write_next();
    } else if (close_after_write_) {
      close();
    }
  }

  void finish() {
    closed_ = true;
    ping_timer_.cancel();
    if (!user_) return;
    server_->sockets.erase({target_.room, *user_});
    server_->dispatch(server_->host.disconnect(target_.room, *user_, Clock::now()));
    user_.reset();
  }

  Server::Impl* server_;
  websocket::stream<beast::tcp_stream> ws_;
  RoomTarget target_;
  asio::steady_timer ping_timer_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  std::optional<UserId> user_;
  bool closed_{false};
  bool close_after_write_{false};
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(Server::Impl* server, tcp::socket&& socket)
      : server_(server), stream_(std::move(socket)) {}

  void start() { read(); }

 private:
  void read() {
    request_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, request_,
                     beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (websocket::is_upgrade(request_)) {
      const auto raw = request_.target();
      if (auto target = parse_room_target({raw.data(), raw.size()})) {
        stream_.expires_never();
        std::make_shared<WsSession>(server_, stream_.release_socket(), std::move(*target))
            ->start(std::move(request_));
        return;
      }
    }
    HttpRequest req{std::string(request_.method_string()), std::string(request_.target()),
                    std::string(request_[http::field::content_type]), request_.body()};
    const HttpResponse res = server_->api.handle(req);
    auto response = std::make_shared<http::response<http::string_body>>(
        static_cast<http::status>(res.status), request_.version());
    response->set(http::field::content_type, res.content_type);
    response->keep_alive(request_.keep_alive());
    response->body() = res.body;
    response->prepare_payload();
    http::async_write(stream_, *response,
                      [self = shared_from_this(), response](beast::error_code ec, std::size_t) {
                        if (ec) return;
                        if (!response->keep_alive()) {
                          self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
                          return;
                        }
                        self->read();
                      });
  }

  Server::Impl* server_;
  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
};

void Server::Impl::accept() {
  acceptor.async_accept(ioc, [self = this](beast::error_code ec, tcp::socket socket) {
    if (ec) {
      if (ec == asio::error::operation_aborted) return;
    } else {
      std::make_shared<HttpSession>(self, std::move(socket))->start();
    }
    self->accept();
  });
}

void Server::Impl::schedule_tick() {
  tick_timer.expires_after(options.tick_interval);
  tick_timer.async_wait([self = this](beast::error_code ec) {
    if (ec) return;
    self->dispatch(self->host.tick(Clock::now()));
    self->schedule_tick();
  });
}

void Server::Impl::dispatch(HostOutput out) {
  for (const auto& o : out.messages) {
    auto it = sockets.find({o.message.room_id, o.recipient});
    if (it == sockets.end()) continue;
    if (auto s = it->second.lock()) s->send(serialize_message(o.message));
  }
  for (const auto& key : out.closed) {
    auto it = sockets.find(key);
    if (it == sockets.end()) continue;
    if (auto s = it->second.lock()) s->close();
    sockets.erase(it);
  }
}

Server::Server(LandscapeStore& store, ServerOptions options)
    : impl_(std::make_unique<Impl>(store, std::move(options))) {}

Server::~Server() { stop(); }

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
  impl_->accept();
  impl_->schedule_tick();
  if (impl_->options.handle_signals) {
    impl_->signals.add(SIGINT);
    impl_->signals.add(SIGTERM);
    impl_->signals.async_wait([this](beast::error_code ec, int) {
      if (!ec) stop();
    });
  }
  impl_->ioc.run();
}

void Server::stop() {
  asio::post(impl_->ioc, [impl = impl_.get()] {
    beast::error_code ec;
    impl->acceptor.close(ec);
    impl->tick_timer.cancel();
    impl->signals.cancel(ec);
    impl->ioc.stop();
  });
}

}  // namespace cityzoom::server
