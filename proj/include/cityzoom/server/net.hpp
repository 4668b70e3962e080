#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "cityzoom/server/room_host.hpp"
#include "cityzoom/server/store.hpp"

namespace cityzoom::server {

struct ServerOptions {
  std::string address{"0.0.0.0"};
  /// 0 picks a free port.
  std::uint16_t port{8080};
  HostConfig host;
  std::chrono::milliseconds tick_interval{100};
  std::chrono::milliseconds ping_interval{5000};
  /// Stop on SIGINT / SIGTERM.
  bool handle_signals{false};
};

/// HTTP API and WebSocket rooms (`/rooms/{roomId}?landscape={id}`) on one
/// port, served from a single I/O thread.
class Server {
 public:
  Server(LandscapeStore& store, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Port actually bound.
  std::uint16_t port() const;

  /// Serves until stop() is called.
  void run();

  /// Safe to call from any thread.
  void stop();

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace cityzoom::server
