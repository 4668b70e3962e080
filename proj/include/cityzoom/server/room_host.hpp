#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cityzoom/collab.hpp"
#include "cityzoom/server/session.hpp"
#include "cityzoom/server/store.hpp"

namespace cityzoom::server {

struct HostConfig {
  ThrottleConfig throttle;
  /// Minimum spacing of relayed camera updates per user (newest pose wins).
  std::chrono::milliseconds camera_interval{100};
  /// Silence after which a connection counts as gone.
  std::chrono::milliseconds heartbeat_timeout{15000};
};

struct HostOutput {
  /// Each message's room_id names its room.
  std::vector<Outgoing> messages;
  /// Connections the transport should close, as (room, user).
  std::vector<std::pair<std::string, UserId>> closed;

  void append(HostOutput&& other);
};

/// All rooms of one server. Drives the collab state machine, the per-user
/// semantic zoom sessions and the mini-map sync. Time is passed in, so the
/// host runs the same with a real or a simulated clock. Not thread-safe.
class RoomHost {
 public:
  explicit RoomHost(LandscapeStore& store, HostConfig config = {});

  /// Registers a new connection and returns its user id. A room is bound to
  /// the landscape named by its first connection; throws Error when a later
  /// connection names another one.
  UserId connect(const std::string& room_id, const std::string& landscape_id, TimePoint now);

  HostOutput receive(const std::string& room_id, UserId user, std::string_view text, TimePoint now);
  HostOutput receive(const std::string& room_id, UserId user, const Message& message, TimePoint now);

  /// Records liveness (pong or any frame).
  void heartbeat(const std::string& room_id, UserId user, TimePoint now);

  HostOutput disconnect(const std::string& room_id, UserId user, TimePoint now);

  /// Flushes coalesced camera updates and buffered poses, expires silent
  /// connections, applies settings changes and sends pending mini-map syncs.
  HostOutput tick(TimePoint now);

  const RoomState* room(const std::string& room_id) const;
  const SessionView* session(const std::string& room_id, UserId user) const;

 private:
  struct Connection {
    TimePoint last_seen;
    ScreenSize screen;
    std::optional<SessionView> session;
    std::optional<CameraPose> pending_broadcast;
    std::optional<TimePoint> last_broadcast;
  };
  struct Room {
    RoomState state;
    std::map<UserId, Connection> connections;
    std::shared_ptr<const PreparedLandscape> landscape;
    bool sync_dirty{false};
  };

  void emit(Room& room, UserId to, Payload payload, HostOutput& out) const;
  void send_appearance(Room& room, UserId to, std::optional<AppearanceDelta> delta, HostOutput& out) const;
  StateSync state_sync_for(const Room& room, UserId user) const;
  void apply(Room& room, UserId user, const Message& message, TimePoint now, HostOutput& out);

  LandscapeStore& store_;
  HostConfig config_;
  std::map<std::string, Room> rooms_;
  UserId next_user_{1};
};

}  // namespace cityzoom::server
