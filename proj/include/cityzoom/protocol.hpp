#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cityzoom/camera.hpp"
#include "cityzoom/minimap.hpp"
#include "cityzoom/room.hpp"
#include "cityzoom/semzoom.hpp"

namespace cityzoom {

// Client -> server. `user` fields are empty on the way in and filled in by the
// room when the message is relayed.

struct Join {
  std::string name;
  std::optional<ScreenSize> screen;
  friend bool operator==(const Join&, const Join&) = default;
};

struct Leave {
  friend bool operator==(const Leave&, const Leave&) = default;
};

struct CameraUpdate {
  std::optional<UserId> user;
  CameraPose pose;
  friend bool operator==(const CameraUpdate&, const CameraUpdate&) = default;
};

/// Highlights `entity_id` (color defaults to the user's color) or, with
/// active = false, removes the user's highlight of it.
struct Highlight {
  std::optional<UserId> user;
  std::string entity_id;
  std::optional<std::string> color;
  bool active{true};
  friend bool operator==(const Highlight&, const Highlight&) = default;
};

struct SpectateStart {
  std::optional<UserId> user;
  UserId target{0};
  friend bool operator==(const SpectateStart&, const SpectateStart&) = default;
};

struct SpectateStop {
  std::optional<UserId> user;
  friend bool operator==(const SpectateStop&, const SpectateStop&) = default;
};

/// Asks for a StateSync, e.g. after a reconnect.
struct SyncRequest {
  friend bool operator==(const SyncRequest&, const SyncRequest&) = default;
};

// Server -> client.

struct Welcome {
  UserId self_id{0};
  std::string color;
  RoomState snapshot;
  friend bool operator==(const Welcome&, const Welcome&) = default;
};

struct UserJoined {
  UserId user{0};
  std::string name;
  std::string color;
  friend bool operator==(const UserJoined&, const UserJoined&) = default;
};

struct UserLeft {
  UserId user{0};
  friend bool operator==(const UserLeft&, const UserLeft&) = default;
};

struct StateSync {
  std::map<UserId, CameraPose> poses;
  std::map<UserId, std::map<std::string, std::string>> highlights;
  std::map<UserId, UserId> spectating;
  std::vector<Marker> markers;
  std::optional<MinimapFrame> frame;
  friend bool operator==(const StateSync&, const StateSync&) = default;
};

struct AppearanceUpdate {
  AppearanceDelta delta;
  friend bool operator==(const AppearanceUpdate&, const AppearanceUpdate&) = default;
};

struct ErrorReply {
  std::string code;
  std::string message;
  friend bool operator==(const ErrorReply&, const ErrorReply&) = default;
};

using Payload = std::variant<Join, Leave, CameraUpdate, Highlight, SpectateStart, SpectateStop, SyncRequest,
                             Welcome, UserJoined, UserLeft, StateSync, AppearanceUpdate, ErrorReply>;

/// Wire name of the payload alternative, used as the JSON `type` field.
std::string_view message_type(const Payload& payload);

struct Message {
  std::string room_id;
  std::uint64_t seq{0};
  Payload payload;
  friend bool operator==(const Message&, const Message&) = default;
};

}  // namespace cityzoom
