#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "cityzoom/camera.hpp"

namespace cityzoom {

using UserId = std::uint32_t;

inline constexpr std::array<std::string_view, 12> kUserPalette{
    "#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4",
    "#46f0f0", "#f032e6", "#bcf60c", "#fabebe", "#008080", "#9a6324"};

/// Marker color of the local user on their own mini-map.
inline constexpr std::string_view kSelfMarkerColor = "#808080";

struct RoomUser {
  std::string name;
  std::string color;
  std::optional<CameraPose> pose;
  /// entity id -> highlight color
  std::map<std::string, std::string> highlights;
  std::optional<UserId> spectating;
  /// Highest sequence number accepted from this user.
  std::uint64_t last_seq{0};

  friend bool operator==(const RoomUser&, const RoomUser&) = default;
};

struct RoomState {
  std::string room_id;
  std::string landscape_id;
  std::map<UserId, RoomUser> users;
  /// Sequence number of the last message the room itself emitted.
  std::uint64_t server_seq{0};

  friend bool operator==(const RoomState&, const RoomState&) = default;
};

/// Lowest-index palette color not in use; once all are taken, colors are
/// reused round-robin by user count (the 13th user gets palette[0]).
std::string assign_color(const RoomState& state);

/// True when following `spectating` links from any user never revisits a user.
bool spectate_graph_acyclic(const RoomState& state);

}  // namespace cityzoom
