#include "cityzoom/room.hpp"

#include <set>

namespace cityzoom {

std::string assign_color(const RoomState& state) {
  std::set<std::string_view> used;
  for (const auto& [id, user] : state.users) used.insert(user.color);
  for (auto color : kUserPalette) {
    if (!used.contains(color)) return std::string(color);
  }
  return std::string(kUserPalette[state.users.size() % kUserPalette.size()]);
}

bool spectate_graph_acyclic(const RoomState& state) {
  // Out-degree is at most one, so a walk longer than the user count must loop.
  for (const auto& [start, user] : state.users) {
    std::optional<UserId> next = user.spectating;
    std::size_t steps = 0;
    while (next) {
      if (*next == start || ++steps > state.users.size()) return false;
      auto it = state.users.find(*next);
      if (it == state.users.end()) break;
      next = it->second.spectating;
    }
  }
  return true;
}

}  // namespace cityzoom
