#pragma once

#include <vector>

#include "cityzoom/protocol.hpp"
#include "cityzoom/room.hpp"

namespace cityzoom {

struct Outgoing {
  UserId recipient{0};
  Message message;
  friend bool operator==(const Outgoing&, const Outgoing&) = default;
};

struct Transition {
  RoomState state;
  std::vector<Outgoing> outgoing;
};

/// Pure room transition for one client message.
///
/// Messages whose seq does not exceed the sender's last accepted seq are
/// dropped without reply. Invalid messages get an ErrorReply (seq 0) sent back
/// to the sender and leave the state untouched. Every other message stamps its
/// outgoing copies with consecutive room sequence numbers.
Transition apply_message(const RoomState& state, UserId sender, const Message& message);

/// Builds the pose/highlight/spectate part of a StateSync from the room.
StateSync make_state_sync(const RoomState& state);

}  // namespace cityzoom
