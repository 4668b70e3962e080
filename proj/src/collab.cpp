#include "cityzoom/collab.hpp"

#include <type_traits>

#include "cityzoom/error.hpp"

namespace cityzoom {

std::string_view message_type(const Payload& payload) {
  return std::visit(
      [](const auto& p) -> std::string_view {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Join>) return "Join";
        else if constexpr (std::is_same_v<T, Leave>) return "Leave";
        else if constexpr (std::is_same_v<T, CameraUpdate>) return "CameraUpdate";
        else if constexpr (std::is_same_v<T, Highlight>) return "Highlight";
        else if constexpr (std::is_same_v<T, SpectateStart>) return "SpectateStart";
        else if constexpr (std::is_same_v<T, SpectateStop>) return "SpectateStop";
        else if constexpr (std::is_same_v<T, SyncRequest>) return "SyncRequest";
        else if constexpr (std::is_same_v<T, Welcome>) return "Welcome";
        else if constexpr (std::is_same_v<T, UserJoined>) return "UserJoined";
        else if constexpr (std::is_same_v<T, UserLeft>) return "UserLeft";
        else if constexpr (std::is_same_v<T, StateSync>) return "StateSync";
        else if constexpr (std::is_same_v<T, AppearanceUpdate>) return "AppearanceUpdate";
        else return "Error";
      },
      payload);
}

StateSync make_state_sync(const RoomState& state) {
  StateSync sync;
  for (const auto& [id, user] : state.users) {
    if (user.pose) sync.poses.emplace(id, *user.pose);
    if (!user.highlights.empty()) sync.highlights.emplace(id, user.highlights);
    if (user.spectating) sync.spectating.emplace(id, *user.spectating);
  }
  return sync;
}

namespace {

/// Rejection carrying the error code for the reply.
struct Rejected {
  std::string code;
  std::string message;
};

class Builder {
 public:
  Builder(const RoomState& state, UserId sender) : next_(state), sender_(sender) {}

  RoomState& state() { return next_; }

  void send(UserId to, Payload payload) {
    out_.push_back({to, Message{next_.room_id, ++next_.server_seq, std::move(payload)}});
  }

  void broadcast_others(const Payload& payload) {
    for (const auto& [id, user] : next_.users) {
      if (id != sender_) send(id, payload);
    }
  }

  Transition finish() { return {std::move(next_), std::move(out_)}; }

 private:
  RoomState next_;
  UserId sender_;
  std::vector<Outgoing> out_;
};

Transition handle(const RoomState& state, UserId sender, const Message& msg) {
  const bool known = state.users.contains(sender);
  if (!std::holds_alternative<Join>(msg.payload) && !known) {
    throw Rejected{"unknown_user", "sender has not joined the room"};
  }

  Builder b(state, sender);
  RoomState& next = b.state();

  if (const auto* join = std::get_if<Join>(&msg.payload)) {
    if (known) throw Rejected{"already_joined", "sender already joined"};
    if (join->name.empty()) throw Rejected{"invalid", "name must not be empty"};
    RoomUser user;
    user.name = join->name;
    user.color = assign_color(next);
    user.last_seq = msg.seq;
    next.users.emplace(sender, user);
    b.send(sender, Welcome{sender, user.color, next});
    b.broadcast_others(UserJoined{sender, user.name, user.color});
    return b.finish();
  }

  RoomUser& self = next.users.at(sender);
  if (msg.seq <= self.last_seq) return {state, {}};

  auto accept = [&] { self.last_seq = msg.seq; };

  if (std::holds_alternative<Leave>(msg.payload)) {
    next.users.erase(sender);
    for (auto& [id, user] : next.users) {
      if (user.spectating == sender) user.spectating.reset();
    }
    b.broadcast_others(UserLeft{sender});
    return b.finish();
  }
  if (const auto* cam = std::get_if<CameraUpdate>(&msg.payload)) {
    try {
      validate(cam->pose);
    } catch (const ValidationError& e) {
      throw Rejected{"invalid_pose", e.what()};
    }
    accept();
    self.pose = cam->pose;
    b.broadcast_others(CameraUpdate{sender, cam->pose});
    return b.finish();
  }
  if (const auto* hl = std::get_if<Highlight>(&msg.payload)) {
    if (hl->entity_id.empty()) throw Rejected{"invalid", "entityId must not be empty"};
    if (hl->color && hl->color->empty()) throw Rejected{"invalid", "color must not be empty"};
    accept();
    Highlight relayed{sender, hl->entity_id, std::nullopt, hl->active};
    if (hl->active) {
      const std::string color = hl->color.value_or(self.color);
      for (auto& [id, user] : next.users) user.highlights.erase(hl->entity_id);
      self.highlights[hl->entity_id] = color;
      relayed.color = color;
    } else {
      self.highlights.erase(hl->entity_id);
    }
    b.broadcast_others(relayed);
    return b.finish();
  }
  if (const auto* spec = std::get_if<SpectateStart>(&msg.payload)) {
    if (spec->target == sender) throw Rejected{"invalid_spectate", "cannot spectate yourself"};
    if (!next.users.contains(spec->target)) {
      throw Rejected{"invalid_spectate", "unknown spectate target"};
    }
    // Following the chain from the target must not lead back to the sender.
    for (std::optional<UserId> cur = spec->target; cur;) {
      if (*cur == sender) throw Rejected{"invalid_spectate", "spectating would form a cycle"};
      cur = next.users.at(*cur).spectating;
    }
    accept();
    self.spectating = spec->target;
    b.broadcast_others(SpectateStart{sender, spec->target});
    return b.finish();
  }
  if (std::holds_alternative<SpectateStop>(msg.payload)) {
    accept();
    if (self.spectating) {
      self.spectating.reset();
      b.broadcast_others(SpectateStop{sender});
    }
    return b.finish();
  }
  if (std::holds_alternative<SyncRequest>(msg.payload)) {
    accept();
    b.send(sender, make_state_sync(next));
    return b.finish();
  }
  throw Rejected{"unexpected_type", std::string(message_type(msg.payload)) + " is server-only"};
}

}  // namespace

Transition apply_message(const RoomState& state, UserId sender, const Message& message) {
  try {
    if (message.room_id != state.room_id) {
      throw Rejected{"wrong_room", "message addressed to room '" + message.room_id + "'"};
    }
    return handle(state, sender, message);
  } catch (const Rejected& r) {
    Transition t{state, {}};
    t.outgoing.push_back({sender, Message{state.room_id, 0, ErrorReply{r.code, r.message}}});
    return t;
  }
}

}  // namespace cityzoom
