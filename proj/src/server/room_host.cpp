#include "cityzoom/server/room_host.hpp"

#include "cityzoom/error.hpp"
#include "cityzoom/serialization.hpp"

namespace cityzoom::server {

void HostOutput::append(HostOutput&& other) {
  for (auto& m : other.messages) messages.push_back(std::move(m));
  for (auto& c : other.closed) closed.push_back(std::move(c));
}

RoomHost::RoomHost(LandscapeStore& store, HostConfig config) : store_(store), config_(config) {}

UserId RoomHost::connect(const std::string& room_id, const std::string& landscape_id, TimePoint now) {
  if (room_id.empty()) throw ValidationError("room id must not be empty");
  auto [it, created] = rooms_.try_emplace(room_id);
  Room& room = it->second;
  if (created) {
    room.state.room_id = room_id;
    room.state.landscape_id = landscape_id;
    room.landscape = store_.get(landscape_id);
  } else if (!landscape_id.empty() && landscape_id != room.state.landscape_id) {
    throw Error("room '" + room_id + "' shows landscape '" + room.state.landscape_id + "'");
  }
  const UserId id = next_user_++;
  room.connections[id].last_seen = now;
  return id;
}

void RoomHost::emit(Room& room, UserId to, Payload payload, HostOutput& out) const {
  out.messages.push_back({to, Message{room.state.room_id, ++room.state.server_seq, std::move(payload)}});
}

void RoomHost::send_appearance(Room& room, UserId to, std::optional<AppearanceDelta> delta,
                               HostOutput& out) const {
  if (delta) emit(room, to, AppearanceUpdate{std::move(*delta)}, out);
}

StateSync RoomHost::state_sync_for(const Room& room, UserId user) const {
  StateSync sync = make_state_sync(room.state);
  if (!room.landscape) return sync;
  const MinimapConfig& map = room.landscape->settings().minimap;
  std::optional<Vec2> focus;
  if (auto u = room.state.users.find(user); u != room.state.users.end() && u->second.pose) {
    const CameraPose& pose = *u->second.pose;
    focus = ground(map.marker_mode == MarkerMode::target ? pose.target : pose.position);
  }
  const auto conn = room.connections.find(user);
  const ScreenSize screen = conn == room.connections.end() ? ScreenSize{} : conn->second.screen;
  const MinimapFrame frame = compute_frame(room.landscape->layout(), map, screen, focus);
  sync.markers = marker_positions(room.state, user, map, frame);
  sync.frame = frame;
  return sync;
}

void RoomHost::apply(Room& room, UserId user, const Message& message, TimePoint now, HostOutput& out) {
  const RoomState before = room.state;
  Transition t = apply_message(room.state, user, message);
  room.state = std::move(t.state);

  const auto was = before.users.find(user);
  const auto is = room.state.users.find(user);
  const bool accepted = is != room.state.users.end()
                            ? (was == before.users.end() || is->second.last_seq != was->second.last_seq)
                            : was != before.users.end();
  Connection* conn = nullptr;
  if (auto c = room.connections.find(user); c != room.connections.end()) conn = &c->second;

  const bool camera = accepted && std::holds_alternative<CameraUpdate>(message.payload);
  bool hold_camera = false;
  if (camera && conn) {
    if (conn->last_broadcast && now - *conn->last_broadcast < config_.camera_interval) {
      hold_camera = true;
      conn->pending_broadcast = std::get<CameraUpdate>(message.payload).pose;
    } else {
      conn->last_broadcast = now;
      conn->pending_broadcast.reset();
    }
  }

  for (auto& o : t.outgoing) {
    if (hold_camera && std::holds_alternative<CameraUpdate>(o.message.payload)) continue;
    if (auto* sync = std::get_if<StateSync>(&o.message.payload)) {
      const StateSync full = state_sync_for(room, o.recipient);
      sync->markers = full.markers;
      sync->frame = full.frame;
    }
    out.messages.push_back(std::move(o));
  }
  if (!accepted) return;

  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Join>) {
          if (!conn) return;
          if (p.screen) conn->screen = *p.screen;
          if (room.landscape) conn->session.emplace(user, room.landscape, config_.throttle);
          room.sync_dirty = true;
        } else if constexpr (std::is_same_v<T, CameraUpdate>) {
          room.sync_dirty = true;
          if (!conn) return;
          if (!conn->session) {
            out.messages.push_back(
                {user, Message{room.state.room_id, 0, ErrorReply{"no_landscape", "no landscape loaded"}}});
            return;
          }
          send_appearance(room, user, conn->session->handle_camera_update(p.pose, now), out);
        } else if constexpr (std::is_same_v<T, Leave>) {
          room.connections.erase(user);
          out.closed.emplace_back(room.state.room_id, user);
          room.sync_dirty = true;
        } else if constexpr (std::is_same_v<T, SyncRequest>) {
          if (conn && conn->session && !conn->session->state().entities.empty()) {
            send_appearance(room, user, appearance_diff({}, conn->session->state()), out);
          }
        } else if constexpr (std::is_same_v<T, SpectateStart> || std::is_same_v<T, SpectateStop> ||
                             std::is_same_v<T, Highlight>) {
          room.sync_dirty = true;
        }
      },
      message.payload);
}

HostOutput RoomHost::receive(const std::string& room_id, UserId user, std::string_view text, TimePoint now) {
  Message message;
  try {
    message = parse_message(text);
  } catch (const Error& e) {
    HostOutput out;
    heartbeat(room_id, user, now);
    out.messages.push_back({user, Message{room_id, 0, ErrorReply{"malformed", e.what()}}});
    return out;
  }
  return receive(room_id, user, message, now);
}

HostOutput RoomHost::receive(const std::string& room_id, UserId user, const Message& message, TimePoint now) {
  HostOutput out;
  auto it = rooms_.find(room_id);
  if (it == rooms_.end() || !it->second.connections.contains(user)) {
    out.messages.push_back({user, Message{room_id, 0, ErrorReply{"not_connected", "unknown connection"}}});
    return out;
  }
  it->second.connections[user].last_seen = now;
  apply(it->second, user, message, now, out);
  return out;
}

void RoomHost::heartbeat(const std::string& room_id, UserId user, TimePoint now) {
  if (auto it = rooms_.find(room_id); it != rooms_.end()) {
    if (auto c = it->second.connections.find(user); c != it->second.connections.end()) {
      c->second.last_seen = now;
    }
  }
}

HostOutput RoomHost::disconnect(const std::string& room_id, UserId user, TimePoint now) {
  HostOutput out;
  auto it = rooms_.find(room_id);
  if (it == rooms_.end()) return out;
  Room& room = it->second;
  if (auto u = room.state.users.find(user); u != room.state.users.end()) {
    apply(room, user, Message{room_id, u->second.last_seq + 1, Leave{}}, now, out);
  }
  room.connections.erase(user);
  if (room.connections.empty() && room.state.users.empty()) rooms_.erase(it);
  return out;
}

HostOutput RoomHost::tick(TimePoint now) {
  HostOutput out;
  for (auto it = rooms_.begin(); it != rooms_.end();) {
    Room& room = it->second;

    if (auto current = store_.get(room.state.landscape_id); current && current != room.landscape) {
      room.landscape = current;
      for (auto& [id, conn] : room.connections) {
        if (!room.state.users.contains(id)) continue;
        if (conn.session) {
          send_appearance(room, id, conn.session->replace_landscape(current, now), out);
        } else {
          conn.session.emplace(id, current, config_.throttle);
          if (auto u = room.state.users.find(id); u->second.pose) {
            send_appearance(room, id, conn.session->handle_camera_update(*u->second.pose, now), out);
          }
        }
      }
      room.sync_dirty = true;
    }

    std::vector<UserId> expired;
    for (const auto& [id, conn] : room.connections) {
      if (now - conn.last_seen > config_.heartbeat_timeout) expired.push_back(id);
    }
    for (UserId id : expired) {
      if (auto u = room.state.users.find(id); u != room.state.users.end()) {
        apply(room, id, Message{room.state.room_id, u->second.last_seq + 1, Leave{}}, now, out);
      } else {
        room.connections.erase(id);
        out.closed.emplace_back(room.state.room_id, id);
      }
    }

    for (auto& [id, conn] : room.connections) {
      if (conn.pending_broadcast && (!conn.last_broadcast || now - *conn.last_broadcast >= config_.camera_interval)) {
        for (const auto& [other, u] : room.state.users) {
          if (other != id) emit(room, other, CameraUpdate{id, *conn.pending_broadcast}, out);
        }
        conn.pending_broadcast.reset();
        conn.last_broadcast = now;
      }
      if (conn.session) send_appearance(room, id, conn.session->tick(now), out);
    }

    if (room.sync_dirty) {
      for (const auto& [id, u] : room.state.users) emit(room, id, state_sync_for(room, id), out);
      room.sync_dirty = false;
    }

    if (room.connections.empty() && room.state.users.empty()) {
      it = rooms_.erase(it);
    } else {
      ++it;
    }
  }
  return out;
}

const RoomState* RoomHost::room(const std::string& room_id) const {
  auto it = rooms_.find(room_id);
  return it == rooms_.end() ? nullptr : &it->second.state;
}

const SessionView* RoomHost::session(const std::string& room_id, UserId user) const {
  auto it = rooms_.find(room_id);
  if (it == rooms_.end()) return nullptr;
  auto c = it->second.connections.find(user);
  if (c == it->second.connections.end() || !c->second.session) return nullptr;
  return &*c->second.session;
}

}  // namespace cityzoom::server
