#include <gtest/gtest.h>

#include "cityzoom/collab.hpp"
#include "cityzoom/random.hpp"
#include "cityzoom/serialization.hpp"

using namespace cityzoom;

namespace {

const std::string kRoom = "r1";

CameraPose pose(double x) { return {{x, 20, x + 1}, {x, 0, x}}; }

class Room {
 public:
  Room() { state.room_id = kRoom; }

  std::vector<Outgoing> send(UserId from, Payload payload) {
    auto t = apply_message(state, from, Message{kRoom, ++seq[from], std::move(payload)});
    state = std::move(t.state);
    return std::move(t.outgoing);
  }
  void join(UserId id, std::string name = "u") { send(id, Join{std::move(name), std::nullopt}); }

  RoomState state;
  std::map<UserId, std::uint64_t> seq;
};

template <typename T>
std::vector<std::pair<UserId, T>> of_type(const std::vector<Outgoing>& out) {
  std::vector<std::pair<UserId, T>> r;
  for (const auto& o : out) {
    if (const auto* p = std::get_if<T>(&o.message.payload)) r.emplace_back(o.recipient, *p);
  }
  return r;
}

}  // namespace

TEST(Colors, LowestFree) {
  RoomState s;
  EXPECT_EQ(assign_color(s), kUserPalette[0]);
  s.users[1].color = std::string(kUserPalette[0]);
  s.users[2].color = std::string(kUserPalette[1]);
  s.users[3].color = std::string(kUserPalette[3]);
  EXPECT_EQ(assign_color(s), kUserPalette[2]);
}

TEST(Colors, ThirteenthUserWraps) {
  Room r;
  for (UserId id = 1; id <= 12; ++id) r.join(id);
  std::set<std::string> colors;
  for (const auto& [id, u] : r.state.users) colors.insert(u.color);
  EXPECT_EQ(colors.size(), 12u);
  r.join(13);
  EXPECT_EQ(r.state.users.at(13).color, kUserPalette[0]);
}

TEST(Join, WelcomeWithSnapshot) {
  Room r;
  const auto out = r.send(7, Join{"alice", ScreenSize{800, 600}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].recipient, 7u);
  const auto& w = std::get<Welcome>(out[0].message.payload);
  EXPECT_EQ(w.self_id, 7u);
  EXPECT_EQ(w.color, kUserPalette[0]);
  EXPECT_EQ(w.snapshot.users.size(), 1u);
  EXPECT_EQ(w.snapshot.users.at(7).name, "alice");
  EXPECT_EQ(out[0].message.seq, 1u);
  EXPECT_EQ(r.state.server_seq, 1u);
}

TEST(Join, OthersNotified) {
  Room r;
  r.join(1);
  const auto out = r.send(2, Join{"bob", std::nullopt});
  const auto joined = of_type<UserJoined>(out);
  ASSERT_EQ(joined.size(), 1u);
  EXPECT_EQ(joined[0].first, 1u);
  EXPECT_EQ(joined[0].second, (UserJoined{2, "bob", std::string(kUserPalette[1])}));
  EXPECT_EQ(of_type<Welcome>(out).at(0).first, 2u);
}

TEST(Camera, RelayedToOthersOnly) {
  Room r;
  for (UserId id = 1; id <= 3; ++id) r.join(id);
  const auto out = r.send(2, CameraUpdate{std::nullopt, pose(5)});
  ASSERT_EQ(out.size(), 2u);
  for (const auto& o : out) {
    EXPECT_NE(o.recipient, 2u);
    EXPECT_EQ(std::get<CameraUpdate>(o.message.payload), (CameraUpdate{2, pose(5)}));
  }
  EXPECT_EQ(out[0].message.seq + 1, out[1].message.seq);
  EXPECT_EQ(r.state.users.at(2).pose, pose(5));
}

TEST(Camera, SpectatorFollows) {
  Room r;
  r.join(1);
  r.join(2);
  r.send(1, SpectateStart{std::nullopt, 2});
  EXPECT_EQ(r.state.users.at(1).spectating, 2u);
  const auto out = r.send(2, CameraUpdate{std::nullopt, pose(9)});
  const auto cams = of_type<CameraUpdate>(out);
  ASSERT_EQ(cams.size(), 1u);
  EXPECT_EQ(cams[0].first, 1u);
  EXPECT_EQ(cams[0].second.pose, pose(9));
}

TEST(Camera, TeleportCopiesPoseExactly) {
  Room r;
  r.join(1);
  r.join(2);
  const CameraPose p{{12.345678901234567, 40.1, -3.3}, {0.1, 0.2, 0.3}};
  const auto out = r.send(2, CameraUpdate{std::nullopt, p});
  const CameraPose received = of_type<CameraUpdate>(out).at(0).second.pose;
  // over the wire as well
  const Message wire = parse_message(serialize_message(out.at(0).message));
  const CameraPose decoded = std::get<CameraUpdate>(wire.payload).pose;
  r.send(1, CameraUpdate{std::nullopt, decoded});
  const auto sync = make_state_sync(r.state);
  EXPECT_EQ(sync.poses.at(1), sync.poses.at(2));
  EXPECT_EQ(received, p);
}

TEST(Camera, InvalidPoseRejected) {
  Room r;
  r.join(1);
  r.join(2);
  const auto before = r.state;
  const auto out = r.send(1, CameraUpdate{std::nullopt, CameraPose{{1, 1, 1}, {1, 1, 1}}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].recipient, 1u);
  EXPECT_EQ(out[0].message.seq, 0u);
  EXPECT_EQ(std::get<ErrorReply>(out[0].message.payload).code, "invalid_pose");
  EXPECT_EQ(r.state, before);
}

TEST(Sequence, StaleDroppedSilently) {
  Room r;
  r.join(1);
  r.join(2);
  auto t = apply_message(r.state, 1, Message{kRoom, 10, CameraUpdate{std::nullopt, pose(1)}});
  r.state = t.state;
  t = apply_message(r.state, 1, Message{kRoom, 9, CameraUpdate{std::nullopt, pose(2)}});
  EXPECT_TRUE(t.outgoing.empty());
  EXPECT_EQ(t.state, r.state);
  t = apply_message(r.state, 1, Message{kRoom, 10, CameraUpdate{std::nullopt, pose(3)}});
  EXPECT_TRUE(t.outgoing.empty());
  EXPECT_EQ(t.state.users.at(1).pose, pose(1));
}

TEST(Errors, RejectionsLeaveStateUnchanged) {
  Room r;
  r.join(1);
  r.join(2);
  const auto before = r.state;
  auto code = [&](UserId from, Payload p) {
    const auto out = r.send(from, std::move(p));
    EXPECT_EQ(r.state, before);
    EXPECT_EQ(out.size(), 1u);
    EXPECT_EQ(out.at(0).recipient, from);
    return std::get<ErrorReply>(out.at(0).message.payload).code;
  };
  EXPECT_EQ(code(9, CameraUpdate{std::nullopt, pose(1)}), "unknown_user");
  EXPECT_EQ(code(1, Join{"again", std::nullopt}), "already_joined");
  EXPECT_EQ(code(1, SpectateStart{std::nullopt, 1}), "invalid_spectate");
  EXPECT_EQ(code(1, SpectateStart{std::nullopt, 42}), "invalid_spectate");
  EXPECT_EQ(code(1, Highlight{std::nullopt, "", std::nullopt, true}), "invalid");
  EXPECT_EQ(code(1, Welcome{}), "unexpected_type");
  EXPECT_EQ(code(1, StateSync{}), "unexpected_type");
  EXPECT_EQ(code(3, Join{"", std::nullopt}), "invalid");
  const auto t = apply_message(r.state, 1, Message{"elsewhere", 99, SyncRequest{}});
  EXPECT_EQ(std::get<ErrorReply>(t.outgoing.at(0).message.payload).code, "wrong_room");
}

TEST(Spectate, CycleRejected) {
  Room r;
  for (UserId id = 1; id <= 3; ++id) r.join(id);
  r.send(1, SpectateStart{std::nullopt, 2});
  r.send(2, SpectateStart{std::nullopt, 3});
  const auto out = r.send(3, SpectateStart{std::nullopt, 1});
  EXPECT_EQ(std::get<ErrorReply>(out.at(0).message.payload).code, "invalid_spectate");
  EXPECT_FALSE(r.state.users.at(3).spectating);
  EXPECT_TRUE(spectate_graph_acyclic(r.state));
}

TEST(Spectate, StopAndLeaveClearLinks) {
  Room r;
  for (UserId id = 1; id <= 3; ++id) r.join(id);
  r.send(1, SpectateStart{std::nullopt, 3});
  EXPECT_EQ(of_type<SpectateStop>(r.send(2, SpectateStop{})).size(), 0u);  // not spectating: nothing to say
  const auto out = r.send(3, Leave{});
  EXPECT_FALSE(r.state.users.at(1).spectating);
  EXPECT_FALSE(r.state.users.contains(3));
  const auto left = of_type<UserLeft>(out);
  ASSERT_EQ(left.size(), 2u);
  for (const auto& [to, msg] : left) {
    EXPECT_NE(to, 3u);
    EXPECT_EQ(msg.user, 3u);
  }
  r.send(1, SpectateStart{std::nullopt, 2});
  const auto stop = of_type<SpectateStop>(r.send(1, SpectateStop{}));
  ASSERT_EQ(stop.size(), 1u);
  EXPECT_EQ(stop[0].first, 2u);
}

TEST(Highlight, LatestWinsAndDefaultColor) {
  Room r;
  r.join(1);
  r.join(2);
  auto out = r.send(1, Highlight{std::nullopt, "cls:a.B", std::nullopt, true});
  EXPECT_EQ(r.state.users.at(1).highlights.at("cls:a.B"), kUserPalette[0]);
  EXPECT_EQ(of_type<Highlight>(out).at(0).second, (Highlight{1, "cls:a.B", std::string(kUserPalette[0]), true}));
  r.send(2, Highlight{std::nullopt, "cls:a.B", std::string("#123456"), true});
  EXPECT_TRUE(r.state.users.at(1).highlights.empty());
  EXPECT_EQ(r.state.users.at(2).highlights.at("cls:a.B"), "#123456");
  out = r.send(2, Highlight{std::nullopt, "cls:a.B", std::nullopt, false});
  EXPECT_TRUE(r.state.users.at(2).highlights.empty());
  EXPECT_FALSE(of_type<Highlight>(out).at(0).second.active);
}

TEST(Sync, RequestAnsweredToSender) {
  Room r;
  r.join(1);
  r.join(2);
  r.send(2, CameraUpdate{std::nullopt, pose(4)});
  r.send(1, Highlight{std::nullopt, "x", std::nullopt, true});
  r.send(1, SpectateStart{std::nullopt, 2});
  const auto out = r.send(1, SyncRequest{});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].recipient, 1u);
  const auto& sync = std::get<StateSync>(out[0].message.payload);
  EXPECT_EQ(sync.poses.at(2), pose(4));
  EXPECT_FALSE(sync.poses.contains(1));
  EXPECT_EQ(sync.highlights.at(1).at("x"), kUserPalette[0]);
  EXPECT_EQ(sync.spectating.at(1), 2u);
}

TEST(Replay, RandomLogsDeterministic) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    std::vector<std::pair<UserId, Message>> log;
    std::map<UserId, std::uint64_t> seq;
    const auto clients = static_cast<UserId>(rng.uniform(2, 8));
    for (int i = 0; i < 300; ++i) {
      const auto from = static_cast<UserId>(rng.uniform(1, clients));
      Payload p;
      switch (rng.uniform(0, 7)) {
        case 0: p = Join{"c" + std::to_string(from), std::nullopt}; break;
        case 1: p = Leave{}; break;
        case 2: p = SpectateStart{std::nullopt, static_cast<UserId>(rng.uniform(1, clients))}; break;
        case 3: p = SpectateStop{}; break;
        case 4: p = Highlight{std::nullopt, "e" + std::to_string(rng.uniform(0, 5)), std::nullopt, rng.unit() < 0.7}; break;
        default: p = CameraUpdate{std::nullopt, pose(rng.uniform_real(-50, 50))};
      }
      // occasionally replay an old sequence number
      const std::uint64_t s = rng.unit() < 0.1 ? seq[from] : ++seq[from];
      log.emplace_back(from, Message{kRoom, s, p});
    }
    auto run = [&] {
      RoomState st;
      st.room_id = kRoom;
      std::vector<Outgoing> all;
      for (const auto& [from, msg] : log) {
        auto t = apply_message(st, from, msg);
        EXPECT_TRUE(spectate_graph_acyclic(t.state));
        for (const auto& o : t.outgoing) {
          const bool own = std::holds_alternative<Welcome>(o.message.payload) ||
                           std::holds_alternative<ErrorReply>(o.message.payload) ||
                           std::holds_alternative<StateSync>(o.message.payload);
          if (!own) EXPECT_NE(o.recipient, from);
        }
        st = std::move(t.state);
        all.insert(all.end(), t.outgoing.begin(), t.outgoing.end());
      }
      return std::pair{Json(st).dump(), all};
    };
    const auto a = run();
    const auto b = run();
    EXPECT_EQ(a.first, b.first);
    EXPECT_EQ(a.second, b.second);
  }
}
