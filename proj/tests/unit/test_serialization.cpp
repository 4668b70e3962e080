#include <gtest/gtest.h>

#include "cityzoom/collab.hpp"
#include "cityzoom/error.hpp"
#include "cityzoom/ingest.hpp"
#include "cityzoom/pipeline.hpp"
#include "cityzoom/serialization.hpp"

using namespace cityzoom;

namespace {

std::shared_ptr<const PreparedLandscape> small_landscape() {
  SyntheticParams p;
  p.apps = 2;
  p.packages_per_app = 2;
  p.depth = 2;
  p.classes_per_package = 3;
  p.methods_per_class = 3;
  p.link_density = 0.2;
  return std::make_shared<PreparedLandscape>(generate_synthetic(5, p), Settings{});
}

Message round_trip(const Message& m) { return parse_message(serialize_message(m)); }

}  // namespace

TEST(Wire, EveryMessageTypeRoundTrips) {
  const auto land = small_landscape();
  const CameraPose pose{{1.5, 30, -2.25}, {0, 0, 0.125}};
  RoomState room;
  room.room_id = "r";
  room.landscape_id = "7";
  room.server_seq = 12;
  room.users[3] = RoomUser{"ann", "#e6194b", pose, {{"cls:a.B", "#fff"}}, 4u, 9};
  room.users[4] = RoomUser{"bo", "#3cb44b", std::nullopt, {}, std::nullopt, 1};

  const AppearanceDelta delta = appearance_diff({}, land->appearance(pose));
  const MinimapFrame frame = compute_frame(land->layout(), {}, {});
  StateSync sync = make_state_sync(room);
  sync.markers = marker_positions(room, 3, {}, frame);
  sync.frame = frame;

  const std::vector<Payload> payloads{
      Join{"ann", ScreenSize{1280, 720}},
      Join{"bo", std::nullopt},
      Leave{},
      CameraUpdate{std::nullopt, pose},
      CameraUpdate{3, pose},
      Highlight{std::nullopt, "cls:a.B", std::nullopt, true},
      Highlight{3, "cls:a.B", std::string("#abcdef"), false},
      SpectateStart{std::nullopt, 4},
      SpectateStart{3, 4},
      SpectateStop{3},
      SyncRequest{},
      Welcome{3, "#e6194b", room},
      UserJoined{4, "bo", "#3cb44b"},
      UserLeft{4},
      sync,
      AppearanceUpdate{delta},
      ErrorReply{"invalid", "bad"},
  };
  for (const auto& p : payloads) {
    const Message m{"r", 77, p};
    EXPECT_EQ(round_trip(m), m) << message_type(p);
  }
  ASSERT_FALSE(delta.empty());
}

TEST(Wire, FieldNames) {
  const Json j = Json::parse(serialize_message(Message{"room", 5, SpectateStart{2, 9}}));
  EXPECT_EQ(j.at("type"), "SpectateStart");
  EXPECT_EQ(j.at("roomId"), "room");
  EXPECT_EQ(j.at("seq"), 5);
  EXPECT_EQ(j.at("targetId"), 9);
  EXPECT_EQ(Json::parse(serialize_message(Message{"r", 0, ErrorReply{"c", "m"}})).at("type"), "Error");
}

TEST(Wire, MalformedRejected) {
  EXPECT_THROW(parse_message("{"), ParseError);
  EXPECT_THROW(parse_message("[]"), ParseError);
  EXPECT_THROW(parse_message(R"({"type":"Nope","roomId":"r","seq":1})"), ParseError);
  EXPECT_THROW(parse_message(R"({"type":"Join","roomId":"r"})"), ParseError);
  EXPECT_THROW(parse_message(R"({"type":"CameraUpdate","roomId":"r","seq":1})"), ParseError);
  EXPECT_THROW(parse_message(R"({"type":"SpectateStart","roomId":"r","seq":"x","targetId":1})"), ParseError);
}

TEST(Documents, StructureRoundTrips) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SyntheticParams p;
    p.apps = 1 + seed % 3;
    p.depth = 1 + seed % 2;
    p.link_density = 0.1;
    const auto s = generate_synthetic(seed, p);
    EXPECT_EQ(parse_structure(Json(s).dump()), s);
  }
}

TEST(Documents, StructureErrors) {
  EXPECT_THROW(parse_structure("not json"), ParseError);
  EXPECT_THROW(parse_structure(R"({"applications":3})"), ParseError);
  // link to an unknown class
  EXPECT_THROW(parse_structure(R"({"applications":[],"communications":[{"sourceClassFqn":"a.B","targetClassFqn":"a.C","requestCount":1}]})"),
               Error);
}

TEST(Documents, SettingsOverrideDefaults) {
  const Settings s = parse_settings(R"({"zoom":{"seed":9,"featureFlags":{"packageClosing":false}},
                                        "minimap":{"markerMode":"target","hiddenLayers":["labels"]}})");
  Settings expected;
  expected.zoom.seed = 9;
  expected.zoom.rules.reset(static_cast<std::size_t>(ZoomRule::package_closing));
  expected.minimap.marker_mode = MarkerMode::target;
  expected.minimap.hidden_layers = {"labels"};
  EXPECT_EQ(s, expected);
  EXPECT_EQ(parse_settings(Json(s).dump()), s);
  EXPECT_EQ(parse_settings("{}"), Settings{});
}

TEST(Documents, SettingsErrors) {
  EXPECT_THROW(parse_settings(R"({"zoomz":{}})"), ValidationError);
  EXPECT_THROW(parse_settings(R"({"zoom":{"featureFlags":{"nope":true}}})"), ValidationError);
  EXPECT_THROW(parse_settings(R"({"zoom":{"levelThresholds":[60,25,120,250]}})"), ValidationError);
  EXPECT_THROW(parse_settings(R"({"minimap":{"areaFraction":0.5}})"), ValidationError);
  EXPECT_THROW(parse_settings(R"({"minimap":{"markerMode":"side"}})"), ValidationError);
  EXPECT_THROW(parse_settings(R"({"zoom":{"seed":"x"}})"), ParseError);
}

TEST(Documents, AppearanceStateRoundTrips) {
  const auto land = small_landscape();
  for (double d : {10.0, 90.0, 400.0}) {
    const AppearanceState st = land->appearance({{0, d, 0.01}, {0, 0, 0}});
    EXPECT_EQ(Json(st).get<AppearanceState>(), st);
  }
}
