#include <cmath>
#include <regex>

#include <gtest/gtest.h>

#include "cityzoom/error.hpp"
#include "cityzoom/ingest.hpp"
#include "cityzoom/minimap.hpp"
#include "cityzoom/random.hpp"
#include "oracles.hpp"

using namespace cityzoom;

namespace {

/// Layout whose ground bounds are exactly [0, 100] x [0, 100].
CityLayout square_layout() {
  CityLayout layout;
  EntityBox app;
  app.id = "app:a";
  app.name = "a";
  app.min = {0, 0, 0};
  app.max = {100, 0.5, 100};
  EntityBox cls;
  cls.id = "cls:C";
  cls.name = "C";
  cls.kind = EntityKind::klass;
  cls.parent = 0;
  cls.depth = 1;
  cls.min = {40, 0.5, 40};
  cls.max = {42, 2.5, 42};
  layout.boxes = {app, cls};
  layout.reindex();
  return layout;
}

RoomUser user_at(std::string color, Vec3 position, Vec3 target = {50, 0, 50}) {
  RoomUser u;
  u.name = "u";
  u.color = std::move(color);
  u.pose = CameraPose{position, target};
  return u;
}

std::size_t count(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Frame, WholeLandscapeAtZoomOne) {
  const auto layout = square_layout();
  const auto f = compute_frame(layout, {}, {});
  EXPECT_EQ(f.world_center, (Vec2{50, 50}));
  EXPECT_GE(f.half_extents.x, 50);
  EXPECT_GE(f.half_extents.y, 50);
  EXPECT_FALSE(f.enlarged);
}

TEST(Frame, ViewportSizeAndCorner) {
  const auto f = compute_frame(square_layout(), {}, {1920, 1080});
  EXPECT_NEAR(f.viewport.width * f.viewport.height, 82944.0, 1e-6);
  EXPECT_NEAR(f.viewport.width, 288.0, 1e-9);
  EXPECT_DOUBLE_EQ(f.viewport.x + f.viewport.width, 1920 - 8);
  EXPECT_DOUBLE_EQ(f.viewport.y, 8);
  const double ratio = f.viewport.width * f.viewport.height / (1920.0 * 1080.0);
  EXPECT_GE(ratio, 0.035);
  EXPECT_LE(ratio, 0.045);
}

TEST(Frame, EnlargedIgnoresZoomAndFocus) {
  MinimapConfig cfg;
  cfg.zoom = 5;
  const auto f = compute_frame(square_layout(), cfg, {1920, 1080}, Vec2{90, 90}, true);
  EXPECT_TRUE(f.enlarged);
  EXPECT_EQ(f.world_center, (Vec2{50, 50}));
  EXPECT_EQ(f.half_extents, (Vec2{50, 50}));
  EXPECT_NEAR(f.viewport.height, 0.7 * 1080, 1e-9);
  EXPECT_NEAR(f.viewport.x, (1920 - 756) / 2.0, 1e-9);
  EXPECT_NEAR(f.viewport.y, (1080 - 756) / 2.0, 1e-9);
}

TEST(Frame, ZoomFollowsFocus) {
  MinimapConfig cfg;
  cfg.zoom = 4;
  const auto f = compute_frame(square_layout(), cfg, {}, Vec2{30, 60});
  EXPECT_EQ(f.half_extents, (Vec2{12.5, 12.5}));
  EXPECT_EQ(f.world_center, (Vec2{30, 60}));
  // zoom below 1 stays world-centered
  cfg.zoom = 0.5;
  const auto g = compute_frame(square_layout(), cfg, {}, Vec2{30, 60});
  EXPECT_EQ(g.world_center, (Vec2{50, 50}));
}

TEST(Frame, FarFocusClampedAgainstWhiteout) {
  MinimapConfig cfg;
  cfg.zoom = 10;
  const auto layout = square_layout();
  const Rect land = layout.bounds();
  const auto f = compute_frame(layout, cfg, {}, Vec2{1e6, -1e6});
  const Rect v = f.view_rect();
  EXPECT_TRUE(oracle::views_overlap(v.min, v.max, land.min, land.max));
  EXPECT_TRUE(shows_landscape(f, land));
  // a quarter of the view stays over the landscape on each axis
  EXPECT_NEAR(oracle::overlap(v.min.x, v.max.x, land.min.x, land.max.x), 0.25 * 10, 1e-9);
  EXPECT_NEAR(oracle::overlap(v.min.y, v.max.y, land.min.y, land.max.y), 0.25 * 10, 1e-9);
}

TEST(Frame, WhiteoutInvariantUnderRandomInput) {
  const auto layout = compute_layout(generate_synthetic(3, SyntheticParams{}));
  const Rect land = layout.bounds();
  Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    MinimapConfig cfg;
    cfg.zoom = rng.uniform_real(0.5, 10);
    const Vec2 focus{rng.uniform_real(-5000, 5000), rng.uniform_real(-5000, 5000)};
    const auto f = compute_frame(layout, cfg, {rng.uniform_real(100, 4000), rng.uniform_real(100, 3000)}, focus);
    const Rect v = f.view_rect();
    ASSERT_TRUE(oracle::views_overlap(v.min, v.max, land.min, land.max)) << i;
  }
}

TEST(Frame, RejectsBadConfig) {
  const auto layout = square_layout();
  MinimapConfig cfg;
  cfg.area_fraction = 0.3;
  EXPECT_THROW(compute_frame(layout, cfg, {}), ValidationError);
  cfg = {};
  cfg.zoom = 11;
  EXPECT_THROW(compute_frame(layout, cfg, {}), ValidationError);
  cfg = {};
  cfg.hidden_layers.insert("weather");
  EXPECT_THROW(cfg.validate(), ValidationError);
  EXPECT_THROW(compute_frame(CityLayout{}, MinimapConfig{}, {}), ValidationError);
}

TEST(Projection, CornersAndCenter) {
  const auto f = compute_frame(square_layout(), {}, {});
  EXPECT_EQ(project({50, 50}, f), (Vec2{0.5, 0.5}));
  EXPECT_EQ(project(f.world_center - f.half_extents, f), (Vec2{0, 1}));
  EXPECT_EQ(project({0, 100}, f), (Vec2{0, 0}));  // (minX, maxZ) is the top-left
  EXPECT_EQ(project({100, 0}, f), (Vec2{1, 1}));
}

TEST(Projection, RoundTrip) {
  MinimapConfig cfg;
  cfg.zoom = 3;
  const auto f = compute_frame(square_layout(), cfg, {}, Vec2{20, 70});
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 p{rng.uniform_real(f.view_rect().min.x, f.view_rect().max.x),
                 rng.uniform_real(f.view_rect().min.y, f.view_rect().max.y)};
    const Vec2 back = unproject(project(p, f), f);
    EXPECT_LT(distance(back, p), 1e-9);
  }
}

TEST(Markers, SoloSessionOneGrayMarker) {
  RoomState room;
  room.users[1] = user_at("#e6194b", {10, 30, 20});
  const auto f = compute_frame(square_layout(), {}, {});
  const auto markers = marker_positions(room, 1, {}, f);
  ASSERT_EQ(markers.size(), 1u);
  EXPECT_EQ(markers[0].color, "#808080");
  EXPECT_TRUE(markers[0].self);
  EXPECT_EQ(markers[0].world, (Vec2{10, 20}));
}

TEST(Markers, TargetMode) {
  RoomState room;
  room.users[1] = user_at("#e6194b", {10, 30, 20}, {60, 0, 70});
  room.users[2] = user_at("#3cb44b", {15, 30, 25}, {60, 0, 70});
  MinimapConfig cfg;
  cfg.marker_mode = MarkerMode::target;
  const auto f = compute_frame(square_layout(), cfg, {});
  const auto markers = marker_positions(room, 1, cfg, f);
  ASSERT_EQ(markers.size(), 2u);
  EXPECT_EQ(markers[0].world, (Vec2{60, 70}));
  EXPECT_EQ(markers[1].world, (Vec2{15, 25}));  // others always by camera
  EXPECT_EQ(markers[1].color, "#3cb44b");
}

TEST(Markers, OffMapClampedToBorder) {
  RoomState room;
  room.users[1] = user_at("#e6194b", {50, 30, 50});
  room.users[2] = user_at("#3cb44b", {500, 30, 50});
  room.users[3] = user_at("#ffe119", {-10, 30, 150});
  room.users[4] = RoomUser{};  // no pose yet
  const auto f = compute_frame(square_layout(), {}, {});
  const auto markers = marker_positions(room, 1, {}, f);
  ASSERT_EQ(markers.size(), 3u);
  EXPECT_FALSE(markers[0].off_map);
  EXPECT_TRUE(markers[1].off_map);
  EXPECT_EQ(markers[1].uv, (Vec2{1.0, 0.5}));
  EXPECT_TRUE(markers[2].off_map);
  EXPECT_EQ(markers[2].uv, (Vec2{0.0, 0.0}));
  for (const auto& m : markers) {
    EXPECT_GE(m.uv.x, 0);
    EXPECT_LE(m.uv.x, 1);
    EXPECT_GE(m.uv.y, 0);
    EXPECT_LE(m.uv.y, 1);
  }
}

TEST(Markers, Radius) {
  EXPECT_DOUBLE_EQ(marker_radius_px(100), 8);
  EXPECT_DOUBLE_EQ(marker_radius_px(288), 11.52);
}

class HitTest : public ::testing::Test {
 protected:
  CityLayout layout = square_layout();
  MinimapFrame frame = compute_frame(layout, {}, {1920, 1080});
  Marker marker(UserId id, Vec2 uv, bool self = false) const {
    Marker m;
    m.user = id;
    m.uv = uv;
    m.world = unproject(uv, frame);
    m.self = self;
    return m;
  }
};

TEST_F(HitTest, MarkerCenter) {
  const std::vector<Marker> ms{marker(1, {0.2, 0.2}, true), marker(2, {0.8, 0.3})};
  EXPECT_EQ(hit_test(frame, {0.8, 0.3}, ms, layout), HitResult(MarkerHit{2}));
}

TEST_F(HitTest, SelfExcluded) {
  const std::vector<Marker> ms{marker(1, {0.8, 0.8}, true)};
  EXPECT_EQ(hit_test(frame, {0.8, 0.8}, ms, layout), HitResult(EntityHit{0}));
}

TEST_F(HitTest, NearestAndTies) {
  const double r = marker_radius_px(frame.viewport.width) / frame.viewport.width;
  const std::vector<Marker> ms{marker(5, {0.5, 0.5}), marker(3, {0.5 + r * 0.8, 0.5}), marker(7, {0.5 - r * 0.5, 0.5})};
  EXPECT_EQ(hit_test(frame, {0.5 - r * 0.3, 0.5}, ms, layout), HitResult(MarkerHit{7}));
  // dyadic offsets keep both distances exactly equal
  const double a = 0.015625;
  ASSERT_LT(a, r);
  const std::vector<Marker> tie{marker(5, {0.5, 0.5}), marker(3, {0.5 + a, 0.5})};
  EXPECT_EQ(hit_test(frame, {0.5 + a / 2, 0.5}, tie, layout), HitResult(MarkerHit{3}));
  const std::vector<Marker> tie2{marker(2, {0.5, 0.5}), marker(9, {0.5 + a, 0.5})};
  EXPECT_EQ(hit_test(frame, {0.5 + a / 2, 0.5}, tie2, layout), HitResult(MarkerHit{2}));
}

TEST_F(HitTest, DeepestEntityThenBody) {
  // class at [40,42]^2 sits on the foundation
  EXPECT_EQ(hit_test(frame, project({41, 41}, frame), {}, layout), HitResult(EntityHit{1}));
  EXPECT_EQ(hit_test(frame, project({10, 10}, frame), {}, layout), HitResult(EntityHit{0}));
  MinimapConfig cfg;
  cfg.zoom = 0.5;  // view twice the landscape: corners are empty ground
  const auto wide = compute_frame(layout, cfg, {1920, 1080});
  EXPECT_EQ(hit_test(wide, {0.01, 0.01}, {}, layout), HitResult(MapBody{}));
}

TEST_F(HitTest, HiddenEntitiesSkipped) {
  AppearanceState st;
  st.entities.resize(2);
  st.entities[1].visible = false;
  EXPECT_EQ(hit_test(frame, project({41, 41}, frame), {}, layout, &st), HitResult(EntityHit{0}));
}

TEST_F(HitTest, SelfConsistency) {
  RoomState room;
  Rng rng(8);
  for (UserId id = 1; id <= 6; ++id) {
    room.users[id] = user_at("#000000", {rng.uniform_real(0, 100), 20, rng.uniform_real(0, 100)});
  }
  // keep markers apart so each click is unambiguous
  room.users[2].pose->position = {5, 20, 5};
  room.users[3].pose->position = {95, 20, 95};
  room.users[4].pose->position = {5, 20, 95};
  room.users[5].pose->position = {95, 20, 5};
  room.users[6].pose->position = {50, 20, 10};
  const auto ms = marker_positions(room, 1, {}, frame);
  for (const auto& m : ms) {
    if (m.self) continue;
    EXPECT_EQ(hit_test(frame, project(m.world, frame), ms, layout), HitResult(MarkerHit{m.user}));
  }
}

class Svg : public ::testing::Test {
 protected:
  LandscapeStructure s = [] {
    LandscapeStructure st;
    Package deep{"Deep", {}, {{"Z", "P.Deep.Z", 0, {{"z", 1}}}}};
    Package p{"P", {deep}, {{"C1", "P.C1", 0, {{"m", 1}, {"n", 3}}}}};
    st.applications.push_back({"a", {p}});
    st.communications = {{"P.C1", "P.Deep.Z", 2}};
    return st;
  }();
  CityLayout layout = compute_layout(s);
  MinimapFrame frame = compute_frame(layout, {}, {});
  ZoomConfig cfg;
  AppearanceState at(std::uint8_t lvl) const {
    return resolve_appearance(s, layout, std::vector<std::uint8_t>(layout.boxes.size(), lvl), cfg);
  }
};

TEST_F(Svg, Deterministic) {
  const auto st = at(0);
  EXPECT_EQ(render_svg(layout, st, frame, {}), render_svg(layout, st, frame, {}));
  const std::string svg = render_svg(layout, st, frame, {});
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("</svg>\n"), std::string::npos);
}

TEST_F(Svg, HiddenLayersAbsent) {
  const auto st = at(0);
  RoomState room;
  room.users[1] = user_at("#e6194b", {10, 30, 20});
  const auto ms = marker_positions(room, 1, {}, frame);
  const std::string full = render_svg(layout, st, frame, ms);
  for (auto tag : kLayers) EXPECT_NE(full.find("<g id=\"" + std::string(tag) + "\""), std::string::npos) << tag;
  for (auto tag : kLayers) {
    SvgOptions opt;
    opt.hidden_layers.insert(std::string(tag));
    const std::string svg = render_svg(layout, st, frame, ms, opt);
    EXPECT_EQ(svg.find("<g id=\"" + std::string(tag) + "\""), std::string::npos) << tag;
  }
  SvgOptions opt;
  opt.hidden_layers.insert("buildings");
  EXPECT_EQ(render_svg(layout, st, frame, ms, opt).find("data-id=\"cls:P.C1\""), std::string::npos);
}

TEST_F(Svg, MethodBandsOnlyWhenNear) {
  EXPECT_EQ(count(render_svg(layout, at(0), frame, {}), "data-owner=\"cls:P.C1\""), 2u);
  EXPECT_EQ(count(render_svg(layout, at(2), frame, {}), "data-owner="), 0u);
}

TEST_F(Svg, ClosedPackageDrawnOnce) {
  const std::string svg = render_svg(layout, at(4), frame, {});
  EXPECT_EQ(count(svg, "data-id=\"pkg:a:P.Deep\""), 1u);
  EXPECT_EQ(count(svg, "data-closed=\"true\""), 1u);
  EXPECT_EQ(svg.find("cls:P.Deep.Z"), std::string::npos);
  EXPECT_NE(svg.find("data-id=\"cls:P.C1-&gt;pkg:a:P.Deep\""), std::string::npos);
}

TEST_F(Svg, HiddenCommunicationOmitted) {
  auto st = at(0);
  ASSERT_EQ(st.links.size(), 1u);
  EXPECT_EQ(count(render_svg(layout, st, frame, {}), "<line "), 1u);
  EXPECT_EQ(count(render_svg(layout, st, frame, {}), "marker-end"), 1u);
  st.links[0].visible = false;
  EXPECT_EQ(count(render_svg(layout, st, frame, {}), "<line "), 0u);
}

TEST_F(Svg, MarkersLastAndOffMapDashed) {
  RoomState room;
  room.users[1] = user_at("#e6194b", {10, 30, 20});
  room.users[2] = user_at("#3cb44b", {1000, 30, 20});
  const std::string svg = render_svg(layout, at(0), frame, marker_positions(room, 1, {}, frame));
  const auto markers_at = svg.find("<g id=\"markers\">");
  ASSERT_NE(markers_at, std::string::npos);
  EXPECT_EQ(svg.find("<g id=", markers_at + 1), std::string::npos);
  EXPECT_NE(svg.find("fill=\"#808080\" data-user=\"1\""), std::string::npos);
  EXPECT_NE(svg.find("fill=\"#3cb44b\" data-user=\"2\" stroke=\"#000000\" stroke-dasharray"), std::string::npos);
}

TEST_F(Svg, NumbersHaveTwoDecimals) {
  const std::string svg = render_svg(layout, at(1), frame, {});
  const std::regex attr(R"re((x|y|width|height)="(-?[0-9]+\.[0-9]+)")re");
  std::size_t checked = 0;
  for (std::sregex_iterator it(svg.begin(), svg.end(), attr), end; it != end; ++it) {
    const std::string v = (*it)[2];
    EXPECT_EQ(v.size() - v.find('.'), 3u) << v;
    EXPECT_NE(v, "-0.00");
    ++checked;
  }
  EXPECT_GT(checked, 10u);
}
