#include "cityzoom/serialization.hpp"

#include <array>
#include <charconv>
#include <type_traits>

#include "cityzoom/error.hpp"

namespace cityzoom {
namespace {

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) it->get_to(out);
}

template <typename T>
void read_opt(const Json& j, const char* key, std::optional<T>& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) {
    out = it->get<T>();
  } else {
    out.reset();
  }
}

template <typename T>
Json opt_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

void require_object(const Json& j, std::string_view what) {
  if (!j.is_object()) throw ValidationError(std::string(what) + " must be a JSON object");
}

constexpr std::array<std::string_view, kRuleCount> kRuleNames{
    "classHeight",   "methodStack",   "methodHiding", "labelSize",     "labelShortening",
    "commThickness", "commCurvature", "commHiding",   "packageClosing"};

UserId parse_user_key(const std::string& key) {
  UserId id{};
  auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), id);
  if (ec != std::errc{} || ptr != key.data() + key.size()) {
    throw ValidationError("invalid user id key: " + key);
  }
  return id;
}

}  // namespace

void to_json(Json& j, const Vec2& v) { j = Json::array({v.x, v.y}); }
void from_json(const Json& j, Vec2& v) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("2D point must be [x, z]");
  v = {j[0].get<double>(), j[1].get<double>()};
}
void to_json(Json& j, const Vec3& v) { j = Json::array({v.x, v.y, v.z}); }
void from_json(const Json& j, Vec3& v) {
  if (!j.is_array() || j.size() != 3) throw ValidationError("3D point must be [x, y, z]");
  v = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}
void to_json(Json& j, const CameraPose& p) { j = {{"position", p.position}, {"target", p.target}}; }
void from_json(const Json& j, CameraPose& p) {
  j.at("position").get_to(p.position);
  j.at("target").get_to(p.target);
}

// Structure

void to_json(Json& j, const Method& m) { j = {{"name", m.name}, {"loc", m.loc}}; }
void from_json(const Json& j, Method& m) {
  j.at("name").get_to(m.name);
  m.loc = 1;
  read_opt(j, "loc", m.loc);
}
void to_json(Json& j, const Class& c) {
  j = {{"name", c.name}, {"fqn", c.fqn}, {"instanceCount", c.instance_count}, {"methods", c.methods}};
}
void from_json(const Json& j, Class& c) {
  j.at("name").get_to(c.name);
  j.at("fqn").get_to(c.fqn);
  c.instance_count = 0;
  read_opt(j, "instanceCount", c.instance_count);
  j.at("methods").get_to(c.methods);
}
void to_json(Json& j, const Package& p) {
  j = {{"name", p.name}, {"subPackages", p.sub_packages}, {"classes", p.classes}};
}
void from_json(const Json& j, Package& p) {
  j.at("name").get_to(p.name);
  p.sub_packages.clear();
  p.classes.clear();
  read_opt(j, "subPackages", p.sub_packages);
  read_opt(j, "classes", p.classes);
}
void to_json(Json& j, const Application& a) { j = {{"name", a.name}, {"rootPackages", a.root_packages}}; }
void from_json(const Json& j, Application& a) {
  j.at("name").get_to(a.name);
  j.at("rootPackages").get_to(a.root_packages);
}
void to_json(Json& j, const CommunicationLink& l) {
  j = {{"sourceClassFqn", l.source_fqn},
       {"targetClassFqn", l.target_fqn},
       {"requestCount", l.request_count}};
}
void from_json(const Json& j, CommunicationLink& l) {
  j.at("sourceClassFqn").get_to(l.source_fqn);
  j.at("targetClassFqn").get_to(l.target_fqn);
  j.at("requestCount").get_to(l.request_count);
}
void to_json(Json& j, const LandscapeStructure& s) {
  j = {{"applications", s.applications}, {"communications", s.communications}};
}
void from_json(const Json& j, LandscapeStructure& s) {
  require_object(j, "structure");
  j.at("applications").get_to(s.applications);
  s.communications.clear();
  read_opt(j, "communications", s.communications);
}

// Layout

void to_json(Json& j, const LayoutConfig& c) {
  j = {{"margin", c.margin},
       {"classFootprint", c.class_footprint},
       {"baseClassHeight", c.base_class_height},
       {"packageHeightStep", c.package_height_step},
       {"foundationGap", c.foundation_gap},
       {"foundationColor", c.foundation_color},
       {"colorDepthPalette", c.district_colors},
       {"classColor", c.class_color}};
}
void from_json(const Json& j, LayoutConfig& c) {
  require_object(j, "layout config");
  read_opt(j, "margin", c.margin);
  read_opt(j, "classFootprint", c.class_footprint);
  read_opt(j, "baseClassHeight", c.base_class_height);
  read_opt(j, "packageHeightStep", c.package_height_step);
  read_opt(j, "foundationGap", c.foundation_gap);
  read_opt(j, "foundationColor", c.foundation_color);
  read_opt(j, "colorDepthPalette", c.district_colors);
  read_opt(j, "classColor", c.class_color);
}
void to_json(Json& j, const EntityBox& b) {
  j = {{"id", b.id},
       {"name", b.name},
       {"kind", to_string(b.kind)},
       {"parent", b.parent == npos ? Json(nullptr) : Json(b.parent)},
       {"depth", b.depth},
       {"min", b.min},
       {"max", b.max},
       {"color", b.color}};
}
void to_json(Json& j, const LabelSlot& l) {
  j = {{"entity", l.entity},
       {"anchor", l.anchor},
       {"maxWidth", l.max_width},
       {"orientation", l.orientation == LabelOrientation::along_x ? "alongX" : "flat"}};
}
void to_json(Json& j, const ArcGeometry& a) {
  j = {{"linkId", a.link_id},
       {"start", a.start},
       {"end", a.end},
       {"apexHeight", a.apex_height},
       {"polyline", a.polyline}};
}
void to_json(Json& j, const CityLayout& l) {
  j = {{"boxes", l.boxes}, {"labels", l.labels}, {"arcs", l.arcs}};
}

// Settings

void to_json(Json& j, const ZoomConfig& c) {
  Json flags = Json::object();
  for (std::size_t i = 0; i < kRuleCount; ++i) flags[std::string(kRuleNames[i])] = c.rules.test(i);
  j = {{"algorithm", c.algorithm == ClusterAlgorithm::kmeans ? "kmeans" : "meanshift"},
       {"clusterCount", c.cluster_count},
       {"bandwidth", c.bandwidth},
       {"levelThresholds", c.level_thresholds},
       {"seed", c.seed},
       {"featureFlags", flags},
       {"commHideQuantile", c.comm_hide_quantile},
       {"autoCloseDepth", c.auto_close_depth},
       {"charWidth", c.char_width}};
}
void from_json(const Json& j, ZoomConfig& c) {
  require_object(j, "zoom config");
  if (auto it = j.find("algorithm"); it != j.end()) {
    const auto name = it->get<std::string>();
    if (name == "kmeans") {
      c.algorithm = ClusterAlgorithm::kmeans;
    } else if (name == "meanshift") {
      c.algorithm = ClusterAlgorithm::meanshift;
    } else {
      throw ValidationError("unknown clustering algorithm: " + name);
    }
  }
  read_opt(j, "clusterCount", c.cluster_count);
  read_opt(j, "bandwidth", c.bandwidth);
  read_opt(j, "levelThresholds", c.level_thresholds);
  read_opt(j, "seed", c.seed);
  if (auto it = j.find("featureFlags"); it != j.end()) {
    require_object(*it, "featureFlags");
    for (const auto& [key, value] : it->items()) {
      auto pos = std::find(kRuleNames.begin(), kRuleNames.end(), key);
      if (pos == kRuleNames.end()) throw ValidationError("unknown feature flag: " + key);
      c.rules.set(static_cast<std::size_t>(pos - kRuleNames.begin()), value.get<bool>());
    }
  }
  read_opt(j, "commHideQuantile", c.comm_hide_quantile);
  read_opt(j, "autoCloseDepth", c.auto_close_depth);
  read_opt(j, "charWidth", c.char_width);
}
void to_json(Json& j, const MinimapConfig& c) {
  j = {{"areaFraction", c.area_fraction},
       {"zoom", c.zoom},
       {"markerMode", c.marker_mode == MarkerMode::camera ? "camera" : "target"},
       {"hiddenLayers", c.hidden_layers},
       {"enlargedFraction", c.enlarged_fraction}};
}
void from_json(const Json& j, MinimapConfig& c) {
  require_object(j, "minimap config");
  read_opt(j, "areaFraction", c.area_fraction);
  read_opt(j, "zoom", c.zoom);
  if (auto it = j.find("markerMode"); it != j.end()) {
    const auto mode = it->get<std::string>();
    if (mode == "camera") {
      c.marker_mode = MarkerMode::camera;
    } else if (mode == "target") {
      c.marker_mode = MarkerMode::target;
    } else {
      throw ValidationError("unknown marker mode: " + mode);
    }
  }
  if (auto it = j.find("hiddenLayers"); it != j.end()) {
    c.hidden_layers.clear();
    for (const auto& tag : *it) c.hidden_layers.insert(tag.get<std::string>());
  }
  read_opt(j, "enlargedFraction", c.enlarged_fraction);
}
void to_json(Json& j, const Settings& s) { j = {{"zoom", s.zoom}, {"minimap", s.minimap}}; }
void from_json(const Json& j, Settings& s) {
  require_object(j, "settings");
  for (const auto& [key, value] : j.items()) {
    if (key != "zoom" && key != "minimap") throw ValidationError("unknown settings section: " + key);
  }
  read_opt(j, "zoom", s.zoom);
  read_opt(j, "minimap", s.minimap);
}

void to_json(Json& j, const ClusterSet& c) {
  j = Json::array();
  for (const auto& cl : c.clusters) j.push_back({{"centroid", cl.centroid}, {"members", cl.members}});
}

// Appearance

void to_json(Json& j, const EntityAppearance& a) {
  j = {{"level", a.level},
       {"visible", a.visible},
       {"classHeightScale", a.class_height_scale},
       {"height", a.height},
       {"methodSegments", a.method_segments},
       {"methodsVisible", a.methods_visible},
       {"labelFontScale", a.label_font_scale},
       {"labelMaxChars", a.label_max_chars},
       {"label", a.label},
       {"labelCentered", a.label_centered},
       {"packageOpen", a.package_open}};
}
void from_json(const Json& j, EntityAppearance& a) {
  j.at("level").get_to(a.level);
  j.at("visible").get_to(a.visible);
  j.at("classHeightScale").get_to(a.class_height_scale);
  j.at("height").get_to(a.height);
  j.at("methodSegments").get_to(a.method_segments);
  j.at("methodsVisible").get_to(a.methods_visible);
  j.at("labelFontScale").get_to(a.label_font_scale);
  j.at("labelMaxChars").get_to(a.label_max_chars);
  j.at("label").get_to(a.label);
  j.at("labelCentered").get_to(a.label_centered);
  j.at("packageOpen").get_to(a.package_open);
}
void to_json(Json& j, const LinkAppearance& l) {
  j = {{"id", l.id},
       {"source", l.source},
       {"target", l.target},
       {"requestCount", l.request_count},
       {"level", l.level},
       {"thicknessScale", l.thickness_scale},
       {"curvatureFactor", l.curvature_factor},
       {"visible", l.visible},
       {"arrowsVisible", l.arrows_visible}};
}
void from_json(const Json& j, LinkAppearance& l) {
  j.at("id").get_to(l.id);
  j.at("source").get_to(l.source);
  j.at("target").get_to(l.target);
  j.at("requestCount").get_to(l.request_count);
  j.at("level").get_to(l.level);
  j.at("thicknessScale").get_to(l.thickness_scale);
  j.at("curvatureFactor").get_to(l.curvature_factor);
  j.at("visible").get_to(l.visible);
  j.at("arrowsVisible").get_to(l.arrows_visible);
}
void to_json(Json& j, const AppearanceState& s) {
  j = {{"landscapeKey", s.landscape_key}, {"entities", s.entities}, {"links", s.links}};
}
void from_json(const Json& j, AppearanceState& s) {
  j.at("landscapeKey").get_to(s.landscape_key);
  j.at("entities").get_to(s.entities);
  j.at("links").get_to(s.links);
}
void to_json(Json& j, const EntityDelta& d) {
  j = {{"entity", d.entity}};
  if (d.level) j["level"] = *d.level;
  if (d.visible) j["visible"] = *d.visible;
  if (d.class_height_scale) j["classHeightScale"] = *d.class_height_scale;
  if (d.height) j["height"] = *d.height;
  if (d.method_segments) j["methodSegments"] = *d.method_segments;
  if (d.methods_visible) j["methodsVisible"] = *d.methods_visible;
  if (d.label_font_scale) j["labelFontScale"] = *d.label_font_scale;
  if (d.label_max_chars) j["labelMaxChars"] = *d.label_max_chars;
  if (d.label) j["label"] = *d.label;
  if (d.label_centered) j["labelCentered"] = *d.label_centered;
  if (d.package_open) j["packageOpen"] = *d.package_open;
}
void from_json(const Json& j, EntityDelta& d) {
  j.at("entity").get_to(d.entity);
  read_opt(j, "level", d.level);
  read_opt(j, "visible", d.visible);
  read_opt(j, "classHeightScale", d.class_height_scale);
  read_opt(j, "height", d.height);
  read_opt(j, "methodSegments", d.method_segments);
  read_opt(j, "methodsVisible", d.methods_visible);
  read_opt(j, "labelFontScale", d.label_font_scale);
  read_opt(j, "labelMaxChars", d.label_max_chars);
  read_opt(j, "label", d.label);
  read_opt(j, "labelCentered", d.label_centered);
  read_opt(j, "packageOpen", d.package_open);
}
void to_json(Json& j, const AppearanceDelta& d) {
  j = {{"landscapeKey", d.landscape_key},
       {"entityCount", d.entity_count},
       {"entities", d.entities},
       {"upsertedLinks", d.upserted_links},
       {"removedLinks", d.removed_links}};
}
void from_json(const Json& j, AppearanceDelta& d) {
  j.at("landscapeKey").get_to(d.landscape_key);
  j.at("entityCount").get_to(d.entity_count);
  j.at("entities").get_to(d.entities);
  j.at("upsertedLinks").get_to(d.upserted_links);
  j.at("removedLinks").get_to(d.removed_links);
}

// Mini-map

void to_json(Json& j, const ScreenSize& s) { j = {{"width", s.width}, {"height", s.height}}; }
void from_json(const Json& j, ScreenSize& s) {
  j.at("width").get_to(s.width);
  j.at("height").get_to(s.height);
  if (!(s.width > 0 && s.height > 0)) throw ValidationError("screen size must be positive");
}
void to_json(Json& j, const PixelRect& r) {
  j = {{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
}
void from_json(const Json& j, PixelRect& r) {
  j.at("x").get_to(r.x);
  j.at("y").get_to(r.y);
  j.at("width").get_to(r.width);
  j.at("height").get_to(r.height);
}
void to_json(Json& j, const MinimapFrame& f) {
  j = {{"worldCenter", f.world_center},
       {"halfExtents", f.half_extents},
       {"viewport", f.viewport},
       {"enlarged", f.enlarged}};
}
void from_json(const Json& j, MinimapFrame& f) {
  j.at("worldCenter").get_to(f.world_center);
  j.at("halfExtents").get_to(f.half_extents);
  j.at("viewport").get_to(f.viewport);
  j.at("enlarged").get_to(f.enlarged);
}
void to_json(Json& j, const Marker& m) {
  j = {{"user", m.user}, {"color", m.color}, {"world", m.world},
       {"uv", m.uv},     {"offMap", m.off_map}, {"self", m.self}};
}
void from_json(const Json& j, Marker& m) {
  j.at("user").get_to(m.user);
  j.at("color").get_to(m.color);
  j.at("world").get_to(m.world);
  j.at("uv").get_to(m.uv);
  j.at("offMap").get_to(m.off_map);
  j.at("self").get_to(m.self);
}

// Rooms and messages

void to_json(Json& j, const RoomUser& u) {
  j = {{"name", u.name},
       {"color", u.color},
       {"pose", opt_json(u.pose)},
       {"highlights", u.highlights},
       {"spectating", opt_json(u.spectating)},
       {"lastSeq", u.last_seq}};
}
void from_json(const Json& j, RoomUser& u) {
  j.at("name").get_to(u.name);
  j.at("color").get_to(u.color);
  read_opt(j, "pose", u.pose);
  j.at("highlights").get_to(u.highlights);
  read_opt(j, "spectating", u.spectating);
  j.at("lastSeq").get_to(u.last_seq);
}
void to_json(Json& j, const RoomState& s) {
  Json users = Json::object();
  for (const auto& [id, user] : s.users) users[std::to_string(id)] = user;
  j = {{"roomId", s.room_id}, {"landscapeId", s.landscape_id}, {"users", users}, {"serverSeq", s.server_seq}};
}
void from_json(const Json& j, RoomState& s) {
  j.at("roomId").get_to(s.room_id);
  j.at("landscapeId").get_to(s.landscape_id);
  j.at("serverSeq").get_to(s.server_seq);
  s.users.clear();
  for (const auto& [key, value] : j.at("users").items()) {
    s.users.emplace(parse_user_key(key), value.get<RoomUser>());
  }
}

namespace {

template <typename V>
Json keyed_by_user(const std::map<UserId, V>& m) {
  Json out = Json::object();
  for (const auto& [id, v] : m) out[std::to_string(id)] = v;
  return out;
}

template <typename V>
std::map<UserId, V> read_keyed_by_user(const Json& j) {
  std::map<UserId, V> out;
  for (const auto& [key, value] : j.items()) out.emplace(parse_user_key(key), value.template get<V>());
  return out;
}

void write_payload(Json& j, const Payload& payload) {
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Join>) {
          j["name"] = p.name;
          if (p.screen) j["screen"] = *p.screen;
        } else if constexpr (std::is_same_v<T, CameraUpdate>) {
          if (p.user) j["user"] = *p.user;
          j["pose"] = p.pose;
        } else if constexpr (std::is_same_v<T, Highlight>) {
          if (p.user) j["user"] = *p.user;
          j["entityId"] = p.entity_id;
          if (p.color) j["color"] = *p.color;
          j["active"] = p.active;
        } else if constexpr (std::is_same_v<T, SpectateStart>) {
          if (p.user) j["user"] = *p.user;
          j["targetId"] = p.target;
        } else if constexpr (std::is_same_v<T, SpectateStop>) {
          if (p.user) j["user"] = *p.user;
        } else if constexpr (std::is_same_v<T, Welcome>) {
          j["selfId"] = p.self_id;
          j["color"] = p.color;
          j["snapshot"] = p.snapshot;
        } else if constexpr (std::is_same_v<T, UserJoined>) {
          j["user"] = p.user;
          j["name"] = p.name;
          j["color"] = p.color;
        } else if constexpr (std::is_same_v<T, UserLeft>) {
          j["user"] = p.user;
        } else if constexpr (std::is_same_v<T, StateSync>) {
          j["poses"] = keyed_by_user(p.poses);
          j["highlights"] = keyed_by_user(p.highlights);
          j["spectating"] = keyed_by_user(p.spectating);
          j["markers"] = p.markers;
          j["frame"] = opt_json(p.frame);
        } else if constexpr (std::is_same_v<T, AppearanceUpdate>) {
          j["delta"] = p.delta;
        } else if constexpr (std::is_same_v<T, ErrorReply>) {
          j["code"] = p.code;
          j["message"] = p.message;
        }
      },
      payload);
}

Payload read_payload(const Json& j, std::string_view type) {
  if (type == "Join") {
    Join p;
    j.at("name").get_to(p.name);
    read_opt(j, "screen", p.screen);
    return p;
  }
  if (type == "Leave") return Leave{};
  if (type == "SyncRequest") return SyncRequest{};
  if (type == "CameraUpdate") {
    CameraUpdate p;
    read_opt(j, "user", p.user);
    j.at("pose").get_to(p.pose);
    return p;
  }
  if (type == "Highlight") {
    Highlight p;
    read_opt(j, "user", p.user);
    j.at("entityId").get_to(p.entity_id);
    read_opt(j, "color", p.color);
    read_opt(j, "active", p.active);
    return p;
  }
  if (type == "SpectateStart") {
    SpectateStart p;
    read_opt(j, "user", p.user);
    j.at("targetId").get_to(p.target);
    return p;
  }
  if (type == "SpectateStop") {
    SpectateStop p;
    read_opt(j, "user", p.user);
    return p;
  }
  if (type == "Welcome") {
    Welcome p;
    j.at("selfId").get_to(p.self_id);
    j.at("color").get_to(p.color);
    j.at("snapshot").get_to(p.snapshot);
    return p;
  }
  if (type == "UserJoined") {
    UserJoined p;
    j.at("user").get_to(p.user);
    j.at("name").get_to(p.name);
    j.at("color").get_to(p.color);
    return p;
  }
  if (type == "UserLeft") return UserLeft{j.at("user").get<UserId>()};
  if (type == "StateSync") {
    StateSync p;
    p.poses = read_keyed_by_user<CameraPose>(j.at("poses"));
    p.highlights = read_keyed_by_user<std::map<std::string, std::string>>(j.at("highlights"));
    p.spectating = read_keyed_by_user<UserId>(j.at("spectating"));
    j.at("markers").get_to(p.markers);
    read_opt(j, "frame", p.frame);
    return p;
  }
  if (type == "AppearanceUpdate") return AppearanceUpdate{j.at("delta").get<AppearanceDelta>()};
  if (type == "Error") {
    ErrorReply p;
    j.at("code").get_to(p.code);
    j.at("message").get_to(p.message);
    return p;
  }
  throw ValidationError("unknown message type: " + std::string(type));
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(0, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

void to_json(Json& j, const Message& m) {
  j = {{"type", message_type(m.payload)}, {"roomId", m.room_id}, {"seq", m.seq}};
  write_payload(j, m.payload);
}
void from_json(const Json& j, Message& m) {
  require_object(j, "message");
  j.at("roomId").get_to(m.room_id);
  j.at("seq").get_to(m.seq);
  m.payload = read_payload(j, j.at("type").get<std::string>());
}

LandscapeStructure parse_structure(std::string_view text) {
  const Json j = parse_json(text);
  LandscapeStructure s;
  try {
    j.get_to(s);
  } catch (const Json::exception& e) {
    throw ParseError(0, std::string("invalid structure document: ") + e.what());
  }
  validate(s);
  return s;
}

Settings parse_settings(std::string_view text) {
  const Json j = parse_json(text);
  Settings s;
  try {
    j.get_to(s);
  } catch (const Json::exception& e) {
    throw ParseError(0, std::string("invalid settings document: ") + e.what());
  }
  s.validate();
  return s;
}

Message parse_message(std::string_view text) {
  const Json j = parse_json(text);
  try {
    return j.get<Message>();
  } catch (const Json::exception& e) {
    throw ParseError(0, std::string("invalid message: ") + e.what());
  } catch (const ValidationError& e) {
    throw ParseError(0, e.what());
  }
}

std::string serialize_message(const Message& message) { return Json(message).dump(); }

std::string dump_document(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace cityzoom
