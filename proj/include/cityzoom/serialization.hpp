#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "cityzoom/camera.hpp"
#include "cityzoom/clustering.hpp"
#include "cityzoom/landscape.hpp"
#include "cityzoom/layout.hpp"
#include "cityzoom/minimap.hpp"
#include "cityzoom/protocol.hpp"
#include "cityzoom/room.hpp"
#include "cityzoom/semzoom.hpp"
#include "cityzoom/settings.hpp"

namespace cityzoom {

using Json = nlohmann::json;

// Field names are camelCase; see docs/schemas.md. Readers of config documents
// (ZoomConfig, MinimapConfig, Settings, LayoutConfig) start from defaults and
// only override the keys present.

void to_json(Json& j, const Vec2& v);
void from_json(const Json& j, Vec2& v);
void to_json(Json& j, const Vec3& v);
void from_json(const Json& j, Vec3& v);
void to_json(Json& j, const CameraPose& p);
void from_json(const Json& j, CameraPose& p);

void to_json(Json& j, const Method& m);
void from_json(const Json& j, Method& m);
void to_json(Json& j, const Class& c);
void from_json(const Json& j, Class& c);
void to_json(Json& j, const Package& p);
void from_json(const Json& j, Package& p);
void to_json(Json& j, const Application& a);
void from_json(const Json& j, Application& a);
void to_json(Json& j, const CommunicationLink& l);
void from_json(const Json& j, CommunicationLink& l);
void to_json(Json& j, const LandscapeStructure& s);
void from_json(const Json& j, LandscapeStructure& s);

void to_json(Json& j, const LayoutConfig& c);
void from_json(const Json& j, LayoutConfig& c);
void to_json(Json& j, const EntityBox& b);
void to_json(Json& j, const LabelSlot& l);
void to_json(Json& j, const ArcGeometry& a);
void to_json(Json& j, const CityLayout& l);

void to_json(Json& j, const ZoomConfig& c);
void from_json(const Json& j, ZoomConfig& c);
void to_json(Json& j, const MinimapConfig& c);
void from_json(const Json& j, MinimapConfig& c);
void to_json(Json& j, const Settings& s);
void from_json(const Json& j, Settings& s);

void to_json(Json& j, const ClusterSet& c);

void to_json(Json& j, const EntityAppearance& a);
void from_json(const Json& j, EntityAppearance& a);
void to_json(Json& j, const LinkAppearance& l);
void from_json(const Json& j, LinkAppearance& l);
void to_json(Json& j, const AppearanceState& s);
void from_json(const Json& j, AppearanceState& s);
void to_json(Json& j, const EntityDelta& d);
void from_json(const Json& j, EntityDelta& d);
void to_json(Json& j, const AppearanceDelta& d);
void from_json(const Json& j, AppearanceDelta& d);

void to_json(Json& j, const ScreenSize& s);
void from_json(const Json& j, ScreenSize& s);
void to_json(Json& j, const PixelRect& r);
void from_json(const Json& j, PixelRect& r);
void to_json(Json& j, const MinimapFrame& f);
void from_json(const Json& j, MinimapFrame& f);
void to_json(Json& j, const Marker& m);
void from_json(const Json& j, Marker& m);

void to_json(Json& j, const RoomUser& u);
void from_json(const Json& j, RoomUser& u);
void to_json(Json& j, const RoomState& s);
void from_json(const Json& j, RoomState& s);
void to_json(Json& j, const Message& m);
void from_json(const Json& j, Message& m);

/// Parses and validates a structure document. Throws ParseError on malformed
/// JSON and ValidationError on broken invariants.
LandscapeStructure parse_structure(std::string_view text);

/// Parses a settings document over the defaults and validates it.
Settings parse_settings(std::string_view text);

/// Throws ParseError on malformed JSON, a missing field or an unknown type.
Message parse_message(std::string_view text);
std::string serialize_message(const Message& message);

/// Pretty-printed document with a trailing newline, used for files.
std::string dump_document(const Json& j);

}  // namespace cityzoom
