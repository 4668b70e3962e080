#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cityzoom/geometry.hpp"
#include "cityzoom/layout.hpp"
#include "cityzoom/room.hpp"
#include "cityzoom/semzoom.hpp"

namespace cityzoom {

enum class MarkerMode : std::uint8_t { camera, target };

/// Visual layers of the top view. Any of them can be hidden on the mini-map.
namespace layer {
inline constexpr std::string_view foundations = "foundations";
inline constexpr std::string_view districts = "districts";
inline constexpr std::string_view buildings = "buildings";
inline constexpr std::string_view methods = "methods";
inline constexpr std::string_view communication = "communication";
inline constexpr std::string_view labels = "labels";
inline constexpr std::string_view markers = "markers";
}  // namespace layer

inline constexpr std::array<std::string_view, 7> kLayers{
    layer::foundations, layer::districts,     layer::buildings, layer::methods,
    layer::communication, layer::labels, layer::markers};

struct MinimapConfig {
  /// Share of the screen area covered by the small map, (0, 0.25].
  double area_fraction{0.04};
  /// [0.5, 10]. Values above 1 zoom in around the active marker.
  double zoom{1.0};
  MarkerMode marker_mode{MarkerMode::camera};
  std::set<std::string, std::less<>> hidden_layers;
  /// Side of the enlarged map relative to the screen height.
  double enlarged_fraction{0.7};

  bool hidden(std::string_view layer_tag) const { return hidden_layers.contains(layer_tag); }
  void validate() const;
  friend bool operator==(const MinimapConfig&, const MinimapConfig&) = default;
};

struct ScreenSize {
  double width{1920};
  double height{1080};

  friend bool operator==(const ScreenSize&, const ScreenSize&) = default;
};

/// Screen-space rectangle in pixels, origin top-left.
struct PixelRect {
  double x{0};
  double y{0};
  double width{0};
  double height{0};

  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// Pixel margin between the small map and the screen corner.
inline constexpr double kMinimapMargin = 8.0;

/// Orthographic, north-up top view. World x maps to u, world z maps to v with
/// v = 0 at the largest z.
struct MinimapFrame {
  Vec2 world_center;
  Vec2 half_extents;
  PixelRect viewport;
  bool enlarged{false};

  Rect view_rect() const { return {world_center - half_extents, world_center + half_extents}; }
  friend bool operator==(const MinimapFrame&, const MinimapFrame&) = default;
};

/// World-centered frame over the whole landscape. With zoom > 1 the view
/// shrinks and follows `focus`, clamped so that at least a quarter of the
/// smaller of view and landscape extent stays covered on each axis (no
/// whiteout). The enlarged frame ignores zoom and focus.
MinimapFrame compute_frame(const CityLayout& layout, const MinimapConfig& config, ScreenSize screen,
                           std::optional<Vec2> focus = std::nullopt, bool enlarged = false);

/// Whiteout check: the view overlaps `landscape` with positive area.
bool shows_landscape(const MinimapFrame& frame, const Rect& landscape);

Vec2 project(Vec2 world, const MinimapFrame& frame);
Vec2 unproject(Vec2 uv, const MinimapFrame& frame);

struct Marker {
  UserId user{0};
  std::string color;
  Vec2 world;
  Vec2 uv;
  bool off_map{false};
  bool self{false};

  friend bool operator==(const Marker&, const Marker&) = default;
};

/// Marker radius in pixels for a viewport of the given side: 4 % of the side,
/// at least 8 px.
double marker_radius_px(double viewport_side);

/// Self marker at the camera or target ground point (per marker mode), in
/// gray; other users at their camera ground point in their color. Users
/// without a pose are skipped. Markers outside the map are clamped onto its
/// border and flagged off_map.
std::vector<Marker> marker_positions(const RoomState& room, UserId self, const MinimapConfig& config,
                                     const MinimapFrame& frame);

struct MarkerHit {
  UserId user;
  friend bool operator==(const MarkerHit&, const MarkerHit&) = default;
};
struct EntityHit {
  std::size_t entity;
  friend bool operator==(const EntityHit&, const EntityHit&) = default;
};
struct MapBody {
  friend bool operator==(const MapBody&, const MapBody&) = default;
};
using HitResult = std::variant<MarkerHit, EntityHit, MapBody>;

/// Markers take precedence (nearest center, ties to the lower user id, own
/// marker excluded), then the deepest visible entity whose footprint contains
/// the clicked ground point, then the map body.
HitResult hit_test(const MinimapFrame& frame, Vec2 click_uv, const std::vector<Marker>& markers,
                   const CityLayout& layout, const AppearanceState* appearance = nullptr);

struct SvgOptions {
  /// Output is a square of this many pixels.
  double size_px{512};
  std::set<std::string, std::less<>> hidden_layers;
};

/// Deterministic SVG 1.1 top view: foundations, districts, buildings with
/// method bands, communication, labels, then markers.
std::string render_svg(const CityLayout& layout, const AppearanceState& appearance,
                       const MinimapFrame& frame, const std::vector<Marker>& markers,
                       const SvgOptions& options = {});

}  // namespace cityzoom
