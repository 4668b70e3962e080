#include "cityzoom/minimap.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cityzoom/error.hpp"

namespace cityzoom {
namespace {

/// Share of the smaller of (view, landscape) extent that must stay visible.
constexpr double kKeepVisible = 0.25;

double clamp_axis(double center, double half, double lo, double hi) {
  const double keep = kKeepVisible * std::min(2 * half, hi - lo);
  return std::clamp(center, lo - half + keep, hi + half - keep);
}

}  // namespace

void MinimapConfig::validate() const {
  if (!(area_fraction > 0 && area_fraction <= 0.25)) {
    throw ValidationError("areaFraction must lie in (0, 0.25]");
  }
  if (!(zoom >= 0.5 && zoom <= 10)) throw ValidationError("zoom must lie in [0.5, 10]");
  if (!(enlarged_fraction > 0 && enlarged_fraction <= 1)) {
    throw ValidationError("enlargedFraction must lie in (0, 1]");
  }
  for (const auto& tag : hidden_layers) {
    if (std::find(kLayers.begin(), kLayers.end(), tag) == kLayers.end()) {
      throw ValidationError("unknown layer: " + tag);
    }
  }
}

MinimapFrame compute_frame(const CityLayout& layout, const MinimapConfig& config, ScreenSize screen,
                           std::optional<Vec2> focus, bool enlarged) {
  config.validate();
  if (layout.boxes.empty()) throw ValidationError("cannot frame an empty layout");
  if (!(screen.width > 0 && screen.height > 0)) throw ValidationError("screen must be non-empty");

  const Rect bounds = layout.bounds();
  const double half = std::max(bounds.width(), bounds.depth()) * 0.5;

  MinimapFrame frame;
  frame.enlarged = enlarged;
  frame.world_center = bounds.center();
  frame.half_extents = {half, half};
  if (!enlarged) {
    frame.half_extents = frame.half_extents * (1.0 / config.zoom);
    if (config.zoom > 1 && focus) frame.world_center = *focus;
    frame.world_center.x =
        clamp_axis(frame.world_center.x, frame.half_extents.x, bounds.min.x, bounds.max.x);
    frame.world_center.y =
        clamp_axis(frame.world_center.y, frame.half_extents.y, bounds.min.y, bounds.max.y);
  }

  if (enlarged) {
    const double side = config.enlarged_fraction * screen.height;
    frame.viewport = {(screen.width - side) * 0.5, (screen.height - side) * 0.5, side, side};
  } else {
    const double side = std::sqrt(config.area_fraction * screen.width * screen.height);
    frame.viewport = {screen.width - kMinimapMargin - side, kMinimapMargin, side, side};
  }
  return frame;
}

bool shows_landscape(const MinimapFrame& frame, const Rect& landscape) {
  const Rect view = frame.view_rect();
  const double ox = std::min(view.max.x, landscape.max.x) - std::max(view.min.x, landscape.min.x);
  const double oz = std::min(view.max.y, landscape.max.y) - std::max(view.min.y, landscape.min.y);
  return ox > 0 && oz > 0;
}

Vec2 project(Vec2 world, const MinimapFrame& frame) {
  const Vec2 c = frame.world_center;
  const Vec2 h = frame.half_extents;
  return {(world.x - (c.x - h.x)) / (2 * h.x), ((c.y + h.y) - world.y) / (2 * h.y)};
}

Vec2 unproject(Vec2 uv, const MinimapFrame& frame) {
  const Vec2 c = frame.world_center;
  const Vec2 h = frame.half_extents;
  return {(c.x - h.x) + uv.x * (2 * h.x), (c.y + h.y) - uv.y * (2 * h.y)};
}

double marker_radius_px(double viewport_side) { return std::max(0.04 * viewport_side, 8.0); }

std::vector<Marker> marker_positions(const RoomState& room, UserId self, const MinimapConfig& config,
                                     const MinimapFrame& frame) {
  std::vector<Marker> out;
  auto place = [&](UserId id, const RoomUser& user, bool is_self) {
    if (!user.pose) return;
    Marker m;
    m.user = id;
    m.self = is_self;
    m.color = is_self ? std::string(kSelfMarkerColor) : user.color;
    const bool by_target = is_self && config.marker_mode == MarkerMode::target;
    m.world = ground(by_target ? user.pose->target : user.pose->position);
    const Vec2 raw = project(m.world, frame);
    m.uv = {std::clamp(raw.x, 0.0, 1.0), std::clamp(raw.y, 0.0, 1.0)};
    m.off_map = m.uv != raw;
    out.push_back(std::move(m));
  };
  if (auto it = room.users.find(self); it != room.users.end()) place(self, it->second, true);
  for (const auto& [id, user] : room.users) {
    if (id != self) place(id, user, false);
  }
  return out;
}

HitResult hit_test(const MinimapFrame& frame, Vec2 click_uv, const std::vector<Marker>& markers,
                   const CityLayout& layout, const AppearanceState* appearance) {
  const double side = frame.viewport.width;
  const double radius_uv = side > 0 ? marker_radius_px(side) / side : 0.0;
  const Marker* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& m : markers) {
    if (m.self) continue;
    const double d = distance(click_uv, m.uv);
    if (d > radius_uv) continue;
    if (d < best_d || (d == best_d && best && m.user < best->user)) {
      best = &m;
      best_d = d;
    }
  }
  if (best) return MarkerHit{best->user};

  const Vec2 world = unproject(click_uv, frame);
  std::size_t hit = npos;
  for (std::size_t i = 0; i < layout.boxes.size(); ++i) {
    const EntityBox& b = layout.boxes[i];
    if (!b.footprint().contains(world)) continue;
    if (appearance && i < appearance->entities.size() && !appearance->entities[i].visible) continue;
    if (hit == npos || b.depth > layout.boxes[hit].depth) hit = i;
  }
  if (hit != npos) return EntityHit{hit};
  return MapBody{};
}

namespace {

std::string num(double v) {
  if (std::abs(v) < 0.005) v = 0.0;
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 2);
  return std::string(buf.data(), res.ptr);
}

std::string escape_xml(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr std::array<std::string_view, 4> kMethodColors{"#ffb74d", "#e57373", "#81c784", "#64b5f6"};
constexpr std::string_view kCommColor = "#f4c430";
constexpr double kCommWidth = 0.3;     // world units at thickness 1
constexpr double kLabelHeight = 1.0;   // world units at font scale 1

class SvgWriter {
 public:
  SvgWriter(const MinimapFrame& frame, double size) : frame_(frame), size_(size) {}

  Vec2 px(Vec2 world) const {
    const Vec2 uv = project(world, frame_);
    return {uv.x * size_, uv.y * size_};
  }
  double px_len(double world) const { return world / (2 * frame_.half_extents.x) * size_; }

  void rect(std::string& out, const Rect& r, std::string_view fill, std::string_view extra = {}) const {
    const Vec2 tl = px({r.min.x, r.max.y});
    const Vec2 br = px({r.max.x, r.min.y});
    out += "<rect x=\"" + num(tl.x) + "\" y=\"" + num(tl.y) + "\" width=\"" + num(br.x - tl.x) +
           "\" height=\"" + num(br.y - tl.y) + "\" fill=\"" + std::string(fill) + "\"";
    if (!extra.empty()) out += " " + std::string(extra);
    out += "/>\n";
  }

 private:
  const MinimapFrame& frame_;
  double size_;
};

bool entity_visible(const AppearanceState& a, std::size_t i) {
  return i >= a.entities.size() || a.entities[i].visible;
}

}  // namespace

std::string render_svg(const CityLayout& layout, const AppearanceState& appearance,
                       const MinimapFrame& frame, const std::vector<Marker>& markers,
                       const SvgOptions& options) {
  const double size = options.size_px;
  const SvgWriter w(frame, size);
  auto hidden = [&](std::string_view tag) { return options.hidden_layers.contains(tag); };
  auto label_of = [&](std::size_t i) -> const std::string& {
    return i < appearance.entities.size() ? appearance.entities[i].label : layout.boxes[i].name;
  };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(size) +
         "\" height=\"" + num(size) + "\" viewBox=\"0 0 " + num(size) + " " + num(size) + "\">\n";
  out += "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"4\" "
         "markerHeight=\"4\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#000000\"/></marker></defs>\n";
  out += "<rect x=\"0.00\" y=\"0.00\" width=\"" + num(size) + "\" height=\"" + num(size) +
         "\" fill=\"#ffffff\"/>\n";

  if (!hidden(layer::foundations)) {
    out += "<g id=\"foundations\">\n";
    for (std::size_t i = 0; i < layout.boxes.size(); ++i) {
      const auto& b = layout.boxes[i];
      if (b.kind != EntityKind::application) continue;
      w.rect(out, b.footprint(), b.color, "data-id=\"" + escape_xml(b.id) + "\"");
    }
    out += "</g>\n";
  }

  if (!hidden(layer::districts)) {
    out += "<g id=\"districts\">\n";
    for (std::size_t i = 0; i < layout.boxes.size(); ++i) {
      const auto& b = layout.boxes[i];
      if (b.kind != EntityKind::package || !entity_visible(appearance, i)) continue;
      const bool open = i >= appearance.entities.size() || appearance.entities[i].package_open;
      std::string extra = "data-id=\"" + escape_xml(b.id) + "\"";
      if (!open) extra += " data-closed=\"true\" stroke=\"#000000\" stroke-width=\"1.00\"";
      w.rect(out, b.footprint(), b.color, extra);
    }
    out += "</g>\n";
  }

  if (!hidden(layer::buildings)) {
    out += "<g id=\"buildings\">\n";
    for (std::size_t i = 0; i < layout.boxes.size(); ++i) {
      const auto& b = layout.boxes[i];
      if (b.kind != EntityKind::klass || !entity_visible(appearance, i)) continue;
      w.rect(out, b.footprint(), b.color, "data-id=\"" + escape_xml(b.id) + "\"");
    }
    out += "</g>\n";
  }

  if (!hidden(layer::methods)) {
    out += "<g id=\"methods\">\n";
    for (std::size_t i = 0; i < layout.boxes.size() && i < appearance.entities.size(); ++i) {
      const auto& b = layout.boxes[i];
      const auto& a = appearance.entities[i];
      if (b.kind != EntityKind::klass || !a.visible || !a.methods_visible) continue;
      // Top view of the stack: one band per method, depth share = height share.
      const Rect fp = b.footprint();
      double total = 0;
      for (double s : a.method_segments) total += s;
      double z = fp.max.y;
      for (std::size_t m = 0; m < a.method_segments.size(); ++m) {
        const double d = total > 0 ? fp.depth() * a.method_segments[m] / total : 0;
        const Rect band{{fp.min.x + 0.15 * fp.width(), z - d}, {fp.max.x - 0.15 * fp.width(), z}};
        w.rect(out, band, kMethodColors[m % kMethodColors.size()],
               "data-owner=\"" + escape_xml(b.id) + "\"");
        z -= d;
      }
    }
    out += "</g>\n";
  }

  if (!hidden(layer::communication)) {
    out += "<g id=\"communication\">\n";
    for (const auto& l : appearance.links) {
      if (!l.visible) continue;
      const std::size_t s = layout.find(l.source);
      const std::size_t t = layout.find(l.target);
      if (s == npos || t == npos) continue;
      const Vec2 a = w.px(ground(layout.boxes[s].center()));
      const Vec2 c = w.px(ground(layout.boxes[t].center()));
      out += "<line x1=\"" + num(a.x) + "\" y1=\"" + num(a.y) + "\" x2=\"" + num(c.x) + "\" y2=\"" +
             num(c.y) + "\" stroke=\"" + std::string(kCommColor) + "\" stroke-width=\"" +
             num(std::max(0.5, w.px_len(kCommWidth * l.thickness_scale))) + "\" data-id=\"" +
             escape_xml(l.id) + "\" data-requests=\"" + std::to_string(l.request_count) + "\"";
      if (l.arrows_visible) out += " marker-end=\"url(#arrow)\"";
      out += "/>\n";
    }
    out += "</g>\n";
  }

  if (!hidden(layer::labels)) {
    out += "<g id=\"labels\" font-family=\"monospace\" text-anchor=\"middle\">\n";
    for (std::size_t i = 0; i < layout.boxes.size(); ++i) {
      if (!entity_visible(appearance, i)) continue;
      const auto& b = layout.boxes[i];
      const bool centered = i < appearance.entities.size() && appearance.entities[i].label_centered;
      const double scale = i < appearance.entities.size() ? appearance.entities[i].label_font_scale : 1.0;
      const Vec2 at = centered || i >= layout.labels.size() ? w.px(b.footprint().center())
                                                            : w.px(ground(layout.labels[i].anchor));
      out += "<text x=\"" + num(at.x) + "\" y=\"" + num(at.y) + "\" font-size=\"" +
             num(w.px_len(kLabelHeight * scale)) + "\">" + escape_xml(label_of(i)) + "</text>\n";
    }
    out += "</g>\n";
  }

  if (!hidden(layer::markers)) {
    out += "<g id=\"markers\">\n";
    const double r = marker_radius_px(size);
    for (const auto& m : markers) {
      const Vec2 c{m.uv.x * size, m.uv.y * size};
      out += "<circle cx=\"" + num(c.x) + "\" cy=\"" + num(c.y) + "\" r=\"" + num(r) + "\" fill=\"" +
             m.color + "\" data-user=\"" + std::to_string(m.user) + "\"";
      if (m.off_map) out += " stroke=\"#000000\" stroke-dasharray=\"3,2\"";
      out += "/>\n";
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace cityzoom
