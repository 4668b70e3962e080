#include "cityzoom/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cityzoom/error.hpp"

namespace cityzoom {
namespace {

struct Size {
  double w{0};
  double d{0};
};

struct Packed {
  Size inner;
  std::vector<Vec2> offsets;  // parallel to the child list
};

/// Row packing: ceil(sqrt(n)) items per row, left to right, rows front to back.
Packed pack_rows(const std::vector<std::size_t>& children, const std::vector<Size>& sizes,
                 const std::vector<Entity>& entities, double gap) {
  std::vector<std::size_t> order(children.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Size& sa = sizes[children[a]];
    const Size& sb = sizes[children[b]];
    const double area_a = sa.w * sa.d;
    const double area_b = sb.w * sb.d;
    if (area_a != area_b) return area_a > area_b;
    const auto& na = entities[children[a]].name;
    const auto& nb = entities[children[b]].name;
    if (na != nb) return na < nb;
    return children[a] < children[b];
  });

  const auto per_row = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(children.size()))));

  Packed out;
  out.offsets.resize(children.size());
  double x = 0;
  double z = 0;
  double row_depth = 0;
  double max_width = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t k = order[i];
    const Size& s = sizes[children[k]];
    if (i > 0 && i % per_row == 0) {
      z += row_depth + gap;
      x = 0;
      row_depth = 0;
    }
    out.offsets[k] = {x, z};
    max_width = std::max(max_width, x + s.w);
    row_depth = std::max(row_depth, s.d);
    x += s.w + gap;
  }
  out.inner = {max_width, z + row_depth};
  return out;
}

double class_side(const Class& cls, const LayoutConfig& cfg) {
  const double extra = cls.methods.empty() ? 0.0 : 0.1 * static_cast<double>(cls.methods.size() - 1);
  return std::clamp(cfg.class_footprint + extra, 1.0, 3.0);
}

}  // namespace

void LayoutConfig::validate() const {
  if (!(margin >= 0.2)) throw ValidationError("layout margin must be >= 0.2");
  if (!(class_footprint >= 1.0 && class_footprint <= 3.0)) {
    throw ValidationError("classFootprint must lie in [1, 3]");
  }
  if (!(base_class_height > 0) || !(package_height_step > 0) || !(foundation_gap > 0)) {
    throw ValidationError("layout sizes must be positive");
  }
}

std::string link_id(std::string_view source, std::string_view target) {
  std::string id(source);
  id.append("->").append(target);
  return id;
}

std::size_t CityLayout::find(std::string_view entity_id) const {
  if (lookup_.size() == boxes.size()) {
    auto it = lookup_.find(std::string(entity_id));
    return it == lookup_.end() ? npos : it->second;
  }
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (boxes[i].id == entity_id) return i;
  }
  return npos;
}

void CityLayout::reindex() {
  lookup_.clear();
  lookup_.reserve(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) lookup_.emplace(boxes[i].id, i);
}

Rect CityLayout::bounds() const {
  if (boxes.empty()) return {};
  Rect r = boxes.front().footprint();
  for (const auto& b : boxes) r = united(r, b.footprint());
  return r;
}

CityLayout compute_layout(const LandscapeStructure& structure, const LayoutConfig& cfg) {
  cfg.validate();
  const LandscapeIndex index(structure);
  const auto& entities = index.entities();
  const std::size_t n = entities.size();

  // Bottom-up sizes. Pre-order means children always follow their parent.
  std::vector<Size> sizes(n);
  std::vector<Packed> packed(n);
  for (std::size_t i = n; i-- > 0;) {
    const Entity& e = entities[i];
    if (e.kind == EntityKind::klass) {
      const double s = class_side(*e.klass, cfg);
      sizes[i] = {s, s};
      continue;
    }
    if (e.children.empty()) {
      packed[i].inner = {1.0, 1.0};
    } else {
      packed[i] = pack_rows(e.children, sizes, entities, cfg.margin);
    }
    sizes[i] = {packed[i].inner.w + 2 * cfg.margin, packed[i].inner.d + 2 * cfg.margin};
  }

  // Foundation grid.
  std::vector<std::size_t> apps;
  for (std::size_t i = 0; i < n; ++i) {
    if (entities[i].kind == EntityKind::application) apps.push_back(i);
  }
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(apps.size()))));
  double cell_w = 0;
  double cell_d = 0;
  for (std::size_t a : apps) {
    cell_w = std::max(cell_w, sizes[a].w);
    cell_d = std::max(cell_d, sizes[a].d);
  }
  cell_w += cfg.foundation_gap;
  cell_d += cfg.foundation_gap;

  CityLayout layout;
  layout.boxes.resize(n);
  const double step = cfg.package_height_step;
  for (std::size_t i = 0; i < n; ++i) {
    const Entity& e = entities[i];
    EntityBox& box = layout.boxes[i];
    box.id = e.id;
    box.name = e.name;
    box.kind = e.kind;
    box.parent = e.parent;
    box.depth = e.depth;
    Vec2 origin;
    if (e.kind == EntityKind::application) {
      const auto slot = static_cast<std::size_t>(std::find(apps.begin(), apps.end(), i) - apps.begin());
      origin = {static_cast<double>(slot % cols) * cell_w, static_cast<double>(slot / cols) * cell_d};
      box.color = cfg.foundation_color;
    } else {
      const EntityBox& parent = layout.boxes[e.parent];
      const auto& siblings = entities[e.parent].children;
      const auto k = static_cast<std::size_t>(std::find(siblings.begin(), siblings.end(), i) - siblings.begin());
      const Vec2 off = packed[e.parent].offsets[k];
      origin = {parent.min.x + cfg.margin + off.x, parent.min.z + cfg.margin + off.y};
      box.color = e.kind == EntityKind::klass ? cfg.class_color
                                              : cfg.district_colors[static_cast<std::size_t>(e.depth - 1) % 2];
    }
    const double base = step * e.depth;
    const double top = e.kind == EntityKind::klass ? base + cfg.base_class_height : base + step;
    box.min = {origin.x, base, origin.y};
    box.max = {origin.x + sizes[i].w, top, origin.y + sizes[i].d};
  }

  layout.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const EntityBox& b = layout.boxes[i];
    LabelSlot& slot = layout.labels[i];
    slot.entity = i;
    if (b.kind == EntityKind::klass) {
      slot.anchor = b.roof_center();
      slot.max_width = 4.0 * (b.max.x - b.min.x);
      slot.orientation = LabelOrientation::flat;
    } else {
      slot.anchor = {(b.min.x + b.max.x) * 0.5, b.max.y, b.min.z + cfg.margin * 0.5};
      slot.max_width = b.max.x - b.min.x;
      slot.orientation = LabelOrientation::along_x;
    }
  }

  layout.reindex();
  for (const auto& link : structure.communications) {
    layout.arcs.push_back(arc_geometry(link, layout, 1.0));
  }
  return layout;
}

ArcGeometry arc_geometry(std::string id, const EntityBox& source, const EntityBox& target,
                         double curvature_factor) {
  if (!(curvature_factor >= 0)) throw ValidationError("curvature factor must be >= 0");
  ArcGeometry arc;
  arc.link_id = std::move(id);
  arc.start = source.roof_center();
  arc.end = target.roof_center();
  arc.apex_height = curvature_factor * 0.3 * distance(arc.start, arc.end);
  // Quadratic Bezier; the control point sits at twice the apex height so the
  // curve peaks exactly apex_height above the chord midpoint.
  const Vec3 mid = (arc.start + arc.end) * 0.5;
  const Vec3 control = mid + Vec3{0, 2 * arc.apex_height, 0};
  arc.polyline.reserve(kArcSegments + 1);
  for (int s = 0; s <= kArcSegments; ++s) {
    const double t = static_cast<double>(s) / kArcSegments;
    const double u = 1 - t;
    arc.polyline.push_back(arc.start * (u * u) + control * (2 * u * t) + arc.end * (t * t));
  }
  arc.polyline.front() = arc.start;
  arc.polyline.back() = arc.end;
  return arc;
}

ArcGeometry arc_geometry(const CommunicationLink& link, const CityLayout& layout,
                         double curvature_factor) {
  const std::size_t s = layout.find(class_id(link.source_fqn));
  if (s == npos) throw Error("link endpoint not laid out: " + link.source_fqn);
  const std::size_t t = layout.find(class_id(link.target_fqn));
  if (t == npos) throw Error("link endpoint not laid out: " + link.target_fqn);
  return arc_geometry(link_id(link.source_fqn, link.target_fqn), layout.boxes[s], layout.boxes[t],
                      curvature_factor);
}

}  // namespace cityzoom
