#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cityzoom/geometry.hpp"
#include "cityzoom/landscape.hpp"

namespace cityzoom {

struct LayoutConfig {
  /// Inset of children inside their parent and gap between siblings.
  double margin{0.5};
  /// Base side length of a class building; grows by 0.1 per extra method, capped at 3.
  double class_footprint{1.5};
  double base_class_height{2.0};
  /// Vertical rise per nesting depth.
  double package_height_step{0.5};
  /// Gap between application foundations.
  double foundation_gap{4.0};
  std::string foundation_color{"#9e9e9e"};
  std::array<std::string, 2> district_colors{"#4f83cc", "#6abf69"};
  std::string class_color{"#283593"};

  /// Throws ValidationError unless all sizes are positive, margin >= 0.2 and
  /// class_footprint lies in [1, 3].
  void validate() const;
};

struct EntityBox {
  std::string id;
  std::string name;
  EntityKind kind{EntityKind::application};
  std::size_t parent{npos};
  int depth{0};
  Vec3 min;
  Vec3 max;
  std::string color;

  Rect footprint() const { return {{min.x, min.z}, {max.x, max.z}}; }
  Vec3 center() const { return (min + max) * 0.5; }
  Vec3 roof_center() const { return {(min.x + max.x) * 0.5, max.y, (min.z + max.z) * 0.5}; }

  friend bool operator==(const EntityBox&, const EntityBox&) = default;
};

enum class LabelOrientation : std::uint8_t { along_x, flat };

struct LabelSlot {
  std::size_t entity{npos};
  Vec3 anchor;
  double max_width{0};
  LabelOrientation orientation{LabelOrientation::along_x};

  friend bool operator==(const LabelSlot&, const LabelSlot&) = default;
};

struct ArcGeometry {
  std::string link_id;
  Vec3 start;
  Vec3 end;
  double apex_height{0};
  std::vector<Vec3> polyline;

  friend bool operator==(const ArcGeometry&, const ArcGeometry&) = default;
};

/// Number of segments in ArcGeometry::polyline.
inline constexpr int kArcSegments = 16;

std::string link_id(std::string_view source, std::string_view target);

/// World-space city. `boxes[i]` and `labels[i]` belong to entity i of the
/// LandscapeIndex built from the same structure.
struct CityLayout {
  std::vector<EntityBox> boxes;
  std::vector<LabelSlot> labels;
  std::vector<ArcGeometry> arcs;

  std::size_t find(std::string_view entity_id) const;
  /// Ground-plane bounds of all boxes.
  Rect bounds() const;
  /// Rebuilds the id lookup; call after mutating `boxes`. Without it find()
  /// falls back to a linear scan.
  void reindex();

  friend bool operator==(const CityLayout& a, const CityLayout& b) {
    return a.boxes == b.boxes && a.labels == b.labels && a.arcs == b.arcs;
  }

 private:
  std::unordered_map<std::string, std::size_t> lookup_;
};

/// Recursive row-packing treemap. Children are ordered by footprint area
/// (descending, ties by name) and packed left to right, ceil(sqrt(n)) per row,
/// so a parent never shrinks when children grow. Applications sit on a grid of
/// foundations ordered as in the structure. Arcs use curvature factor 1.
CityLayout compute_layout(const LandscapeStructure& structure, const LayoutConfig& config = {});

/// Quadratic arc between the roof centers of the link's classes. The apex
/// rises `curvature * 0.3 * |end - start|` above the chord midpoint. Throws
/// Error naming the fqn when an endpoint has no box.
ArcGeometry arc_geometry(const CommunicationLink& link, const CityLayout& layout,
                         double curvature_factor);

/// Same as above for two arbitrary boxes (used for aggregated package links).
ArcGeometry arc_geometry(std::string link_id, const EntityBox& source, const EntityBox& target,
                         double curvature_factor);

}  // namespace cityzoom
