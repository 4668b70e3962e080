#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cityzoom/camera.hpp"
#include "cityzoom/clustering.hpp"
#include "cityzoom/geometry.hpp"
#include "cityzoom/landscape.hpp"
#include "cityzoom/layout.hpp"

namespace cityzoom {

inline constexpr int kLevelCount = 5;
using Thresholds = std::array<double, kLevelCount - 1>;

enum class ClusterAlgorithm : std::uint8_t { kmeans, meanshift };

/// The nine distance-driven appearance rules. Each can be switched off.
enum class ZoomRule : std::size_t {
  class_height = 0,   // height follows instance count
  method_stack,       // methods stacked on the class, height by LoC
  method_hiding,      // method stack hidden when far
  label_size,         // label font grows with distance
  label_shortening,   // labels truncated to their slot
  comm_thickness,
  comm_curvature,
  comm_hiding,        // low-traffic links and arrows hidden when far
  package_closing,    // deep packages close when far
};
inline constexpr std::size_t kRuleCount = 9;

struct ZoomConfig {
  ClusterAlgorithm algorithm{ClusterAlgorithm::kmeans};
  /// 0 selects default_cluster_count(entity count).
  std::size_t cluster_count{0};
  double bandwidth{10.0};
  /// Level i covers camera distances [t_i, t_{i+1}) with t_0 = 0, t_5 = inf.
  Thresholds level_thresholds{25.0, 60.0, 120.0, 250.0};
  std::uint64_t seed{42};
  std::bitset<kRuleCount> rules{(1u << kRuleCount) - 1};
  /// Links below this quantile of request counts hide at levels >= 3.
  double comm_hide_quantile{0.5};
  /// Packages deeper than this close at level 4. Root packages have depth 1.
  int auto_close_depth{1};
  /// Estimated label glyph width at font scale 1, world units.
  double char_width{0.6};

  bool enabled(ZoomRule r) const { return rules.test(static_cast<std::size_t>(r)); }
  void validate() const;
  friend bool operator==(const ZoomConfig&, const ZoomConfig&) = default;
};

/// Entity box centers, in layout order.
std::vector<Vec3> entity_centers(const CityLayout& layout);

/// Clusters the entity centers per `config`.
ClusterSet cluster_entities(const CityLayout& layout, const ZoomConfig& config);

/// Index of the half-open distance band containing `d`.
std::uint8_t level_for_distance(double d, const Thresholds& thresholds);

/// Per-entity level; every cluster member inherits its centroid's level.
std::vector<std::uint8_t> assign_levels(const CameraPose& pose, const ClusterSet& clusters,
                                        const Thresholds& thresholds);

struct EntityAppearance {
  std::uint8_t level{0};
  /// False when hidden inside a closed package.
  bool visible{true};
  double class_height_scale{1.0};
  /// Rendered height; for classes base height times class_height_scale.
  double height{0.0};
  std::vector<double> method_segments;
  bool methods_visible{false};
  double label_font_scale{1.0};
  int label_max_chars{1};
  std::string label;
  bool label_centered{false};
  bool package_open{true};

  friend bool operator==(const EntityAppearance&, const EntityAppearance&) = default;
};

struct LinkAppearance {
  std::string id;
  std::string source;  // entity id
  std::string target;  // entity id
  std::int64_t request_count{0};
  std::uint8_t level{0};
  double thickness_scale{1.0};
  double curvature_factor{1.0};
  bool visible{true};
  bool arrows_visible{true};

  friend bool operator==(const LinkAppearance&, const LinkAppearance&) = default;
};

struct AppearanceState {
  /// Fingerprint of the entity set the state was computed for.
  std::string landscape_key;
  /// Parallel to the layout boxes.
  std::vector<EntityAppearance> entities;
  /// After package closing; sorted by id.
  std::vector<LinkAppearance> links;

  friend bool operator==(const AppearanceState&, const AppearanceState&) = default;
};

/// Stable fingerprint of a layout's entity ids.
std::string landscape_key(const CityLayout& layout);

/// Link between two entities after closing, endpoints as entity ids.
struct AggregatedLink {
  std::string source;
  std::string target;
  std::int64_t request_count{0};

  friend bool operator==(const AggregatedLink&, const AggregatedLink&) = default;
};

/// Re-targets every endpoint inside a closed package to that package, drops
/// links internal to one closed package and merges parallel links, summing
/// their request counts. Output is sorted by (source, target). Throws
/// ValidationError when a closed id is not a package or the set is not an
/// antichain.
std::vector<AggregatedLink> close_packages(std::span<const CommunicationLink> links,
                                           std::span<const std::string> closed_package_ids,
                                           const LandscapeIndex& index);

/// Lower nearest-rank quantile: sorted[floor(q * (n - 1))]; 0 for no values.
std::int64_t request_quantile(std::vector<std::int64_t> counts, double q);

/// Precomputed per-landscape data so resolve() only does per-level work.
/// Keeps references to `structure` and `layout`.
class AppearanceResolver {
 public:
  AppearanceResolver(const LandscapeStructure& structure, const CityLayout& layout,
                     const ZoomConfig& config);

  AppearanceState resolve(std::span<const std::uint8_t> levels) const;

  const LandscapeIndex& index() const { return index_; }
  std::int64_t hide_threshold() const { return hide_threshold_; }
  const std::string& key() const { return key_; }

 private:
  struct IndexedLink {
    std::uint32_t source;
    std::uint32_t target;
    std::int64_t count;
  };

  const CityLayout& layout_;
  ZoomConfig config_;
  LandscapeIndex index_;
  std::vector<IndexedLink> links_;
  std::vector<double> loc_total_;
  std::int64_t hide_threshold_{0};
  std::string key_;
};

AppearanceState resolve_appearance(const LandscapeStructure& structure, const CityLayout& layout,
                                   std::span<const std::uint8_t> levels, const ZoomConfig& config);

/// Keeps a prefix and appends an ellipsis so the result has at most
/// `max_chars` characters (counting the ellipsis as one).
std::string truncate_label(const std::string& text, int max_chars);

struct EntityDelta {
  std::size_t entity{0};
  std::optional<std::uint8_t> level;
  std::optional<bool> visible;
  std::optional<double> class_height_scale;
  std::optional<double> height;
  std::optional<std::vector<double>> method_segments;
  std::optional<bool> methods_visible;
  std::optional<double> label_font_scale;
  std::optional<int> label_max_chars;
  std::optional<std::string> label;
  std::optional<bool> label_centered;
  std::optional<bool> package_open;

  friend bool operator==(const EntityDelta&, const EntityDelta&) = default;
};

struct AppearanceDelta {
  std::string landscape_key;
  std::size_t entity_count{0};
  std::vector<EntityDelta> entities;
  std::vector<LinkAppearance> upserted_links;
  std::vector<std::string> removed_links;

  bool empty() const { return entities.empty() && upserted_links.empty() && removed_links.empty(); }
  friend bool operator==(const AppearanceDelta&, const AppearanceDelta&) = default;
};

/// Minimal per-attribute changes turning `prev` into `next`. An empty `prev`
/// (no entities, no key) yields the full state. Throws Error when both states
/// are non-empty and belong to different landscapes.
AppearanceDelta appearance_diff(const AppearanceState& prev, const AppearanceState& next);

/// Applies a delta in place. Throws Error on a landscape mismatch.
void apply_delta(AppearanceState& state, const AppearanceDelta& delta);

}  // namespace cityzoom
