#include "cityzoom/semzoom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <unordered_map>

#include "cityzoom/error.hpp"

namespace cityzoom {
namespace {

constexpr std::array<double, kLevelCount> kFontScale{1.0, 1.0, 1.3, 1.6, 2.0};
constexpr std::array<double, kLevelCount> kThickness{0.6, 0.8, 1.0, 1.3, 1.6};
constexpr std::array<double, kLevelCount> kCurvature{0.5, 0.75, 1.0, 1.3, 1.6};
constexpr std::uint8_t kCloseLevel = 4;
constexpr std::uint8_t kCommHideLevel = 3;
constexpr std::uint8_t kLastDetailLevel = 1;
constexpr std::uint8_t kLastArrowLevel = 2;

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

/// rep[i]: the closed package that swallows entity i, or i itself.
std::vector<std::size_t> representatives(const LandscapeIndex& index,
                                         const std::vector<bool>& closed) {
  const auto& ents = index.entities();
  std::vector<std::size_t> rep(ents.size());
  std::vector<bool> swallowed(ents.size(), false);
  for (std::size_t i = 0; i < ents.size(); ++i) {
    const std::size_t p = ents[i].parent;
    if (p != npos && (swallowed[p] || closed[p])) {
      rep[i] = rep[p];
      swallowed[i] = true;
    } else {
      rep[i] = i;
    }
  }
  return rep;
}

struct MergedLink {
  std::uint32_t source;
  std::uint32_t target;
  std::int64_t count;
};

std::vector<MergedLink> merge_links(std::vector<MergedLink> links) {
  std::sort(links.begin(), links.end(), [](const MergedLink& a, const MergedLink& b) {
    return pair_key(a.source, a.target) < pair_key(b.source, b.target);
  });
  std::vector<MergedLink> out;
  for (const auto& l : links) {
    if (!out.empty() && out.back().source == l.source && out.back().target == l.target) {
      out.back().count += l.count;
    } else {
      out.push_back(l);
    }
  }
  return out;
}

}  // namespace

void ZoomConfig::validate() const {
  for (std::size_t i = 1; i < level_thresholds.size(); ++i) {
    if (!(level_thresholds[i] > level_thresholds[i - 1])) {
      throw ValidationError("level thresholds must be strictly ascending");
    }
  }
  if (!(level_thresholds[0] > 0)) throw ValidationError("level thresholds must be positive");
  if (!(bandwidth > 0)) throw ValidationError("bandwidth must be > 0");
  if (!(comm_hide_quantile >= 0 && comm_hide_quantile <= 1)) {
    throw ValidationError("commHideQuantile must lie in [0, 1]");
  }
  if (auto_close_depth < 1) throw ValidationError("autoCloseDepth must be >= 1");
  if (!(char_width > 0)) throw ValidationError("charWidth must be > 0");
}

std::vector<Vec3> entity_centers(const CityLayout& layout) {
  std::vector<Vec3> out;
  out.reserve(layout.boxes.size());
  for (const auto& b : layout.boxes) out.push_back(b.center());
  return out;
}

ClusterSet cluster_entities(const CityLayout& layout, const ZoomConfig& config) {
  config.validate();
  const auto points = entity_centers(layout);
  if (points.empty()) return {};
  if (config.algorithm == ClusterAlgorithm::meanshift) {
    return cluster_meanshift(points, config.bandwidth);
  }
  const std::size_t k = config.cluster_count ? std::min(config.cluster_count, points.size())
                                             : default_cluster_count(points.size());
  return cluster_kmeans(points, k, config.seed);
}

std::uint8_t level_for_distance(double d, const Thresholds& t) {
  return static_cast<std::uint8_t>(std::upper_bound(t.begin(), t.end(), d) - t.begin());
}

std::vector<std::uint8_t> assign_levels(const CameraPose& pose, const ClusterSet& clusters,
                                        const Thresholds& thresholds) {
  std::vector<std::uint8_t> levels(clusters.point_count(), 0);
  for (const auto& c : clusters.clusters) {
    const std::uint8_t lvl = level_for_distance(distance(pose.position, c.centroid), thresholds);
    for (std::size_t m : c.members) levels[m] = lvl;
  }
  return levels;
}

std::string landscape_key(const CityLayout& layout) {
  // FNV-1a over the ordered entity ids.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& b : layout.boxes) {
    for (unsigned char c : b.id) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
  return std::to_string(layout.boxes.size()) + "-" + out;
}

std::vector<AggregatedLink> close_packages(std::span<const CommunicationLink> links,
                                           std::span<const std::string> closed_package_ids,
                                           const LandscapeIndex& index) {
  std::vector<bool> closed(index.size(), false);
  std::vector<std::size_t> closed_list;
  for (const auto& id : closed_package_ids) {
    const std::size_t i = index.find(id);
    if (i == npos || index.at(i).kind != EntityKind::package) {
      throw ValidationError("not a package: " + id);
    }
    closed[i] = true;
    closed_list.push_back(i);
  }
  for (std::size_t i : closed_list) {
    for (std::size_t p = index.at(i).parent; p != npos; p = index.at(p).parent) {
      if (closed[p]) {
        throw ValidationError("closed packages must form an antichain: " + index.at(i).id +
                              " lies inside " + index.at(p).id);
      }
    }
  }
  const auto rep = representatives(index, closed);

  std::vector<MergedLink> mapped;
  mapped.reserve(links.size());
  for (const auto& l : links) {
    const std::size_t s = index.find_class(l.source_fqn);
    const std::size_t t = index.find_class(l.target_fqn);
    if (s == npos || t == npos) {
      throw ValidationError("link endpoint does not resolve: " + l.source_fqn + " -> " +
                            l.target_fqn);
    }
    const std::size_t rs = rep[s];
    const std::size_t rt = rep[t];
    if (rs == rt && closed[rs]) continue;
    mapped.push_back({static_cast<std::uint32_t>(rs), static_cast<std::uint32_t>(rt), l.request_count});
  }
  std::vector<AggregatedLink> out;
  for (const auto& m : merge_links(std::move(mapped))) {
    out.push_back({index.at(m.source).id, index.at(m.target).id, m.count});
  }
  std::sort(out.begin(), out.end(), [](const AggregatedLink& a, const AggregatedLink& b) {
    return std::tie(a.source, a.target) < std::tie(b.source, b.target);
  });
  return out;
}

std::int64_t request_quantile(std::vector<std::int64_t> counts, double q) {
  if (counts.empty()) return 0;
  const auto rank = static_cast<std::size_t>(std::floor(q * static_cast<double>(counts.size() - 1)));
  std::nth_element(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(rank), counts.end());
  return counts[rank];
}

std::string truncate_label(const std::string& text, int max_chars) {
  static const std::string kEllipsis = "…";
  if (max_chars < 1) max_chars = 1;
  // Characters are UTF-8 code points.
  auto is_lead = [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; };
  const auto length = std::count_if(text.begin(), text.end(), is_lead);
  if (length <= max_chars) return text;
  std::size_t cut = 0;
  for (int kept = 0; cut < text.size(); ++cut) {
    if (is_lead(text[cut]) && kept++ == max_chars - 1) break;
  }
  return text.substr(0, cut) + kEllipsis;
}

AppearanceResolver::AppearanceResolver(const LandscapeStructure& structure,
                                       const CityLayout& layout, const ZoomConfig& config)
    : layout_(layout), config_(config), index_(structure) {
  config_.validate();
  if (layout.boxes.size() != index_.size()) {
    throw ValidationError("layout does not match structure (entity count differs)");
  }
  for (std::size_t i = 0; i < index_.size(); ++i) {
    if (layout.boxes[i].id != index_.at(i).id) {
      throw ValidationError("layout does not match structure at " + index_.at(i).id);
    }
  }
  key_ = landscape_key(layout);

  std::vector<std::int64_t> counts;
  counts.reserve(structure.communications.size());
  links_.reserve(structure.communications.size());
  for (const auto& l : structure.communications) {
    const std::size_t s = index_.find_class(l.source_fqn);
    const std::size_t t = index_.find_class(l.target_fqn);
    if (s == npos || t == npos) throw ValidationError("link endpoint does not resolve");
    links_.push_back({static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(t), l.request_count});
    counts.push_back(l.request_count);
  }
  hide_threshold_ = request_quantile(std::move(counts), config_.comm_hide_quantile);

  loc_total_.assign(index_.size(), 0.0);
  for (std::size_t i = 0; i < index_.size(); ++i) {
    if (const Class* cls = index_.at(i).klass) {
      for (const auto& m : cls->methods) loc_total_[i] += static_cast<double>(m.loc);
    }
  }
}

AppearanceState AppearanceResolver::resolve(std::span<const std::uint8_t> levels) const {
  const auto& ents = index_.entities();
  if (levels.size() != ents.size()) {
    throw ValidationError("levels must cover every entity (" + std::to_string(levels.size()) +
                          " of " + std::to_string(ents.size()) + ")");
  }
  const ZoomConfig& cfg = config_;
  AppearanceState state;
  state.landscape_key = key_;
  state.entities.resize(ents.size());

  std::vector<bool> closed(ents.size(), false);
  for (std::size_t i = 0; i < ents.size(); ++i) {
    const Entity& e = ents[i];
    const EntityBox& box = layout_.boxes[i];
    EntityAppearance& a = state.entities[i];
    const std::uint8_t lvl = std::min<std::uint8_t>(levels[i], kLevelCount - 1);
    a.level = lvl;
    a.height = box.max.y - box.min.y;

    if (e.parent != npos) {
      const EntityAppearance& parent = state.entities[e.parent];
      a.visible = parent.visible && parent.package_open;
    }

    if (e.kind == EntityKind::package && a.visible && cfg.enabled(ZoomRule::package_closing) &&
        lvl == kCloseLevel && e.depth > cfg.auto_close_depth) {
      a.package_open = false;
      a.label_centered = true;
      closed[i] = true;
    }

    if (e.kind == EntityKind::klass) {
      const Class& cls = *e.klass;
      if (cfg.enabled(ZoomRule::class_height) && lvl <= kLastDetailLevel) {
        a.class_height_scale = 1.0 + 0.2 * std::log2(1.0 + static_cast<double>(cls.instance_count));
      }
      a.height = (box.max.y - box.min.y) * a.class_height_scale;
      a.methods_visible = cfg.enabled(ZoomRule::method_stack) &&
                          !(cfg.enabled(ZoomRule::method_hiding) && lvl > kLastDetailLevel) &&
                          !cls.methods.empty();
      if (a.methods_visible) {
        a.method_segments.reserve(cls.methods.size());
        const double total = loc_total_[i];
        const double n = static_cast<double>(cls.methods.size());
        for (const auto& m : cls.methods) {
          a.method_segments.push_back(total > 0 ? a.height * static_cast<double>(m.loc) / total
                                                : a.height / n);
        }
      }
    }

    a.label_font_scale = cfg.enabled(ZoomRule::label_size) ? kFontScale[lvl] : 1.0;
    if (cfg.enabled(ZoomRule::label_shortening)) {
      const double slot = layout_.labels[i].max_width;
      const double chars = std::floor(slot / (a.label_font_scale * cfg.char_width));
      a.label_max_chars = std::max(1, static_cast<int>(std::min(chars, 1e6)));
    } else {
      a.label_max_chars = std::max<int>(1, static_cast<int>(e.name.size()));
    }
    a.label = truncate_label(e.name, a.label_max_chars);
  }

  const auto rep = representatives(index_, closed);
  std::vector<MergedLink> mapped;
  mapped.reserve(links_.size());
  for (const auto& l : links_) {
    const std::size_t rs = rep[l.source];
    const std::size_t rt = rep[l.target];
    if (rs == rt && closed[rs]) continue;
    mapped.push_back({static_cast<std::uint32_t>(rs), static_cast<std::uint32_t>(rt), l.count});
  }
  const auto merged = merge_links(std::move(mapped));
  state.links.reserve(merged.size());
  for (const auto& m : merged) {
    LinkAppearance la;
    la.source = ents[m.source].id;
    la.target = ents[m.target].id;
    la.id = link_id(la.source, la.target);
    la.request_count = m.count;
    la.level = std::min(state.entities[m.source].level, state.entities[m.target].level);
    la.thickness_scale = cfg.enabled(ZoomRule::comm_thickness) ? kThickness[la.level] : 1.0;
    la.curvature_factor = cfg.enabled(ZoomRule::comm_curvature) ? kCurvature[la.level] : 1.0;
    const bool hiding = cfg.enabled(ZoomRule::comm_hiding);
    la.visible = !(hiding && la.level >= kCommHideLevel && m.count < hide_threshold_);
    la.arrows_visible = la.visible && (!hiding || la.level <= kLastArrowLevel);
    state.links.push_back(std::move(la));
  }
  std::sort(state.links.begin(), state.links.end(),
            [](const LinkAppearance& a, const LinkAppearance& b) { return a.id < b.id; });
  return state;
}

AppearanceState resolve_appearance(const LandscapeStructure& structure, const CityLayout& layout,
                                   std::span<const std::uint8_t> levels, const ZoomConfig& config) {
  return AppearanceResolver(structure, layout, config).resolve(levels);
}

namespace {

template <typename T>
bool set_if_changed(std::optional<T>& slot, const T& before, const T& after, bool full) {
  if (full || !(before == after)) {
    slot = after;
    return true;
  }
  return false;
}

}  // namespace

AppearanceDelta appearance_diff(const AppearanceState& prev, const AppearanceState& next) {
  const bool full = prev.entities.empty() && prev.landscape_key.empty();
  if (!full && (prev.landscape_key != next.landscape_key ||
                prev.entities.size() != next.entities.size())) {
    throw Error("appearance states belong to different landscapes");
  }
  AppearanceDelta delta;
  delta.landscape_key = next.landscape_key;
  delta.entity_count = next.entities.size();
  static const EntityAppearance kBlank{};
  for (std::size_t i = 0; i < next.entities.size(); ++i) {
    const EntityAppearance& b = full ? kBlank : prev.entities[i];
    const EntityAppearance& a = next.entities[i];
    EntityDelta d;
    d.entity = i;
    bool any = false;
    any |= set_if_changed(d.level, b.level, a.level, full);
    any |= set_if_changed(d.visible, b.visible, a.visible, full);
    any |= set_if_changed(d.class_height_scale, b.class_height_scale, a.class_height_scale, full);
    any |= set_if_changed(d.height, b.height, a.height, full);
    any |= set_if_changed(d.method_segments, b.method_segments, a.method_segments, full);
    any |= set_if_changed(d.methods_visible, b.methods_visible, a.methods_visible, full);
    any |= set_if_changed(d.label_font_scale, b.label_font_scale, a.label_font_scale, full);
    any |= set_if_changed(d.label_max_chars, b.label_max_chars, a.label_max_chars, full);
    any |= set_if_changed(d.label, b.label, a.label, full);
    any |= set_if_changed(d.label_centered, b.label_centered, a.label_centered, full);
    any |= set_if_changed(d.package_open, b.package_open, a.package_open, full);
    if (any) delta.entities.push_back(std::move(d));
  }

  // Both link lists are sorted by id.
  auto p = prev.links.begin();
  auto n = next.links.begin();
  while (p != prev.links.end() || n != next.links.end()) {
    if (n == next.links.end() || (p != prev.links.end() && p->id < n->id)) {
      delta.removed_links.push_back(p->id);
      ++p;
    } else if (p == prev.links.end() || n->id < p->id) {
      delta.upserted_links.push_back(*n);
      ++n;
    } else {
      if (!(*p == *n)) delta.upserted_links.push_back(*n);
      ++p;
      ++n;
    }
  }
  return delta;
}

void apply_delta(AppearanceState& state, const AppearanceDelta& delta) {
  const bool fresh = state.entities.empty() && state.landscape_key.empty();
  if (fresh) {
    state.landscape_key = delta.landscape_key;
    state.entities.assign(delta.entity_count, EntityAppearance{});
  } else if (state.landscape_key != delta.landscape_key ||
             state.entities.size() != delta.entity_count) {
    throw Error("appearance delta belongs to a different landscape");
  }
  for (const auto& d : delta.entities) {
    EntityAppearance& a = state.entities.at(d.entity);
    if (d.level) a.level = *d.level;
    if (d.visible) a.visible = *d.visible;
    if (d.class_height_scale) a.class_height_scale = *d.class_height_scale;
    if (d.height) a.height = *d.height;
    if (d.method_segments) a.method_segments = *d.method_segments;
    if (d.methods_visible) a.methods_visible = *d.methods_visible;
    if (d.label_font_scale) a.label_font_scale = *d.label_font_scale;
    if (d.label_max_chars) a.label_max_chars = *d.label_max_chars;
    if (d.label) a.label = *d.label;
    if (d.label_centered) a.label_centered = *d.label_centered;
    if (d.package_open) a.package_open = *d.package_open;
  }
  if (!delta.removed_links.empty()) {
    std::vector<LinkAppearance> kept;
    kept.reserve(state.links.size());
    auto r = delta.removed_links.begin();
    for (auto& l : state.links) {
      while (r != delta.removed_links.end() && *r < l.id) ++r;
      if (r != delta.removed_links.end() && *r == l.id) continue;
      kept.push_back(std::move(l));
    }
    state.links = std::move(kept);
  }
  for (const auto& u : delta.upserted_links) {
    auto it = std::lower_bound(state.links.begin(), state.links.end(), u.id,
                               [](const LinkAppearance& l, const std::string& id) { return l.id < id; });
    if (it != state.links.end() && it->id == u.id) {
      *it = u;
    } else {
      state.links.insert(it, u);
    }
  }
}

}  // namespace cityzoom
