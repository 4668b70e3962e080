#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cityzoom/camera.hpp"
#include "cityzoom/clustering.hpp"
#include "cityzoom/landscape.hpp"
#include "cityzoom/layout.hpp"
#include "cityzoom/minimap.hpp"
#include "cityzoom/semzoom.hpp"
#include "cityzoom/settings.hpp"

namespace cityzoom {

/// Everything derived from one structure and settings document: layout,
/// clusters and the appearance resolver. Immutable once built and safe to
/// share across threads. Settings changes build a new instance.
class PreparedLandscape {
 public:
  PreparedLandscape(LandscapeStructure structure, Settings settings, LayoutConfig layout_config = {});

  PreparedLandscape(const PreparedLandscape&) = delete;
  PreparedLandscape& operator=(const PreparedLandscape&) = delete;

  const LandscapeStructure& structure() const { return structure_; }
  const CityLayout& layout() const { return layout_; }
  const Settings& settings() const { return settings_; }
  const LayoutConfig& layout_config() const { return layout_config_; }
  const ClusterSet& clusters() const { return clusters_; }
  const AppearanceResolver& resolver() const { return *resolver_; }

  std::vector<std::uint8_t> levels(const CameraPose& pose) const;
  AppearanceState appearance(const CameraPose& pose) const;

  /// Same structure and layout with new settings; reuses nothing mutable.
  std::shared_ptr<const PreparedLandscape> with_settings(Settings settings) const;

 private:
  LandscapeStructure structure_;
  Settings settings_;
  LayoutConfig layout_config_;
  CityLayout layout_;
  ClusterSet clusters_;
  std::unique_ptr<AppearanceResolver> resolver_;
};

/// Headless top view at `pose`: levels, appearance, whole-landscape frame and
/// a gray self marker.
std::string snapshot_svg(const PreparedLandscape& landscape, const CameraPose& pose,
                         double size_px = 512);

}  // namespace cityzoom
