#pragma once

#include "cityzoom/minimap.hpp"
#include "cityzoom/semzoom.hpp"

namespace cityzoom {

/// User-editable settings document of a landscape.
struct Settings {
  ZoomConfig zoom;
  MinimapConfig minimap;

  void validate() const {
    zoom.validate();
    minimap.validate();
  }
  friend bool operator==(const Settings&, const Settings&) = default;
};

}  // namespace cityzoom
