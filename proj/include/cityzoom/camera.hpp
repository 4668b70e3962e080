#pragma once

#include <cmath>

#include "cityzoom/error.hpp"
#include "cityzoom/geometry.hpp"

namespace cityzoom {

/// Orbit camera: the view rotates around `target`.
struct CameraPose {
  Vec3 position;
  Vec3 target;

  friend bool operator==(const CameraPose&, const CameraPose&) = default;
};

inline void validate(const CameraPose& pose) {
  for (double v : {pose.position.x, pose.position.y, pose.position.z, pose.target.x, pose.target.y,
                   pose.target.z}) {
    if (!std::isfinite(v)) throw ValidationError("camera pose must be finite");
  }
  if (pose.position == pose.target) throw ValidationError("camera position equals target");
}

}  // namespace cityzoom
