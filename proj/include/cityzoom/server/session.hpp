#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "cityzoom/camera.hpp"
#include "cityzoom/pipeline.hpp"
#include "cityzoom/room.hpp"
#include "cityzoom/semzoom.hpp"

namespace cityzoom::server {

using Clock = std::chrono::steady_clock;
using TimePoint = Clock::time_point;

struct ThrottleConfig {
  /// Camera position change (world units) that triggers a recomputation.
  double min_displacement{0.5};
  std::chrono::milliseconds min_interval{100};
};

/// Per-user semantic zoom pipeline. Not thread-safe; the owner serializes
/// calls, so at most one computation runs per session.
class SessionView {
 public:
  SessionView(UserId user, std::shared_ptr<const PreparedLandscape> landscape, ThrottleConfig throttle = {});

  /// Recomputes when the camera moved more than min_displacement since the
  /// last computation and min_interval has passed; the first pose always
  /// computes. Otherwise the pose is kept (newest wins) for tick(). Returns
  /// the change to send, or nothing when there is none.
  std::optional<AppearanceDelta> handle_camera_update(const CameraPose& pose, TimePoint now);

  /// Computes the buffered pose once min_interval has passed, whatever its
  /// displacement.
  std::optional<AppearanceDelta> tick(TimePoint now);

  /// Switches to new settings of the same landscape and recomputes for the
  /// last computed pose.
  std::optional<AppearanceDelta> replace_landscape(std::shared_ptr<const PreparedLandscape> landscape,
                                                   TimePoint now);

  UserId user() const { return user_; }
  const std::shared_ptr<const PreparedLandscape>& landscape() const { return landscape_; }
  const std::optional<CameraPose>& last_pose() const { return last_pose_; }
  const std::optional<CameraPose>& pending_pose() const { return pending_; }
  const std::vector<std::uint8_t>& last_levels() const { return last_levels_; }
  /// Appearance as last sent to the client.
  const AppearanceState& state() const { return state_; }
  std::uint64_t computations() const { return computations_; }

 private:
  std::optional<AppearanceDelta> compute(const CameraPose& pose, TimePoint now);

  UserId user_;
  std::shared_ptr<const PreparedLandscape> landscape_;
  ThrottleConfig throttle_;
  std::optional<CameraPose> last_pose_;
  std::optional<CameraPose> pending_;
  std::optional<TimePoint> last_compute_;
  std::vector<std::uint8_t> last_levels_;
  AppearanceState state_;
  std::uint64_t computations_{0};
};

}  // namespace cityzoom::server
