#include "cityzoom/server/session.hpp"

#include "cityzoom/error.hpp"

namespace cityzoom::server {

SessionView::SessionView(UserId user, std::shared_ptr<const PreparedLandscape> landscape,
                         ThrottleConfig throttle)
    : user_(user), landscape_(std::move(landscape)), throttle_(throttle) {
  if (!landscape_) throw Error("no landscape loaded");
}

std::optional<AppearanceDelta> SessionView::compute(const CameraPose& pose, TimePoint now) {
  last_levels_ = landscape_->levels(pose);
  AppearanceState next = landscape_->resolver().resolve(last_levels_);
  AppearanceDelta delta = appearance_diff(state_, next);
  state_ = std::move(next);
  last_pose_ = pose;
  last_compute_ = now;
  pending_.reset();
  ++computations_;
  if (delta.empty()) return std::nullopt;
  return delta;
}

std::optional<AppearanceDelta> SessionView::handle_camera_update(const CameraPose& pose, TimePoint now) {
  validate(pose);
  if (!last_pose_) return compute(pose, now);
  const bool moved = distance(pose.position, last_pose_->position) > throttle_.min_displacement;
  const bool due = now - *last_compute_ >= throttle_.min_interval;
  if (moved && due) return compute(pose, now);
  pending_ = pose;
  return std::nullopt;
}

std::optional<AppearanceDelta> SessionView::tick(TimePoint now) {
  if (!pending_ || now - *last_compute_ < throttle_.min_interval) return std::nullopt;
  return compute(*pending_, now);
}

std::optional<AppearanceDelta> SessionView::replace_landscape(
    std::shared_ptr<const PreparedLandscape> landscape, TimePoint now) {
  if (!landscape) throw Error("no landscape loaded");
  landscape_ = std::move(landscape);
  if (landscape_->resolver().key() != state_.landscape_key) state_ = {};
  const std::optional<CameraPose> pose = pending_ ? pending_ : last_pose_;
  if (!pose) return std::nullopt;
  return compute(*pose, now);
}

}  // namespace cityzoom::server
