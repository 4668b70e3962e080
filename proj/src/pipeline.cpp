#include "cityzoom/pipeline.hpp"

#include "cityzoom/room.hpp"

namespace cityzoom {

PreparedLandscape::PreparedLandscape(LandscapeStructure structure, Settings settings,
                                     LayoutConfig layout_config)
    : structure_(std::move(structure)),
      settings_(std::move(settings)),
      layout_config_(std::move(layout_config)) {
  validate(structure_);
  settings_.validate();
  layout_ = compute_layout(structure_, layout_config_);
  clusters_ = cluster_entities(layout_, settings_.zoom);
  resolver_ = std::make_unique<AppearanceResolver>(structure_, layout_, settings_.zoom);
}

std::vector<std::uint8_t> PreparedLandscape::levels(const CameraPose& pose) const {
  validate(pose);
  return assign_levels(pose, clusters_, settings_.zoom.level_thresholds);
}

AppearanceState PreparedLandscape::appearance(const CameraPose& pose) const {
  return resolver_->resolve(levels(pose));
}

std::shared_ptr<const PreparedLandscape> PreparedLandscape::with_settings(Settings settings) const {
  return std::make_shared<const PreparedLandscape>(structure_, std::move(settings), layout_config_);
}

std::string snapshot_svg(const PreparedLandscape& landscape, const CameraPose& pose, double size_px) {
  const AppearanceState appearance = landscape.appearance(pose);
  MinimapConfig map = landscape.settings().minimap;
  map.zoom = 1.0;
  const MinimapFrame frame = compute_frame(landscape.layout(), map, ScreenSize{});

  RoomState room;
  RoomUser self;
  self.pose = pose;
  room.users.emplace(0, self);
  const auto markers = marker_positions(room, 0, map, frame);

  SvgOptions options;
  options.size_px = size_px;
  options.hidden_layers = map.hidden_layers;
  return render_svg(landscape.layout(), appearance, frame, markers, options);
}

}  // namespace cityzoom
