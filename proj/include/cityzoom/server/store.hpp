#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "cityzoom/pipeline.hpp"

namespace cityzoom::server {

/// Loaded landscapes by id. Thread-safe; entries are immutable snapshots that
/// are replaced as a whole when settings change.
class LandscapeStore {
 public:
  /// Prepares the structure with default settings and returns its new id.
  std::string add(LandscapeStructure structure);

  /// Nullptr when the id is unknown.
  std::shared_ptr<const PreparedLandscape> get(const std::string& id) const;

  /// Rebuilds the landscape with `settings`. Throws ValidationError on invalid
  /// settings; returns nullptr for an unknown id.
  std::shared_ptr<const PreparedLandscape> update_settings(const std::string& id, const Settings& settings);

  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const PreparedLandscape>> landscapes_;
  std::uint64_t next_id_{1};
};

}  // namespace cityzoom::server
