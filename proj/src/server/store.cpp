#include "cityzoom/server/store.hpp"

namespace cityzoom::server {

std::string LandscapeStore::add(LandscapeStructure structure) {
  auto prepared = std::make_shared<const PreparedLandscape>(std::move(structure), Settings{});
  std::lock_guard lock(mutex_);
  std::string id = "ls" + std::to_string(next_id_++);
  landscapes_.emplace(id, std::move(prepared));
  return id;
}

std::shared_ptr<const PreparedLandscape> LandscapeStore::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = landscapes_.find(id);
  return it == landscapes_.end() ? nullptr : it->second;
}

std::shared_ptr<const PreparedLandscape> LandscapeStore::update_settings(const std::string& id,
                                                                         const Settings& settings) {
  auto current = get(id);
  if (!current) return nullptr;
  auto next = current->with_settings(settings);
  std::lock_guard lock(mutex_);
  landscapes_[id] = next;
  return next;
}

std::size_t LandscapeStore::size() const {
  std::lock_guard lock(mutex_);
  return landscapes_.size();
}

}  // namespace cityzoom::server
