#include "cityzoom/landscape.hpp"

#include <unordered_set>

#include "cityzoom/error.hpp"

namespace cityzoom {
namespace {

void check_package_name(const std::string& name, std::unordered_set<std::string>& siblings) {
  if (name.empty() || name.find('.') != std::string::npos) {
    throw ValidationError("invalid package name: '" + name + "'");
  }
  if (!siblings.insert(name).second) throw ValidationError("duplicate sibling package: " + name);
}

std::size_t count_classes(const Package& pkg, std::unordered_set<std::string>& fqns) {
  std::size_t n = 0;
  for (const auto& cls : pkg.classes) {
    if (cls.name.empty()) throw ValidationError("class with empty name in package " + pkg.name);
    if (!fqns.insert(cls.fqn).second) throw ValidationError("duplicate class fqn: " + cls.fqn);
    if (cls.instance_count < 0) throw ValidationError("negative instanceCount: " + cls.fqn);
    for (const auto& m : cls.methods) {
      if (m.loc < 0) throw ValidationError("negative loc in " + cls.fqn + "." + m.name);
    }
    ++n;
  }
  std::unordered_set<std::string> names;
  for (const auto& sub : pkg.sub_packages) {
    check_package_name(sub.name, names);
    n += count_classes(sub, fqns);
  }
  return n;
}

}  // namespace

void validate(const LandscapeStructure& structure) {
  std::unordered_set<std::string> fqns;
  std::unordered_set<std::string> app_names;
  for (const auto& app : structure.applications) {
    if (app.name.empty()) throw ValidationError("application with empty name");
    if (!app_names.insert(app.name).second) {
      throw ValidationError("duplicate application: " + app.name);
    }
    std::size_t n = 0;
    std::unordered_set<std::string> roots;
    for (const auto& pkg : app.root_packages) {
      check_package_name(pkg.name, roots);
      n += count_classes(pkg, fqns);
    }
    if (n == 0) throw ValidationError("application without classes: " + app.name);
  }
  for (const auto& link : structure.communications) {
    if (link.request_count < 1) {
      throw ValidationError("requestCount must be >= 1: " + link.source_fqn + " -> " +
                            link.target_fqn);
    }
    if (!fqns.contains(link.source_fqn)) {
      throw ValidationError("link source does not resolve: " + link.source_fqn);
    }
    if (!fqns.contains(link.target_fqn)) {
      throw ValidationError("link target does not resolve: " + link.target_fqn);
    }
  }
}

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::application:
      return "application";
    case EntityKind::package:
      return "package";
    case EntityKind::klass:
      return "class";
  }
  return "unknown";
}

std::string application_id(std::string_view app) { return "app:" + std::string(app); }

std::string package_id(std::string_view app, std::string_view dotted_path) {
  std::string id = "pkg:";
  id.append(app).append(":").append(dotted_path);
  return id;
}

std::string class_id(std::string_view fqn) { return "cls:" + std::string(fqn); }

LandscapeIndex::LandscapeIndex(const LandscapeStructure& structure) : structure_(&structure) {
  for (const auto& app : structure.applications) {
    const std::size_t app_index = entities_.size();
    entities_.push_back(Entity{application_id(app.name), app.name, EntityKind::application, npos,
                               0, {}, nullptr});
    for (const auto& pkg : app.root_packages) add_package(pkg, app.name, "", app_index, 1);
  }
  by_id_.reserve(entities_.size());
  for (std::size_t i = 0; i < entities_.size(); ++i) by_id_.emplace(entities_[i].id, i);
}

void LandscapeIndex::add_package(const Package& pkg, const std::string& app,
                                 const std::string& prefix, std::size_t parent, int depth) {
  const std::string path = prefix.empty() ? pkg.name : prefix + "." + pkg.name;
  const std::size_t self = entities_.size();
  entities_.push_back(
      Entity{package_id(app, path), pkg.name, EntityKind::package, parent, depth, {}, nullptr});
  entities_[parent].children.push_back(self);
  for (const auto& sub : pkg.sub_packages) add_package(sub, app, path, self, depth + 1);
  for (const auto& cls : pkg.classes) {
    const std::size_t ci = entities_.size();
    entities_.push_back(
        Entity{class_id(cls.fqn), cls.name, EntityKind::klass, self, depth + 1, {}, &cls});
    entities_[self].children.push_back(ci);
    ++class_count_;
  }
}

std::size_t LandscapeIndex::find(std::string_view entity_id) const {
  auto it = by_id_.find(std::string(entity_id));
  return it == by_id_.end() ? npos : it->second;
}

std::size_t LandscapeIndex::find_class(std::string_view fqn) const { return find(class_id(fqn)); }

bool LandscapeIndex::is_ancestor(std::size_t ancestor, std::size_t entity) const {
  for (std::size_t p = entities_.at(entity).parent; p != npos; p = entities_[p].parent) {
    if (p == ancestor) return true;
  }
  return false;
}

}  // namespace cityzoom
