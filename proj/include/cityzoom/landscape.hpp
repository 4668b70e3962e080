#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cityzoom {

struct Method {
  std::string name;
  std::int64_t loc{1};

  friend bool operator==(const Method&, const Method&) = default;
};

struct Class {
  std::string name;
  std::string fqn;
  std::int64_t instance_count{0};
  std::vector<Method> methods;

  friend bool operator==(const Class&, const Class&) = default;
};

struct Package {
  std::string name;
  std::vector<Package> sub_packages;
  std::vector<Class> classes;

  friend bool operator==(const Package&, const Package&) = default;
};

struct Application {
  std::string name;
  std::vector<Package> root_packages;

  friend bool operator==(const Application&, const Application&) = default;
};

/// Accumulated calls from one class to another. A bidirectional pair is two links.
struct CommunicationLink {
  std::string source_fqn;
  std::string target_fqn;
  std::int64_t request_count{1};

  friend bool operator==(const CommunicationLink&, const CommunicationLink&) = default;
};

struct LandscapeStructure {
  std::vector<Application> applications;
  std::vector<CommunicationLink> communications;

  friend bool operator==(const LandscapeStructure&, const LandscapeStructure&) = default;
};

/// Throws ValidationError when a structural invariant is broken: duplicate fqns,
/// dangling link endpoints, empty applications, non-positive request counts,
/// negative metrics.
void validate(const LandscapeStructure& structure);

enum class EntityKind : std::uint8_t { application, package, klass };

std::string_view to_string(EntityKind kind);

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

/// Entity identifiers are stable strings:
///   application  "app:<name>"
///   package      "pkg:<application>:<dotted.path>"
///   class        "cls:<fqn>"
std::string application_id(std::string_view app);
std::string package_id(std::string_view app, std::string_view dotted_path);
std::string class_id(std::string_view fqn);

struct Entity {
  std::string id;
  std::string name;
  EntityKind kind{EntityKind::application};
  std::size_t parent{npos};
  /// 0 for applications, 1 for root packages, parent depth + 1 below.
  int depth{0};
  std::vector<std::size_t> children;
  /// Only set for classes.
  const Class* klass{nullptr};
};

/// Flattened pre-order view of a structure. Entity indices are the canonical
/// per-entity keys used by layout, clustering and appearance.
class LandscapeIndex {
 public:
  explicit LandscapeIndex(const LandscapeStructure& structure);

  // The index keeps pointers into `structure`.
  LandscapeIndex(LandscapeStructure&&) = delete;

  const LandscapeStructure& structure() const { return *structure_; }
  const std::vector<Entity>& entities() const { return entities_; }
  const Entity& at(std::size_t i) const { return entities_.at(i); }
  std::size_t size() const { return entities_.size(); }

  std::size_t find(std::string_view entity_id) const;
  std::size_t find_class(std::string_view fqn) const;

  /// True when `ancestor` is a strict ancestor of `entity`.
  bool is_ancestor(std::size_t ancestor, std::size_t entity) const;

  std::size_t class_count() const { return class_count_; }

 private:
  void add_package(const Package& pkg, const std::string& app, const std::string& prefix,
                   std::size_t parent, int depth);

  const LandscapeStructure* structure_;
  std::vector<Entity> entities_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::size_t class_count_{0};
};

}  // namespace cityzoom
