#include "cityzoom/ingest.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "cityzoom/error.hpp"
#include "cityzoom/random.hpp"

namespace cityzoom {
namespace {

using nlohmann::json;

constexpr std::string_view kSpanFields[] = {"traceId",   "spanId",      "parentSpanId", "startNanos",
                                            "endNanos",  "serviceName", "fqn"};

std::vector<std::string_view> split_dots(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = s.find('.', start);
    parts.push_back(s.substr(start, dot == std::string_view::npos ? std::string_view::npos
                                                                  : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return parts;
}

std::string string_field(const json& rec, const char* key, std::size_t line) {
  const auto& v = rec.at(key);
  if (!v.is_string()) throw ParseError(line, std::string(key) + " must be a string");
  auto s = v.get<std::string>();
  if (s.empty()) throw ParseError(line, std::string(key) + " must not be empty");
  return s;
}

std::int64_t int_field(const json& rec, const char* key, std::size_t line) {
  const auto& v = rec.at(key);
  if (!v.is_number_integer()) throw ParseError(line, std::string(key) + " must be an integer");
  return v.get<std::int64_t>();
}

Span parse_record(std::string_view text, std::size_t line) {
  json rec;
  try {
    rec = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(line, std::string("malformed JSON: ") + e.what());
  }
  if (!rec.is_object()) throw ParseError(line, "record must be a JSON object");
  for (auto key : kSpanFields) {
    if (!rec.contains(std::string(key))) {
      throw ParseError(line, "missing field " + std::string(key));
    }
  }
  if (rec.size() != std::size(kSpanFields)) {
    for (const auto& [key, _] : rec.items()) {
      if (std::find(std::begin(kSpanFields), std::end(kSpanFields), key) == std::end(kSpanFields)) {
        throw ParseError(line, "unexpected field " + key);
      }
    }
  }

  Span span;
  span.trace_id = string_field(rec, "traceId", line);
  span.span_id = string_field(rec, "spanId", line);
  const auto& parent = rec.at("parentSpanId");
  if (!parent.is_null()) span.parent_span_id = string_field(rec, "parentSpanId", line);
  span.start_nanos = int_field(rec, "startNanos", line);
  span.end_nanos = int_field(rec, "endNanos", line);
  if (span.end_nanos < span.start_nanos) throw ParseError(line, "endNanos precedes startNanos");
  span.service_name = string_field(rec, "serviceName", line);
  if (!rec.at("fqn").is_string()) throw ParseError(line, "fqn must be a string");
  span.fqn = rec.at("fqn").get<std::string>();
  try {
    split_fqn(span.fqn);
  } catch (const ParseError& e) {
    throw ParseError(line, e.what());
  }
  return span;
}

struct ClassAcc {
  std::set<std::string> methods;
};

struct PackageAcc {
  std::map<std::string, PackageAcc> subs;
  std::map<std::string, ClassAcc> classes;
};

Package build_package(const std::string& name, const PackageAcc& acc,
                      const std::string& path,
                      const std::unordered_map<std::string, std::int64_t>& instances) {
  Package pkg;
  pkg.name = name;
  for (const auto& [sub_name, sub] : acc.subs) {
    pkg.sub_packages.push_back(build_package(sub_name, sub, path + "." + sub_name, instances));
  }
  for (const auto& [class_name, cls_acc] : acc.classes) {
    Class cls;
    cls.name = class_name;
    cls.fqn = (name == kDefaultPackage && path == kDefaultPackage) ? class_name
                                                                    : path + "." + class_name;
    cls.instance_count = instances.at(cls.fqn);
    for (const auto& m : cls_acc.methods) cls.methods.push_back(Method{m, 1});
    pkg.classes.push_back(std::move(cls));
  }
  return pkg;
}

std::string class_of(const Span& span) { return split_fqn(span.fqn).class_fqn(); }

}  // namespace

FqnParts split_fqn(std::string_view fqn) {
  const auto parts = split_dots(fqn);
  if (parts.size() < 2) {
    throw ParseError(0, "fqn must contain class and method: " + std::string(fqn));
  }
  for (auto p : parts) {
    if (p.empty()) throw ParseError(0, "fqn has an empty segment: " + std::string(fqn));
  }
  FqnParts out;
  out.method_name = std::string(parts.back());
  out.class_name = std::string(parts[parts.size() - 2]);
  for (std::size_t i = 0; i + 2 < parts.size(); ++i) {
    if (i) out.package_path += '.';
    out.package_path += parts[i];
  }
  return out;
}

std::vector<Span> parse_spans(std::istream& in) {
  std::vector<Span> spans;
  std::set<std::pair<std::string, std::string>> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    Span span = parse_record(text, line);
    if (!seen.emplace(span.trace_id, span.span_id).second) {
      throw ParseError(line, "duplicate spanId " + span.span_id + " in trace " + span.trace_id);
    }
    spans.push_back(std::move(span));
  }
  return spans;
}

std::vector<Span> parse_spans(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_spans(in);
}

std::string span_to_json_line(const Span& span) {
  json rec = json::object();
  rec["traceId"] = span.trace_id;
  rec["spanId"] = span.span_id;
  rec["parentSpanId"] = span.parent_span_id ? json(*span.parent_span_id) : json(nullptr);
  rec["startNanos"] = span.start_nanos;
  rec["endNanos"] = span.end_nanos;
  rec["serviceName"] = span.service_name;
  rec["fqn"] = span.fqn;
  return rec.dump();
}

LandscapeStructure reconstruct_structure(const std::vector<Span>& spans) {
  std::map<std::string, std::string> owner;  // class fqn -> service
  std::unordered_map<std::string, std::set<std::string>> traces;
  for (const auto& span : spans) {
    const std::string cls = class_of(span);
    auto [it, inserted] = owner.emplace(cls, span.service_name);
    if (!inserted && span.service_name < it->second) it->second = span.service_name;
    traces[cls].insert(span.trace_id);
  }
  std::unordered_map<std::string, std::int64_t> instances;
  for (const auto& [cls, ids] : traces) instances[cls] = static_cast<std::int64_t>(ids.size());

  std::map<std::string, PackageAcc> roots_by_service;
  std::set<std::string> services;
  for (const auto& span : spans) services.insert(span.service_name);
  for (const auto& span : spans) {
    const FqnParts parts = split_fqn(span.fqn);
    const std::string service = owner.at(parts.class_fqn());
    PackageAcc* node = &roots_by_service[service];
    if (parts.package_path.empty()) {
      node = &node->subs[std::string(kDefaultPackage)];
    } else {
      for (auto seg : split_dots(parts.package_path)) node = &node->subs[std::string(seg)];
    }
    node->classes[parts.class_name].methods.insert(parts.method_name);
  }

  LandscapeStructure out;
  for (const auto& [service, root] : roots_by_service) {
    Application app;
    app.name = service;
    for (const auto& [name, pkg] : root.subs) {
      app.root_packages.push_back(build_package(name, pkg, name, instances));
    }
    out.applications.push_back(std::move(app));
  }
  return out;
}

AggregationResult aggregate_communication(const std::vector<Span>& spans,
                                          const LandscapeStructure& structure) {
  std::unordered_set<std::string> known;
  {
    const LandscapeIndex index(structure);
    for (const auto& e : index.entities()) {
      if (e.kind == EntityKind::klass) known.insert(e.klass->fqn);
    }
  }

  std::map<std::pair<std::string_view, std::string_view>, const Span*> by_id;
  for (const auto& span : spans) by_id.emplace(std::pair{std::string_view(span.trace_id),
                                                         std::string_view(span.span_id)},
                                               &span);

  AggregationResult result;
  std::map<std::pair<std::string, std::string>, std::int64_t> counts;
  for (const auto& child : spans) {
    if (!child.parent_span_id) continue;
    auto it = by_id.find({child.trace_id, *child.parent_span_id});
    if (it == by_id.end()) {
      ++result.diagnostics.unknown_parents;
      continue;
    }
    std::string source = class_of(*it->second);
    std::string target = class_of(child);
    if (!known.contains(source) || !known.contains(target)) {
      ++result.diagnostics.unknown_classes;
      continue;
    }
    if (source == target) {
      ++result.diagnostics.same_class_pairs;
      continue;
    }
    ++result.diagnostics.cross_class_pairs;
    ++counts[{std::move(source), std::move(target)}];
  }
  result.links.reserve(counts.size());
  for (auto& [key, n] : counts) result.links.push_back(CommunicationLink{key.first, key.second, n});
  return result;
}

LandscapeStructure ingest_spans(const std::vector<Span>& spans,
                                AggregationDiagnostics* diagnostics) {
  LandscapeStructure structure = reconstruct_structure(spans);
  auto agg = aggregate_communication(spans, structure);
  structure.communications = std::move(agg.links);
  if (diagnostics) *diagnostics = agg.diagnostics;
  return structure;
}

namespace {

void merge_package(Package& pkg, const std::unordered_map<std::string, const Class*>& source) {
  for (auto& sub : pkg.sub_packages) merge_package(sub, source);
  for (auto& cls : pkg.classes) {
    auto it = source.find(cls.fqn);
    if (it == source.end()) continue;
    cls.instance_count = it->second->instance_count;
    for (auto& m : cls.methods) {
      for (const auto& sm : it->second->methods) {
        if (sm.name == m.name) {
          m.loc = sm.loc;
          break;
        }
      }
    }
  }
}

}  // namespace

void merge_metrics(LandscapeStructure& target, const LandscapeStructure& metrics) {
  std::unordered_map<std::string, const Class*> source;
  const LandscapeIndex index(metrics);
  for (const auto& e : index.entities()) {
    if (e.kind == EntityKind::klass) source.emplace(e.klass->fqn, e.klass);
  }
  for (auto& app : target.applications) {
    for (auto& pkg : app.root_packages) merge_package(pkg, source);
  }
}

namespace {

Package synthetic_package(Rng& rng, const SyntheticParams& p, const std::string& name,
                          const std::string& path, int level) {
  Package pkg;
  pkg.name = name;
  if (level < p.depth) {
    const std::string sub = "l" + std::to_string(level + 1);
    pkg.sub_packages.push_back(synthetic_package(rng, p, sub, path + "." + sub, level + 1));
  }
  for (int c = 0; c < p.classes_per_package; ++c) {
    Class cls;
    cls.name = "Class" + std::to_string(c);
    cls.fqn = path + "." + cls.name;
    cls.instance_count = rng.uniform_int(0, 500);
    for (int m = 0; m < p.methods_per_class; ++m) {
      cls.methods.push_back(Method{"method" + std::to_string(m), rng.uniform_int(1, 200)});
    }
    pkg.classes.push_back(std::move(cls));
  }
  return pkg;
}

void collect_fqns(const Package& pkg, std::vector<std::string>& out) {
  for (const auto& sub : pkg.sub_packages) collect_fqns(sub, out);
  for (const auto& cls : pkg.classes) out.push_back(cls.fqn);
}

}  // namespace

LandscapeStructure generate_synthetic(std::uint64_t seed, const SyntheticParams& p) {
  if (p.apps < 1 || p.packages_per_app < 1 || p.depth < 1 || p.classes_per_package < 1 ||
      p.methods_per_class < 1) {
    throw ValidationError("synthetic landscape counts must be >= 1");
  }
  if (!(p.link_density >= 0.0 && p.link_density <= 1.0)) {
    throw ValidationError("linkDensity must lie in [0, 1]");
  }

  Rng rng(seed);
  LandscapeStructure out;
  for (int a = 0; a < p.apps; ++a) {
    Application app;
    app.name = "app" + std::to_string(a);
    for (int r = 0; r < p.packages_per_app; ++r) {
      const std::string name = "a" + std::to_string(a) + "p" + std::to_string(r);
      app.root_packages.push_back(synthetic_package(rng, p, name, name, 1));
    }
    out.applications.push_back(std::move(app));
  }

  std::vector<std::string> fqns;
  for (const auto& app : out.applications) {
    for (const auto& pkg : app.root_packages) collect_fqns(pkg, fqns);
  }
  const std::uint64_t n = fqns.size();
  const std::uint64_t pairs = n * (n - 1);
  const auto wanted =
      static_cast<std::uint64_t>(std::llround(p.link_density * static_cast<double>(pairs)));

  // Floyd's sampling of `wanted` distinct pair indices out of `pairs`.
  std::set<std::uint64_t> chosen;
  for (std::uint64_t j = pairs - wanted; j < pairs; ++j) {
    const std::uint64_t t = rng.uniform(0, j);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  for (std::uint64_t idx : chosen) {
    const std::uint64_t i = idx / (n - 1);
    const std::uint64_t r = idx % (n - 1);
    const std::uint64_t j = r < i ? r : r + 1;
    out.communications.push_back(CommunicationLink{fqns[i], fqns[j], rng.uniform_int(1, 1000)});
  }
  std::sort(out.communications.begin(), out.communications.end(),
            [](const CommunicationLink& a, const CommunicationLink& b) {
              return std::tie(a.source_fqn, a.target_fqn) < std::tie(b.source_fqn, b.target_fqn);
            });
  return out;
}

std::vector<Span> spans_from_structure(const LandscapeStructure& structure, bool with_links) {
  std::vector<Span> spans;
  const LandscapeIndex index(structure);
  std::unordered_map<std::string, std::string> service_of;
  std::int64_t clock = 0;
  for (const auto& e : index.entities()) {
    if (e.kind != EntityKind::klass) continue;
    std::size_t app = e.parent;
    while (index.at(app).parent != npos) app = index.at(app).parent;
    const std::string& service = index.at(app).name;
    service_of.emplace(e.klass->fqn, service);
    const std::string trace = "c:" + e.klass->fqn;
    std::optional<std::string> parent;
    for (std::size_t m = 0; m < e.klass->methods.size(); ++m) {
      Span s;
      s.trace_id = trace;
      s.span_id = std::to_string(m);
      s.parent_span_id = parent;
      s.start_nanos = clock;
      s.end_nanos = clock + 10;
      s.service_name = service;
      s.fqn = e.klass->fqn + "." + e.klass->methods[m].name;
      clock += 10;
      parent = s.span_id;
      spans.push_back(std::move(s));
    }
  }
  if (!with_links) return spans;

  auto first_method = [&](const std::string& fqn) {
    const Class* cls = index.at(index.find_class(fqn)).klass;
    return cls->methods.empty() ? std::string("call") : cls->methods.front().name;
  };
  std::size_t link_no = 0;
  for (const auto& link : structure.communications) {
    const std::string caller = link.source_fqn + "." + first_method(link.source_fqn);
    const std::string callee = link.target_fqn + "." + first_method(link.target_fqn);
    for (std::int64_t r = 0; r < link.request_count; ++r) {
      const std::string trace = "l" + std::to_string(link_no) + ":" + std::to_string(r);
      spans.push_back(Span{trace, "0", std::nullopt, clock, clock + 20,
                           service_of.at(link.source_fqn), caller});
      spans.push_back(Span{trace, "1", std::string("0"), clock + 5, clock + 15,
                           service_of.at(link.target_fqn), callee});
      clock += 20;
    }
    ++link_no;
  }
  return spans;
}

}  // namespace cityzoom
