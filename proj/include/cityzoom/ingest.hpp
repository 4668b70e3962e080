#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cityzoom/landscape.hpp"

namespace cityzoom {

/// One method execution, as exported by an OpenTelemetry-compatible agent.
struct Span {
  std::string trace_id;
  std::string span_id;
  std::optional<std::string> parent_span_id;
  std::int64_t start_nanos{0};
  std::int64_t end_nanos{0};
  std::string service_name;
  /// Dot-separated "package.path.Class.method"; at least class and method.
  std::string fqn;

  friend bool operator==(const Span&, const Span&) = default;
};

/// Splits a method fqn into package path, class and method.
struct FqnParts {
  std::string package_path;  // empty for classes in the default package
  std::string class_name;
  std::string method_name;

  std::string class_fqn() const {
    return package_path.empty() ? class_name : package_path + "." + class_name;
  }
};

/// Throws ParseError (line 0) when `fqn` has fewer than two non-empty segments.
FqnParts split_fqn(std::string_view fqn);

/// Name given to the package holding classes whose fqn has no package prefix.
inline constexpr std::string_view kDefaultPackage = "(default)";

/// Parses JSON Lines with the fields traceId, spanId, parentSpanId (nullable),
/// startNanos, endNanos, serviceName, fqn. Blank lines are skipped. Throws
/// ParseError carrying the 1-based line number of the first bad record.
std::vector<Span> parse_spans(std::istream& in);
std::vector<Span> parse_spans(std::string_view text);

std::string span_to_json_line(const Span& span);

/// Builds applications, packages, classes and methods from spans. The result is
/// sorted by name at every level, so it does not depend on span order.
///
/// - one application per distinct serviceName
/// - method LoC is 1 (traces carry no source metrics)
/// - instanceCount is the number of distinct traces in which the class occurs
/// - a class fqn seen under several services belongs to the lexicographically
///   smallest service name
///
/// Communications are left empty; see aggregate_communication().
LandscapeStructure reconstruct_structure(const std::vector<Span>& spans);

struct AggregationDiagnostics {
  /// Spans whose parentSpanId does not resolve within their trace.
  std::size_t unknown_parents{0};
  /// Spans whose class is absent from the structure.
  std::size_t unknown_classes{0};
  /// Parent/child pairs within one class (never produce a link).
  std::size_t same_class_pairs{0};
  /// Parent/child pairs that produced a request.
  std::size_t cross_class_pairs{0};
};

struct AggregationResult {
  std::vector<CommunicationLink> links;  // sorted by (source, target)
  AggregationDiagnostics diagnostics;
};

/// Counts one request per parent/child span pair whose classes differ.
AggregationResult aggregate_communication(const std::vector<Span>& spans,
                                          const LandscapeStructure& structure);

/// reconstruct_structure() followed by aggregate_communication().
LandscapeStructure ingest_spans(const std::vector<Span>& spans,
                                AggregationDiagnostics* diagnostics = nullptr);

/// Copies method LoC and class instance counts from `metrics` into matching
/// classes (by fqn) and methods (by name) of `target`.
void merge_metrics(LandscapeStructure& target, const LandscapeStructure& metrics);

struct SyntheticParams {
  int apps{6};
  /// Root packages per application.
  int packages_per_app{3};
  /// Package nesting depth below each root package (1 = no sub-packages).
  int depth{2};
  int classes_per_package{4};
  int methods_per_class{3};
  /// Fraction of ordered class pairs (i != j) that receive a link.
  double link_density{0.01};
};

/// Deterministic synthetic landscape. Every root package carries a chain of
/// `depth` nested packages and every package holds `classes_per_package`
/// classes. Throws ValidationError for counts < 1 or density outside [0, 1].
LandscapeStructure generate_synthetic(std::uint64_t seed, const SyntheticParams& params);

/// Spans that reproduce `structure`: one trace per class visiting all its
/// methods, and (when `with_links`) request_count parent/child pairs per link.
std::vector<Span> spans_from_structure(const LandscapeStructure& structure, bool with_links = true);

}  // namespace cityzoom
