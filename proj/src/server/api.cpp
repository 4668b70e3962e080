#include "cityzoom/server/api.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "cityzoom/error.hpp"
#include "cityzoom/ingest.hpp"
#include "cityzoom/serialization.hpp"

namespace cityzoom::server {
namespace {

HttpResponse json_response(int status, const Json& body) { return {status, "application/json", body.dump()}; }

HttpResponse error_response(int status, const std::string& message) {
  return json_response(status, Json{{"error", message}});
}

/// Media type without parameters, lower-cased.
std::string media_type(std::string_view content_type) {
  auto semi = content_type.find(';');
  std::string out(content_type.substr(0, semi));
  out.erase(std::remove_if(out.begin(), out.end(), [](unsigned char c) { return std::isspace(c); }),
            out.end());
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string> split_path(std::string_view target) {
  target = target.substr(0, target.find('?'));
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos < target.size()) {
    auto next = target.find('/', pos);
    if (next == std::string_view::npos) next = target.size();
    if (next > pos) parts.emplace_back(target.substr(pos, next - pos));
    pos = next + 1;
  }
  return parts;
}

bool is_span_type(const std::string& type) {
  return type == "application/x-ndjson" || type == "application/jsonl" || type == "application/jsonlines";
}

}  // namespace

HttpResponse Api::handle(const HttpRequest& request) const {
  const auto parts = split_path(request.target);
  const std::string& method = request.method;
  try {
    if (parts.size() == 1 && parts[0] == "healthz") {
      if (method != "GET") return error_response(405, "method not allowed");
      return json_response(200, Json{{"status", "ok"}, {"landscapes", store_.size()}});
    }
    if (parts.empty() || parts[0] != "landscapes" || parts.size() > 3) {
      return error_response(404, "not found");
    }

    if (parts.size() == 1) {
      if (method != "POST") return error_response(405, "method not allowed");
      const std::string type = media_type(request.content_type);
      LandscapeStructure structure;
      Json diagnostics = nullptr;
      if (type == "application/json") {
        structure = parse_structure(request.body);
      } else if (is_span_type(type)) {
        const auto spans = parse_spans(request.body);
        if (spans.empty()) return error_response(400, "no spans in request body");
        AggregationDiagnostics diag;
        structure = ingest_spans(spans, &diag);
        diagnostics = {{"unknownParents", diag.unknown_parents},
                       {"unknownClasses", diag.unknown_classes},
                       {"sameClassPairs", diag.same_class_pairs},
                       {"crossClassPairs", diag.cross_class_pairs}};
      } else {
        return error_response(415, "expected application/json or application/x-ndjson");
      }
      const std::size_t apps = structure.applications.size();
      const std::string id = store_.add(std::move(structure));
      Json body{{"landscapeId", id}, {"applications", apps}};
      if (!diagnostics.is_null()) body["diagnostics"] = diagnostics;
      return json_response(201, body);
    }

    auto landscape = store_.get(parts[1]);
    if (!landscape) return error_response(404, "unknown landscape: " + parts[1]);

    if (parts.size() == 2) {
      if (method != "GET") return error_response(405, "method not allowed");
      return json_response(200, Json(landscape->structure()));
    }
    if (parts[2] == "layout") {
      if (method != "GET") return error_response(405, "method not allowed");
      return json_response(200, Json(landscape->layout()));
    }
    if (parts[2] == "settings") {
      if (method == "GET") return json_response(200, Json(landscape->settings()));
      if (method != "PUT") return error_response(405, "method not allowed");
      if (media_type(request.content_type) != "application/json") {
        return error_response(415, "expected application/json");
      }
      auto updated = store_.update_settings(parts[1], parse_settings(request.body));
      if (!updated) return error_response(404, "unknown landscape: " + parts[1]);
      return json_response(200, Json(updated->settings()));
    }
    return error_response(404, "not found");
  } catch (const ParseError& e) {
    return error_response(400, e.what());
  } catch (const ValidationError& e) {
    return error_response(422, e.what());
  } catch (const Json::exception& e) {
    return error_response(400, e.what());
  }
}

}  // namespace cityzoom::server
