#pragma once

#include <string>

#include "cityzoom/server/store.hpp"

namespace cityzoom::server {

struct HttpRequest {
  std::string method;
  /// Path with optional query string.
  std::string target;
  std::string content_type;
  std::string body;
};

struct HttpResponse {
  int status{200};
  std::string content_type{"application/json"};
  std::string body;
};

/// Transport-independent HTTP routes:
///
///   POST /landscapes                    structure JSON (application/json) or
///                                       span lines (application/x-ndjson)
///   GET  /landscapes/{id}               structure
///   GET  /landscapes/{id}/layout
///   GET  /landscapes/{id}/settings
///   PUT  /landscapes/{id}/settings      application/json
///   GET  /healthz
///
/// Errors are JSON objects {"error": message}.
class Api {
 public:
  explicit Api(LandscapeStore& store) : store_(store) {}

  HttpResponse handle(const HttpRequest& request) const;

 private:
  LandscapeStore& store_;
};

}  // namespace cityzoom::server
