#include "rewritekit/http.hpp"

#include <algorithm>
#include <cctype>
#include <thread>

#include <httplib.h>

namespace rewritekit {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("endpoint must start with http://: " + url);
  }
  if (url.compare(0, scheme_end, "http") != 0) {
    throw std::invalid_argument("only plain http endpoints are supported: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) e.prefix = url.substr(path_start);
  while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  return e;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

HttpResponse post_json(const std::string& endpoint, const std::string& path,
                       const std::string& body, const RetryPolicy& retry) {
  const Endpoint e = split_endpoint(endpoint);
  // A caller may pass the full route as the endpoint.
  std::string route = e.prefix;
  if (route.size() < path.size() || route.compare(route.size() - path.size(), path.size(), path) != 0) {
    route += path;
  }

  std::chrono::milliseconds backoff = retry.initial_backoff;
  std::string last_error;
  const int attempts = std::max(1, retry.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    httplib::Client client(e.origin);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(retry.timeout).count());
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(retry.timeout).count());
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::seconds>(retry.timeout).count());
    auto res = client.Post(route, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
    } else if (res->status < 200 || res->status >= 300) {
      throw ProtocolError(endpoint + route + ": HTTP " + std::to_string(res->status));
    } else {
      HttpResponse out;
      out.status = res->status;
      out.body = res->body;
      for (const auto& [name, value] : res->headers) out.headers.emplace(lower(name), value);
      return out;
    }
    if (attempt < attempts) {
      std::this_thread::sleep_for(backoff);
      backoff = std::min(backoff * 2, retry.max_backoff);
    }
  }
  throw RemoteUnavailable(endpoint + route + ": " + last_error + " after " +
                          std::to_string(attempts) + " attempts");
}

}  // namespace rewritekit
