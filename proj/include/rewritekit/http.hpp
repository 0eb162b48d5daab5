#ifndef REWRITEKIT_HTTP_HPP
#define REWRITEKIT_HTTP_HPP

#include <chrono>
#include <map>
#include <stdexcept>
#include <string>

namespace rewritekit {

/// Transport failure after all retries (connection refused, timeouts, 5xx/429).
class RemoteUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The peer answered, but not in the expected shape.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{100};
  std::chrono::milliseconds max_backoff{2000};
  std::chrono::seconds timeout{60};
};

struct HttpResponse {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;  // lowercased names
};

/// POSTs a JSON body to `endpoint` + `path` ("http://host:port[/prefix]").
/// Retries transport errors, 429 and 5xx with doubling backoff; any other
/// non-2xx status throws ProtocolError.
HttpResponse post_json(const std::string& endpoint, const std::string& path,
                       const std::string& body, const RetryPolicy& retry);

}  // namespace rewritekit

#endif  // REWRITEKIT_HTTP_HPP
