#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace hsevo {

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

// POSTs `body` to `url` (http:// or https://). Transport failures and 5xx/429
// statuses are retried with exponential backoff; the final failure throws
// TransportError. 4xx responses other than 429 are returned to the caller.
HttpResponse http_post(const std::string& url, const std::string& body, const std::string& content_type,
                       const Headers& headers, const RetryPolicy& retry,
                       std::chrono::seconds timeout = std::chrono::seconds(120));

}  // namespace hsevo
