#include "hsevo/http_client.hpp"

#include <thread>

#include "hsevo/errors.hpp"
#include "httplib.h"

namespace hsevo {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("malformed url '" + url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpResponse http_post(const std::string& url, const std::string& body, const std::string& content_type,
                       const Headers& headers, const RetryPolicy& retry, std::chrono::seconds timeout) {
  const auto target = split_url(url);
  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);

  auto backoff = retry.initial_backoff;
  std::string last_error = "no attempt made";
  const int attempts = std::max(1, retry.attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    try {
      httplib::Client client(target.origin);
      client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count());
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);
      auto res = client.Post(target.path, hdrs, body, content_type);
      if (!res) {
        last_error = "transport: " + httplib::to_string(res.error());
      } else if (res->status >= 500 || res->status == 429) {
        last_error = "status " + std::to_string(res->status);
      } else {
        return HttpResponse{res->status, res->body};
      }
    } catch (const std::exception& e) {
      last_error = e.what();
    }
    if (attempt < attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw TransportError("POST " + url + " failed after " + std::to_string(attempts) +
                       " attempts: " + last_error);
}

}  // namespace hsevo
