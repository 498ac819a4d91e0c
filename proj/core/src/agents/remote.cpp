#include <cstdlib>

#if defined(TABLETOP_HAVE_OPENSSL)
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "tabletop/agents/backend.hpp"
#include "tabletop/common/errors.hpp"

namespace tabletop::agents {

namespace {

struct ParsedUrl {
  std::string scheme;
  std::string host;
  int port;
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  ParsedUrl out;
  const size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(ErrorCode::ValidationError, "endpoint needs a scheme: '" + url + "'");
  out.scheme = url.substr(0, scheme_end);
  if (out.scheme != "http" && out.scheme != "https")
    throw Error(ErrorCode::ValidationError, "unsupported scheme '" + out.scheme + "'");
  const size_t host_start = scheme_end + 3;
  const size_t path_start = url.find('/', host_start);
  std::string authority =
      url.substr(host_start, path_start == std::string::npos ? std::string::npos
                                                             : path_start - host_start);
  out.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  const size_t colon = authority.rfind(':');
  if (colon != std::string::npos) {
    out.host = authority.substr(0, colon);
    try {
      out.port = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ValidationError, "bad port in endpoint '" + url + "'");
    }
  } else {
    out.host = authority;
    out.port = out.scheme == "https" ? 443 : 80;
  }
  if (out.host.empty())
    throw Error(ErrorCode::ValidationError, "endpoint has no host: '" + url + "'");
  return out;
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteBackendConfig config) : config_(std::move(config)) {
  const ParsedUrl url = parse_url(config_.endpoint);
  scheme_ = url.scheme;
  host_ = url.host;
  port_ = url.port;
  path_ = url.path;
#if !defined(TABLETOP_HAVE_OPENSSL)
  if (scheme_ == "https")
    throw Error(ErrorCode::ValidationError,
                "built without TLS support; use an http endpoint or rebuild with OpenSSL");
#endif
}

std::string RemoteBackend::complete(Role role, const CompletionRequest& request) {
  nlohmann::json body;
  body["model"] = config_.model;
  body["temperature"] = config_.temperature;
  body["messages"] = nlohmann::json::array(
      {{{"role", "system"},
        {"content", "You are the " + std::string(role_name(role)) +
                        " module of a robot control stack. Follow the requested output format "
                        "exactly, with no extra commentary."}},
       {{"role", "user"}, {"content", request.prompt}}});
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
      headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  auto run_once = [&](auto& client) -> httplib::Result {
    client.set_connection_timeout(static_cast<time_t>(config_.timeout_seconds),
                                  static_cast<time_t>(config_.timeout_seconds * 1e6) % 1000000);
    client.set_read_timeout(static_cast<time_t>(config_.timeout_seconds),
                            static_cast<time_t>(config_.timeout_seconds * 1e6) % 1000000);
    client.set_write_timeout(static_cast<time_t>(config_.timeout_seconds), 0);
    return client.Post(path_, headers, payload, "application/json");
  };

  std::string last_problem = "no attempts made";
  ErrorCode exhausted_code = ErrorCode::BackendTimeout;
  for (int attempt = 0; attempt < std::max(1, config_.max_attempts); ++attempt) {
    httplib::Result res = [&] {
#if defined(TABLETOP_HAVE_OPENSSL)
      if (scheme_ == "https") {
        httplib::SSLClient client(host_, port_);
        return run_once(client);
      }
#endif
      httplib::Client client(host_, port_);
      return run_once(client);
    }();

    if (!res) {
      last_problem = "transport failure: " + httplib::to_string(res.error());
      exhausted_code = ErrorCode::BackendTimeout;
      continue;  // connection problems are retryable
    }
    if (res->status >= 500) {
      last_problem = "server returned status " + std::to_string(res->status);
      exhausted_code = ErrorCode::BackendProtocol;
      continue;
    }
    if (res->status != 200)
      throw Error(ErrorCode::BackendProtocol, "completion endpoint returned status " +
                                                  std::to_string(res->status) + ": " + res->body);
    try {
      const auto reply = nlohmann::json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      // a flaky upstream can emit one bad body and recover; spend the budget
      last_problem = std::string("malformed completion response: ") + e.what();
      exhausted_code = ErrorCode::BackendProtocol;
      continue;
    }
  }
  throw Error(exhausted_code,
              "completion request failed after " + std::to_string(std::max(1, config_.max_attempts)) +
                  " attempts (" + last_problem + ")");
}

}  // namespace tabletop::agents
