#pragma once

// Single-shot transport to an OpenAI-compatible chat-completion endpoint.
// The reply text is returned verbatim and never interpreted.

#include <chrono>
#include <string>
#include <string_view>

#include <httplib.h>
// <resolv.h>, pulled in above, defines _res as a macro; Eigen uses it as a
// parameter name.
#undef _res
#include <nlohmann/json.hpp>

#include "ocad/error.hpp"
#include "ocad/prompts.hpp"

namespace ocad {

struct LlmEndpoint {
  // Full URL of the chat-completions resource, e.g.
  // "https://api.openai.com/v1/chat/completions".
  std::string url;
  std::string api_key;
  std::string model = "gpt-4-turbo";
  std::chrono::milliseconds timeout{60000};
};

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::kInvalidArgument, "endpoint URL lacks a scheme: '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

inline std::string llm_oracle(const LlmEndpoint& endpoint, std::string_view prompt,
                              std::string_view preamble = prompts::kFeatureTablePreamble) {
  const ParsedUrl url = split_url(endpoint.url);
  httplib::Client client(url.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  nlohmann::json body = {
      {"model", endpoint.model},
      {"messages",
       {{{"role", "system"}, {"content", std::string(preamble)}},
        {{"role", "user"}, {"content", std::string(prompt)}}}}};
  httplib::Headers headers;
  if (!endpoint.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint.api_key);
  }
  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::Write ||
        err == httplib::Error::ConnectionTimeout) {
      throw Error(ErrorKind::kTimeout, "no complete reply from " + endpoint.url +
                                           " within " +
                                           std::to_string(endpoint.timeout.count()) + " ms");
    }
    throw Error(ErrorKind::kIo, "request to " + endpoint.url + " failed: " +
                                    httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) throw HttpError(res->status, res->body);

  try {
    const auto reply = nlohmann::json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kResponseSchema,
                std::string("unexpected chat-completion reply: ") + e.what());
  }
}

}  // namespace ocad
