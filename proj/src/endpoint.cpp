// Copyright 2026 The coopdrive Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "coopdrive/endpoint.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

namespace coopdrive
{

void EndpointConfig::validate() const
{
  if (timeout_ms <= 0) {
    throw EndpointError("endpoint timeout must be positive");
  }
  if (max_retries < 0) {
    throw EndpointError("endpoint max_retries must be non-negative");
  }
  if (url.rfind("http://", 0) != 0 && url.rfind("https://", 0) != 0) {
    throw EndpointError(fmt::format("endpoint url '{}' must start with http:// or https://", url));
  }
}

std::string make_request_body(const EndpointConfig & cfg, const std::string & prompt)
{
  nlohmann::json body{
    {"model", cfg.model_name},
    {"prompt", prompt},
    {"max_tokens", cfg.max_tokens},
    {"temperature", 0},
  };
  return body.dump();
}

HttpEndpointClient::HttpEndpointClient(EndpointConfig cfg) : cfg_(std::move(cfg))
{
  cfg_.validate();
  const auto scheme_end = cfg_.url.find("://") + 3;
  const auto path_start = cfg_.url.find('/', scheme_end);
  origin_ = cfg_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : cfg_.url.substr(path_start);
}

std::string HttpEndpointClient::complete(const std::string & prompt)
{
  const std::string body = make_request_body(cfg_, prompt);
  const auto timeout_s = cfg_.timeout_ms / 1000;
  const auto timeout_us = (cfg_.timeout_ms % 1000) * 1000;
  std::string last_error;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    httplib::Client client(origin_);
    client.set_connection_timeout(timeout_s, timeout_us);
    client.set_read_timeout(timeout_s, timeout_us);
    client.set_write_timeout(timeout_s, timeout_us);
    auto res = client.Post(path_, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = fmt::format("HTTP {}", res->status);
      continue;
    }
    try {
      const auto reply = nlohmann::json::parse(res->body);
      return reply.at("text").get<std::string>();
    } catch (const nlohmann::json::exception & e) {
      last_error = fmt::format("malformed reply: {}", e.what());
    }
  }
  throw EndpointError(fmt::format(
    "endpoint {} failed after {} attempt(s): {}", cfg_.url, cfg_.max_retries + 1, last_error));
}

}  // namespace coopdrive
