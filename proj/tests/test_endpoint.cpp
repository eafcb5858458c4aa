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

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <thread>

using namespace coopdrive;

namespace
{

/// Local model server that fails the first `failures` requests.
class FakeServer
{
public:
  explicit FakeServer(int failures) : failures_(failures)
  {
    server_.Post("/generate", [this](const httplib::Request & req, httplib::Response & res) {
      last_body = req.body;
      if (calls.fetch_add(1) < failures_) {
        res.status = 503;
        return;
      }
      const auto body = nlohmann::json::parse(req.body);
      res.set_content(
        nlohmann::json{{"text", "echo: " + body.at("prompt").get<std::string>()}}.dump(),
        "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer()
  {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/generate"; }

  std::atomic<int> calls{0};
  std::string last_body;

private:
  int failures_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST(Endpoint, RequestBodyShape)
{
  EndpointConfig cfg;
  cfg.model_name = "m";
  cfg.max_tokens = 32;
  const auto body = nlohmann::json::parse(make_request_body(cfg, "hi"));
  EXPECT_EQ(body, (nlohmann::json{{"model", "m"}, {"prompt", "hi"}, {"max_tokens", 32},
                                  {"temperature", 0}}));
}

TEST(Endpoint, ConfigValidation)
{
  EndpointConfig cfg;
  cfg.timeout_ms = 0;
  EXPECT_THROW(cfg.validate(), EndpointError);
  cfg = {};
  cfg.url = "ftp://x";
  EXPECT_THROW(HttpEndpointClient{cfg}, EndpointError);
}

TEST(Endpoint, RoundTripThroughLocalServer)
{
  FakeServer server(0);
  EndpointConfig cfg;
  cfg.url = server.url();
  cfg.timeout_ms = 2000;
  HttpEndpointClient client(cfg);
  EXPECT_EQ(client.complete("ping"), "echo: ping");
  EXPECT_EQ(server.calls.load(), 1);
  EXPECT_EQ(nlohmann::json::parse(server.last_body).at("temperature"), 0);
}

TEST(Endpoint, RetriesThenSucceeds)
{
  FakeServer server(1);
  EndpointConfig cfg;
  cfg.url = server.url();
  cfg.max_retries = 1;
  HttpEndpointClient client(cfg);
  EXPECT_EQ(client.complete("x"), "echo: x");
  EXPECT_EQ(server.calls.load(), 2);
}

TEST(Endpoint, GivesUpAfterMaxRetries)
{
  FakeServer server(5);
  EndpointConfig cfg;
  cfg.url = server.url();
  cfg.max_retries = 2;
  HttpEndpointClient client(cfg);
  EXPECT_THROW(client.complete("x"), EndpointError);
  EXPECT_EQ(server.calls.load(), 3);
}

TEST(Endpoint, UnreachableServerFails)
{
  EndpointConfig cfg;
  cfg.url = "http://127.0.0.1:1/generate";
  cfg.timeout_ms = 200;
  cfg.max_retries = 0;
  HttpEndpointClient client(cfg);
  EXPECT_THROW(client.complete("x"), EndpointError);
}
