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

#ifndef COOPDRIVE__ENDPOINT_HPP_
#define COOPDRIVE__ENDPOINT_HPP_

#include <stdexcept>
#include <string>

namespace coopdrive
{

class EndpointError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct EndpointConfig
{
  std::string url = "http://127.0.0.1:8000/generate";
  int timeout_ms = 5000;
  std::string model_name = "default";
  int max_retries = 1;
  int max_tokens = 64;

  void validate() const;
};

/// Text-completion transport used by the language-model negotiator, summarizer
/// and judge.
class EndpointClient
{
public:
  virtual ~EndpointClient() = default;
  virtual std::string complete(const std::string & prompt) = 0;
};

/// POST {model, prompt, max_tokens, temperature: 0} -> {text}.
/// Retries up to max_retries times after the first attempt, then throws.
class HttpEndpointClient : public EndpointClient
{
public:
  explicit HttpEndpointClient(EndpointConfig cfg);
  std::string complete(const std::string & prompt) override;

  const EndpointConfig & config() const { return cfg_; }

private:
  EndpointConfig cfg_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
};

/// JSON body sent for a prompt; exposed for tests.
std::string make_request_body(const EndpointConfig & cfg, const std::string & prompt);

}  // namespace coopdrive

#endif  // COOPDRIVE__ENDPOINT_HPP_
