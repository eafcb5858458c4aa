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

#ifndef COOPDRIVE__PROMPTS_HPP_
#define COOPDRIVE__PROMPTS_HPP_

#include "coopdrive/negotiators.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace coopdrive
{

/// Raw template text, placeholders unfilled.
std::string_view prompt_template(PromptKind kind);

/// Placeholder tokens a template requires. Braces that are not listed here
/// (JSON examples inside the text) are literal.
const std::vector<std::string> & prompt_placeholders(PromptKind kind);

/// Replaces every listed placeholder. Throws NegotiatorError when a value is
/// missing.
std::string fill_template(
  std::string_view tmpl, const std::vector<std::string> & placeholders,
  const std::map<std::string, std::string> & values);

}  // namespace coopdrive

#endif  // COOPDRIVE__PROMPTS_HPP_
