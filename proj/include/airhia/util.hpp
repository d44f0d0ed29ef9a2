// Copyright (c) 2026 airhia contributors.
// All rights reserved.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace airhia {

std::string to_lower(std::string_view text);

std::string_view trim(std::string_view text);

/// Split on a single-character delimiter; empty fields preserved.
std::vector<std::string> split(std::string_view text, char delim);

bool iequals(std::string_view a, std::string_view b);

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double value);

bool all_digits(std::string_view text);

}  // namespace airhia
