// Copyright 2026 The privminer Authors
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

#pragma once

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <string>

namespace privminer {

using json = nlohmann::json;

/// Calls `fn(line_number, object)` for every non-blank line of a JSONL file.
/// Throws DataError naming the line on malformed JSON.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(std::size_t, const json&)>& fn);

/// Reads a whole file. Throws DataError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes a whole file, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& contents);

/// Appends one line (a trailing newline is added).
void append_line(const std::filesystem::path& path, const std::string& line);

} // namespace privminer
