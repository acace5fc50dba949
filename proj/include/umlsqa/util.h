// Copyright 2026 The umlsqa Authors.
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

#ifndef UMLSQA_UTIL_H_
#define UMLSQA_UTIL_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace umlsqa {

// Lowercase hex SHA-256 of the bytes in `data`.
std::string Sha256Hex(std::string_view data);

std::string Trim(std::string_view s);
std::string ToLowerAscii(std::string_view s);

// Whole-file read. Throws StorageError if the file cannot be opened.
std::string ReadFile(const std::filesystem::path& path);

// Writes to a sibling temp file and renames over `path`, so readers see either
// the old or the new contents, never a torn write.
// `mode`, if given, is applied before any byte is written.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view data,
                     std::optional<std::filesystem::perms> mode = std::nullopt);

// UTC, second resolution, e.g. "2026-10-15T08:30:00Z".
std::string NowIso8601();

}  // namespace umlsqa

#endif  // UMLSQA_UTIL_H_
