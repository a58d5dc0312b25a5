// Copyright 2026 The dpnash Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPNASH_IO_H_
#define DPNASH_IO_H_

#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpnash {

// Writes to a sibling temp file, then renames over `path`.
absl::Status WriteFileAtomic(const std::string& path, std::string_view content);

absl::StatusOr<std::string> ReadFile(const std::string& path);

// Lower-case hex SHA-256 of `content`.
std::string Sha256Hex(std::string_view content);

}  // namespace dpnash

#endif  // DPNASH_IO_H_
