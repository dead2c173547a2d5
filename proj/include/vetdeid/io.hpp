// Copyright 2026 The vetdeid Authors.
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

#ifndef VETDEID_IO_HPP_
#define VETDEID_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vetdeid::io {

std::string ReadFile(const std::filesystem::path& path);
std::vector<std::string> ReadLines(const std::filesystem::path& path);

// Writes to "<path>.tmp.<pid>" and renames over `path`, so readers never see
// a partially written file.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view content);

}  // namespace vetdeid::io

#endif  // VETDEID_IO_HPP_
