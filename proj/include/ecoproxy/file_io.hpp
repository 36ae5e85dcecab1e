// Copyright 2026 The ecoproxy Authors.
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

#ifndef ECOPROXY_FILE_IO_HPP_
#define ECOPROXY_FILE_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>

namespace ecoproxy {

// Throws kIo.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
void atomic_write_file(const std::filesystem::path& path, std::string_view contents);

// True when `dir` does not exist or exists and is empty.
bool directory_is_empty(const std::filesystem::path& dir);

}  // namespace ecoproxy

#endif  // ECOPROXY_FILE_IO_HPP_
