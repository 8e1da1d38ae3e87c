/*
 * Copyright (C) 2026 The sphlight Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace sphlight {

/// File access or file-format failure. Carries the offending path and, when
/// known, the byte offset where decoding stopped.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
    IoError(const std::string& path, const std::string& what,
            std::optional<std::uint64_t> offset = std::nullopt)
        : std::runtime_error(format(path, what, offset)), path_(path), offset_(offset) {}

    const std::string& path() const noexcept { return path_; }
    std::optional<std::uint64_t> offset() const noexcept { return offset_; }

private:
    static std::string format(const std::string& path, const std::string& what,
                              std::optional<std::uint64_t> offset) {
        std::string msg = path + ": " + what;
        if (offset) msg += " (at byte " + std::to_string(*offset) + ")";
        return msg;
    }

    std::string path_;
    std::optional<std::uint64_t> offset_;
};

/// Numerical failure: singular systems, divergence, undefined metric scale.
class ComputeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sphlight
