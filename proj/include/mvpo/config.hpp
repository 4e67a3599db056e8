/*
Copyright 2026 The mvpo Authors
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
you may obtain a copy of the License at

                http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

// Plain-text key=value configuration. '#' starts a comment, blank lines are
// ignored and keys may repeat (order is kept).

#include <charconv>
#include <exception>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "file_io.hpp"

namespace mvpo {

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        const std::string part = trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (!part.empty())
            parts.push_back(part);
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return parts;
}

inline ConfigEntries parse_config(std::string_view text)
{
    ConfigEntries out;
    for (const std::string& raw : split(text, '\n')) {
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line '" + line + "' is not key=value");
        std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty())
            throw UsageError("config line '" + line + "' has an empty key");
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

inline ConfigEntries read_config_file(const std::filesystem::path& path)
{
    const auto bytes = read_file_bytes(path);
    return parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

template <typename T>
T parse_number(std::string_view text, std::string_view what)
{
    const std::string s = trim(text);
    T value{};
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if constexpr (std::is_floating_point_v<T>) {
        // std::from_chars for floating point is missing from older libstdc++.
        std::size_t used = 0;
        try {
            value = static_cast<T>(std::stod(s, &used));
        } catch (const std::exception&) {
            used = std::string::npos;
        }
        if (used != s.size() || s.empty())
            throw UsageError("invalid number '" + s + "' for " + std::string(what));
    } else {
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last || s.empty())
            throw UsageError("invalid integer '" + s + "' for " + std::string(what));
    }
    return value;
}

template <typename T>
std::vector<T> parse_number_list(std::string_view text, std::string_view what)
{
    std::vector<T> out;
    for (const std::string& part : split(text, ','))
        out.push_back(parse_number<T>(part, what));
    return out;
}

} // namespace mvpo
