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

#include <stdexcept>
#include <string>

namespace mvpo {

// Process exit codes used by the command-line tool. Each error class below
// carries the code it maps to.
enum class ExitCode : int {
    Ok = 0,
    Usage = 1,
    Io = 2,
    MalformedStream = 3,
    Capacity = 4,
};

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual ExitCode exit_code() const noexcept = 0;
};

class UsageError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::Usage; }
};

class IoError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::Io; }
};

enum class StreamErrorKind {
    BadMagic,
    UnknownVersion,
    Truncated,
    RecordCountMismatch,
    FieldRange,
    RecordOrder,
    MvOverflow,
    BadInput,
};

inline const char* to_string(StreamErrorKind kind)
{
    switch (kind) {
    case StreamErrorKind::BadMagic: return "bad magic";
    case StreamErrorKind::UnknownVersion: return "unknown version";
    case StreamErrorKind::Truncated: return "truncated";
    case StreamErrorKind::RecordCountMismatch: return "record count mismatch";
    case StreamErrorKind::FieldRange: return "field out of range";
    case StreamErrorKind::RecordOrder: return "record out of order";
    case StreamErrorKind::MvOverflow: return "motion vector overflow";
    case StreamErrorKind::BadInput: return "malformed input";
    }
    return "unknown";
}

// Malformed stream or malformed encoder input. The kind distinguishes the
// failure so callers and tests can tell truncation from a bad field.
class MalformedStream : public Error {
public:
    MalformedStream(StreamErrorKind kind, const std::string& detail)
        : Error(std::string(to_string(kind)) + ": " + detail), kind_(kind)
    {
    }

    StreamErrorKind kind() const noexcept { return kind_; }
    ExitCode exit_code() const noexcept override { return ExitCode::MalformedStream; }

private:
    StreamErrorKind kind_;
};

class CapacityError : public Error {
public:
    CapacityError(const std::string& what, double achievable_bpap)
        : Error(what), achievable_bpap_(achievable_bpap)
    {
    }

    double achievable_bpap() const noexcept { return achievable_bpap_; }
    ExitCode exit_code() const noexcept override { return ExitCode::Capacity; }

private:
    double achievable_bpap_;
};

} // namespace mvpo
