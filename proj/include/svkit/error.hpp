// Copyright (c) 2026 The svkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SVKIT_ERROR_HPP
#define SVKIT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace svkit {

// Root of every error thrown by the toolkit. The CLI maps the subclasses
// onto process exit codes (see tools/commands.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or extent mismatch between tensors, layers, or feature maps.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid user configuration or violated precondition on inputs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Filesystem failure: missing file, unwritable directory, short write.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed on-disk content (bad magic, bad header, parse failure).
class FormatError : public Error {
 public:
  using Error::Error;
};

class UnsupportedEncodingError : public FormatError {
 public:
  using FormatError::FormatError;
};

class EmptyPayloadError : public FormatError {
 public:
  using FormatError::FormatError;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class TruncatedError : public FormatError {
 public:
  using FormatError::FormatError;
};

class ChecksumError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Text-format parse failure; `line` is 1-based (0 when not tied to a line).
class ParseError : public FormatError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : FormatError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DuplicateEntryError : public ParseError {
 public:
  using ParseError::ParseError;
};

// NaN/Inf encountered in a numeric pipeline.
class NumericError : public Error {
 public:
  using Error::Error;
};

// VAD removed every frame.
class NoSpeechError : public Error {
 public:
  using Error::Error;
};

// Score set cannot produce ROC metrics (e.g. no impostor trials).
class MetricPreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace svkit

#endif  // SVKIT_ERROR_HPP
