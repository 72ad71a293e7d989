// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lemas {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller-supplied parameters (out-of-range scalar, length mismatch, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input data is unusable: corrupt manifest, unmappable text, bad file.
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

/// A manifest line that does not match the record schema.
class SchemaError : public DataError {
 public:
  SchemaError(std::size_t line, std::string field, const std::string& what)
      : DataError("line " + std::to_string(line) + ": field \"" + field + "\": " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// A record that breaks one of the record invariants.
class ValidationError : public DataError {
 public:
  ValidationError(std::string key, std::string reason)
      : DataError("record \"" + key + "\": " + reason), key_(std::move(key)), reason_(std::move(reason)) {}

  const std::string& key() const noexcept { return key_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string key_;
  std::string reason_;
};

/// A stage received a record missing something it requires (not a filter fail).
class BadInput : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientData : public DataError {
 public:
  using DataError::DataError;
};

/// The label sequence cannot be fit into the available frames.
class InfeasibleAlignment : public DataError {
 public:
  using DataError::DataError;
};

class UnknownCharacter : public DataError {
 public:
  UnknownCharacter(char32_t cp, const std::string& what) : DataError(what), code_point_(cp) {}
  char32_t code_point() const noexcept { return code_point_; }

 private:
  char32_t code_point_;
};

/// A pipeline stage aborted; carries the stage name and the offending key.
class StageError : public Error {
 public:
  StageError(std::string stage, std::string key, const std::string& what)
      : Error("stage " + stage + (key.empty() ? "" : " [" + key + "]") + ": " + what),
        stage_(std::move(stage)),
        key_(std::move(key)) {}

  const std::string& stage() const noexcept { return stage_; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::string stage_;
  std::string key_;
};

}  // namespace lemas
