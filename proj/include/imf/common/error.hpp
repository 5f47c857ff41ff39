#pragma once

#include <stdexcept>
#include <string>

namespace imf {

/// Every failure raised by the toolkit carries the pipeline stage that produced it
/// so the CLI can emit stage-tagged diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Bad caller-supplied value (negative strength, empty bank, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Mismatched shapes: vocabularies, orders, empty distributions.
class StructuralError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Model file or content hash does not match what the caller expected.
class IdentityError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace imf
