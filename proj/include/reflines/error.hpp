#pragma once

#include <stdexcept>
#include <string>

namespace reflines {

/// Broad failure category. The CLI maps each category to a fixed exit code.
enum class ErrorKind {
  Usage,
  Config,
  Corpus,
  Model,
  Io,
  Training,
  Decode,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace reflines
