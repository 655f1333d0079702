#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace dosprop {

enum class Errc {
  EmptyInput,
  OutOfRange,
  NotANumber,
  TooSmall,
  BadAlpha,
  BadC,
  EmptySearchRange,
  DegenerateLambda,
  BadLambda,
  BadGrid,
  BadB,
  BadLevel,
  BadPi0,
  LengthMismatch,
  BadQuantileInput,
  BadScenario,
  BadModel,
  BadX,
  BadT,
  A2Violated,
  BadCValue,
  BadConfig,
  ParseError,
  IoError,
};

const char* errc_name(Errc code) noexcept;

// Every failure in the library is reported through this type. `index` carries
// the offending element (0-based) or the 1-based line number for parse errors.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(what), code_(code), index_(index) {}

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }
  bool is_io() const noexcept { return code_ == Errc::IoError; }

 private:
  Errc code_;
  std::optional<std::size_t> index_;
};

}  // namespace dosprop
