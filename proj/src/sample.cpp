#include "dosprop/sample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dosprop/error.hpp"

namespace dosprop {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::NotANumber: return "NotANumber";
    case Errc::TooSmall: return "TooSmall";
    case Errc::BadAlpha: return "BadAlpha";
    case Errc::BadC: return "BadC";
    case Errc::EmptySearchRange: return "EmptySearchRange";
    case Errc::DegenerateLambda: return "DegenerateLambda";
    case Errc::BadLambda: return "BadLambda";
    case Errc::BadGrid: return "BadGrid";
    case Errc::BadB: return "BadB";
    case Errc::BadLevel: return "BadLevel";
    case Errc::BadPi0: return "BadPi0";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::BadQuantileInput: return "BadQuantileInput";
    case Errc::BadScenario: return "BadScenario";
    case Errc::BadModel: return "BadModel";
    case Errc::BadX: return "BadX";
    case Errc::BadT: return "BadT";
    case Errc::A2Violated: return "A2Violated";
    case Errc::BadCValue: return "BadCValue";
    case Errc::BadConfig: return "BadConfig";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

PValueSample PValueSample::from(std::span<const double> values) {
  if (values.empty()) {
    throw Error(Errc::EmptyInput, "p-value sample is empty");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (std::isnan(v)) {
      throw Error(Errc::NotANumber, "p-value at index " + std::to_string(i) + " is NaN", i);
    }
    if (v < 0.0 || v > 1.0) {
      throw Error(Errc::OutOfRange,
                  "p-value at index " + std::to_string(i) + " is outside [0,1]: " + std::to_string(v), i);
    }
  }

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // stable: equal p-values keep their input order
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> sorted(values.size());
  for (std::size_t k = 0; k < order.size(); ++k) sorted[k] = values[order[k]];
  return PValueSample(std::move(sorted), std::move(order));
}

PValueSample validate_sample(std::span<const double> values) { return PValueSample::from(values); }

}  // namespace dosprop
