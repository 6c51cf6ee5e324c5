#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace autolabel {

// Exit-code classes used by the CLI: DataError -> 2, NumericError -> 3.
// Usage errors are handled by the argument parser and map to 1.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : Error {
  using Error::Error;
};

struct NumericError : Error {
  using Error::Error;
};

struct MalformedLine : DataError {
  explicit MalformedLine(std::size_t line_no, const std::string& what = "")
      : DataError("malformed line " + std::to_string(line_no) +
                  (what.empty() ? "" : ": " + what)) {}
};

struct UnknownLabel : DataError {
  explicit UnknownLabel(std::size_t line_no, const std::string& label)
      : DataError("unknown label '" + label + "' at line " + std::to_string(line_no)) {}
};

struct EmptyFile : DataError {
  explicit EmptyFile(const std::string& path) : DataError("empty file: " + path) {}
};

struct EmptyDataset : DataError {
  EmptyDataset() : DataError("dataset is empty") {}
};

struct OverlappingVocab : DataError {
  explicit OverlappingVocab(const std::string& word)
      : DataError("keyword lists overlap on '" + word + "'") {}
};

struct BadScore : DataError {
  explicit BadScore(std::size_t line_no, const std::string& what)
      : DataError("bad score at line " + std::to_string(line_no) + ": " + what) {}
};

struct UnknownMethod : DataError {
  explicit UnknownMethod(const std::string& name)
      : DataError("unknown labelling method '" + name + "'") {}
};

struct EmptyCorpus : DataError {
  EmptyCorpus() : DataError("token corpus is empty") {}
};

struct EmptyTrainSet : DataError {
  EmptyTrainSet() : DataError("training set is empty") {}
};

struct DimensionMismatch : DataError {
  explicit DimensionMismatch(std::size_t line_no, std::size_t got, std::size_t want)
      : DataError("embedding line " + std::to_string(line_no) + " has " +
                  std::to_string(got) + " values, expected " + std::to_string(want)) {}
};

struct LengthMismatch : DataError {
  LengthMismatch(std::size_t a, std::size_t b)
      : DataError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

struct EmptyMatrix : DataError {
  EmptyMatrix() : DataError("confusion matrix has zero total") {}
};

struct MissingLabels : DataError {
  explicit MissingLabels(const std::string& source, const std::string& id)
      : DataError("instance '" + id + "' has no '" + source + "' label") {}
};

struct ConfigViolation : DataError {
  using DataError::DataError;
};

struct BadDropoutScheduleLength : ConfigViolation {
  BadDropoutScheduleLength(std::size_t got, std::size_t want)
      : ConfigViolation("dropout schedule has " + std::to_string(got) +
                        " rates, architecture needs " + std::to_string(want)) {}
};

struct ShapeMismatch : NumericError {
  explicit ShapeMismatch(const std::string& what) : NumericError("shape mismatch: " + what) {}
};

struct NoCachedForward : NumericError {
  explicit NoCachedForward(const std::string& layer)
      : NumericError("backward called before forward on " + layer) {}
};

struct MissingGradients : NumericError {
  explicit MissingGradients(const std::string& param)
      : NumericError("optimizer step with unpopulated gradient for " + param) {}
};

struct NonFiniteValue : NumericError {
  explicit NonFiniteValue(const std::string& where)
      : NumericError("non-finite value in " + where) {}
};

}  // namespace autolabel
