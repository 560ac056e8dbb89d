#pragma once

#include <stdexcept>
#include <string>

namespace roiprep {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or truncated file content (SMAP, EMB1, PPM, lexicon, manifest).
class FormatError : public Error {
 public:
  using Error::Error;
};

// A parameter or configuration value outside its documented range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Shapes of two operands disagree (maps, embeddings).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Any other failure inside a pipeline stage; carries the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace roiprep
