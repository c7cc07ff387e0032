#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace osim {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied configuration (sizes, hyperparameters, config files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent data (CSV parse failures, empty subsets, dimension mismatch).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(std::size_t epoch, const std::string& what)
      : Error(what), epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

/// Wraps an error raised while executing one trial.
class TrialError : public Error {
 public:
  TrialError(std::size_t trial_index, const std::string& what)
      : Error("trial " + std::to_string(trial_index) + ": " + what),
        trial_index_(trial_index) {}
  std::size_t trial_index() const noexcept { return trial_index_; }

 private:
  std::size_t trial_index_;
};

}  // namespace osim
