#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace catena {

// Error taxonomy shared by all modules. Everything derives from
// std::runtime_error so callers can catch coarsely or by kind.

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BasinError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProjectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Chain graph of a gluing step split into components.
class PartitionError : public std::runtime_error {
 public:
  PartitionError(const std::string& what,
                 std::vector<std::vector<std::size_t>> components)
      : std::runtime_error(what), components_(std::move(components)) {}
  const std::vector<std::vector<std::size_t>>& components() const {
    return components_;
  }

 private:
  std::vector<std::vector<std::size_t>> components_;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double last_valid_time)
      : std::runtime_error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const { return last_valid_time_; }

 private:
  double last_valid_time_;
};

class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, double exit_time)
      : std::runtime_error(what), exit_time_(exit_time) {}
  double exit_time() const { return exit_time_; }

 private:
  double exit_time_;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string field)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace catena
