#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace quatro {

/// Base class for all registration errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class EmptyCloud : public Error {
 public:
  explicit EmptyCloud(const std::string& msg = "empty point cloud") : Error(msg) {}
};

class InsufficientPoints : public Error {
 public:
  explicit InsufficientPoints(const std::string& msg = "not enough points") : Error(msg) {}
};

class EmptyCorrespondences : public Error {
 public:
  explicit EmptyCorrespondences(const std::string& msg = "no correspondences")
      : Error(msg) {}
};

class InsufficientCorrespondences : public Error {
 public:
  explicit InsufficientCorrespondences(
      const std::string& msg = "fewer correspondences than required")
      : Error(msg) {}
};

class IndexOutOfRange : public Error {
 public:
  explicit IndexOutOfRange(const std::string& msg = "correspondence index out of range")
      : Error(msg) {}
};

/// Rotation could not be estimated from the surviving measurements.
/// Carries the last valid yaw reached by the solver, when one exists,
/// as a diagnostic only.
class DegenerateRotation : public Error {
 public:
  explicit DegenerateRotation(const std::string& msg = "degenerate rotation",
                              std::optional<double> last_yaw = std::nullopt)
      : Error(msg), last_yaw_(last_yaw) {}
  std::optional<double> last_yaw() const { return last_yaw_; }

 private:
  std::optional<double> last_yaw_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

class SpecError : public Error {
 public:
  explicit SpecError(const std::string& msg) : Error(msg) {}
};

class EmptyReport : public Error {
 public:
  explicit EmptyReport(const std::string& msg = "no trial records") : Error(msg) {}
};

}  // namespace quatro
