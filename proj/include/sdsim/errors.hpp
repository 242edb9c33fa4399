#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sdsim {

/// A configuration could not be loaded or violates an invariant. Each issue
/// names the offending key path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  explicit ConfigError(std::string issue) : ConfigError(std::vector<std::string>{std::move(issue)}) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class EmptySampleError : public std::domain_error {
 public:
  EmptySampleError() : std::domain_error("no trial reached contact") {}
};

}  // namespace sdsim
