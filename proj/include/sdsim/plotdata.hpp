#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdsim {

class LogFormatError : public std::runtime_error {
 public:
  LogFormatError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

/// Converts a JSON-lines trial log into plot-ready CSV with columns
/// `series,t,x,y`. Series are `visitee` (one point), `trajectory` (visitor
/// positions in time order) and `scan` (where a scan or call was made).
/// Throws LogFormatError naming the first bad line.
std::string plotdata_csv(std::string_view jsonl);

}  // namespace sdsim
