#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace thermosense::cli {

/// Bad user input (flags, config file, grids). Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "a,b,c" or an inclusive range "start:stop:step" (step > 0). The range is
/// generated as start + i*step so grid points do not accumulate rounding.
std::vector<double> parse_grid(const std::string& text, const std::string& name);
std::vector<int> parse_int_grid(const std::string& text, const std::string& name);

/// Calls fn(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace thermosense::cli
