#include "grid.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace thermosense::cli {

namespace {

double to_double(const std::string& s, const std::string& name) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && *b == ' ') ++b;
  while (e > b && e[-1] == ' ') --e;
  const auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || b == e || !std::isfinite(v))
    throw ConfigError("--" + name + ": '" + s + "' is not a number");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text, const std::string& name) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("--" + name + ": range must be start:stop:step");
    const double a = to_double(parts[0], name);
    const double b = to_double(parts[1], name);
    const double step = to_double(parts[2], name);
    if (!(step > 0.0)) throw ConfigError("--" + name + ": range step must be positive");
    if (b < a) throw ConfigError("--" + name + ": range stop is below start");
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
    if (n > 1000000) throw ConfigError("--" + name + ": range has too many points");
    for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
  } else {
    for (const auto& p : split(text, ',')) out.push_back(to_double(p, name));
  }
  if (out.empty()) throw ConfigError("--" + name + ": empty grid");
  return out;
}

std::vector<int> parse_int_grid(const std::string& text, const std::string& name) {
  std::vector<int> out;
  for (double v : parse_grid(text, name)) {
    if (v != std::floor(v) || std::abs(v) > 2e9)
      throw ConfigError("--" + name + ": '" + std::to_string(v) + "' is not an integer");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace thermosense::cli
