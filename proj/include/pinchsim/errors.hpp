#pragma once

#include <stdexcept>
#include <string>

namespace pinchsim {

// Invalid physical parameter (non-positive frequency, bad noise power, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Geometric precondition violated (point off a waveguide, bad region, ...).
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A waveguide cannot host the requested number of antennas.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(const std::string& what, int feasible)
      : std::runtime_error(what), max_feasible_antennas(feasible) {}
  int max_feasible_antennas;
};

// No feasible placement exists for the requested constraint set.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double range_lo, double range_hi)
      : std::runtime_error(what), achievable_lo(range_lo), achievable_hi(range_hi) {}
  double achievable_lo;
  double achievable_hi;
};

// Rank-deficient channel matrix handed to a beamformer that needs full rank.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every cell of a location search was degenerate.
class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed scenario configuration; carries the offending key path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::string path = "")
      : std::runtime_error(path.empty() ? what : what + " (at key '" + path + "')"),
        key_path(std::move(path)) {}
  std::string key_path;
};

}  // namespace pinchsim
