#pragma once

#include <stdexcept>
#include <string>

namespace srsg {

// Invalid experiment or simulator configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (bad index, shape mismatch, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed input file. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                                : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Numerical failure during optimisation (non-finite gradient or ratio).
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A local simulator was stepped past the end of its context trajectory.
class EpisodeExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool cond, const char* msg) {
  if (!cond) throw ContractError(msg);
}
}  // namespace detail

}  // namespace srsg
