#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace isoplete {

// Invalid numeric data passed to a kernel (non-finite entries, empty input, ...).
struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Exhaustive enumeration would exceed the configured subset budget.
struct BudgetExceededError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A definition's precondition does not hold (e.g. an empty sampling-set line).
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed input file.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// splitmix64-style mixing; used to derive independent per-cell/per-trial seeds
// from (global seed, coordinates) so parallel schedules cannot change results.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                       std::uint64_t d = 0);

// Deterministic random stream. mt19937_64 plus explicit conversions, because
// the std:: distributions are implementation-defined and would break
// bit-reproducibility across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }
  double uniform();                  // [0, 1)
  double normal();                   // standard normal, Box-Muller
  int uniform_int(int lo, int hi);   // inclusive bounds

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Number of worker threads: ISOPLETE_THREADS if set (>=1), else hardware count.
int thread_budget();

// Runs body(0..count-1) on up to thread_budget() threads. Each index owns its
// output slot, so results are schedule-independent.
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace isoplete
