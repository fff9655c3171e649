#pragma once

#include <threeprimes/numtheory.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace threeprimes::ternary {

// Primality flags on [lo, hi] by a segmented sieve of Eratosthenes.
class PrimeFlags {
public:
  PrimeFlags(u64 lo, u64 hi);
  u64 lo() const { return lo_; }
  u64 hi() const { return hi_; }
  bool operator()(u64 n) const { return n >= lo_ && n <= hi_ && flags_[n - lo_]; }

private:
  u64 lo_;
  u64 hi_;
  std::vector<std::uint8_t> flags_;
};

// Summands range over [ceil(n/3) - H, floor(n/3) + H], clipped at 2.
struct Window {
  u64 lo = 0;
  u64 hi = 0;  // inclusive; empty when lo > hi
};
Window summand_window(u64 n, u64 H);

// Ordered triples of primes in the window summing to n, by FFT pair convolution.
// Requires n odd, n >= 9. The flags overload needs the window inside the flags.
u64 count_representations(u64 n, u64 H);
u64 count_representations(const PrimeFlags& primes, u64 n, u64 H);

// A triple with p1 <= p2 <= p3 in the window, if any.
std::optional<std::array<u64, 3>> find_representation(const PrimeFlags& primes, u64 n, u64 H);

// Smallest H with a representation (doubling, then bisection). H <= n/3.
u64 min_window(u64 n);
u64 min_window(const PrimeFlags& primes, u64 n);

struct RepresentationStats {
  u64 n = 0;
  u64 H = 0;
  u64 count = 0;
  u64 H_min = 0;
  double theta_min = 0.0;  // log(max(H_min, 1)) / log n
  std::array<u64, 3> witness{};  // a triple at H_min
};

struct ScanReport {
  u64 lo = 0;
  u64 hi = 0;
  double theta = 0.0;
  std::vector<RepresentationStats> rows;  // one per odd n, H = ceil(n^theta)
  std::vector<u64> failures;              // n with no representation at H
  double max_theta_min = 0.0;
  u64 argmax_theta_min = 0;
  std::vector<std::size_t> histogram;     // theta_min in equal bins over [0, 1)
};

// Odd n in [lo, hi] with n >= 9; even n are skipped.
ScanReport scan_range(u64 lo, u64 hi, double theta, std::size_t bins = 20);

struct SingularSeries {
  double value = 0.0;
  double upper = 0.0;  // value times the tail bound over p > cap
  u64 cap = 0;
};

// prod_{p | n} (1 - (p-1)^-2) prod_{p not dividing n, p <= cap} (1 + (p-1)^-3)
SingularSeries singular_series(u64 n, u64 cap = 1'000'000);

struct Prediction {
  double value = 0.0;
  double series = 0.0;
  bool in_range = true;  // H >= log^2 n; below that the model is not meaningful
};

// S(n) 3 H^2 / log^3(n/3)
Prediction predicted_count(u64 n, u64 H, u64 cap = 1'000'000);

} // namespace threeprimes::ternary
