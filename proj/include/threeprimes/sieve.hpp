#pragma once

#include <threeprimes/numtheory.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace threeprimes::sieve {

struct PrimePower {
  u64 p = 0;
  unsigned e = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

using Factorization = std::span<const PrimePower>;

// Which primes make up P(y): those < y (strict) or those <= y (inclusive).
enum class Convention { strict, inclusive };

inline constexpr std::size_t kMaxSegment = std::size_t{1} << 24;

// Primality and full factorization for every n in [lo, hi). Immutable once
// built; safe for concurrent reads.
class PrimeWindow {
public:
  PrimeWindow() = default;

  u64 lo() const { return lo_; }
  u64 hi() const { return hi_; }
  std::size_t size() const { return static_cast<std::size_t>(hi_ - lo_); }
  bool contains(u64 n) const { return n >= lo_ && n < hi_; }

  bool is_prime(u64 n) const;
  // Prime factors in increasing order.
  Factorization factors(u64 n) const;

private:
  friend PrimeWindow sieve_window(u64 lo, u64 hi, std::size_t max_len);

  u64 lo_ = 0;
  u64 hi_ = 0;
  std::vector<std::uint8_t> is_prime_;
  std::vector<std::uint32_t> offsets_;  // size() + 1 entries
  std::vector<PrimePower> factors_;
};

// Sieves [lo, hi) with all primes <= sqrt(hi) and records every factorization.
// Requires 2 <= lo < hi <= 2^63 - 1 and hi - lo <= max_len; a larger window
// must be split by the caller (std::length_error).
PrimeWindow sieve_window(u64 lo, u64 hi, std::size_t max_len = kMaxSegment);

// rho(n, y) = 1 iff gcd(n, P(y)) = 1.
bool rho(Factorization n, u64 y, Convention conv = Convention::strict);

struct SieveParams {
  u64 x = 0;
  double theta = 0.0;
  u64 z = 0;             // default floor(x^(1/10))
  u64 y4 = 0;            // default floor(x^(1/4))
  u64 omega_cutoff = 0;  // default floor(exp((log x)^(9/10)))
  u64 w = 0;             // default floor(0.1 log log x)
  u64 W = 1;             // product of primes <= w
  Convention convention = Convention::strict;

  static SieveParams defaults(u64 x, double theta);
  // Throws std::invalid_argument unless 2 <= z < y4 < x and W is the
  // squarefree product of primes <= w.
  void validate() const;
  // Sets w and recomputes W.
  void set_w(u64 new_w);

  double x_pow_theta() const;
};

// rho+(n) = rho(n, y4) + sum over n = p1 p2 p3 m, z < p1 < p2 < p3 < y4, of rho(m, p1).
u64 rho_plus(Factorization n, const SieveParams& params);

struct MajorantEntry {
  u64 n = 0;
  bool rho = false;  // primality
  u64 rho_plus = 0;
};

// (n, rho(n), rho+(n)) for n in [lo, hi). The window must sit inside
// [x - x^theta, x + 2 x^theta].
std::vector<MajorantEntry> majorant_window(const SieveParams& params, u64 lo, u64 hi);

// Counts n in the window violating
//   rho(n, z) = rho(n, w) - sum_{p | n, p in [w, z)} rho(n/p, p)
// (p in (w, z] under the inclusive convention). Requires 2 <= w <= z.
std::size_t buchstab_identity_check(const PrimeWindow& window, u64 w, u64 z,
                                    Convention conv = Convention::strict);

struct ErrorScan {
  u64 omega_cutoff = 0;
  u64 divisor_limit = 0;  // d < divisor_limit, i.e. x^eps
  double total_abs = 0.0;
  double ratio = 0.0;  // total_abs / window length
  std::map<std::int64_t, std::size_t> histogram;  // eps(n) value -> count
};

// eps(n) = rho(n, omega) - sum_{d | n, d < D, d | P(omega)} mu(d), i.e. the
// fundamental-lemma truncation error with a_m = 1_{m=1}.
std::int64_t fundamental_error(Factorization n, u64 omega_cutoff, u64 divisor_limit,
                               Convention conv = Convention::strict);
ErrorScan fundamental_error_scan(const PrimeWindow& window, u64 omega_cutoff,
                                 u64 divisor_limit, Convention conv = Convention::strict);
// D = floor(x^eps_exp); requires eps_exp in (0, theta/2) and omega_cutoff >= 2.
ErrorScan fundamental_error_scan(const PrimeWindow& window, const SieveParams& params,
                                 double eps_exp);

struct DensityReport {
  std::size_t prime_count = 0;
  std::size_t length = 0;
  double log_x = 0.0;
  double ratio = 0.0;  // count * phi(d) * log x / |I|
};

// Empirical alpha- for the primes n = c (mod d) in the window, with x = window.lo().
// Requires gcd(c, d) = 1 and d <= log x.
DensityReport short_interval_prime_density(const PrimeWindow& window, u64 d, u64 c);

} // namespace threeprimes::sieve
