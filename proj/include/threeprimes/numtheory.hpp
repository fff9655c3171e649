#pragma once

#include <cstdint>
#include <vector>

namespace threeprimes {

using u64 = std::uint64_t;
using i64 = std::int64_t;

// Largest r with r^k <= x.
u64 iroot(u64 x, unsigned k);

// Primes p <= limit, plain sieve of Eratosthenes.
std::vector<u64> primes_up_to(u64 limit);

u64 euler_phi(u64 n);

// Product of primes p <= w (1 for w < 2).
u64 primorial(u64 w);

// Distance from t to the nearest integer.
double dist_to_int(double t);

} // namespace threeprimes
