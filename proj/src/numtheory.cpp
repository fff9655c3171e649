#include <threeprimes/numtheory.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace threeprimes {

namespace {

// r^k <= x, guarding overflow
bool pow_le(u64 r, unsigned k, u64 x)
{
  unsigned __int128 acc = 1;
  for (unsigned i = 0; i < k; ++i) {
    acc *= r;
    if (acc > x)
      return false;
  }
  return true;
}

} // namespace

u64 iroot(u64 x, unsigned k)
{
  if (k == 0)
    throw std::invalid_argument("iroot: k must be positive");
  if (k == 1 || x < 2)
    return x;
  auto r = static_cast<u64>(std::pow(static_cast<long double>(x), 1.0L / k));
  while (r > 0 && !pow_le(r, k, x))
    --r;
  while (pow_le(r + 1, k, x))
    ++r;
  return r;
}

std::vector<u64> primes_up_to(u64 limit)
{
  std::vector<u64> out;
  if (limit < 2)
    return out;
  std::vector<bool> composite(limit + 1, false);
  for (u64 i = 2; i <= limit; ++i) {
    if (composite[i])
      continue;
    out.push_back(i);
    for (u64 j = i * i; j <= limit; j += i)
      composite[j] = true;
  }
  return out;
}

u64 euler_phi(u64 n)
{
  if (n == 0)
    throw std::invalid_argument("euler_phi: n must be positive");
  u64 result = n;
  for (u64 p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0)
        n /= p;
      result -= result / p;
    }
  }
  if (n > 1)
    result -= result / n;
  return result;
}

u64 primorial(u64 w)
{
  u64 out = 1;
  for (u64 p : primes_up_to(w)) {
    if (out > std::numeric_limits<u64>::max() / p)
      throw std::overflow_error("primorial: product exceeds 64 bits");
    out *= p;
  }
  return out;
}

double dist_to_int(double t)
{
  return std::abs(t - std::nearbyint(t));
}

} // namespace threeprimes
