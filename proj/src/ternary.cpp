#include <threeprimes/ternary.hpp>

#include <threeprimes/fft.hpp>
#include <threeprimes/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace threeprimes::ternary {

namespace {

void check_odd(u64 n)
{
  if (n < 9 || n % 2 == 0)
    throw std::invalid_argument("ternary: n must be odd and >= 9");
}

PrimeFlags flags_for(u64 n, u64 H)
{
  const Window w = summand_window(n, H);
  return PrimeFlags(w.lo, std::max(w.lo, w.hi));
}

} // namespace

PrimeFlags::PrimeFlags(u64 lo, u64 hi) : lo_(lo), hi_(hi)
{
  if (hi < lo)
    throw std::invalid_argument("PrimeFlags: hi < lo");
  flags_.assign(hi - lo + 1, 1);
  for (u64 n = lo; n <= std::min<u64>(hi, 1); ++n)
    flags_[n - lo] = 0;
  for (u64 p : primes_up_to(iroot(hi, 2))) {
    u64 start = std::max(p * p, (lo + p - 1) / p * p);
    for (u64 m = start; m <= hi; m += p)
      flags_[m - lo] = 0;
  }
}

Window summand_window(u64 n, u64 H)
{
  const u64 c_lo = (n + 2) / 3;
  const u64 c_hi = n / 3;
  Window w;
  w.lo = c_lo > H + 2 ? c_lo - H : 2;
  w.hi = c_hi + H;
  return w;
}

u64 count_representations(const PrimeFlags& primes, u64 n, u64 H)
{
  check_odd(n);
  const Window w = summand_window(n, H);
  if (w.lo > w.hi)
    return 0;
  if (w.lo < primes.lo() || w.hi > primes.hi())
    throw std::out_of_range("count_representations: window outside the prime table");
  std::vector<double> ind(w.hi - w.lo + 1);
  for (u64 m = w.lo; m <= w.hi; ++m)
    ind[m - w.lo] = primes(m) ? 1.0 : 0.0;
  const auto pairs = convolve(ind, ind);  // index k <-> sum 2 lo + k
  u64 count = 0;
  for (u64 p = w.lo; p <= w.hi; ++p) {
    if (!primes(p) || n < p + 2 * w.lo)
      continue;
    const u64 k = n - p - 2 * w.lo;
    if (k < pairs.size())
      count += static_cast<u64>(std::llround(pairs[k]));
  }
  return count;
}

u64 count_representations(u64 n, u64 H)
{
  check_odd(n);
  return count_representations(flags_for(n, H), n, H);
}

std::optional<std::array<u64, 3>> find_representation(const PrimeFlags& primes, u64 n, u64 H)
{
  check_odd(n);
  const Window w = summand_window(n, H);
  for (u64 p1 = w.lo; p1 <= w.hi; ++p1) {
    if (!primes(p1))
      continue;
    for (u64 p2 = p1; p2 <= w.hi && p1 + 2 * p2 <= n; ++p2) {
      if (!primes(p2))
        continue;
      const u64 p3 = n - p1 - p2;
      if (p3 >= p2 && p3 <= w.hi && primes(p3))
        return std::array<u64, 3>{p1, p2, p3};
    }
  }
  return std::nullopt;
}

u64 min_window(const PrimeFlags& primes, u64 n)
{
  check_odd(n);
  const u64 cap = n / 3;
  if (count_representations(primes, n, 0) > 0)
    return 0;
  u64 good = 1;
  while (count_representations(primes, n, good) == 0) {
    if (good >= cap)
      throw std::runtime_error("min_window: no representation with H <= n/3");
    good = std::min(cap, good * 2);
  }
  u64 bad = good / 2;  // count(bad) == 0
  while (good - bad > 1) {
    const u64 mid = bad + (good - bad) / 2;
    (count_representations(primes, n, mid) > 0 ? good : bad) = mid;
  }
  return good;
}

u64 min_window(u64 n)
{
  check_odd(n);
  return min_window(flags_for(n, n / 3), n);
}

ScanReport scan_range(u64 lo, u64 hi, double theta, std::size_t bins)
{
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("scan_range: theta must lie in (0, 1)");
  if (hi < lo || bins == 0)
    throw std::invalid_argument("scan_range: need lo <= hi and bins >= 1");
  ScanReport rep;
  rep.lo = lo;
  rep.hi = hi;
  rep.theta = theta;
  rep.histogram.assign(bins, 0);

  std::vector<u64> ns;
  for (u64 n = std::max<u64>(lo, 9) | 1; n <= hi; n += 2)
    ns.push_back(n);
  if (ns.empty())
    return rep;

  // one table covers every window used below, including the H <= n/3 fallback
  // of the minimal-window search
  auto H_at = [&](u64 n) {
    return static_cast<u64>(std::ceil(std::pow(static_cast<double>(n), theta)));
  };
  const u64 top = ns.back();
  const PrimeFlags primes(2, top / 3 + std::max(H_at(top), top / 3) + 1);

  rep.rows.resize(ns.size());
  parallel_for(ns.size(), [&](std::size_t i) {
    auto& r = rep.rows[i];
    r.n = ns[i];
    r.H = H_at(r.n);
    r.count = count_representations(primes, r.n, r.H);
    r.H_min = min_window(primes, r.n);
    r.theta_min = std::log(static_cast<double>(std::max<u64>(r.H_min, 1))) /
                  std::log(static_cast<double>(r.n));
    r.witness = find_representation(primes, r.n, r.H_min).value();
  });

  for (const auto& r : rep.rows) {
    if (r.count == 0)
      rep.failures.push_back(r.n);
    if (r.theta_min > rep.max_theta_min || rep.argmax_theta_min == 0) {
      rep.max_theta_min = r.theta_min;
      rep.argmax_theta_min = r.n;
    }
    rep.histogram[std::min(bins - 1, static_cast<std::size_t>(r.theta_min * static_cast<double>(bins)))]++;
  }
  return rep;
}

SingularSeries singular_series(u64 n, u64 cap)
{
  if (cap < 1000)
    throw std::invalid_argument("singular_series: cap must be >= 1000");
  if (n == 0)
    throw std::invalid_argument("singular_series: n must be positive");
  SingularSeries s;
  s.cap = cap;
  // primes dividing n, all of them
  std::vector<u64> divs;
  u64 m = n;
  for (u64 p = 2; p * p <= m; ++p)
    if (m % p == 0) {
      divs.push_back(p);
      while (m % p == 0)
        m /= p;
    }
  if (m > 1)
    divs.push_back(m);

  long double prod = 1.0L;
  for (u64 p : divs) {
    const long double d = static_cast<long double>(p - 1);
    prod *= 1.0L - 1.0L / (d * d);
  }
  for (u64 p : primes_up_to(cap)) {
    if (n % p == 0)
      continue;
    const long double d = static_cast<long double>(p - 1);
    prod *= 1.0L + 1.0L / (d * d * d);
  }
  s.value = static_cast<double>(prod);
  // sum_{p > cap} (p-1)^-3 <= sum_{m >= cap} m^-3 <= 1 / (2 (cap-1)^2)
  const double c1 = static_cast<double>(cap - 1);
  s.upper = s.value * std::exp(1.0 / (2.0 * c1 * c1));
  return s;
}

Prediction predicted_count(u64 n, u64 H, u64 cap)
{
  if (n < 9)
    throw std::invalid_argument("predicted_count: n must be >= 9");
  Prediction p;
  p.series = singular_series(n, cap).value;
  const double L = std::log(static_cast<double>(n) / 3.0);
  p.value = p.series * 3.0 * static_cast<double>(H) * static_cast<double>(H) / (L * L * L);
  const double ln = std::log(static_cast<double>(n));
  p.in_range = static_cast<double>(H) >= ln * ln;
  return p;
}

} // namespace threeprimes::ternary
