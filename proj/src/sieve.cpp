#include <threeprimes/sieve.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace threeprimes::sieve {

namespace {

constexpr u64 kMaxHi = std::numeric_limits<std::int64_t>::max();

u64 isqrt(u64 n)
{
  return iroot(n, 2);
}

bool admits(u64 q, u64 y, Convention conv)
{
  return conv == Convention::strict ? q >= y : q > y;
}

// Is p a sieving prime for cutoff y, i.e. p | P(y)?
bool in_product(u64 p, u64 y, Convention conv)
{
  return !admits(p, y, conv);
}

// rho(n / divisor, y) where divisor is given as a multiset of the primes of n.
bool rho_of_quotient(Factorization n, std::span<const u64> removed, u64 y, Convention conv)
{
  for (const PrimePower& pp : n) {
    unsigned e = pp.e;
    for (u64 r : removed)
      if (r == pp.p)
        --e;
    if (e > 0 && !admits(pp.p, y, conv))
      return false;
  }
  return true;
}

} // namespace

bool PrimeWindow::is_prime(u64 n) const
{
  if (!contains(n))
    throw std::out_of_range("PrimeWindow::is_prime: n outside window");
  return is_prime_[n - lo_] != 0;
}

Factorization PrimeWindow::factors(u64 n) const
{
  if (!contains(n))
    throw std::out_of_range("PrimeWindow::factors: n outside window");
  const std::size_t i = n - lo_;
  return Factorization(factors_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]);
}

PrimeWindow sieve_window(u64 lo, u64 hi, std::size_t max_len)
{
  if (lo < 2 || hi <= lo)
    throw std::invalid_argument("sieve_window: need 2 <= lo < hi");
  if (hi > kMaxHi)
    throw std::invalid_argument("sieve_window: hi exceeds 2^63 - 1");
  if (hi - lo > max_len)
    throw std::length_error("sieve_window: window exceeds the segment budget; split it");

  const std::size_t len = hi - lo;
  const auto small = primes_up_to(isqrt(hi - 1));

  // Pass 1: number of sieving primes dividing each n, plus a slot for the cofactor.
  std::vector<std::uint32_t> cap(len, 1);
  for (u64 p : small) {
    for (u64 m = (lo + p - 1) / p * p; m < hi; m += p)
      ++cap[m - lo];
  }

  PrimeWindow w;
  w.lo_ = lo;
  w.hi_ = hi;
  std::vector<std::uint32_t> start(len + 1, 0);
  for (std::size_t i = 0; i < len; ++i)
    start[i + 1] = start[i] + cap[i];
  std::vector<PrimePower> slots(start[len]);
  std::vector<std::uint32_t> used(len, 0);
  std::vector<u64> rest(len);
  std::iota(rest.begin(), rest.end(), lo);

  // Pass 2: divide out each sieving prime.
  for (u64 p : small) {
    for (u64 m = (lo + p - 1) / p * p; m < hi; m += p) {
      const std::size_t i = m - lo;
      unsigned e = 0;
      while (rest[i] % p == 0) {
        rest[i] /= p;
        ++e;
      }
      slots[start[i] + used[i]++] = {p, e};
    }
  }

  w.is_prime_.resize(len);
  w.offsets_.resize(len + 1);
  w.factors_.reserve(slots.size());
  for (std::size_t i = 0; i < len; ++i) {
    w.offsets_[i] = static_cast<std::uint32_t>(w.factors_.size());
    for (std::uint32_t k = 0; k < used[i]; ++k)
      w.factors_.push_back(slots[start[i] + k]);
    if (rest[i] > 1)
      w.factors_.push_back({rest[i], 1});
    const std::size_t count = w.factors_.size() - w.offsets_[i];
    w.is_prime_[i] = count == 1 && w.factors_.back().e == 1;
  }
  w.offsets_[len] = static_cast<std::uint32_t>(w.factors_.size());
  return w;
}

bool rho(Factorization n, u64 y, Convention conv)
{
  return std::all_of(n.begin(), n.end(),
                     [&](const PrimePower& pp) { return admits(pp.p, y, conv); });
}

SieveParams SieveParams::defaults(u64 x, double theta)
{
  if (x < 16)
    throw std::invalid_argument("SieveParams: x too small");
  SieveParams s;
  s.x = x;
  s.theta = theta;
  s.z = iroot(x, 10);
  s.y4 = iroot(x, 4);
  const double lx = std::log(static_cast<double>(x));
  s.omega_cutoff = static_cast<u64>(std::floor(std::exp(std::pow(lx, 0.9))));
  const double llx = std::log(lx);
  s.set_w(llx > 0.0 ? static_cast<u64>(std::floor(0.1 * llx)) : 0);
  return s;
}

void SieveParams::set_w(u64 new_w)
{
  w = new_w;
  W = primorial(w);
}

void SieveParams::validate() const
{
  if (!(z >= 2 && z < y4 && y4 < x))
    throw std::invalid_argument("SieveParams: need 2 <= z < y4 < x");
  if (!(theta > 0.0 && theta <= 1.0))
    throw std::invalid_argument("SieveParams: theta must lie in (0, 1]");
  if (W != primorial(w))
    throw std::invalid_argument("SieveParams: W must be the product of primes <= w");
}

double SieveParams::x_pow_theta() const
{
  return std::pow(static_cast<double>(x), theta);
}

u64 rho_plus(Factorization n, const SieveParams& params)
{
  u64 total = rho(n, params.y4, params.convention) ? 1 : 0;
  // Ordered choices p1 < p2 < p3 among the distinct primes of n in (z, y4).
  std::vector<u64> cand;
  for (const PrimePower& pp : n)
    if (pp.p > params.z && pp.p < params.y4)
      cand.push_back(pp.p);
  const std::size_t r = cand.size();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j)
      for (std::size_t k = j + 1; k < r; ++k) {
        const std::array<u64, 3> triple{cand[i], cand[j], cand[k]};
        if (rho_of_quotient(n, triple, cand[i], params.convention))
          ++total;
      }
  return total;
}

std::vector<MajorantEntry> majorant_window(const SieveParams& params, u64 lo, u64 hi)
{
  params.validate();
  const double xt = params.x_pow_theta();
  const double x = static_cast<double>(params.x);
  if (static_cast<double>(lo) < x - xt || static_cast<double>(hi) > x + 2.0 * xt + 1.0)
    throw std::invalid_argument("majorant_window: [lo, hi) outside [x - x^theta, x + 2x^theta]");

  std::vector<MajorantEntry> out;
  out.reserve(hi > lo ? hi - lo : 0);
  for (u64 seg = lo; seg < hi; seg += kMaxSegment) {
    const u64 seg_hi = std::min<u64>(hi, seg + kMaxSegment);
    const PrimeWindow win = sieve_window(seg, seg_hi);
    for (u64 n = seg; n < seg_hi; ++n)
      out.push_back({n, win.is_prime(n), rho_plus(win.factors(n), params)});
  }
  return out;
}

std::size_t buchstab_identity_check(const PrimeWindow& window, u64 w, u64 z, Convention conv)
{
  if (w < 2 || z < w)
    throw std::invalid_argument("buchstab_identity_check: need 2 <= w <= z");
  std::size_t violations = 0;
  for (u64 n = window.lo(); n < window.hi(); ++n) {
    const Factorization f = window.factors(n);
    const std::int64_t lhs = rho(f, z, conv) ? 1 : 0;
    std::int64_t rhs = rho(f, w, conv) ? 1 : 0;
    for (const PrimePower& pp : f) {
      const bool in_range =
          conv == Convention::strict ? (pp.p >= w && pp.p < z) : (pp.p > w && pp.p <= z);
      if (!in_range)
        continue;
      // inner sieve removes primes below p in either convention
      const std::array<u64, 1> removed{pp.p};
      const u64 inner = conv == Convention::strict ? pp.p : pp.p - 1;
      if (rho_of_quotient(f, removed, inner, conv))
        --rhs;
    }
    if (lhs != rhs)
      ++violations;
  }
  return violations;
}

std::int64_t fundamental_error(Factorization n, u64 omega_cutoff, u64 divisor_limit,
                               Convention conv)
{
  std::vector<u64> small;
  for (const PrimePower& pp : n)
    if (in_product(pp.p, omega_cutoff, conv))
      small.push_back(pp.p);

  const bool rough = small.empty();
  // sum of mu(d) over squarefree d | n built from `small`, restricted to d < D
  std::int64_t truncated = 0;
  const std::size_t subsets = std::size_t{1} << small.size();
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    unsigned __int128 d = 1;
    int parity = 0;
    for (std::size_t b = 0; b < small.size(); ++b)
      if (mask & (std::size_t{1} << b)) {
        d *= small[b];
        ++parity;
      }
    if (d < divisor_limit)
      truncated += (parity % 2 == 0) ? 1 : -1;
  }
  return (rough ? 1 : 0) - truncated;
}

ErrorScan fundamental_error_scan(const PrimeWindow& window, u64 omega_cutoff,
                                 u64 divisor_limit, Convention conv)
{
  if (omega_cutoff < 2)
    throw std::invalid_argument("fundamental_error_scan: omega cutoff must be >= 2");
  ErrorScan scan;
  scan.omega_cutoff = omega_cutoff;
  scan.divisor_limit = divisor_limit;
  for (u64 n = window.lo(); n < window.hi(); ++n) {
    const std::int64_t e = fundamental_error(window.factors(n), omega_cutoff, divisor_limit, conv);
    scan.total_abs += static_cast<double>(e < 0 ? -e : e);
    ++scan.histogram[e];
  }
  scan.ratio = scan.total_abs / static_cast<double>(window.size());
  return scan;
}

ErrorScan fundamental_error_scan(const PrimeWindow& window, const SieveParams& params,
                                 double eps_exp)
{
  if (!(eps_exp > 0.0 && eps_exp < params.theta / 2.0))
    throw std::invalid_argument("fundamental_error_scan: eps_exp must lie in (0, theta/2)");
  const auto limit =
      static_cast<u64>(std::floor(std::pow(static_cast<double>(params.x), eps_exp)));
  return fundamental_error_scan(window, params.omega_cutoff, limit, params.convention);
}

DensityReport short_interval_prime_density(const PrimeWindow& window, u64 d, u64 c)
{
  if (window.size() == 0)
    throw std::invalid_argument("short_interval_prime_density: empty window");
  if (d == 0 || std::gcd(c, d) != 1)
    throw std::invalid_argument("short_interval_prime_density: need gcd(c, d) = 1");
  DensityReport rep;
  rep.log_x = std::log(static_cast<double>(window.lo()));
  if (static_cast<double>(d) > rep.log_x)
    throw std::invalid_argument("short_interval_prime_density: need d <= log x");
  rep.length = window.size();
  for (u64 n = window.lo(); n < window.hi(); ++n)
    if (n % d == c % d && window.is_prime(n))
      ++rep.prime_count;
  rep.ratio = static_cast<double>(rep.prime_count) * static_cast<double>(euler_phi(d)) *
              rep.log_x / static_cast<double>(rep.length);
  return rep;
}

} // namespace threeprimes::sieve
