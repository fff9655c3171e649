#include <threeprimes/arcs.hpp>

#include <threeprimes/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace threeprimes::arcs {

namespace {

using u128 = unsigned __int128;

double frac(long double t)
{
  const long double f = t - std::floor(t);
  return static_cast<double>(f >= 1.0L ? 0.0L : f);
}

struct Convergent {
  u64 p = 0;
  u64 q = 1;
};

// Last convergent of num/den (0 <= num < den) with denominator <= qmax.
Convergent best_convergent(u128 num, u128 den, u64 qmax)
{
  u128 p_prev = 1, q_prev = 0;  // p_{-1}/q_{-1}
  u128 p_prev2 = 0, q_prev2 = 1;
  Convergent best{0, 1};
  while (den != 0) {
    const u128 a = num / den;
    const u128 p = a * p_prev + p_prev2;
    const u128 q = a * q_prev + q_prev2;
    if (q > qmax)
      break;
    best = {static_cast<u64>(p), static_cast<u64>(q)};
    p_prev2 = p_prev;
    q_prev2 = q_prev;
    p_prev = p;
    q_prev = q;
    const u128 r = num - a * den;
    num = den;
    den = r;
  }
  return best;
}

u64 lcm_u(u64 a, u64 b)
{
  return a / std::gcd(a, b) * b;
}

void check_residue(u64 d, u64 c)
{
  if (d == 0 || std::gcd(c % d, d) != 1)
    throw std::invalid_argument("residue class c mod d must satisfy gcd(c, d) = 1");
}

} // namespace

Frequency Frequency::rational(std::int64_t a, u64 q)
{
  if (q == 0)
    throw std::invalid_argument("Frequency: zero denominator");
  const auto qs = static_cast<std::int64_t>(q);
  std::int64_t r = a % qs;
  if (r < 0)
    r += qs;
  return {r, q, 0.0};
}

Frequency Frequency::real(double gamma)
{
  if (!std::isfinite(gamma))
    throw std::invalid_argument("Frequency: gamma must be finite");
  return {0, 1, gamma - std::floor(gamma)};
}

Frequency Frequency::parse(const std::string& text)
{
  const auto slash = text.find('/');
  if (slash == std::string::npos)
    return real(std::stod(text));
  std::size_t pos = 0;
  const std::int64_t a = std::stoll(text.substr(0, slash));
  const std::string rest = text.substr(slash + 1);
  const u64 q = std::stoull(rest, &pos);
  Frequency f = rational(a, q);
  if (pos < rest.size()) {
    const std::string tail = rest.substr(pos);
    if (tail[0] != '+' && tail[0] != '-')
      throw std::invalid_argument("Frequency: expected a/q[+-offset], got " + text);
    f.offset = std::stod(tail);
  }
  return f;
}

double Frequency::value() const
{
  return static_cast<double>(a) / static_cast<double>(q) + offset;
}

double Frequency::phase(u64 n) const
{
  const u128 r = (static_cast<u128>(n % q) * static_cast<u128>(a)) % q;
  const long double rational_part = static_cast<long double>(static_cast<u64>(r)) / q;
  const long double off = static_cast<long double>(n) * static_cast<long double>(offset);
  return frac(rational_part + (off - std::floor(off)));
}

cplx Frequency::e(u64 n) const
{
  const double t = 2.0 * std::numbers::pi * phase(n);
  return {std::cos(t), std::sin(t)};
}

Frequency Frequency::reflected() const
{
  Frequency f = rational(-a, q);
  f.offset = offset == 0.0 ? 0.0 : -offset;
  return f;
}

ArcConfig ArcConfig::make(u64 x, double theta, double A)
{
  const double lx = std::log(static_cast<double>(x));
  ArcConfig c;
  c.Q = std::max(1.0, std::pow(static_cast<double>(x), 2.0 * theta - 1.0) * std::pow(lx, -5.0 * A));
  c.q_threshold = std::clamp(std::pow(lx, 5.0 * A), 20.0, 1000.0);
  return c;
}

ArcPoint classify(const Frequency& gamma, const ArcConfig& config)
{
  const double Q = std::max(1.0, config.Q);
  const auto qmax = static_cast<u64>(std::min(std::floor(Q), 9.0e15));

  ArcPoint pt;
  Convergent best;
  if (gamma.offset == 0.0) {
    pt.gamma = gamma.value();
    best = best_convergent(static_cast<u128>(gamma.a), gamma.q, qmax);
    pt.a = static_cast<std::int64_t>(best.p);
    pt.q = best.q;
    pt.lambda = static_cast<double>(static_cast<long double>(gamma.a) / gamma.q -
                                    static_cast<long double>(best.p) / best.q);
  } else {
    const double g = frac(static_cast<long double>(gamma.value()));
    pt.gamma = g;
    if (g < 0.5 / Q) {
      best = {0, 1};
    } else if (1.0 - g < 0.5 / Q) {
      best = {1, 1};
    } else {
      // g = mant * 2^exp exactly, with exp >= -116 here
      int exp = 0;
      const double m = std::frexp(g, &exp);
      const auto mant = static_cast<u128>(std::ldexp(m, 53));
      const int shift = 53 - exp;
      best = best_convergent(mant, u128{1} << shift, qmax);
    }
    pt.a = static_cast<std::int64_t>(best.p);
    pt.q = best.q;
    pt.lambda = static_cast<double>(static_cast<long double>(g) -
                                    static_cast<long double>(best.p) / best.q);
  }
  pt.is_major = static_cast<double>(pt.q) <= config.q_threshold;
  return pt;
}

ArcPoint classify(double gamma, u64 x, double theta, double A)
{
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("classify: gamma must lie in [0, 1)");
  if (x < 100)
    throw std::invalid_argument("classify: x must be >= 100");
  return classify(Frequency::real(gamma), ArcConfig::make(x, theta, A));
}

SmoothWeight::SmoothWeight(double start, double length, double taper)
    : start_(start), length_(length), taper_(taper)
{
  if (!(length > 0.0))
    throw std::invalid_argument("SmoothWeight: length must be positive");
  if (!(taper > 0.0 && taper < 0.5))
    throw std::invalid_argument("SmoothWeight: taper must lie in (0, 1/2)");
}

double SmoothWeight::operator()(double t) const
{
  const double s = (t - start_) / length_;
  if (s <= 0.0 || s >= 1.0)
    return 0.0;
  auto psi = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  auto step = [&](double u) {
    if (u >= 1.0)
      return 1.0;
    const double a = psi(u);
    return a / (a + psi(1.0 - u));
  };
  if (s < taper_)
    return step(s / taper_);
  if (s > 1.0 - taper_)
    return step((1.0 - s) / taper_);
  return 1.0;
}

ArcContext::ArcContext(const sieve::SieveParams& params, Options opts)
    : params_(params), weight_(static_cast<double>(params.x), params.x_pow_theta(), opts.taper)
{
  params_.validate();
  const double x = static_cast<double>(params_.x);
  const double xt = params_.x_pow_theta();
  lo_ = static_cast<u64>(std::ceil(x - xt / 3.0));
  hi_ = static_cast<u64>(std::floor(x + xt));
  if (lo_ < 2)
    throw std::invalid_argument("ArcContext: window reaches below 2");

  const std::size_t len = hi_ - lo_ + 1;
  rho_.resize(len);
  rho_plus_.resize(len);
  for (u64 seg = lo_; seg <= hi_; seg += sieve::kMaxSegment) {
    const u64 seg_hi = std::min<u64>(hi_ + 1, seg + sieve::kMaxSegment);
    const auto win = sieve::sieve_window(seg, seg_hi);
    for (u64 n = seg; n < seg_hi; ++n) {
      rho_[n - lo_] = win.is_prime(n);
      rho_plus_[n - lo_] = static_cast<std::uint32_t>(sieve::rho_plus(win.factors(n), params_));
    }
  }

  h1_ = x * std::exp(-std::sqrt(std::log(x)));
  if (h1_ > opts.long_cap) {
    h1_ = opts.long_cap;
    long_truncated_ = true;
  }
  const SmoothWeight g1(x, h1_, opts.taper);
  const u64 long_hi = static_cast<u64>(std::floor(x + h1_));
  double weighted = 0.0;
  double mass = 0.0;
  for (u64 seg = params_.x; seg <= long_hi; seg += sieve::kMaxSegment) {
    const u64 seg_hi = std::min<u64>(long_hi + 1, seg + sieve::kMaxSegment);
    const auto win = sieve::sieve_window(seg, seg_hi);
    for (u64 n = seg; n < seg_hi; ++n) {
      const double g = g1(static_cast<double>(n));
      if (g == 0.0)
        continue;
      mass += g;
      weighted += g * static_cast<double>(sieve::rho_plus(win.factors(n), params_));
    }
  }
  long_density_ = weighted / mass;
}

double ArcContext::kernel(Kernel k, u64 n) const
{
  if (n < lo_ || n > hi_)
    throw std::out_of_range("ArcContext::kernel: n outside the sieved window");
  return k == Kernel::rho ? rho_[n - lo_] : rho_plus_[n - lo_];
}

double ArcContext::log_x() const
{
  return std::log(static_cast<double>(params_.x));
}

cplx exp_sum(const ArcContext& ctx, Kernel kernel, u64 d, u64 c, const Frequency& gamma)
{
  check_residue(d, c);
  const u64 first = ctx.params().x;
  const u64 last = ctx.hi();
  u64 n = first + ((c % d) + d - first % d) % d;
  cplx sum = 0.0;
  for (; n <= last; n += d) {
    const double k = ctx.kernel(kernel, n);
    if (k == 0.0)
      continue;
    const double g = ctx.weight()(static_cast<double>(n));
    if (g == 0.0)
      continue;
    sum += k * g * gamma.e(n);
  }
  return sum;
}

cplx saz_main_term(const ArcContext& ctx, u64 d, u64 c, const ArcPoint& arc,
                   const Frequency& gamma)
{
  check_residue(d, c);
  const double lx = ctx.log_x();
  if (static_cast<double>(d) > lx * lx)
    throw std::invalid_argument("saz_main_term: d exceeds (log x)^2");
  if (arc.q == 0 || static_cast<double>(arc.q) > ctx.x_pow_theta())
    throw std::invalid_argument("saz_main_term: q outside [1, x^theta]");

  const u64 L = lcm_u(d, arc.q);
  const double factor = static_cast<double>(L) / static_cast<double>(euler_phi(L));
  const u64 first = ctx.params().x;
  u64 n = first + ((c % d) + d - first % d) % d;
  cplx sum = 0.0;
  for (; n <= ctx.hi(); n += d) {
    if (std::gcd(n, arc.q) != 1)
      continue;
    const double g = ctx.weight()(static_cast<double>(n));
    if (g != 0.0)
      sum += g * gamma.e(n);
  }
  return factor * ctx.long_density() * sum;
}

Comparison saz_compare(const ArcContext& ctx, const ArcConfig& config, u64 d, u64 c,
                       const Frequency& gamma)
{
  Comparison out;
  out.arc = classify(gamma, config);
  out.lhs = exp_sum(ctx, Kernel::rho_plus, d, c, gamma);
  out.rhs = saz_main_term(ctx, d, c, out.arc, gamma);
  const double norm = ctx.x_pow_theta() / ctx.log_x();
  out.deviation = (out.arc.is_major ? std::abs(out.lhs - out.rhs) : std::abs(out.lhs)) / norm;
  return out;
}

WTricked build_w_tricked(const sieve::SieveParams& params, double alpha_plus, u64 b,
                         std::int64_t m_offset)
{
  params.validate();
  if (!(alpha_plus > 0.0))
    throw std::invalid_argument("build_w_tricked: alpha+ must be positive");
  const u64 W = params.W;
  if (std::gcd(b % W, W) != 1)
    throw std::invalid_argument("build_w_tricked: need gcd(b, W) = 1");

  const double x = static_cast<double>(params.x);
  const double xt = params.x_pow_theta();
  WTricked out;
  out.W = W;
  out.b = b;
  out.N = static_cast<u64>(std::floor(4.0 * xt / (3.0 * static_cast<double>(W))));
  out.m = m_offset >= 0 ? static_cast<u64>(m_offset)
                        : static_cast<u64>(std::floor((x - xt / 3.0) / static_cast<double>(W)));
  if (out.N == 0)
    throw std::invalid_argument("build_w_tricked: N = 0");
  out.scale = std::log(x) / alpha_plus * static_cast<double>(euler_phi(W)) /
              static_cast<double>(W);

  std::vector<double> f(out.N);
  std::vector<double> nu(out.N);
  const u64 first = W * (out.m + 1) + b;
  const u64 last = W * (out.m + out.N) + b;
  if (first < 2)
    throw std::invalid_argument("build_w_tricked: progression starts below 2");
  for (u64 seg = first; seg <= last; seg += sieve::kMaxSegment) {
    const u64 seg_hi = std::min<u64>(last + 1, seg + sieve::kMaxSegment);
    const auto win = sieve::sieve_window(seg, seg_hi);
    // first progression element in this segment
    u64 n = seg + ((first % W) + W - seg % W) % W;
    for (; n < seg_hi; n += W) {
      const u64 k = (n - b) / W - out.m;  // 1..N
      f[k - 1] = win.is_prime(n) ? out.scale : 0.0;
      nu[k - 1] = out.scale * static_cast<double>(sieve::rho_plus(win.factors(n), params));
    }
  }
  out.f = DensityFunction(std::move(f));
  out.nu = DensityFunction(std::move(nu));
  return out;
}

std::vector<Frequency> eta_grid(u64 qmax, std::size_t random_points, u64 seed)
{
  std::vector<Frequency> grid;
  for (u64 q = 1; q <= qmax; ++q)
    for (u64 a = 0; a < q; ++a)
      if (std::gcd(a, q) == 1)
        grid.push_back(Frequency::rational(static_cast<std::int64_t>(a), q));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < random_points; ++i)
    grid.push_back(Frequency::real(unit(rng)));
  return grid;
}

EtaReport pseudorandom_eta(const ArcContext& ctx, double alpha_plus, u64 c,
                              const std::vector<Frequency>& grid)
{
  const u64 W = ctx.params().W;
  check_residue(W, c);
  const double lx = ctx.log_x();
  const double phiW = static_cast<double>(euler_phi(W));
  const double predicted = alpha_plus / lx * static_cast<double>(W) / phiW;
  const double norm = ctx.x_pow_theta() / (phiW * lx);

  const u64 lo = ctx.lo();
  const u64 first = lo + ((c % W) + W - lo % W) % W;

  EtaReport rep;
  rep.points.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    cplx s_rho = 0.0;
    cplx s_one = 0.0;
    for (u64 n = first; n <= ctx.hi(); n += W) {
      const cplx e = grid[i].e(n);
      s_one += e;
      const double k = ctx.kernel(Kernel::rho_plus, n);
      if (k != 0.0)
        s_rho += k * e;
    }
    rep.points[i] = {grid[i], std::abs(s_rho - predicted * s_one) / norm};
  });
  for (const auto& p : rep.points)
    rep.eta = std::max(rep.eta, p.deviation);
  return rep;
}

} // namespace threeprimes::arcs
