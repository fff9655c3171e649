#include <doctest.h>

#include "oracles.hpp"

#include <threeprimes/arcs.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

using namespace threeprimes;
using namespace threeprimes::arcs;

namespace {

// ||q g|| over q <= Q; returns the smallest q attaining the minimum
std::pair<u64, double> scan_best_q(double g, u64 Q)
{
  u64 best_q = 1;
  double best = 1.0;
  for (u64 q = 1; q <= Q; ++q) {
    const long double t = static_cast<long double>(q) * g;
    const double d = static_cast<double>(std::fabs(t - std::nearbyint(t)));
    if (d < best - 1e-15) {
      best = d;
      best_q = q;
    }
  }
  return {best_q, best};
}

double bump(double t, double start, double len, double taper)
{
  // independent form of the smooth weight: ramp(s) = 1 / (1 + exp(1/s - 1/(1-s)))
  const double s = (t - start) / len;
  if (s <= 0 || s >= 1)
    return 0;
  double r = std::min(s, 1 - s) / taper;
  if (r >= 1)
    return 1;
  return 1.0 / (1.0 + std::exp(1.0 / r - 1.0 / (1.0 - r)));
}

const ArcContext& ctx_1e6()
{
  static const ArcContext ctx(sieve::SieveParams::defaults(1'000'000, 0.65));
  return ctx;
}

} // namespace

TEST_CASE("frequency parsing and phases")
{
  auto f = Frequency::parse("7/12");
  CHECK(f.a == 7);
  CHECK(f.q == 12);
  CHECK(f.offset == 0.0);
  f = Frequency::parse("-1/5+1e-8");
  CHECK(f.a == 4);
  CHECK(f.q == 5);
  CHECK(f.offset == doctest::Approx(1e-8));
  CHECK(Frequency::parse("0.25").value() == 0.25);
  CHECK_THROWS_AS(Frequency::parse("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(Frequency::parse("1/3x"), std::invalid_argument);

  // exact rational phases survive huge n
  const auto third = Frequency::rational(1, 3);
  CHECK(third.phase(3'000'000'000'000'000'001ULL) == doctest::Approx(1.0 / 3));
  CHECK(third.reflected().a == 2);
}

TEST_CASE("classify small examples")
{
  auto p = classify(0.0, 1'000'000, 0.6);
  CHECK(p.a == 0);
  CHECK(p.q == 1);
  CHECK(p.lambda == 0.0);
  CHECK(p.is_major);

  const ArcConfig cfg = ArcConfig::make(1'000'000, 0.6);
  p = classify(Frequency::rational(1, 3), cfg);
  CHECK(p.a == 1);
  CHECK(p.q == 3);
  CHECK(p.lambda == 0.0);
  CHECK(p.is_major);

  // Q = 10^(6 * 0.2) ~ 15.8: convergents of sqrt2 - 1 are 1/2, 2/5, 5/12, 12/29
  const double g = std::numbers::sqrt2 - 1;
  p = classify(g, 1'000'000, 0.6);
  CHECK(cfg.Q == doctest::Approx(std::pow(10.0, 1.2)));
  CHECK(p.a == 5);
  CHECK(p.q == 12);
  CHECK(std::fabs(p.lambda) < 1.0 / (12 * cfg.Q));
  CHECK(p.q == scan_best_q(g, static_cast<u64>(cfg.Q)).first);

  CHECK_THROWS_AS(classify(1.0, 1'000'000, 0.6), std::invalid_argument);
  CHECK_THROWS_AS(classify(0.5, 50, 0.6), std::invalid_argument);
}

TEST_CASE("arc thresholds")
{
  const auto c0 = ArcConfig::make(1'000'000, 0.65);
  CHECK(c0.q_threshold == 20.0);
  const auto c1 = ArcConfig::make(1'000'000, 0.65, 1.0);
  CHECK(c1.q_threshold == 1000.0);
  CHECK(c1.Q == 1.0);  // (log x)^-5 swamps x^0.3 at this size
}

TEST_CASE("classify matches an exhaustive scan")
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double Q : {10.0, 317.0, 4'000.0, 100'000.0}) {
    const ArcConfig cfg{Q, 20.0};
    for (int i = 0; i < 40; ++i) {
      const double g = unit(rng);
      const auto p = classify(Frequency::real(g), cfg);
      const auto [q_star, d_star] = scan_best_q(g, static_cast<u64>(Q));
      const long double t = static_cast<long double>(p.q) * g;
      const double d = static_cast<double>(std::fabs(t - std::nearbyint(t)));
      CHECK(p.q <= Q);
      CHECK(std::gcd(static_cast<u64>(p.a), p.q) == 1);
      CHECK(d == doctest::Approx(d_star).epsilon(1e-9));
      CHECK(std::fabs(p.lambda) < 1.0 / (static_cast<double>(p.q) * Q));
      CHECK(p.is_major == (p.q <= 20));
      (void)q_star;
    }
  }
}

TEST_CASE("smooth weight")
{
  const SmoothWeight g(100.0, 50.0, 0.1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> t(90.0, 160.0);
  for (int i = 0; i < 500; ++i) {
    const double u = t(rng);
    CHECK(g(u) == doctest::Approx(bump(u, 100.0, 50.0, 0.1)).epsilon(1e-12));
    CHECK(g(u) >= 0.0);
    CHECK(g(u) <= 1.0);
  }
  CHECK(g(99.0) == 0.0);
  CHECK(g(150.0) == 0.0);
  CHECK(g(105.0) == 1.0);
  CHECK(g(145.0) == 1.0);
  CHECK(g(102.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(SmoothWeight(0, 1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(SmoothWeight(0, 0, 0.1), std::invalid_argument);
}

TEST_CASE("context basics")
{
  const auto& ctx = ctx_1e6();
  CHECK(ctx.lo() == static_cast<u64>(std::ceil(1e6 - std::pow(1e6, 0.65) / 3)));
  CHECK(ctx.hi() == static_cast<u64>(std::floor(1e6 + std::pow(1e6, 0.65))));
  CHECK(ctx.h1() == doctest::Approx(1e6 * std::exp(-std::sqrt(std::log(1e6)))));
  CHECK_FALSE(ctx.long_truncated());
  // density of rho+ is about alpha+/log x ~ 0.2
  CHECK(ctx.long_density() > 0.1);
  CHECK(ctx.long_density() < 0.4);
  CHECK_THROWS_AS(ctx.kernel(Kernel::rho, ctx.hi() + 1), std::out_of_range);

  sieve::SieveParams p = sieve::SieveParams::defaults(1'000'000, 0.65);
  const ArcContext capped(p, {0.05, 5'000.0});
  CHECK(capped.long_truncated());
  CHECK(capped.h1() == 5'000.0);
}

TEST_CASE("exp_sum against direct summation")
{
  const auto& ctx = ctx_1e6();
  const u64 x = 1'000'000;
  const double xt = std::pow(1e6, 0.65);
  const auto P = oracle::primes_between(ctx.params().z, ctx.params().y4);

  std::complex<double> rho0 = 0, rho_half = 0, plus5 = 0;
  u64 primes = 0;
  for (u64 n = x; n <= ctx.hi(); ++n) {
    const double g = bump(static_cast<double>(n), 1e6, xt, 0.05);
    const bool pr = oracle::is_prime(n);
    primes += pr;
    rho0 += pr * g;
    rho_half += pr * g * (n % 2 ? -1.0 : 1.0);
    const double t = 2 * std::numbers::pi * static_cast<double>(n % 5) / 5;
    plus5 += g * static_cast<double>(oracle::rho_plus(n, ctx.params().z, ctx.params().y4, P)) *
             std::complex<double>(std::cos(t), std::sin(t));
  }
  const auto zero = Frequency::rational(0, 1);
  const auto half = Frequency::rational(1, 2);
  const auto e0 = exp_sum(ctx, Kernel::rho, 1, 0, zero);
  CHECK(std::abs(e0 - rho0) < 1e-8);
  CHECK(std::abs(exp_sum(ctx, Kernel::rho, 1, 0, half) - rho_half) < 1e-8);
  CHECK(std::abs(exp_sum(ctx, Kernel::rho_plus, 1, 0, Frequency::rational(1, 5)) - plus5) < 1e-8);
  // no tapering: just the prime count, and minus it at 1/2
  CHECK(e0.real() <= static_cast<double>(primes));
  CHECK(e0.real() > 0.9 * static_cast<double>(primes));

  CHECK_THROWS_AS(exp_sum(ctx, Kernel::rho, 4, 2, zero), std::invalid_argument);
}

TEST_CASE("exp_sum symmetries")
{
  const auto& ctx = ctx_1e6();
  for (const char* s : {"0.1234", "2/7", "3/11+1e-6"}) {
    const auto g = Frequency::parse(s);
    for (auto k : {Kernel::rho, Kernel::rho_plus}) {
      const auto a = exp_sum(ctx, k, 3, 1, g);
      const auto b = exp_sum(ctx, k, 3, 1, g.reflected());
      CHECK(std::abs(a - std::conj(b)) < 1e-8 * (1 + std::abs(a)));
    }
  }
  // gamma = 0 with d = 1 is the plain sum of rho+ times the weight
  double plain = 0;
  for (u64 n = ctx.params().x; n <= ctx.hi(); ++n)
    plain += ctx.kernel(Kernel::rho_plus, n) * ctx.weight()(static_cast<double>(n));
  CHECK(exp_sum(ctx, Kernel::rho_plus, 1, 0, Frequency::real(0.0)).real() ==
        doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("main term structure")
{
  const auto& ctx = ctx_1e6();
  const ArcConfig cfg = ArcConfig::make(1'000'000, 0.65);
  const auto zero = Frequency::rational(0, 1);
  const auto arc0 = classify(zero, cfg);
  double gsum = 0;
  for (u64 n = ctx.params().x; n <= ctx.hi(); ++n)
    gsum += ctx.weight()(static_cast<double>(n));
  CHECK(saz_main_term(ctx, 1, 0, arc0, zero).real() ==
        doctest::Approx(ctx.long_density() * gsum).epsilon(1e-12));

  // d = 2, q = 2: factor [2,2]/phi(2) = 2 times the odd-n sum
  const auto half = Frequency::rational(1, 2);
  const auto arc2 = classify(half, cfg);
  CHECK(arc2.q == 2);
  std::complex<double> odd = 0;
  for (u64 n = ctx.params().x + 1; n <= ctx.hi(); n += 2)
    odd -= ctx.weight()(static_cast<double>(n));
  CHECK(std::abs(saz_main_term(ctx, 2, 1, arc2, half) - 2.0 * ctx.long_density() * odd) < 1e-6);

  ArcPoint bad = arc0;
  bad.q = 1'000'000;
  CHECK_THROWS_AS(saz_main_term(ctx, 1, 0, bad, zero), std::invalid_argument);
  CHECK_THROWS_AS(saz_main_term(ctx, 500, 1, arc0, zero), std::invalid_argument);
}

TEST_CASE("saz_compare behaviour")
{
  const auto& ctx = ctx_1e6();
  const ArcConfig cfg = ArcConfig::make(1'000'000, 0.65);
  for (const char* s : {"0/1", "1/2", "1/3", "2/5"}) {
    const auto c = saz_compare(ctx, cfg, 1, 0, Frequency::parse(s));
    CHECK(c.arc.is_major);
    CHECK(c.deviation < 0.25);
  }
  // periodicity in a
  const auto a = saz_compare(ctx, cfg, 1, 0, Frequency{2, 7, 0.0});
  const auto b = saz_compare(ctx, cfg, 1, 0, Frequency{9, 7, 0.0});
  CHECK(a.deviation == doctest::Approx(b.deviation).epsilon(1e-12));

  // near 1/5 the main term tracks the sum
  const auto near = saz_compare(ctx, cfg, 1, 0, Frequency::parse("1/5+1e-8"));
  CHECK(near.arc.q == 5);
  CHECK(near.deviation < 0.25);

  // minor arcs are smaller than major arcs on average
  std::vector<double> minor;
  for (u64 q = 50; q <= 500; q += 25)
    minor.push_back(saz_compare(ctx, cfg, 1, 0, Frequency::rational(1, q)).deviation);
  std::vector<double> major;
  for (u64 q = 1; q <= 5; ++q) {
    const double v = std::abs(exp_sum(ctx, Kernel::rho_plus, 1, 0, Frequency::rational(1, q)));
    major.push_back(v / (ctx.x_pow_theta() / ctx.log_x()));
  }
  std::sort(minor.begin(), minor.end());
  std::sort(major.begin(), major.end());
  CHECK(minor[minor.size() / 2] < major[major.size() / 2]);
}

TEST_CASE("w-tricked pair")
{
  auto params = sieve::SieveParams::defaults(100'000'000, 0.65);
  params.set_w(5);  // W = 30 so the progression is non-trivial
  const double ap = 2.8269688;
  const auto w = build_w_tricked(params, ap, 7);
  CHECK(w.W == 30);
  CHECK(w.N == static_cast<u64>(std::floor(4 * params.x_pow_theta() / 90)));
  u64 primes = 0;
  for (u64 n = 1; n <= w.N; ++n) {
    CHECK(w.f(n) <= w.nu(n));
    const u64 v = w.W * (w.m + n) + w.b;
    const bool pr = oracle::is_prime(v);
    primes += pr;
    CHECK((w.f(n) > 0) == pr);
  }
  double sum = 0;
  for (double v : w.f.span())
    sum += v;
  CHECK(sum == doctest::Approx(static_cast<double>(primes) * w.scale));
  // mean of f is about (prime density on the progression) * log x / alpha+ ~ 1 / alpha+
  CHECK(sum / static_cast<double>(w.N) > 0.2);
  CHECK(sum / static_cast<double>(w.N) < 0.6);
  CHECK(w.f(0) == 0.0);
  CHECK(w.f(w.N + 1) == 0.0);

  CHECK_THROWS_AS(build_w_tricked(params, ap, 6), std::invalid_argument);
}

TEST_CASE("eta grid and condition check")
{
  const auto grid = eta_grid(6, 5, 1);
  // Farey fractions with q <= 6: 1 + 1 + 2 + 2 + 4 + 2 + 1 (a = 0 for q = 1)
  CHECK(grid.size() == 12 + 5);

  const auto& ctx = ctx_1e6();
  const double ap = 2.8269688;
  const auto rep = pseudorandom_eta(ctx, ap, 1, grid);
  CHECK(rep.points.size() == grid.size());

  // gamma = 0 entry by hand
  double s = 0, cnt = 0;
  for (u64 n = ctx.lo(); n <= ctx.hi(); ++n) {
    s += ctx.kernel(Kernel::rho_plus, n);
    cnt += 1;
  }
  const double norm = ctx.x_pow_theta() / ctx.log_x();
  CHECK(rep.points[0].deviation == doctest::Approx(std::fabs(s - ap / ctx.log_x() * cnt) / norm));
  CHECK(rep.eta == doctest::Approx(std::max_element(rep.points.begin(), rep.points.end(),
                                                    [](auto& a, auto& b) {
                                                      return a.deviation < b.deviation;
                                                    })->deviation));

  auto p = sieve::SieveParams::defaults(1'000'000, 0.65);
  p.set_w(3);
  const ArcContext ctx6(p);
  CHECK_THROWS_AS(pseudorandom_eta(ctx6, ap, 4, grid), std::invalid_argument);
}
