#include <doctest.h>

#include "oracles.hpp"

#include <threeprimes/numtheory.hpp>
#include <threeprimes/transference.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

using namespace threeprimes;
using namespace threeprimes::transference;

namespace {

// mean over every (start, step, length) with length >= ceil(eta N), by brute force
double ap_min_brute(const std::vector<double>& f, double eta)
{
  const int N = static_cast<int>(f.size());
  const int L = std::max(1, static_cast<int>(std::ceil(eta * N - 1e-9)));
  double best = 1e300;
  for (int a = 1; a <= N; ++a)
    for (int s = 1; s <= N; ++s)
      for (int len = L; a + (len - 1) * s <= N; ++len) {
        double sum = 0;
        for (int i = 0; i < len; ++i)
          sum += f[a - 1 + i * s];
        best = std::min(best, sum / len);
      }
  return best;
}

IntSet popular_brute(const IntSet& A, const IntSet& B, double eta)
{
  std::map<std::int64_t, int> cnt;
  for (auto a : A)
    for (auto b : B)
      cnt[a + b]++;
  IntSet out;
  const double thr = eta * static_cast<double>(std::max(A.size(), B.size()));
  for (auto [n, c] : cnt)
    if (c >= thr)
      out.push_back(n);
  return out;
}

IntSet random_set(std::mt19937_64& rng, int N, double p)
{
  std::bernoulli_distribution keep(p);
  IntSet A;
  for (int n = 1; n <= N; ++n)
    if (keep(rng))
      A.push_back(n);
  return A;
}

DensityFunction random_density(std::mt19937_64& rng, std::size_t N)
{
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> v(N);
  for (auto& x : v)
    x = U(rng) < 0.2 ? 0.0 : U(rng);
  return DensityFunction(v);
}

// sparse f under a dense majorant: nu ~ 1 + noise, f = nu on a random sparse set
std::pair<DensityFunction, DensityFunction> sparse_pair(std::mt19937_64& rng, std::size_t N,
                                                        double mass)
{
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> nu(N), f(N, 0.0);
  for (auto& x : nu)
    x = 0.9 + 0.2 * U(rng);
  double total = 0;
  while (total < mass) {
    const auto i = static_cast<std::size_t>(rng() % N);
    if (f[i] == 0.0) {
      f[i] = nu[i] * (0.5 + 0.5 * U(rng));
      total += f[i];
    }
  }
  return {DensityFunction(f), DensityFunction(nu)};
}

} // namespace

TEST_CASE("ap_density_min examples and brute force")
{
  CHECK(ap_density_min(DensityFunction::constant(50, 1.0), 0.3).value == 1.0);
  CHECK(ap_density_min(DensityFunction::constant(50, 0.37), 0.01).value == doctest::Approx(0.37));

  std::vector<double> odd(40);
  for (int n = 1; n <= 40; ++n)
    odd[n - 1] = n % 2;
  const auto r = ap_density_min(DensityFunction(odd), 0.05);
  CHECK(r.value == 0.0);
  CHECK(r.exhaustive);
  CHECK(r.step % 2 == 0);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t N = 20 + rng() % 40;
    const auto f = random_density(rng, N);
    for (double eta : {0.05, 0.1, 0.3, 1.0})
      CHECK(ap_density_min(f, eta).value == doctest::Approx(ap_min_brute(f.values, eta)));
  }

  // N = 200 against brute force at eta = 0.1
  const auto f = random_density(rng, 200);
  const auto m = ap_density_min(f, 0.1);
  CHECK(m.value == doctest::Approx(ap_min_brute(f.values, 0.1)));
  double witness = 0;
  for (u64 i = 0; i < m.length; ++i)
    witness += f(static_cast<std::int64_t>(m.start + i * m.step));
  CHECK(witness / static_cast<double>(m.length) == doctest::Approx(m.value));
  CHECK(m.length >= 20);

  CHECK_THROWS_AS(ap_density_min(f, 0.0), std::invalid_argument);

  ApOptions sampled;
  sampled.exhaustive_limit = 100;
  sampled.samples = 20'000;
  const auto s = ap_density_min(f, 0.1, sampled);
  CHECK_FALSE(s.exhaustive);
  CHECK(s.value >= m.value);
}

TEST_CASE("popular sums")
{
  CHECK(popular_sums({1, 2, 3, 4}, {1, 2, 3, 4}, 1.0) == IntSet{5});
  CHECK(popular_sums({}, {}, 0.5).empty());
  CHECK(popular_sums({1}, {1}, 1.0) == IntSet{2});
  CHECK(popular_sums({3, 1, 1}, {2}, 0.5) == IntSet{3, 5});
  CHECK_THROWS_AS(popular_sums({0, 1}, {1}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(popular_sums({1}, {1}, 0.0), std::invalid_argument);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const int N = 1 + static_cast<int>(rng() % 512);
    const auto A = random_set(rng, N, U(rng));
    const auto B = random_set(rng, N, U(rng));
    const double eta = 0.01 + 0.99 * U(rng);
    CHECK(popular_sums(A, B, eta) == popular_brute(A, B, eta));
  }
}

TEST_CASE("triple convolution")
{
  const auto two = DensityFunction::constant(2, 1.0);
  CHECK(triple_convolution(two, two, two, 4) == doctest::Approx(3.0));
  const auto ones = DensityFunction::constant(30, 1.0);
  CHECK(triple_convolution(ones, ones, ones, 3) == doctest::Approx(1.0));
  CHECK(triple_convolution(ones, ones, ones, 2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(triple_convolution(ones, ones, ones, 1), std::invalid_argument);
  CHECK_THROWS_AS(triple_convolution(ones, ones, ones, 91), std::invalid_argument);

  std::mt19937_64 rng(23);
  const auto f1 = random_density(rng, 128);
  const auto f2 = random_density(rng, 128);
  const auto f3 = random_density(rng, 128);
  double direct = 0;
  for (int a = 1; a <= 128; ++a)
    for (int b = 1; b <= 128; ++b) {
      const int c = 200 - a - b;
      if (c >= 1 && c <= 128)
        direct += f1(a) * f2(b) * f3(c);
    }
  CHECK(std::fabs(triple_convolution(f1, f2, f3, 200) - direct) < 1e-9);

  // symmetric under permutations
  const auto all = triple_convolution_all(f1, f2, f3);
  const auto perm = triple_convolution_all(f3, f1, f2);
  for (std::size_t n = 0; n < all.size(); ++n)
    CHECK(all[n] == doctest::Approx(perm[n]).epsilon(1e-12));
}

TEST_CASE("restriction norms")
{
  CHECK(fourier_lq_norm(DensityFunction(std::vector<double>{1.0}), 2.5).value ==
        doctest::Approx(1.0));
  std::vector<double> delta1(10, 0.0);
  delta1[0] = 1.0;
  CHECK(fourier_lq_norm(DensityFunction(delta1), 3.0).value == doctest::Approx(1.0));
  CHECK(fourier_lq_norm(DensityFunction::constant(64, 0.0), 2.5).value == 0.0);

  // 1_[N]: norm scales like N^(3/5) and is grid-stable
  const auto a = fourier_lq_norm(DensityFunction::constant(256, 1.0), 2.5);
  const auto b = fourier_lq_norm(DensityFunction::constant(1024, 1.0), 2.5);
  CHECK(a.error < 0.01 * a.value);
  CHECK(b.value / a.value == doctest::Approx(std::pow(4.0, 0.6)).epsilon(0.01));

  CHECK_THROWS_AS(fourier_lq_norm(DensityFunction::constant(8, 1.0), 2.0), std::invalid_argument);
  CHECK_THROWS_AS(fourier_lq_norm(DensityFunction::constant(8, 1.0), 2.5, 32),
                  std::invalid_argument);
}

TEST_CASE("bohr sets")
{
  const auto empty = bohr_set({}, 0.3, 100);
  CHECK(empty.elements.size() == 30);
  CHECK(empty.elements.front() == 1);

  const std::vector<double> half{0.5};
  const auto even = bohr_set(half, 0.3, 100);
  std::vector<u64> expected;
  for (u64 b = 2; b <= 30; b += 2)
    expected.push_back(b);
  CHECK(even.elements == expected);

  const std::vector<double> irr{std::numbers::sqrt2 - 1};
  const auto tiny = bohr_set(irr, 0.01, 100);
  CHECK(tiny.elements.empty());

  CHECK_THROWS_AS(bohr_set(half, 1.0, 10), std::invalid_argument);
}

TEST_CASE("decomposition of constants and intervals")
{
  // f = 1/2 with nu = 1: |fhat| >= delta N only near 0 on the grid
  const std::size_t N = 256;
  const auto half = DensityFunction::constant(N, 0.5);
  const auto d = transfer_decompose(half, DensityFunction::constant(N, 1.0), 0.3);
  CHECK(d.report.exact_sum);
  // g is constant away from the edges, so h vanishes there
  const auto D = static_cast<std::int64_t>(d.B.back() - d.B.front());
  for (std::int64_t n = 1 + D; n <= static_cast<std::int64_t>(N) - D; ++n) {
    CHECK(d.g_at(n) == doctest::Approx(0.5));
    CHECK(std::fabs(d.h_at(n)) < 1e-12);
  }
  CHECK(d.report.identity_residual < 1e-9);

  // f = nu = 1_[N]: h lives on the boundary and is Fourier-small
  const auto ones = DensityFunction::constant(N, 1.0);
  const auto e = transfer_decompose(ones, ones, 0.3);
  CHECK(e.report.h_hat_max <= 0.3 * N);
  CHECK(e.report.g_max <= 1.0 + 1e-12);
  CHECK(e.report.nu_eta == 0.0);
}

TEST_CASE("dense f leaves no Bohr set at delta = 0.1")
{
  // |1hat_[N](1.5/N)| ~ N/(1.5 pi) > 0.1 N puts ~1.5/N into T, and then
  // ||b gamma|| < 1/300 forces b < 1
  const auto ones = DensityFunction::constant(256, 1.0);
  const auto T = large_spectrum(ones, 0.1);
  CHECK(T.size() > 1);
  CHECK_THROWS_AS(transfer_decompose(ones, ones, 0.1), EmptyBohrSet);
}

TEST_CASE("decomposition properties on sparse instances")
{
  std::mt19937_64 rng(29);
  const std::size_t N = 256;
  const double delta = 0.1;
  for (int i = 0; i < 10; ++i) {
    const double mass = delta * N * (0.5 + 0.45 * (i % 2) + 0.5 * (i % 3 == 0));
    auto [f, nu] = sparse_pair(rng, N, mass);
    const auto dec = transfer_decompose(f, nu, delta);
    const auto& r = dec.report;
    CHECK(r.exact_sum);
    CHECK(r.h_hat_max <= delta * N * 1.01);
    CHECK(r.multiplier_excess <= 1e-9);
    CHECK(r.identity_residual <= 1e-9 * N);
    CHECK(r.g_max <= r.nu_smoothed_max + 1e-12);
    CHECK(r.nu_smoothed_max <= r.g_bound + 1e-9);
    CHECK(r.lq_h <= r.lq_f + 1e-9);
    for (std::size_t k = 0; k < dec.g.size(); ++k)
      CHECK(dec.g[k] >= 0.0);
    // every listed b satisfies the Bohr inequalities
    for (u64 b : dec.B) {
      CHECK(b <= static_cast<u64>(delta * N));
      for (double g : dec.T)
        CHECK(dist_to_int(static_cast<double>(b) * g) < delta / 30);
    }
  }
  auto [f, nu] = sparse_pair(rng, N, 10.0);
  f.values[3] = 1.0;
  nu.values[3] = 0.5;
  CHECK_THROWS_AS(transfer_decompose(f, nu, delta), std::invalid_argument);
}

TEST_CASE("kneser dense tester")
{
  // f_i = 1 on [N]: f*f*f(n) = C(n-1, 2)
  const auto ones = DensityFunction::constant(64, 1.0);
  const auto all = triple_convolution_all(ones, ones, ones);
  CHECK(all[32] == doctest::Approx(31.0 * 30 / 2));

  // residue-concentrated functions meeting the progression hypothesis
  std::vector<double> v(120);
  for (int n = 1; n <= 120; ++n)
    v[n - 1] = n % 3 == 1 ? 1.0 : 1.0 / 3 + 0.05;
  const DensityFunction adv(v);
  CHECK(ap_density_min(adv, 0.05).value >= 1.0 / 3 + 0.05 - 1e-12);
  CHECK(triple_convolution_all(adv, adv, adv)[60] > 0.0);

  const auto f = kneser_generator(100, 0.05, 0.05, 3);
  CHECK(ap_density_min(f, 0.05).value >= 1.0 / 3 + 0.05);

  const auto rep = test_kneser_dense(128, 12, 0.05, 0.05, 7);
  CHECK(rep.generator_failures == 0);
  CHECK(rep.trial_minima.size() == 12);
  CHECK(rep.min_ratio > 0.0);
  CHECK(rep.margin > 1.0);
  CHECK(rep.min_n >= 64);
  CHECK(rep.min_n <= 128);
}

TEST_CASE("doubling tester")
{
  // {n = 0, 1 mod 4} has density 0 on the progression 2, 6, 10, ...
  IntSet A;
  for (std::int64_t n = 1; n <= 120; ++n)
    if (n % 4 == 0 || n % 4 == 1)
      A.push_back(n);
  CHECK_FALSE(ap_hypothesis_holds(A, 120, 1.0 / 3, 0.05));

  IntSet full;
  for (std::int64_t n = 1; n <= 120; ++n)
    full.push_back(n);
  CHECK(ap_hypothesis_holds(full, 120, 0.5, 0.05));
  CHECK(static_cast<double>(popular_sums(full, full, 0.05).size()) >= (4 * 0.5 - 0.1) * 120);

  const auto rep = test_doubling4(120, 8, 0.1, 1.0 / 3, 11);
  CHECK(rep.instances == 8);
  CHECK(rep.margins.size() == 8);
  CHECK(rep.min_margin == doctest::Approx(*std::min_element(rep.margins.begin(), rep.margins.end())));
}

TEST_CASE("bohr obstruction demo")
{
  const auto zero = bohr_obstruction_demo(0.0, 0.2, 1000, 2000);
  CHECK(zero.inside_fraction == 1.0);
  CHECK(zero.outside_fraction == 0.0);
  CHECK(zero.primes == oracle::primes_between(999, 2001).size());

  const double phi = std::numbers::phi;
  const auto g = bohr_obstruction_demo(phi, 0.3, 1'000'000, 1'010'000, 0.1);
  CHECK(std::fabs(g.inside_fraction - 0.3) < 0.05);
  CHECK(g.sumset_length == doctest::Approx(0.9));
  CHECK(std::fabs(g.outside_fraction - 0.1) < 0.05);
  std::size_t total = 0;
  for (auto c : g.histogram)
    total += c;
  CHECK(total == g.primes);
  CHECK_THROWS_AS(bohr_obstruction_demo(phi, 0.34, 100, 200), std::invalid_argument);
}
