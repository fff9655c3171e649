#include <threeprimes/transference.hpp>

#include <threeprimes/errors.hpp>
#include <threeprimes/fft.hpp>
#include <threeprimes/parallel.hpp>
#include <threeprimes/sieve.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace threeprimes::transference {

namespace {

constexpr double kConvolutionTolerance = 1e-9;

std::size_t min_ap_length(std::size_t N, double eta)
{
  const double L = std::ceil(eta * static_cast<double>(N) - 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(L));
}

double frac(long double t)
{
  const long double f = t - std::floor(t);
  return static_cast<double>(f >= 1.0L ? 0.0L : f);
}

IntSet normalized(const IntSet& A)
{
  IntSet out(A);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (!out.empty() && out.front() < 1)
    throw std::invalid_argument("popular_sums: elements must be positive");
  return out;
}

// out[n - first] = sum_t K(t) v(n + t) for a symmetric K on [-D, D]; v lives on [1, N].
std::vector<double> smooth(std::span<const double> v, std::span<const double> K, std::size_t D)
{
  const std::size_t N = v.size();
  const std::size_t len = N + 2 * D;
  if (static_cast<double>(len) * static_cast<double>(K.size()) <= 2e7) {
    std::vector<double> out(len, 0.0);
    for (std::size_t j = 0; j < K.size(); ++j) {
      if (K[j] == 0.0)
        continue;
      // t = j - D; out index k (n = k + 1 - D) reads v[k - D + t] = v[k + j - 2D]
      for (std::size_t i = 0; i < N; ++i)
        out[i + 2 * D - j] += K[j] * v[i];
    }
    return out;
  }
  auto out = convolve(v, K);
  for (double& x : out)
    x = std::max(0.0, x);
  return out;
}

double max_abs(std::span<const cplx> z)
{
  double m = 0.0;
  for (const auto& v : z)
    m = std::max(m, std::abs(v));
  return m;
}

} // namespace

ApMin ap_density_min(const DensityFunction& f, double eta, const ApOptions& opts)
{
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("ap_density_min: eta must lie in (0, 1]");
  const std::size_t N = f.N();
  ApMin best;
  best.value = std::numeric_limits<double>::infinity();
  if (N == 0)
    return best;
  const std::size_t L = min_ap_length(N, eta);
  const std::size_t max_step = L == 1 ? 1 : (N - 1) / (L - 1);

  if (N <= opts.exhaustive_limit) {
    std::vector<double> prefix;
    for (std::size_t s = 1; s <= max_step; ++s) {
      for (std::size_t r = 1; r <= s && r <= N; ++r) {
        prefix.assign(1, 0.0);
        for (std::size_t n = r; n <= N; n += s)
          prefix.push_back(prefix.back() + f.values[n - 1]);
        const std::size_t m = prefix.size() - 1;
        for (std::size_t i = 0; i + L <= m; ++i)
          for (std::size_t j = i + L; j <= m; ++j) {
            const double mean = (prefix[j] - prefix[i]) / static_cast<double>(j - i);
            if (mean < best.value)
              best = {mean, true, r + i * s, s, j - i};
          }
      }
    }
    return best;
  }

  best.exhaustive = false;
  std::mt19937_64 rng(opts.seed);
  for (std::size_t k = 0; k < opts.samples; ++k) {
    const std::size_t s = std::uniform_int_distribution<std::size_t>(1, max_step)(rng);
    const std::size_t max_len = (N - 1) / s + 1;
    const std::size_t len = std::uniform_int_distribution<std::size_t>(L, max_len)(rng);
    const std::size_t start =
        std::uniform_int_distribution<std::size_t>(1, N - (len - 1) * s)(rng);
    double sum = 0.0;
    for (std::size_t i = 0; i < len; ++i)
      sum += f.values[start - 1 + i * s];
    const double mean = sum / static_cast<double>(len);
    if (mean < best.value)
      best = {mean, false, start, s, len};
  }
  return best;
}

bool ap_hypothesis_holds(const IntSet& A, u64 N, double alpha, double eta)
{
  std::vector<double> ind(N, 0.0);
  for (auto a : A) {
    if (a < 1 || static_cast<u64>(a) > N)
      throw std::invalid_argument("ap_hypothesis_holds: element outside [1, N]");
    ind[static_cast<std::size_t>(a - 1)] = 1.0;
  }
  return ap_density_min(DensityFunction(std::move(ind)), eta).value >= alpha - 1e-12;
}

IntSet popular_sums(const IntSet& A_in, const IntSet& B_in, double eta)
{
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("popular_sums: eta must lie in (0, 1]");
  const IntSet A = normalized(A_in);
  const IntSet B = normalized(B_in);
  if (A.empty() || B.empty())
    return {};
  std::vector<double> a(static_cast<std::size_t>(A.back()) + 1, 0.0);
  std::vector<double> b(static_cast<std::size_t>(B.back()) + 1, 0.0);
  for (auto v : A)
    a[static_cast<std::size_t>(v)] = 1.0;
  for (auto v : B)
    b[static_cast<std::size_t>(v)] = 1.0;
  const auto conv = convolve(a, b);
  const double threshold = eta * static_cast<double>(std::max(A.size(), B.size()));
  IntSet out;
  for (std::size_t n = 0; n < conv.size(); ++n)
    if (static_cast<double>(std::llround(conv[n])) >= threshold)
      out.push_back(static_cast<std::int64_t>(n));
  return out;
}

std::vector<double> triple_convolution_all(const DensityFunction& f1, const DensityFunction& f2,
                                           const DensityFunction& f3)
{
  std::vector<double> out(f1.N() + f2.N() + f3.N() + 1, 0.0);
  if (f1.N() == 0 || f2.N() == 0 || f3.N() == 0)
    return out;
  const auto c = convolve(convolve(f1.span(), f2.span()), f3.span());
  for (std::size_t k = 0; k < c.size(); ++k)
    out[k + 3] = c[k];
  return out;
}

double triple_convolution_direct(const DensityFunction& f1, const DensityFunction& f2,
                                 const DensityFunction& f3, std::int64_t n)
{
  double sum = 0.0;
  const auto N1 = static_cast<std::int64_t>(f1.N());
  const auto N2 = static_cast<std::int64_t>(f2.N());
  for (std::int64_t a = 1; a <= N1; ++a) {
    const double fa = f1(a);
    if (fa == 0.0)
      continue;
    for (std::int64_t b = 1; b <= N2; ++b)
      sum += fa * f2(b) * f3(n - a - b);
  }
  return sum;
}

double triple_convolution(const DensityFunction& f1, const DensityFunction& f2,
                          const DensityFunction& f3, std::int64_t n)
{
  const auto total = static_cast<std::int64_t>(f1.N() + f2.N() + f3.N());
  if (n < 2 || n > total)
    throw std::invalid_argument("triple_convolution: n outside [2, 3N]");
  const double fft = triple_convolution_all(f1, f2, f3)[static_cast<std::size_t>(n)];
  if (std::max({f1.N(), f2.N(), f3.N()}) <= 512) {
    const double direct = triple_convolution_direct(f1, f2, f3, n);
    if (std::fabs(fft - direct) > kConvolutionTolerance * std::max(1.0, std::fabs(direct)))
      throw NumericError("triple_convolution: FFT and direct sums disagree at n = " +
                         std::to_string(n));
  }
  return fft;
}

LqNorm lq_norm(std::span<const double> values, std::int64_t first, double q, std::size_t M)
{
  if (!(q > 2.0))
    throw std::invalid_argument("lq_norm: exponent must exceed 2");
  if (M == 0)
    M = std::max<std::size_t>(8, 8 * values.size());
  if (M < 8 * values.size())
    throw std::invalid_argument("lq_norm: grid must have at least 8N points");
  auto norm_on = [&](std::size_t m) {
    const auto hat = fourier_grid(values, first, m);
    double s = 0.0;
    for (const auto& z : hat)
      s += std::pow(std::abs(z), q);
    return std::pow(s / static_cast<double>(m), 1.0 / q);
  };
  LqNorm out;
  out.M = M;
  out.value = norm_on(M);
  out.refined = norm_on(2 * M);
  out.error = std::fabs(out.refined - out.value);
  return out;
}

LqNorm fourier_lq_norm(const DensityFunction& f, double q, std::size_t M)
{
  return lq_norm(f.span(), 1, q, M);
}

BohrSet bohr_set(std::span<const double> T, double delta, u64 N, std::size_t max_T)
{
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("bohr_set: delta must lie in (0, 1)");
  if (T.size() > max_T)
    throw std::invalid_argument("bohr_set: too many frequencies");
  BohrSet B;
  B.T.assign(T.begin(), T.end());
  B.delta = delta;
  B.N = N;
  const auto bmax = static_cast<u64>(std::floor(delta * static_cast<double>(N)));
  const double radius = delta / 30.0;
  for (u64 b = 1; b <= bmax; ++b) {
    bool ok = true;
    for (double g : T) {
      const double t = frac(static_cast<long double>(b) * g);
      if (std::min(t, 1.0 - t) >= radius) {
        ok = false;
        break;
      }
    }
    if (ok)
      B.elements.push_back(b);
  }
  return B;
}

std::vector<double> large_spectrum(const DensityFunction& f, double delta, std::size_t M)
{
  if (M == 0)
    M = 8 * f.N();
  const auto hat = fourier_grid(f.span(), 1, M);
  const double cut = delta * static_cast<double>(f.N());
  std::vector<double> T;
  for (std::size_t k = 0; k < M; ++k)
    if (std::abs(hat[k]) >= cut)
      T.push_back(static_cast<double>(k) / static_cast<double>(M));
  return T;
}

double Decomposition::g_at(std::int64_t n) const
{
  const std::int64_t i = n - first;
  return i >= 0 && i < static_cast<std::int64_t>(g.size()) ? g[static_cast<std::size_t>(i)] : 0.0;
}

double Decomposition::h_at(std::int64_t n) const
{
  const std::int64_t i = n - first;
  return i >= 0 && i < static_cast<std::int64_t>(h.size()) ? h[static_cast<std::size_t>(i)] : 0.0;
}

Decomposition transfer_decompose(const DensityFunction& f, const DensityFunction& nu,
                                 double delta, const DecomposeOptions& opts)
{
  const std::size_t N = f.N();
  if (N == 0 || nu.N() != N)
    throw std::invalid_argument("transfer_decompose: f and nu must share a nonzero length");
  for (std::size_t i = 0; i < N; ++i)
    if (f.values[i] > nu.values[i])
      throw std::invalid_argument("transfer_decompose: need f <= nu pointwise");
  const std::size_t M = opts.grid == 0 ? 8 * N : opts.grid;
  if (M < 8 * N)
    throw std::invalid_argument("transfer_decompose: grid must have at least 8N points");

  Decomposition dec;
  dec.T = large_spectrum(f, delta, M);
  const BohrSet bohr = bohr_set(dec.T, delta, N);
  if (bohr.elements.empty())
    throw EmptyBohrSet("transfer_decompose: Bohr set is empty (|T| = " +
                       std::to_string(dec.T.size()) + "); raise delta");
  dec.B = bohr.elements;

  // K(t) = #{(b1, b2): b1 - b2 = t} / |B|^2 on [-D, D]
  const u64 bmin = dec.B.front();
  const std::size_t D = dec.B.back() - bmin;
  std::vector<double> ind(D + 1, 0.0);
  for (u64 b : dec.B)
    ind[b - bmin] = 1.0;
  std::vector<double> rev(ind.rbegin(), ind.rend());
  auto K = convolve(ind, rev);  // index j <-> t = j - D
  const double pairs = static_cast<double>(dec.B.size()) * static_cast<double>(dec.B.size());
  for (double& k : K)
    k = static_cast<double>(std::llround(k)) / pairs;

  dec.first = 1 - static_cast<std::int64_t>(D);
  dec.g = smooth(f.span(), K, D);
  const std::size_t len = dec.g.size();
  std::vector<double> f_ext(len, 0.0);
  std::copy(f.values.begin(), f.values.end(), f_ext.begin() + static_cast<std::ptrdiff_t>(D));

  // Snap g to the ulp grid of f so that h = f - g is exact and g + h == f.
  dec.h.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    const double fv = f_ext[i];
    if (fv > 0.0) {
      const double u = std::nextafter(fv, std::numeric_limits<double>::infinity()) - fv;
      const double k = std::round(dec.g[i] / u);
      if (k < 0x1p52)
        dec.g[i] = k * u;
    }
    dec.h[i] = fv - dec.g[i];
  }
  auto& rep = dec.report;
  rep.exact_sum = true;
  for (std::size_t i = 0; i < len; ++i)
    if (dec.g[i] + dec.h[i] != f_ext[i] || dec.g[i] < 0.0)
      rep.exact_sum = false;

  // (1)
  rep.g_max = *std::max_element(dec.g.begin(), dec.g.end());
  const auto nu_s = smooth(nu.span(), K, D);
  rep.nu_smoothed_max = *std::max_element(nu_s.begin(), nu_s.end());
  const std::vector<double> ones(N, 1.0);
  const auto one_s = smooth(ones, K, D);
  std::vector<double> diff(N);
  for (std::size_t i = 0; i < N; ++i)
    diff[i] = nu.values[i] - 1.0;
  rep.nu_eta = max_abs(fourier_grid(diff, 1, M)) / static_cast<double>(N);
  rep.g_bound = *std::max_element(one_s.begin(), one_s.end()) +
                rep.nu_eta * static_cast<double>(N) / static_cast<double>(dec.B.size());

  // (2)
  const std::size_t Mx = std::max(M, 8 * len);
  const auto fhat = fourier_grid(f.span(), 1, Mx);
  const auto hhat = fourier_grid(dec.h, dec.first, Mx);
  std::vector<double> mu(D + 1);
  for (std::size_t i = 0; i <= D; ++i)
    mu[i] = ind[i] / static_cast<double>(dec.B.size());
  const auto muhat = fourier_grid(mu, static_cast<std::int64_t>(bmin), Mx);
  rep.multiplier_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < Mx; ++k) {
    rep.h_hat_max = std::max(rep.h_hat_max, std::abs(hhat[k]));
    rep.f_hat_max = std::max(rep.f_hat_max, std::abs(fhat[k]));
    rep.multiplier_excess = std::max(rep.multiplier_excess, std::abs(hhat[k]) - std::abs(fhat[k]));
    const cplx predicted = fhat[k] * (1.0 - std::norm(muhat[k]));
    rep.identity_residual = std::max(rep.identity_residual, std::abs(hhat[k] - predicted));
  }

  // (3)
  rep.ap_eta = opts.ap_eta;
  rep.ap_min_f = ap_density_min(f, opts.ap_eta).value;
  std::vector<double> g_inner(dec.g.begin() + static_cast<std::ptrdiff_t>(D),
                              dec.g.begin() + static_cast<std::ptrdiff_t>(D + N));
  rep.ap_min_g = ap_density_min(DensityFunction(std::move(g_inner)), opts.ap_eta).value;

  // (4)
  rep.lq_exponent = opts.lq_exponent;
  rep.lq_f = lq_norm(f.span(), 1, opts.lq_exponent, Mx).value;
  rep.lq_g = lq_norm(dec.g, dec.first, opts.lq_exponent, Mx).value;
  rep.lq_h = lq_norm(dec.h, dec.first, opts.lq_exponent, Mx).value;
  return dec;
}

DensityFunction kneser_generator(u64 N, double eps, double eta, std::uint64_t seed,
                                 std::size_t max_retries)
{
  if (N == 0 || !(eps > 0.0 && eps < 2.0 / 3.0))
    throw std::invalid_argument("kneser_generator: need N >= 1 and eps in (0, 2/3)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double floor_mean = 1.0 / 3.0 + eps;
  std::vector<double> v(N);
  for (std::size_t attempt = 0; attempt < max_retries; ++attempt) {
    const int kind = static_cast<int>(rng() % 5);
    switch (kind) {
    case 0: {  // i.i.d. uniform on [lo, 1]
      const double lo = 0.15 + 0.35 * U(rng);
      for (auto& x : v)
        x = lo + (1.0 - lo) * U(rng);
      break;
    }
    case 1: {  // full on one residue class, thin background elsewhere
      const u64 m = 2 + rng() % 4;
      const u64 r = rng() % m;
      const double bg = floor_mean + 0.03 * U(rng);
      for (u64 n = 1; n <= N; ++n)
        v[n - 1] = n % m == r ? 1.0 : std::clamp(bg + 0.02 * (U(rng) - 0.5), 0.0, 1.0);
      break;
    }
    case 2: {  // background plus saturated blocks
      const double bg = floor_mean + 0.05 * U(rng);
      std::fill(v.begin(), v.end(), bg);
      const int blocks = 1 + static_cast<int>(rng() % 6);
      for (int b = 0; b < blocks; ++b) {
        const u64 s = rng() % N;
        const u64 len = 1 + rng() % std::max<u64>(1, N / 4);
        for (u64 i = s; i < std::min<u64>(N, s + len); ++i)
          v[i] = 1.0;
      }
      break;
    }
    case 3: {  // random 0/1 set
      const double p = 0.6 + 0.35 * U(rng);
      for (auto& x : v)
        x = U(rng) < p ? 1.0 : 0.0;
      break;
    }
    default: {  // linear ramp
      const double a = floor_mean + 0.1 * U(rng);
      const double b = (1.0 - a) * U(rng);
      const bool up = rng() & 1;
      for (u64 n = 1; n <= N; ++n) {
        const double t = static_cast<double>(up ? n : N + 1 - n) / static_cast<double>(N);
        v[n - 1] = std::min(1.0, a + b * t);
      }
      break;
    }
    }
    DensityFunction f(v);
    if (ap_density_min(f, eta).value >= floor_mean)
      return f;
  }
  throw std::runtime_error("kneser_generator: no admissible function after " +
                           std::to_string(max_retries) + " attempts");
}

KneserReport test_kneser_dense(u64 N, std::size_t trials, double eps, double eta,
                               std::uint64_t seed)
{
  if (N < 2 || trials == 0)
    throw std::invalid_argument("test_kneser_dense: need N >= 2 and trials >= 1");
  KneserReport rep;
  rep.N = N;
  rep.trials = trials;
  rep.bound = 1e-3 * std::pow(eps, 4) * eta;

  const double NN = static_cast<double>(N) * static_cast<double>(N);
  const u64 n_lo = (N + 1) / 2;
  std::vector<double> minima(trials, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::int64_t> argmin(trials, 0);
  parallel_for(trials, [&](std::size_t t) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(t)};
    std::array<std::uint64_t, 3> seeds{};
    seq.generate(seeds.begin(), seeds.end());
    try {
      const auto f1 = kneser_generator(N, eps, eta, seeds[0]);
      const auto f2 = kneser_generator(N, eps, eta, seeds[1]);
      const auto f3 = kneser_generator(N, eps, eta, seeds[2]);
      const auto conv = triple_convolution_all(f1, f2, f3);
      double m = std::numeric_limits<double>::infinity();
      for (u64 n = n_lo; n <= N; ++n)
        if (conv[n] / NN < m) {
          m = conv[n] / NN;
          argmin[t] = static_cast<std::int64_t>(n);
        }
      minima[t] = m;
    } catch (const std::runtime_error&) {
      // counted below as a generator failure
    }
  });

  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    if (std::isnan(minima[t])) {
      ++rep.generator_failures;
      continue;
    }
    rep.trial_minima.push_back(minima[t]);
    if (minima[t] < rep.min_ratio) {
      rep.min_ratio = minima[t];
      rep.min_trial = t;
      rep.min_n = argmin[t];
    }
  }
  rep.margin = rep.min_ratio / rep.bound;
  return rep;
}

DoublingReport test_doubling4(u64 N, std::size_t instances, double eta, double alpha,
                              std::uint64_t seed)
{
  if (N == 0 || !(alpha > 0.0 && alpha <= 0.5))
    throw std::invalid_argument("test_doubling4: need N >= 1 and alpha in (0, 1/2]");
  DoublingReport rep;
  rep.N = N;
  rep.alpha = alpha;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  auto random_set = [&]() {
    IntSet A;
    if (rng() % 2 == 0) {
      const double p = std::min(0.98, alpha + 0.15 + 0.5 * U(rng));
      for (u64 n = 1; n <= N; ++n)
        if (U(rng) < p)
          A.push_back(static_cast<std::int64_t>(n));
    } else {  // union of a residue class with a dense random part
      const u64 m = 2 + rng() % 3;
      const u64 r = rng() % m;
      const double p = std::min(0.98, alpha + 0.1 + 0.3 * U(rng));
      for (u64 n = 1; n <= N; ++n)
        if (n % m == r || U(rng) < p)
          A.push_back(static_cast<std::int64_t>(n));
    }
    return A;
  };

  const std::size_t max_attempts = 50 * instances + 50;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t attempt = 0; rep.instances < instances && attempt < max_attempts; ++attempt) {
    const IntSet A = random_set();
    const IntSet B = random_set();
    if (!ap_hypothesis_holds(A, N, alpha, eta) || !ap_hypothesis_holds(B, N, alpha, eta)) {
      ++rep.rejected;
      continue;
    }
    const double margin =
        static_cast<double>(popular_sums(A, B, eta).size()) / static_cast<double>(N) - 4.0 * alpha;
    rep.margins.push_back(margin);
    rep.min_margin = std::min(rep.min_margin, margin);
    ++rep.instances;
  }
  return rep;
}

ObstructionReport bohr_obstruction_demo(double xi, double interval_length, u64 lo, u64 hi,
                                        double interval_start, std::size_t bins)
{
  if (!(interval_length > 0.0 && interval_length < 1.0 / 3.0))
    throw std::invalid_argument("bohr_obstruction_demo: interval length must lie in (0, 1/3)");
  if (lo < 2 || hi < lo || bins == 0)
    throw std::invalid_argument("bohr_obstruction_demo: need 2 <= lo <= hi and bins >= 1");
  ObstructionReport rep;
  rep.interval_start = interval_start;
  rep.interval_length = interval_length;
  rep.sumset_length = 3.0 * interval_length;
  rep.histogram.assign(bins, 0);

  const auto phase = [&](u64 n) { return frac(static_cast<long double>(xi) * n); };
  std::size_t inside = 0;
  for (u64 seg = lo; seg <= hi; seg += sieve::kMaxSegment) {
    const u64 seg_hi = std::min<u64>(hi + 1, seg + sieve::kMaxSegment);
    const auto win = sieve::sieve_window(seg, seg_hi);
    for (u64 p = seg; p < seg_hi; ++p) {
      if (!win.is_prime(p))
        continue;
      ++rep.primes;
      const double t = phase(p);
      rep.histogram[std::min(bins - 1, static_cast<std::size_t>(t * static_cast<double>(bins)))]++;
      if (frac(static_cast<long double>(t) - interval_start) < interval_length)
        ++inside;
    }
  }
  rep.inside_fraction =
      rep.primes ? static_cast<double>(inside) / static_cast<double>(rep.primes) : 0.0;

  std::size_t outside = 0;
  for (u64 n = 3 * lo | 1; n <= 3 * hi; n += 2) {
    ++rep.targets;
    if (frac(static_cast<long double>(phase(n)) - 3.0L * interval_start) >= rep.sumset_length)
      ++outside;
  }
  rep.outside_fraction =
      rep.targets ? static_cast<double>(outside) / static_cast<double>(rep.targets) : 0.0;
  return rep;
}

} // namespace threeprimes::transference
