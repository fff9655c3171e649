#pragma once

#include <threeprimes/density.hpp>
#include <threeprimes/sieve.hpp>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace threeprimes::arcs {

using cplx = std::complex<double>;

// gamma = a/q + offset, with the rational part kept exact so that phases
// n*gamma mod 1 do not lose digits for large n.
struct Frequency {
  std::int64_t a = 0;
  u64 q = 1;
  double offset = 0.0;

  static Frequency rational(std::int64_t a, u64 q);
  static Frequency real(double gamma);
  // "a/q", "a/q+1e-8" or a decimal
  static Frequency parse(const std::string& text);

  double value() const;
  // n*gamma mod 1, in [0, 1)
  double phase(u64 n) const;
  cplx e(u64 n) const;  // e(n gamma)
  Frequency reflected() const;  // 1 - gamma
};

// Q is the Dirichlet parameter, q_threshold separates major from minor arcs.
struct ArcConfig {
  double Q = 1.0;
  double q_threshold = 20.0;

  // Q = x^(2 theta - 1) (log x)^(-5A), q_threshold = clamp((log x)^(5A), 20, 1000).
  // A = 0 is the desk-scale default.
  static ArcConfig make(u64 x, double theta, double A = 0.0);
};

struct ArcPoint {
  double gamma = 0.0;
  std::int64_t a = 0;
  u64 q = 1;
  double lambda = 0.0;  // gamma - a/q
  bool is_major = true;
};

// Best approximation a/q with q <= Q (last continued-fraction convergent),
// so ||q gamma|| is minimal over q <= Q and |lambda| < 1/(qQ).
ArcPoint classify(const Frequency& gamma, const ArcConfig& config);
ArcPoint classify(double gamma, u64 x, double theta, double A = 0.0);

// Smooth bump on [start, start + length]: 0 outside, 1 on the central
// (1 - 2 taper) fraction, exp(-1/t)-mollified ramps in between.
class SmoothWeight {
public:
  SmoothWeight(double start, double length, double taper = 0.05);

  double operator()(double t) const;
  double start() const { return start_; }
  double length() const { return length_; }
  double taper() const { return taper_; }

private:
  double start_;
  double length_;
  double taper_;
};

enum class Kernel { rho, rho_plus };

// Sieved data shared by every frequency: the window [x - x^theta/3, x + x^theta]
// with rho and rho+ per n, the short weight g on [x, x + x^theta], and the
// long-interval density (1/g1hat(0)) sum g1 rho+ over [x, x + h1].
class ArcContext {
public:
  struct Options {
    double taper = 0.05;
    double long_cap = 1e7;  // h1 is truncated to this length
  };

  ArcContext(const sieve::SieveParams& params, Options opts);
  explicit ArcContext(const sieve::SieveParams& params) : ArcContext(params, Options{}) {}

  const sieve::SieveParams& params() const { return params_; }
  const SmoothWeight& weight() const { return weight_; }
  u64 lo() const { return lo_; }
  u64 hi() const { return hi_; }  // inclusive
  double kernel(Kernel k, u64 n) const;

  double h1() const { return h1_; }
  bool long_truncated() const { return long_truncated_; }
  double long_density() const { return long_density_; }
  double log_x() const;
  double x_pow_theta() const { return params_.x_pow_theta(); }

private:
  sieve::SieveParams params_;
  SmoothWeight weight_;
  u64 lo_ = 0;
  u64 hi_ = 0;
  std::vector<std::uint8_t> rho_;
  std::vector<std::uint32_t> rho_plus_;
  double h1_ = 0.0;
  bool long_truncated_ = false;
  double long_density_ = 0.0;
};

// sum_{n in [x, x+x^theta], n = c (d)} K(n) g(n) e(n gamma)
cplx exp_sum(const ArcContext& ctx, Kernel kernel, u64 d, u64 c, const Frequency& gamma);

// [d,q]/phi([d,q]) * long density * sum_{n = c (d), (n,q) = 1} g(n) e(gamma n)
cplx saz_main_term(const ArcContext& ctx, u64 d, u64 c, const ArcPoint& arc,
                   const Frequency& gamma);

struct Comparison {
  ArcPoint arc;
  cplx lhs;
  cplx rhs;
  double deviation = 0.0;  // |lhs - rhs| (major) or |lhs| (minor), over x^theta / log x
};

Comparison saz_compare(const ArcContext& ctx, const ArcConfig& config, u64 d, u64 c,
                       const Frequency& gamma);

// f(n) = (log x / alpha+) (phi(W)/W) rho(W(m+n)+b) and nu the same with rho+,
// on [N] with N = floor(4 x^theta / (3W)), m = floor((x - x^theta/3) / W).
struct WTricked {
  u64 N = 0;
  u64 m = 0;
  u64 b = 0;
  u64 W = 1;
  double scale = 0.0;
  DensityFunction f;
  DensityFunction nu;
};

// Requires gcd(b, W) = 1. m_offset overrides the default m when set.
WTricked build_w_tricked(const sieve::SieveParams& params, double alpha_plus, u64 b,
                         std::int64_t m_offset = -1);

struct EtaPoint {
  Frequency gamma;
  double deviation = 0.0;
};

struct EtaReport {
  double eta = 0.0;  // max deviation over the grid
  std::vector<EtaPoint> points;
};

// Farey fractions a/q with q <= qmax followed by `random_points` uniform samples.
std::vector<Frequency> eta_grid(u64 qmax, std::size_t random_points, u64 seed);

// Normalized deviation of rho+ from its predicted density along c mod W:
//   |sum rho+(n) e(n gamma) - alpha+/log x * W/phi(W) sum e(n gamma)| / (x^theta / (phi(W) log x))
// over n in [x - x^theta/3, x + x^theta], n = c (W). Requires gcd(c, W) = 1.
EtaReport pseudorandom_eta(const ArcContext& ctx, double alpha_plus, u64 c,
                              const std::vector<Frequency>& grid);

} // namespace threeprimes::arcs
