#pragma once

#include <threeprimes/density.hpp>
#include <threeprimes/numtheory.hpp>

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace threeprimes::transference {

using cplx = std::complex<double>;
using IntSet = std::vector<std::int64_t>;  // sorted, distinct

// Minimum of E_{n in P} f(n) over arithmetic progressions P in [N] with |P| >= eta N.
struct ApMin {
  double value = 0.0;
  bool exhaustive = true;
  u64 start = 0;  // witness progression
  u64 step = 0;
  u64 length = 0;
};

struct ApOptions {
  std::size_t exhaustive_limit = 2000;  // N above this switches to sampling
  std::size_t samples = 200'000;
  u64 seed = 1;
};

ApMin ap_density_min(const DensityFunction& f, double eta, const ApOptions& opts = {});

// |A cap P| >= alpha |P| for every progression P in [N] with |P| >= eta N.
bool ap_hypothesis_holds(const IntSet& A, u64 N, double alpha, double eta);

// {n : 1_A * 1_B(n) >= eta max(|A|, |B|)}. A and B must hold positive integers.
IntSet popular_sums(const IntSet& A, const IntSet& B, double eta);

// All values f1*f2*f3(n); entry i is n = i. Length 3N + 1.
std::vector<double> triple_convolution_all(const DensityFunction& f1, const DensityFunction& f2,
                                           const DensityFunction& f3);
// Single value for n in [2, 3N]. For N <= 512 the FFT value is checked against
// direct summation and a NumericError is thrown on disagreement.
double triple_convolution(const DensityFunction& f1, const DensityFunction& f2,
                          const DensityFunction& f3, std::int64_t n);
double triple_convolution_direct(const DensityFunction& f1, const DensityFunction& f2,
                                 const DensityFunction& f3, std::int64_t n);

struct LqNorm {
  double value = 0.0;    // on the M-point grid
  double refined = 0.0;  // on the 2M-point grid
  double error = 0.0;    // |refined - value|
  std::size_t M = 0;
};

// (1/M sum_k |fhat(k/M)|^q)^(1/q) with values[j] = f(first + j).
// Requires q > 2 and M >= 8 * values.size(); M = 0 picks 8 * size.
LqNorm lq_norm(std::span<const double> values, std::int64_t first, double q, std::size_t M = 0);
LqNorm fourier_lq_norm(const DensityFunction& f, double q, std::size_t M = 0);

struct BohrSet {
  std::vector<double> T;
  double delta = 0.0;
  u64 N = 0;
  std::vector<u64> elements;  // b in [1, floor(delta N)] with ||b gamma|| < delta/30 for all gamma in T
};

BohrSet bohr_set(std::span<const double> T, double delta, u64 N, std::size_t max_T = 1u << 16);

// Grid frequencies k/M with |fhat(k/M)| >= delta N, M = 8N by default.
std::vector<double> large_spectrum(const DensityFunction& f, double delta, std::size_t M = 0);

class EmptyBohrSet : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct DecompositionReport {
  // (1) pointwise bound on g
  double g_max = 0.0;
  double nu_smoothed_max = 0.0;  // max_n E nu(n + b1 - b2), always >= g_max
  double nu_eta = 0.0;           // max over grid |nuhat - 1hat_[N]| / N
  double g_bound = 0.0;          // max_n E 1_[N](n + b1 - b2) + nu_eta N / |B|
  // (2) Fourier uniformity of h on the grid
  double h_hat_max = 0.0;
  double f_hat_max = 0.0;
  double multiplier_excess = 0.0;  // max_k (|hhat| - |fhat|), <= 0 up to rounding
  double identity_residual = 0.0;  // max_k |hhat - fhat (1 - |E e(b gamma)|^2)|
  // (3) progression means on [N]
  double ap_min_f = 0.0;
  double ap_min_g = 0.0;
  double ap_eta = 0.0;
  // (4) restriction norms
  double lq_exponent = 2.5;
  double lq_f = 0.0;
  double lq_g = 0.0;
  double lq_h = 0.0;
  bool exact_sum = false;  // g + h == f bitwise on the extended domain
};

// f = g + h with g(n) = E_{b1,b2 in B} f(n + b1 - b2). g and h live on
// [first, first + size), which extends [N] by the Bohr-set width on each side.
struct Decomposition {
  std::int64_t first = 1;
  std::vector<double> g;
  std::vector<double> h;
  std::vector<double> T;
  std::vector<u64> B;
  DecompositionReport report;

  double g_at(std::int64_t n) const;
  double h_at(std::int64_t n) const;
};

struct DecomposeOptions {
  std::size_t grid = 0;       // M, default 8N
  double ap_eta = 0.1;        // progression length for property (3)
  double lq_exponent = 2.5;
};

// Requires f <= nu pointwise and equal lengths. Throws EmptyBohrSet when B is empty.
Decomposition transfer_decompose(const DensityFunction& f, const DensityFunction& nu,
                                 double delta, const DecomposeOptions& opts = {});

struct KneserReport {
  u64 N = 0;
  std::size_t trials = 0;
  std::size_t generator_failures = 0;
  double min_ratio = 0.0;  // min over trials and n in [N/2, N] of f1*f2*f3(n) / N^2
  std::size_t min_trial = 0;
  std::int64_t min_n = 0;
  double bound = 0.0;   // 1e-3 eps^4 eta
  double margin = 0.0;  // min_ratio / bound
  std::vector<double> trial_minima;
};

// Random f_i: [N] -> [0,1] with ap_density_min(eta) >= 1/3 + eps, by rejection.
DensityFunction kneser_generator(u64 N, double eps, double eta, std::uint64_t seed,
                                 std::size_t max_retries = 200);
KneserReport test_kneser_dense(u64 N, std::size_t trials, double eps, double eta,
                               std::uint64_t seed = 1);

struct DoublingReport {
  u64 N = 0;
  std::size_t instances = 0;
  std::size_t rejected = 0;
  double alpha = 0.0;
  double min_margin = 0.0;  // min |S_eta(A,B)| / N - 4 alpha
  std::vector<double> margins;
};

DoublingReport test_doubling4(u64 N, std::size_t instances, double eta, double alpha,
                              std::uint64_t seed = 1);

struct ObstructionReport {
  std::size_t primes = 0;
  double interval_start = 0.0;
  double interval_length = 0.0;
  double inside_fraction = 0.0;  // primes with xi p mod 1 in I
  double sumset_length = 0.0;    // length of I + I + I in R/Z
  std::size_t targets = 0;       // odd n in [3 lo, 3 hi]
  double outside_fraction = 0.0; // of targets with xi n mod 1 outside I + I + I
  std::vector<std::size_t> histogram;  // xi p mod 1 in equal bins
};

// I = [start, start + length) mod 1, requires length < 1/3.
ObstructionReport bohr_obstruction_demo(double xi, double interval_length, u64 lo, u64 hi,
                                        double interval_start = 0.0, std::size_t bins = 20);

} // namespace threeprimes::transference
