#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace threeprimes {

// Linear convolution (a*b)[k] = sum_j a[j] b[k-j], length |a|+|b|-1.
// Backed by FFTW; plan creation is serialized, execution is reentrant.
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);

// Samples fhat(k/M) = sum_n f(n) e(-n k / M) for k = 0..M-1, where
// values[j] = f(first + j). Values are folded mod M, so any M >= 1 is exact.
std::vector<std::complex<double>> fourier_grid(std::span<const double> values,
                                               std::int64_t first, std::size_t M);

} // namespace threeprimes
