#include <threeprimes/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace threeprimes {

GaussLegendre::GaussLegendre(int n)
{
  if (n < 1)
    throw std::invalid_argument("GaussLegendre: order must be positive");
  nodes_.resize(n);
  weights_.resize(n);
  // Newton iteration on P_n from the Chebyshev-like initial guesses; roots
  // are symmetric so only half are computed.
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes_[i] = -x;
    nodes_[n - 1 - i] = x;
    weights_[i] = w;
    weights_[n - 1 - i] = w;
  }
  if (n % 2 == 1)
    nodes_[n / 2] = 0.0;
}

AdaptiveGaussLegendre::AdaptiveGaussLegendre(int order, int max_depth)
    : rule_(order), max_depth_(max_depth)
{
}

QuadResult AdaptiveGaussLegendre::refine(const std::function<double(double)>& f, double a,
                                         double b, double whole, double tol, int depth) const
{
  const double mid = 0.5 * (a + b);
  const double left = rule_.integrate(f, a, mid);
  const double right = rule_.integrate(f, mid, b);
  const double split = left + right;
  const double diff = std::abs(split - whole);
  if (diff <= tol || depth >= max_depth_)
    return {split, diff};
  const QuadResult l = refine(f, a, mid, left, 0.5 * tol, depth + 1);
  const QuadResult r = refine(f, mid, b, right, 0.5 * tol, depth + 1);
  return {l.value + r.value, l.error + r.error};
}

QuadResult AdaptiveGaussLegendre::integrate(const std::function<double(double)>& f, double a,
                                            double b, double tol) const
{
  if (!(b > a))
    return {};
  return refine(f, a, b, rule_.integrate(f, a, b), tol, 0);
}

QuadResult AdaptiveGaussLegendre::integrate(const std::function<double(double)>& f, double a,
                                            double b, std::span<const double> breakpoints,
                                            double tol) const
{
  if (!(b > a))
    return {};
  std::vector<double> cuts{a};
  for (double c : breakpoints)
    if (c > a && c < b)
      cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  QuadResult total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    if (hi - lo <= 0.0)
      continue;
    const QuadResult piece = integrate(f, lo, hi, tol * (hi - lo) / (b - a));
    total.value += piece.value;
    total.error += piece.error;
  }
  return total;
}

} // namespace threeprimes
