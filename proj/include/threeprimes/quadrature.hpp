#pragma once

#include <functional>
#include <span>
#include <vector>

namespace threeprimes {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
};

// n-point Gauss-Legendre rule on [-1, 1].
class GaussLegendre {
public:
  explicit GaussLegendre(int n);

  int order() const { return static_cast<int>(nodes_.size()); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  template <class F>
  double integrate(F&& f, double a, double b) const
  {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      sum += weights_[i] * f(mid + half * nodes_[i]);
    return sum * half;
  }

private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

// Adaptive bisection driven by a single Gauss-Legendre rule: an interval is
// accepted once the rule on [a,b] and on its two halves agree within the
// local tolerance. Breakpoints (sorted, inside [a,b] or not) split the range
// first so that kinks of the integrand sit on panel boundaries.
class AdaptiveGaussLegendre {
public:
  explicit AdaptiveGaussLegendre(int order = 12, int max_depth = 30);

  QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                       double tol) const;
  QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                       std::span<const double> breakpoints, double tol) const;

private:
  QuadResult refine(const std::function<double(double)>& f, double a, double b,
                    double whole, double tol, int depth) const;

  GaussLegendre rule_;
  int max_depth_;
};

} // namespace threeprimes
