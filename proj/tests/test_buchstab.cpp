#include <doctest.h>

#include <threeprimes/buchstab.hpp>
#include <threeprimes/errors.hpp>
#include <threeprimes/quadrature.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace threeprimes;
using namespace threeprimes::buchstab;

namespace {

constexpr double kExpMinusEuler = 0.5614594835668851698;

// Closed forms: 1/u on [1,2], (1 + log(u-1))/u on [2,3], and on [3,4]
// u omega(u) = 3 omega(3) + int_3^u (1 + log(t-2))/(t-1) dt, integrated with
// Gauss-Kronrod (independent of the library's Gauss-Legendre code).
double omega_oracle(double u)
{
  if (u <= 2.0)
    return 1.0 / u;
  if (u <= 3.0)
    return (1.0 + std::log(u - 1.0)) / u;
  REQUIRE(u <= 4.0);
  auto integrand = [](double t) { return (1.0 + std::log(t - 2.0)) / (t - 1.0); };
  const double tail =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 3.0, u, 15, 1e-15);
  return (1.0 + std::log(2.0) + tail) / u;
}

const BuchstabTable& shared_table()
{
  static const BuchstabTable t = build_table(20.0, 1e-3);
  return t;
}

} // namespace

TEST_CASE("gauss-legendre rule integrates polynomials exactly")
{
  const GaussLegendre rule(6);
  // degree 11 is the exactness limit for 6 nodes
  auto p = [](double x) { return std::pow(x, 11) + 3.0 * std::pow(x, 10) - x + 2.0; };
  const double exact = (std::pow(2.0, 12) - 1.0) / 12.0 + 3.0 * (std::pow(2.0, 11) - 1.0) / 11.0 -
                       (4.0 - 1.0) / 2.0 + 2.0;
  CHECK(rule.integrate(p, 1.0, 2.0) == doctest::Approx(exact).epsilon(1e-14));

  double wsum = 0.0;
  for (double w : rule.weights())
    wsum += w;
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("adaptive rule handles a kink placed on a breakpoint")
{
  const AdaptiveGaussLegendre quad(8);
  auto f = [](double x) { return std::abs(x - 0.3); };
  const double exact = 0.5 * 0.09 + 0.5 * 0.49;
  const double cuts[] = {0.3};
  const QuadResult r = quad.integrate(f, 0.0, 1.0, cuts, 1e-12);
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-13));
  // without the breakpoint, bisection still converges
  const QuadResult r2 = quad.integrate(f, 0.0, 1.0, 1e-10);
  CHECK(std::abs(r2.value - exact) < 1e-9);
}

TEST_CASE("omega matches closed forms")
{
  const auto& t = shared_table();
  CHECK(eval(t, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(eval(t, 1.5) - 2.0 / 3.0) < 1e-12);
  for (double u : {1.25, 1.75, 2.5, 3.0, 2.0001, 2.9999})
    CHECK(std::abs(eval(t, u) - omega_oracle(u)) < 1e-9);
  CHECK(std::abs(eval(t, 2.5) - 0.5621860432432657) < 1e-9);
  CHECK(std::abs(eval(t, 3.0) - (1.0 + std::log(2.0)) / 3.0) < 1e-9);
}

TEST_CASE("omega on [3,4] agrees with the quadrature oracle")
{
  const auto& t = shared_table();
  for (double u = 3.0; u <= 4.0; u += 0.0625)
    CHECK(std::abs(eval(t, u) - omega_oracle(u)) < 1e-9);
  // frozen from the oracle (30-digit mpmath agrees): omega(4) = 0.56145824140683774
  CHECK(std::abs(omega_oracle(4.0) - 0.56145824140683774) < 1e-13);
  CHECK(std::abs(eval(t, 4.0) - 0.56145824140683774) < 1e-10);
}

TEST_CASE("omega approaches exp(-gamma)")
{
  const auto& t = shared_table();
  CHECK(std::abs(eval(t, 20.0) - kExpMinusEuler) < 1e-6);
  CHECK(t.err_bound < 1e-9);
}

TEST_CASE("table invariants")
{
  const auto& t = shared_table();
  const double omega3 = eval(t, 3.0);
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    const double u = t.u_at(i);
    const double v = t.values[i];
    if (u <= 2.0)
      CHECK(v == doctest::Approx(1.0 / u).epsilon(1e-14));
    else {
      CHECK(v >= 0.5);
      CHECK(v <= 1.0);
    }
    if (u >= 3.0)
      CHECK(v <= omega3 + 1e-12);
  }
  // the envelope max_{[k, u_max]} |omega - e^-gamma| is nonincreasing in k
  double prev = 1.0;
  for (int k = 4; k <= 19; ++k) {
    double env = 0.0;
    for (std::size_t i = 0; i < t.values.size(); ++i)
      if (t.u_at(i) >= k)
        env = std::max(env, std::abs(t.values[i] - kExpMinusEuler));
    CHECK(env <= prev);
    prev = env;
  }
}

TEST_CASE("table and eval reject bad input")
{
  CHECK_THROWS_AS(build_table(3.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(build_table(10.0, 2e-3), std::invalid_argument);
  CHECK_THROWS_AS(build_table(10.0, 0.0), std::invalid_argument);
  const auto& t = shared_table();
  CHECK_THROWS_AS(eval(t, 0.99), std::out_of_range);
  CHECK_THROWS_AS(eval(t, 20.5), std::out_of_range);
}

TEST_CASE("step not dividing 1 snaps to a finer aligned grid")
{
  const auto t = build_table(5.0, 7e-4);
  CHECK(t.steps_per_unit() == 1429);
  CHECK(std::abs(eval(t, 2.5) - omega_oracle(2.5)) < 1e-9);
}

TEST_CASE("alpha plus")
{
  const auto& t = shared_table();
  const AlphaPlusResult r = alpha_plus(t, 1e-4);

  CHECK(r.value == r.breakdown.term1 + r.breakdown.term2);
  CHECK(r.breakdown.term1 > 0.0);
  CHECK(r.breakdown.term2 > 0.0);
  CHECK(r.quadrature_error <= 1e-4);
  CHECK(r.value > r.breakdown.term1);
  CHECK(r.value < 2.9);

  // 4 omega(4) from the closed-form oracle
  CHECK(std::abs(r.breakdown.term1 - 4.0 * omega_oracle(4.0)) < 1e-8);
  // independent nested adaptive Gauss-Kronrod (scipy nquad, omega by a
  // separate Romberg table and splines): term2 = 0.5811357865
  CHECK(std::abs(r.breakdown.term2 - 0.5811357865) < 1e-6);
}

TEST_CASE("alpha plus converges under step halving")
{
  const double tol = 1e-4;
  const auto coarse = alpha_plus(build_table(9.0, 1e-3), tol);
  const auto fine = alpha_plus(build_table(9.0, 5e-4), tol);
  CHECK(std::abs(coarse.value - fine.value) <= 4.0 * tol);
}

TEST_CASE("omega(3) bound dominates the triple integral")
{
  const auto& t = shared_table();
  const auto exact = alpha_plus(t, 1e-4);
  const auto bound = alpha_plus_upper_bound(t, 1e-4);
  CHECK(bound.breakdown.term2 >= exact.breakdown.term2);
  CHECK(bound.value < 2.9);
}

TEST_CASE("alpha plus preconditions")
{
  const auto& t = shared_table();
  CHECK_THROWS_AS(alpha_plus(t, 1e-3), std::invalid_argument);
  const auto short_table = build_table(6.0, 1e-3);
  CHECK_THROWS_AS(alpha_plus(short_table, 1e-4), std::invalid_argument);
  CHECK_THROWS_AS(alpha_plus(t, 1e-14), NumericError);
}
