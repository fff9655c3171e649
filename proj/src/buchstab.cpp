#include <threeprimes/buchstab.hpp>

#include <threeprimes/errors.hpp>
#include <threeprimes/quadrature.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace threeprimes::buchstab {

namespace {

// Trapezoidal solution on a grid with `per_unit` steps per unit, `count` points.
std::vector<double> trapezoid_solve(std::size_t per_unit, std::size_t count)
{
  const double h = 1.0 / static_cast<double>(per_unit);
  std::vector<double> om(count);
  for (std::size_t i = 0; i <= per_unit && i < count; ++i)
    om[i] = 1.0 / (1.0 + static_cast<double>(i) * h);
  double u_om = 1.0;  // 2 * omega(2)
  for (std::size_t i = per_unit + 1; i < count; ++i) {
    u_om += 0.5 * h * (om[i - 1 - per_unit] + om[i - per_unit]);
    om[i] = u_om / (1.0 + static_cast<double>(i) * h);
  }
  return om;
}

constexpr double kLo = 0.1;
constexpr double kHi = 0.25;
constexpr int kMaxKink = 7;

template <class Omega>
AlphaPlusResult integrate_alpha(const BuchstabTable& table, double tol, Omega&& omega)
{
  if (!(tol > 0.0) || tol > 1e-4)
    throw std::invalid_argument("alpha_plus: tol must lie in (0, 1e-4]");
  if (table.u_max < 8.0)
    throw std::invalid_argument("alpha_plus: table must reach u_max >= 8");

  // omega >= 1/2 on [1, inf), so the weight integral is at most 2*alpha-scale;
  // the table error alone already costs err_bound * (4 + 2*0.6).
  const double table_floor = table.err_bound * 5.2;
  if (table_floor > 0.5 * tol) {
    std::ostringstream msg;
    msg << "alpha_plus: table err_bound " << table.err_bound << " too coarse for tol " << tol;
    throw NumericError(msg.str());
  }

  const AdaptiveGaussLegendre quad(12, 16);
  const double inner_tol = 1e-3 * tol;
  const double middle_tol = 1e-2 * tol;
  double worst_inner = 0.0;
  double worst_middle = 0.0;

  auto inner = [&](double b1, double b2) {
    std::array<double, kMaxKink> cuts{};
    for (int k = 1; k <= kMaxKink; ++k)
      cuts[k - 1] = 1.0 - b1 - b2 - k * b1;
    auto f = [&](double b3) {
      const double u = (1.0 - b1 - b2 - b3) / b1;
      return omega(u) / (b1 * b1 * b2 * b3);
    };
    const QuadResult r = quad.integrate(f, b2, kHi, cuts, inner_tol);
    worst_inner = std::max(worst_inner, r.error);
    return r.value;
  };
  auto middle = [&](double b1) {
    std::array<double, 2 * kMaxKink> cuts{};
    for (int k = 1; k <= kMaxKink; ++k) {
      cuts[2 * (k - 1)] = 0.5 * (1.0 - (k + 1) * b1);
      cuts[2 * (k - 1) + 1] = 0.75 - (k + 1) * b1;
    }
    auto f = [&](double b2) { return inner(b1, b2); };
    const QuadResult r = quad.integrate(f, b1, kHi, cuts, middle_tol);
    worst_middle = std::max(worst_middle, r.error);
    return r.value;
  };

  std::vector<double> outer_cuts;
  for (int k = 1; k <= kMaxKink; ++k) {
    outer_cuts.push_back(1.0 / (k + 3));
    outer_cuts.push_back(1.0 / (2.0 * (k + 1)));
    outer_cuts.push_back(3.0 / (4.0 * (k + 2)));
  }
  const QuadResult outer = quad.integrate(middle, kLo, kHi, outer_cuts, 0.25 * tol);

  AlphaPlusResult out;
  out.breakdown.term1 = 4.0 * eval(table, 4.0);
  out.breakdown.term2 = outer.value;
  out.value = out.breakdown.term1 + out.breakdown.term2;

  // omega >= 1/2 on [1, inf), so the weight integral is at most 2*term2.
  const double weight_integral = 2.0 * outer.value;
  const double span1 = kHi - kLo;
  out.quadrature_error = outer.error + span1 * worst_middle +
                         0.5 * span1 * span1 * worst_inner +
                         table.err_bound * (4.0 + weight_integral);
  if (out.quadrature_error > tol) {
    std::ostringstream msg;
    msg << "alpha_plus: error estimate " << out.quadrature_error << " exceeds tol " << tol
        << " (table err_bound " << table.err_bound << ")";
    throw NumericError(msg.str());
  }
  return out;
}

} // namespace

std::size_t BuchstabTable::steps_per_unit() const
{
  return static_cast<std::size_t>(std::llround(1.0 / step));
}

BuchstabTable build_table(double u_max, double step)
{
  if (!(u_max >= 4.0))
    throw std::invalid_argument("build_table: u_max must be >= 4");
  if (!(step > 0.0) || step > 1e-3)
    throw std::invalid_argument("build_table: step must lie in (0, 1e-3]");

  const auto per_unit = static_cast<std::size_t>(std::ceil(1.0 / step - 1e-9));
  const auto intervals =
      static_cast<std::size_t>(std::ceil((u_max - 1.0) * static_cast<double>(per_unit) - 1e-9));
  const std::size_t count = intervals + 1;

  const auto t0 = trapezoid_solve(per_unit, count);
  const auto t1 = trapezoid_solve(2 * per_unit, 2 * intervals + 1);
  const auto t2 = trapezoid_solve(4 * per_unit, 4 * intervals + 1);

  BuchstabTable table;
  table.u_max = u_max;
  table.step = 1.0 / static_cast<double>(per_unit);
  table.values.resize(count);
  double solver_err = 0.0;
  double solver_err_to4 = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double r1a = (4.0 * t1[2 * i] - t0[i]) / 3.0;
    const double r1b = (4.0 * t2[4 * i] - t1[2 * i]) / 3.0;
    const double r2 = (16.0 * r1b - r1a) / 15.0;
    table.values[i] = i <= per_unit ? t0[i] : r2;
    const double e = std::abs(r2 - r1b);
    solver_err = std::max(solver_err, e);
    if (table.u_at(i) <= 4.0 + 1e-12)
      solver_err_to4 = std::max(solver_err_to4, e);
  }

  // Cubic interpolation error ~ max |4th difference| / 24, per unit piece.
  double interp_err = 0.0;
  double interp_err_to4 = 0.0;
  for (std::size_t start = 0; start + 4 < count; start += per_unit) {
    const std::size_t end = std::min(start + per_unit, count - 1);
    for (std::size_t j = start; j + 4 <= end; ++j) {
      const auto& v = table.values;
      const double d4 = v[j] - 4.0 * v[j + 1] + 6.0 * v[j + 2] - 4.0 * v[j + 3] + v[j + 4];
      const double e = std::abs(d4) / 24.0;
      interp_err = std::max(interp_err, e);
      if (table.u_at(j + 4) <= 4.0 + 1e-12)
        interp_err_to4 = std::max(interp_err_to4, e);
    }
  }

  table.solver_error = solver_err;
  table.interp_error = interp_err;
  table.err_bound = solver_err + interp_err;
  if (solver_err_to4 + interp_err_to4 > 1e-9) {
    std::ostringstream msg;
    msg << "build_table: step " << step << " gives error bound "
        << solver_err_to4 + interp_err_to4 << " > 1e-9 on [1,4]";
    throw NumericError(msg.str());
  }
  return table;
}

double eval(const BuchstabTable& table, double u)
{
  if (!(u >= 1.0) || u > table.u_max)
    throw std::out_of_range("buchstab::eval: u outside [1, u_max]");
  const std::size_t per_unit = table.steps_per_unit();
  const std::size_t last = table.values.size() - 1;

  const double t = (u - 1.0) * static_cast<double>(per_unit);
  const auto i = std::min(static_cast<std::size_t>(t), last);
  // unit piece [k, k+1] containing u, by grid index
  const std::size_t piece = std::min(i / per_unit * per_unit, last >= 3 ? last - 3 : 0);
  const std::size_t piece_end = std::min(piece + per_unit, last);
  std::size_t j0 = i > 0 ? i - 1 : 0;
  j0 = std::max(j0, piece);
  if (j0 + 3 > piece_end)
    j0 = piece_end >= 3 ? piece_end - 3 : 0;

  const double x = t - static_cast<double>(j0);
  const auto& v = table.values;
  // Lagrange basis on nodes 0,1,2,3
  const double l0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
  const double l1 = x * (x - 2.0) * (x - 3.0) / 2.0;
  const double l2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
  const double l3 = x * (x - 1.0) * (x - 2.0) / 6.0;
  return l0 * v[j0] + l1 * v[j0 + 1] + l2 * v[j0 + 2] + l3 * v[j0 + 3];
}

AlphaPlusResult alpha_plus(const BuchstabTable& table, double tol)
{
  std::size_t clamped = 0;
  auto omega = [&](double u) {
    if (u < 1.0) {
      if (u < 1.0 - 1e-12)
        throw std::logic_error("alpha_plus: omega argument below 1");
      u = 1.0;
      ++clamped;
    }
    return eval(table, u);
  };
  AlphaPlusResult out = integrate_alpha(table, tol, omega);
  out.clamped_arguments = clamped;
  return out;
}

AlphaPlusResult alpha_plus_upper_bound(const BuchstabTable& table, double tol)
{
  const double omega3 = eval(table, 3.0);
  auto bound = [omega3](double u) { return u < 2.0 ? 1.0 / std::max(u, 1.0) : omega3; };
  return integrate_alpha(table, tol, bound);
}

} // namespace threeprimes::buchstab
