#pragma once

// f(u; k, m): the solution of
//     u^(k+m+1) f'(u) = -k (u-1)^(k+m) f(u-1),   f = 1 on (0, 1],
// represented by one Chebyshev series per unit panel (r-1, r].

#include <cmath>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"

namespace gpysmooth {

struct DdeOptions {
  int degree = 32;
  /// Gauss-Legendre nodes between consecutive Chebyshev points.
  int quad_nodes = 64;
  /// Residual probes per panel.
  int residual_samples = 16;
};

class PanelSolution {
 public:
  int k = 0;
  int m = 0;
  double U = 1.0;
  double tol = 0.0;
  /// Largest scaled DDE residual seen while checking the solve.
  double achieved_residual = 0.0;
  /// panels[r-1] represents f on (r-1, r]; panels[0] is the constant 1.
  std::vector<ChebyshevSeries> panels;
  std::vector<ChebyshevSeries> slopes;

  int exponent() const noexcept { return k + m; }

  /// f(u) for 0 <= u <= U. u = 0 is the continuous extension f(0+) = 1.
  double operator()(double u) const { return panels[panel_of(u)](u); }

  double derivative(double u) const { return slopes[panel_of(u)](u); }

  /// (u-1)^n u^(-n-1) with n = k + m, evaluated in log space.
  double weight(double v) const {
    if (v <= 1.0) return 0.0;
    const double n = exponent();
    return std::exp(n * std::log(v - 1.0) - (n + 1.0) * std::log(v));
  }

 private:
  std::size_t panel_of(double u) const {
    if (!(u >= 0.0)) throw RangeError("f(u) needs u >= 0");
    if (u > U * (1.0 + 1e-12) + 1e-12) throw RangeError("u beyond solver coverage U");
    if (u <= 1.0) return 0;
    const std::size_t r = static_cast<std::size_t>(std::ceil(u));
    return std::min(r, panels.size()) - 1;
  }
};

/// u^(n+1) f'(u) + k (u-1)^n f(u-1), the literal residual of the equation.
/// Falls back to the form divided by u^(n+1) when that power overflows.
inline double dde_residual(const PanelSolution& sol, double u) {
  if (u <= 1.0) return 0.0;
  const double inner = sol.derivative(u) + sol.k * sol.weight(u) * sol(u - 1.0);
  const double scale = std::pow(u, sol.exponent() + 1.0);
  return std::isfinite(scale) ? scale * inner : inner;
}

inline double eval_f(const PanelSolution& sol, double u) { return sol(u); }

/// Panel r >= 2 comes from the integral form
///   f(u) = f(r-1) - k int_{r-1}^u f(v-1) (v-1)^(k+m) v^(-k-m-1) dv.
/// The integrand is sampled against panel r-1 at Chebyshev-Lobatto points
/// and its interpolant integrated exactly, so the derivative of the stored
/// series is the interpolated integrand itself. Composite Gauss-Legendre
/// quadrature of the same integral gives an independent check of the node
/// values.
///
/// The tolerance applies to the equation divided through by u^(k+m+1),
///   |f'(u) + k (u-1)^(k+m) u^(-k-m-1) f(u-1)| <= tol (1 + |f(u)|),
/// and to the quadrature cross-check, relative to 1 + |f|.
inline PanelSolution solve_f(int k, int m, double U, double tol, DdeOptions options = {}) {
  if (m <= 0 || m <= -k) throw ParameterError("solve_f needs m > max(0, -k)");
  if (!(U >= 1.0)) throw ParameterError("solve_f needs U >= 1");
  if (!(tol > 0.0)) throw ParameterError("solve_f needs tol > 0");

  PanelSolution sol;
  sol.k = k;
  sol.m = m;
  sol.U = U;
  sol.tol = tol;
  sol.panels.push_back(ChebyshevSeries{0.0, 1.0, {1.0}});
  sol.slopes.push_back(ChebyshevSeries{0.0, 1.0, {0.0}});

  const GaussLegendre& rule = gauss_legendre(options.quad_nodes);
  const std::size_t count = static_cast<std::size_t>(std::ceil(U - 1e-12));
  double worst = 0.0;
  for (std::size_t r = 2; r <= count; ++r) {
    const double a = static_cast<double>(r - 1), b = static_cast<double>(r);
    const ChebyshevSeries prev = sol.panels.back();
    auto integrand = [&](double v) { return prev(v - 1.0) * sol.weight(v); };

    const std::vector<double> nodes = lobatto_points(options.degree, a, b);
    std::vector<double> samples(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) samples[j] = integrand(nodes[j]);
    ChebyshevSeries slope = ChebyshevSeries::from_lobatto(samples, a, b);
    for (double& c : slope.coeffs) c *= -k;
    ChebyshevSeries panel = slope.integral();
    const double start = prev(a);
    panel.coeffs[0] += start;

    double acc = 0.0;
    for (std::size_t j = 1; j < nodes.size(); ++j) {
      acc += rule.integrate(integrand, nodes[j - 1], nodes[j]);
      const double direct = start - k * acc;
      worst = std::max(worst, std::abs(direct - panel(nodes[j])) / (1.0 + std::abs(direct)));
    }
    sol.panels.push_back(std::move(panel));
    sol.slopes.push_back(std::move(slope));
  }

  for (std::size_t r = 2; r <= sol.panels.size(); ++r) {
    const double a = static_cast<double>(r - 1);
    for (int i = 0; i < options.residual_samples; ++i) {
      const double u = a + (i + 0.5) / options.residual_samples;
      if (u > U) break;
      const double inner = sol.derivative(u) + k * sol.weight(u) * sol(u - 1.0);
      worst = std::max(worst, std::abs(inner) / (1.0 + std::abs(sol(u))));
    }
  }
  sol.achieved_residual = worst;
  if (!(worst <= tol)) throw ToleranceError("DDE residual above tolerance", worst);
  return sol;
}

}  // namespace gpysmooth
