#pragma once

#include <cstdint>
#include <functional>

namespace repfreq {

/// Riemann zeta for real s > 1, via Euler-Maclaurin summation.
/// Relative accuracy better than 1e-13 over s in (1, 60].
double riemann_zeta(double s);

/// Tail sum_{n >= k0} n^{-s} for s > 1, k0 >= 1.
double riemann_zeta_tail(double s, std::uint64_t k0);

/// zeta'(s) / zeta(s) for s > 1. Equals -E[ln K] under the zeta distribution.
double zeta_log_derivative(double s);

/// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0.
/// Series for x < a + 1, continued fraction otherwise.
double regularized_gamma_q(double a, double x);

/// Adaptive Gauss-Kronrod (7, 15) quadrature on [lo, hi] to an absolute
/// tolerance. Throws NumericError when the tolerance cannot be reached.
double integrate_adaptive(const std::function<double(double)>& f, double lo,
                          double hi, double abs_tol);

/// Compensated (Kahan) accumulator for long sums of small terms.
class KahanSum {
public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace repfreq
