#include "repfreq/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "repfreq/error.hpp"

namespace repfreq {

namespace {

// B_{2j} / (2j)! for the Euler-Maclaurin correction terms.
constexpr double kBernoulliOverFactorial[7] = {
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
};

constexpr int kZetaCutoff = 16;

void require_s(double s) {
  if (!std::isfinite(s) || s <= 1.0)
    throw ParameterError("zeta requires s > 1, got s=" + std::to_string(s));
}

// sum_{n >= N} n^{-s} by Euler-Maclaurin; N should be >= kZetaCutoff.
double em_tail(double s, double n0) {
  const double inv = 1.0 / n0;
  const double ns = std::pow(n0, -s);  // n0^{-s}
  double result = ns * n0 / (s - 1.0) + 0.5 * ns;
  double poch = s;             // (s)_{2j-1}, starting at (s)_1
  double npow = ns * inv;      // n0^{-s-2j+1}, starting at n0^{-s-1}
  for (int j = 0; j < 7; ++j) {
    result += kBernoulliOverFactorial[j] * poch * npow;
    poch *= (s + 2 * j + 1) * (s + 2 * j + 2);
    npow *= inv * inv;
  }
  return result;
}

}  // namespace

double riemann_zeta(double s) {
  require_s(s);
  double sum = 0.0;
  for (int n = kZetaCutoff - 1; n >= 1; --n) sum += std::pow(n, -s);
  return sum + em_tail(s, kZetaCutoff);
}

double riemann_zeta_tail(double s, std::uint64_t k0) {
  require_s(s);
  if (k0 < 1) throw ParameterError("zeta tail requires k0 >= 1");
  double sum = 0.0;
  std::uint64_t start = k0;
  while (start < static_cast<std::uint64_t>(kZetaCutoff)) {
    sum += std::pow(static_cast<double>(start), -s);
    ++start;
  }
  return sum + em_tail(s, static_cast<double>(start));
}

double zeta_log_derivative(double s) {
  require_s(s);
  double z = 0.0, dz = 0.0;
  for (int n = kZetaCutoff - 1; n >= 1; --n) {
    const double t = std::pow(n, -s);
    z += t;
    dz -= std::log(static_cast<double>(n)) * t;
  }
  const double n0 = kZetaCutoff;
  const double ln = std::log(n0);
  const double inv = 1.0 / n0;
  const double ns = std::pow(n0, -s);
  z += ns * n0 / (s - 1.0) + 0.5 * ns;
  dz += -ns * n0 * (ln / (s - 1.0) + 1.0 / ((s - 1.0) * (s - 1.0))) - 0.5 * ln * ns;
  double poch = s;
  double hsum = 1.0 / s;  // d/ds ln (s)_{2j-1}
  double npow = ns * inv;
  for (int j = 0; j < 7; ++j) {
    const double term = kBernoulliOverFactorial[j] * poch * npow;
    z += term;
    dz += term * (hsum - ln);
    poch *= (s + 2 * j + 1) * (s + 2 * j + 2);
    hsum += 1.0 / (s + 2 * j + 1) + 1.0 / (s + 2 * j + 2);
    npow *= inv * inv;
  }
  return dz / z;
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0) || !std::isfinite(a) || std::isnan(x) || x < 0)
    throw ParameterError("regularized_gamma_q requires a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;

  const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    // lower series: P(a, x) = x^a e^{-x} / Gamma(a) * sum x^n / (a)_{n+1}
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-17) break;
    }
    return 1.0 - sum * std::exp(log_prefactor);
  }
  // upper continued fraction, modified Lentz
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-17) break;
  }
  return std::exp(log_prefactor) * h;
}

namespace {

// 15-point Kronrod nodes (positive half) with the embedded 7-point Gauss rule.
constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
};
constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
};
constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
};

struct Segment {
  double lo, hi, integral, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gauss_kronrod(const std::function<double(double)>& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double kron = 0.0, gauss = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double off = half * kKronrodNodes[i];
    const double f1 = f(mid - off);
    const double f2 = (i == 7) ? 0.0 : f(mid + off);
    const double fs = (i == 7) ? f1 : f1 + f2;
    kron += kKronrodWeights[i] * fs;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * fs;
  }
  kron *= half;
  gauss *= half;
  double err = std::fabs(kron - gauss);
  err = std::min(err, std::fabs(kron) + std::fabs(gauss));
  return {lo, hi, kron, err};
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double lo,
                          double hi, double abs_tol) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || !(abs_tol > 0))
    throw ParameterError("integrate_adaptive requires finite bounds and a positive tolerance");
  if (lo == hi) return 0.0;

  std::priority_queue<Segment> queue;
  Segment whole = gauss_kronrod(f, lo, hi);
  double total = whole.integral;
  double total_err = whole.error;
  queue.push(whole);

  std::size_t splits = 0;
  while (total_err > abs_tol) {
    if (splits++ > 20000) {
      std::ostringstream msg;
      msg << "quadrature did not reach tolerance " << abs_tol
          << " (error estimate " << total_err << " after " << splits
          << " subdivisions)";
      throw NumericError(msg.str());
    }
    Segment worst = queue.top();
    queue.pop();
    total -= worst.integral;
    total_err -= worst.error;
    const double mid = 0.5 * (worst.lo + worst.hi);
    for (const Segment& part :
         {gauss_kronrod(f, worst.lo, mid), gauss_kronrod(f, mid, worst.hi)}) {
      total += part.integral;
      total_err += part.error;
      queue.push(part);
    }
  }
  return total;
}

}  // namespace repfreq
