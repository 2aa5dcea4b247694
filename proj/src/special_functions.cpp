#include "reception/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "reception/error.hpp"

namespace reception::stats {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 200000;

// Stirling series remainder: lgamma(x) - [(x - 1/2) ln x - x + ln(2 pi)/2].
double stirling_correction(double x) {
  const double r = 1.0 / x;
  const double r2 = r * r;
  return r * (1.0 / 12 +
              r2 * (-1.0 / 360 +
                    r2 * (1.0 / 1260 +
                          r2 * (-1.0 / 1680 +
                                r2 * (1.0 / 1188 +
                                      r2 * (-691.0 / 360360 + r2 * (1.0 / 156)))))));
}

// lgamma(a + b) - lgamma(a) without the cancellation of two huge lgammas.
double log_gamma_ratio(double a, double b) {
  return (a - 0.5) * std::log1p(b / a) + b * std::log(a + b) - b +
         stirling_correction(a + b) - stirling_correction(a);
}

// Continued fraction for I_x(a, b) (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;
}

// I_x(a, b) given both x and y = 1 - x, so callers can pass an exact tail.
double incomplete_beta_xy(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_x = x < 0.5 ? std::log(x) : std::log1p(-y);
  const double log_y = y < 0.5 ? std::log(y) : std::log1p(-x);
  const double front = std::exp(a * log_x + b * log_y - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

// Series for P(a, x); valid (fast) for x < a + 1.
double gamma_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x); valid (fast) for x >= a + 1.
double gamma_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0)) throw ValidationError("incomplete gamma: shape must be positive");
  if (!(x >= 0.0)) throw ValidationError("incomplete gamma: x must be non-negative");
}

void check_df(double df) {
  if (!(df >= 1.0) || std::isinf(df)) {
    throw ValidationError("degrees of freedom must be a finite value >= 1");
  }
}

}  // namespace

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("log_beta: arguments must be positive");
  if (a < b) std::swap(a, b);
  if (a >= 10.0 && b < 10.0) return std::lgamma(b) - log_gamma_ratio(a, b);
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("incomplete_beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("incomplete_beta: x must lie in [0, 1]");
  return incomplete_beta_xy(a, b, x, 1.0 - x);
}

double lower_incomplete_gamma(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double upper_incomplete_gamma(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_continued_fraction(a, x);
}

namespace {

// P(T > |t|) for T ~ t(df).
double student_t_upper_tail(double t, double df) {
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  const double denom = df + t2;
  return 0.5 * incomplete_beta_xy(0.5 * df, 0.5, df / denom, t2 / denom);
}

}  // namespace

double student_t_cdf(double t, double df) {
  check_df(df);
  if (std::isnan(t)) throw ValidationError("student_t_cdf: t is NaN");
  if (t == 0.0) return 0.5;
  const double tail = student_t_upper_tail(t, df);
  return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_two_tailed(double t, double df) {
  check_df(df);
  if (std::isnan(t)) throw ValidationError("student_t_two_tailed: t is NaN");
  if (t == 0.0) return 1.0;
  return std::min(1.0, 2.0 * student_t_upper_tail(t, df));
}

double chi_square_cdf(double x, double df) {
  check_df(df);
  if (!(x >= 0.0)) throw ValidationError("chi_square_cdf: x must be non-negative");
  return lower_incomplete_gamma(0.5 * df, 0.5 * x);
}

double chi_square_sf(double x, double df) {
  check_df(df);
  if (!(x >= 0.0)) throw ValidationError("chi_square_sf: x must be non-negative");
  return upper_incomplete_gamma(0.5 * df, 0.5 * x);
}

}  // namespace reception::stats
