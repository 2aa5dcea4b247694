#pragma once

namespace reception::stats {

// log B(a, b), accurate for large a with small b (the Student-t regime).
double log_beta(double a, double b);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Regularized lower / upper incomplete gamma P(a, x) and Q(a, x) = 1 - P.
double lower_incomplete_gamma(double a, double x);
double upper_incomplete_gamma(double a, double x);

// CDF of Student's t with `df` degrees of freedom. df >= 1 (real-valued df
// accepted). Throws ValidationError otherwise.
double student_t_cdf(double t, double df);

// Two-tailed p-value 2 * (1 - CDF(|t|)), computed on the tail directly.
double student_t_two_tailed(double t, double df);

// Chi-square CDF P(df/2, x/2) and its survival function.
double chi_square_cdf(double x, double df);
double chi_square_sf(double x, double df);

}  // namespace reception::stats
