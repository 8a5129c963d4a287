#pragma once

// Distribution functions needed for exact and asymptotic intervals. Inverses
// are obtained by bracketed root finding on the forward CDFs, solved to
// machine precision in x.

namespace cape {

// I_x(a, b), the regularized incomplete beta function, for a, b > 0 and
// x in [0, 1]. Continued-fraction evaluation (modified Lentz).
double regularized_incomplete_beta(double x, double a, double b);

// x such that I_x(v, w) = p.
double beta_quantile(double p, double v, double w);

// P(X <= k) for X ~ Binomial(n, p).
double binomial_cdf(long long k, long long n, double p);

// ln P(X = k) for X ~ Binomial(n, p); -inf when the mass is zero.
double binomial_log_pmf(long long k, long long n, double p);

double normal_cdf(double z);

// z with normal_cdf(z) = p; +-infinity at p = 1 and p = 0.
double normal_quantile(double p);

}  // namespace cape
