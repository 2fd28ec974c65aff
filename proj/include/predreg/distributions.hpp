#pragma once

namespace predreg {

double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;
//! Inverse standard normal CDF. Throws BadProbability unless 0 < p < 1.
double normal_quantile(double p);

//! Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

//! chi-squared CDF. Throws BadDf for df < 1, BadInput for x < 0.
double chi2_cdf(double df, double x);
double chi2_pdf(double df, double x);
//! Inverse chi-squared CDF. Throws BadProbability / BadDf.
double chi2_quantile(double df, double p);

//! p-quantile of the maximum of m independent chi-squared(1) variates.
double max_chi2_quantile(int m, double p);

}  // namespace predreg
