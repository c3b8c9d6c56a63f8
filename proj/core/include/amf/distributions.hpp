#pragma once

namespace amf {

// Student-t and F tail probabilities through the regularized incomplete beta
// function. Upper tails are evaluated directly (not as 1 - cdf) so tiny
// p-values keep their relative accuracy.

double student_t_cdf(double t, double df);

/// P(|T| >= |t|) for T ~ t(df).
double student_t_two_sided_p(double t, double df);

double f_cdf(double f, double df1, double df2);

/// P(F >= f) for F ~ F(df1, df2).
double f_upper_p(double f, double df1, double df2);

}  // namespace amf
