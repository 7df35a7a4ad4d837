#pragma once

namespace crowdagg {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation,
// relative accuracy ~1e-14.
double regularized_incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double df);

double f_cdf(double x, double df1, double df2);

}  // namespace crowdagg
