#ifndef HDFLIP_TDIST_HPP
#define HDFLIP_TDIST_HPP

namespace hdflip {

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation (relative error well below 1e-10 for the df ranges used here).
double incomplete_beta(double a, double b, double x);

// Two-sided p-value of a t statistic with df degrees of freedom:
// P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
double t_two_sided_pvalue(double t, double df);

}  // namespace hdflip

#endif  // HDFLIP_TDIST_HPP
