#pragma once

namespace bracket {

// Standard normal CDF.
double normal_cdf(double x);

// Upper tail P(Z > x), accurate far into the tail.
double normal_sf(double x);

// Inverse standard normal CDF. Throws OutOfDomain unless 0 < p < 1.
// Rational initial guess refined by Halley steps on erfc; absolute error is
// below 1e-12 over [1e-10, 1 - 1e-10].
double normal_quantile(double p);

// Two-sided critical value for level 1 - alpha.
struct NormalTail {
    double alpha = 0.05;
    double z = 0.0;

    static NormalTail for_alpha(double alpha);
};

}  // namespace bracket
