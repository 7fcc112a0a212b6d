#pragma once

namespace pcrlab::dist {

double normal_cdf(double x);
double normal_sf(double x);

// t with P(chi2_1 > t) = alpha.
double chi1_upper_quantile(double alpha);

// Noncentral chi-square with one degree of freedom; closed form through
// Phi-bar(sqrt t - sqrt ncp) + Phi-bar(sqrt t + sqrt ncp).
double noncentral_chi1_sf(double t, double ncp);
double noncentral_chi1_cdf(double t, double ncp);

}  // namespace pcrlab::dist
