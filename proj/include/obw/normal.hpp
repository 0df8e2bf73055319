#pragma once

namespace obw {

/// Upper tail P(N(0,1) >= z).
double norm_cdf_c(double z);

/// log P(N(0,1) >= z), stable far into the tail.
double log_norm_cdf_c(double z);

/// Quantile of the standard normal (Wichura's AS241, double precision).
double norm_ppf(double p);

/// Solves log P(N(0,1) >= z) = lp for z; valid for arbitrarily small lp.
double norm_ppf_c_log(double lp);

/// Inverse-CDF draw from N(mean, sd^2) truncated to [lower, inf), u in (0,1).
/// Monotone in both u and mean, which is what the sandwich coupling needs.
/// lower = -inf gives the untruncated normal.
double trunc_norm_sample(double mean, double sd, double lower, double u);

}  // namespace obw
