#pragma once

// Sample statistics and Kolmogorov-Smirnov machinery for the Monte Carlo
// verification harness.

#include <functional>
#include <span>
#include <vector>

namespace dunkl {

struct MeanSE {
  double mean = 0;
  double se = 0;
  std::size_t n = 0;
};

MeanSE mean_se(std::span<const double> xs);

// Largest deviation between the empirical CDF of the samples and cdf.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

double ks_two_sample_statistic(std::vector<double> a, std::vector<double> b);

// Asymptotic Kolmogorov survival function 2 sum (-1)^{j-1} exp(-2 j^2 x^2).
double kolmogorov_sf(double x);

// p-value via the asymptotic distribution with the Stephens small-sample
// correction; n_eff = n for one sample, n m / (n + m) for two samples.
double ks_p_value(double d, double n_eff);

}  // namespace dunkl
