#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pcrlab::experiments {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<SelftestCheck> selftest();

// Kolmogorov-Smirnov distance between a sample and a continuous cdf.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

// Asymptotic two-sided KS critical value c(level)/sqrt(n); level 0.01 or 0.05.
double ks_critical(double level, std::size_t n);

}  // namespace pcrlab::experiments
