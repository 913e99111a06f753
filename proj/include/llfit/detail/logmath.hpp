#pragma once

#include <cmath>
#include <limits>
#include <utility>

namespace llfit::detail {

/// ln(1 + e^x) without overflow.
inline double softplus(double x) noexcept
{
  if (x > 0.0)
    return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

/// ln(e^a + e^b); either argument may be -inf.
inline double log_add_exp(double a, double b) noexcept
{
  if (a < b)
    std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity())
    return a;
  return a + std::log1p(std::exp(b - a));
}

/// 1 / (1 + e^{-x})
inline double logistic(double x) noexcept
{
  if (x >= 0.0)
    return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace llfit::detail
