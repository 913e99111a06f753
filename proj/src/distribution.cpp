#include "llfit/distribution.hpp"

#include "llfit/detail/logmath.hpp"
#include "llfit/errors.hpp"
#include "llfit/rng.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace llfit {

using detail::log_add_exp;
using detail::logistic;
using detail::softplus;

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

TruncatedLogLogistic::TruncatedLogLogistic(double alpha, double beta, double x_l)
    : alpha_(alpha), beta_(beta), x_l_(x_l), log_alpha_(0.0), z_l_(neg_inf)
{
  if (!positive_finite(alpha))
    throw InvalidParameter("log-logistic scale must be positive and finite, got " + std::to_string(alpha));
  if (!positive_finite(beta))
    throw InvalidParameter("log-logistic shape must be positive and finite, got " + std::to_string(beta));
  if (!std::isfinite(x_l) || x_l < 0.0)
    throw InvalidParameter("truncation point must be non-negative and finite, got " + std::to_string(x_l));
  log_alpha_ = std::log(alpha);
  if (x_l > 0.0)
    z_l_ = beta * (std::log(x_l) - log_alpha_);
}

TruncatedLogLogistic TruncatedLogLogistic::from_log_lambda(double log_lambda, double beta, double x_l)
{
  if (!positive_finite(beta))
    throw InvalidParameter("log-logistic shape must be positive and finite");
  if (!std::isfinite(log_lambda))
    throw InvalidParameter("ln lambda must be finite");
  return TruncatedLogLogistic(std::exp(log_lambda / beta), beta, x_l);
}

double TruncatedLogLogistic::lambda() const noexcept { return std::exp(log_lambda()); }

double TruncatedLogLogistic::eta() const noexcept { return std::exp(z_l_); }

double TruncatedLogLogistic::z(double x) const noexcept { return beta_ * (std::log(x) - log_alpha_); }

double TruncatedLogLogistic::truncation_fraction() const noexcept { return logistic(z_l_); }

double log_pdf(const TruncatedLogLogistic& d, double x)
{
  if (!(x > d.x_l()) || !std::isfinite(x))
    throw DomainError("pdf argument must exceed the truncation point");
  const double z = d.z(x);
  // ln[(1 + eta) (beta / x) e^z / (1 + e^z)^2]
  const double log_norm = d.truncated() ? softplus(d.z_l()) : 0.0;
  return log_norm + std::log(d.beta()) - std::log(x) - softplus(-z) - softplus(z);
}

double pdf(const TruncatedLogLogistic& d, double x) { return std::exp(log_pdf(d, x)); }

double cdf(const TruncatedLogLogistic& d, double x)
{
  if (!(x >= d.x_l()) || std::isnan(x))
    throw DomainError("cdf argument must not lie below the truncation point");
  if (x == 0.0)
    return 0.0;
  if (std::isinf(x))
    return 1.0;
  const double z = d.z(x);
  // (e^z - e^{z_L}) / (1 + e^z) = sigma(z) (1 - e^{z_L - z})
  return logistic(z) * -std::expm1(d.z_l() - z);
}

double survival(const TruncatedLogLogistic& d, double x)
{
  if (!(x >= d.x_l()) || std::isnan(x))
    throw DomainError("survival argument must not lie below the truncation point");
  if (x == 0.0)
    return 1.0;
  if (std::isinf(x))
    return 0.0;
  // (1 + eta) / (1 + e^z)
  const double log_norm = d.truncated() ? softplus(d.z_l()) : 0.0;
  return std::exp(log_norm - softplus(d.z(x)));
}

double quantile(const TruncatedLogLogistic& d, double u)
{
  if (!(u >= 0.0 && u < 1.0))
    throw DomainError("quantile probability must lie in [0, 1)");
  if (u == 0.0)
    return d.x_l();
  // alpha ((u + eta) / (1 - u))^{1/beta}
  const double log_ratio = log_add_exp(std::log(u), d.z_l()) - std::log1p(-u);
  return std::exp(d.log_alpha() + log_ratio / d.beta());
}

std::vector<double> sample(const TruncatedLogLogistic& d, std::size_t n, std::uint64_t seed)
{
  if (n == 0)
    throw InvalidParameter("sample size must be at least 1");
  UniformStream uniform(seed);
  std::vector<double> out(n);
  for (auto& x : out) {
    x = quantile(d, uniform());
    // (u + eta)/(1 - u) can round to eta for u near 2^-53 and huge eta.
    if (!(x > d.x_l()))
      x = std::nextafter(d.x_l(), std::numeric_limits<double>::infinity());
  }
  return out;
}

TruncatedLogLogistic rescale(const TruncatedLogLogistic& d, double k)
{
  if (!positive_finite(k))
    throw DomainError("rescaling factor must be positive and finite");
  return TruncatedLogLogistic(k * d.alpha(), d.beta(), k * d.x_l());
}

ParetoTail::ParetoTail(double beta0, double x_l) : beta0_(beta0), x_l_(x_l)
{
  if (!positive_finite(beta0))
    throw InvalidParameter("Pareto shape must be positive and finite");
  if (!positive_finite(x_l))
    throw InvalidParameter("Pareto truncation point must be positive and finite");
}

double pareto_log_pdf(const ParetoTail& p, double x)
{
  if (!(x > p.x_l()) || !std::isfinite(x))
    throw DomainError("Pareto pdf argument must exceed the truncation point");
  return std::log(p.beta0() / p.x_l()) - (1.0 + p.beta0()) * std::log(x / p.x_l());
}

double pareto_pdf(const ParetoTail& p, double x) { return std::exp(pareto_log_pdf(p, x)); }

double pareto_cdf(const ParetoTail& p, double x)
{
  if (!(x >= p.x_l()) || std::isnan(x))
    throw DomainError("Pareto cdf argument must not lie below the truncation point");
  if (std::isinf(x))
    return 1.0;
  return -std::expm1(-p.beta0() * std::log(x / p.x_l()));
}

}  // namespace llfit
