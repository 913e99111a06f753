#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace llfit {

enum class GofTest { ks, ad };

/// Confidence levels with published critical values.
enum class ConfidenceLevel : int { p85 = 85, p90 = 90, p95 = 95, p99 = 99 };

inline constexpr std::array<ConfidenceLevel, 4> all_levels{ConfidenceLevel::p85, ConfidenceLevel::p90,
                                                           ConfidenceLevel::p95, ConfidenceLevel::p99};

/// @throws InvalidParameter for anything but 85, 90, 95, 99.
ConfidenceLevel confidence_level(int percent);
inline int percent(ConfidenceLevel level) { return static_cast<int>(level); }
/// Quantile probability of the level, e.g. 0.95.
inline double probability(ConfidenceLevel level) { return percent(level) / 100.0; }

std::string_view to_string(GofTest test);
/// "KS" / "AD" (case-insensitive). @throws InvalidParameter otherwise.
GofTest parse_test(std::string_view name);

/// Truncation percentage p = eta / (1 + eta) and its inverse.
double truncation_percentage(double eta);
double eta_from_percentage(double p);

struct CriticalValue
{
  double quantile;
  double std_err;
};

/**
 * Critical values indexed by (test, level, truncation percentage p, sample size N).
 *
 * Text format, one record per line, '#' starts a comment line:
 *
 *     # format: llfit-critical-values 1
 *     KS 95 0.0323 30 0.7602 0.0006
 *
 * Fields: test (KS|AD), level (85|90|95|99), p, N, quantile, standard error.
 * Numbers use '.' as the decimal separator and are parsed with strtod, so a
 * value written in shortest round-trip form reads back bit-exactly.
 */
class CriticalValueTable
{
public:
  struct Key
  {
    GofTest test;
    ConfidenceLevel level;
    double p;
    long n;
    auto operator<=>(const Key&) const = default;
  };

  /// @throws InvalidParameter with the offending line number on malformed input.
  static CriticalValueTable parse(std::string_view text);
  /// @throws std::runtime_error if the file cannot be read.
  static CriticalValueTable load(const std::string& path);
  /// The table compiled into the library from data/critical_values_v1.txt.
  static const CriticalValueTable& embedded();

  void insert(const Key& key, CriticalValue value);
  std::size_t size() const noexcept { return cells_.size(); }
  const std::map<Key, CriticalValue>& cells() const noexcept { return cells_; }
  /// Comment lines (without the leading '#') in the order read.
  const std::vector<std::string>& header() const noexcept { return header_; }
  void add_header_line(std::string line) { header_.push_back(std::move(line)); }

  /// Exact grid hit (p matched to 1e-9), else bilinear interpolation in
  /// (sqrt(eta), ln N) over the enclosing grid rectangle, else nullopt.
  std::optional<double> lookup(GofTest test, ConfidenceLevel level, double p, long n) const;
  std::optional<CriticalValue> exact(GofTest test, ConfidenceLevel level, double p, long n) const;

  /// Serialize in the format described above; values use the shortest round-trip form
  /// unless they were parsed from text, in which case the original spelling is kept.
  std::string to_text() const;

private:
  std::map<Key, CriticalValue> cells_;
  std::map<Key, std::pair<std::string, std::string>> spelling_;
  std::vector<std::string> header_;
};

std::string_view embedded_table_text() noexcept;

/// Coefficients of the rational interpolation formula for critical values.
struct ThetaCoefficients
{
  GofTest test;
  ConfidenceLevel level;
  std::array<double, 9> theta;
};

const ThetaCoefficients& theta_coefficients(GofTest test, ConfidenceLevel level);

/**
 * Interpolated critical value
 *
 *   (t1 eta + t2 sqrt(eta) + t3) / (t4 sqrt(eta) + t5 + eta)
 *     + t6 sqrt(eta / N) + t7 eta^1.5 + t8 / sqrt(N) + t9 / N
 *
 * with eta the fitted eta (0 for an untruncated fit).
 */
double critical_interpolated(GofTest test, ConfidenceLevel level, double eta, long n);

/// Table lookup by truncation percentage (see CriticalValueTable::lookup).
std::optional<double> critical_table(GofTest test, ConfidenceLevel level, double p, long n,
                                     const CriticalValueTable& table = CriticalValueTable::embedded());

}  // namespace llfit
