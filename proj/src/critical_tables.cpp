#include "llfit/critical_tables.hpp"

#include "llfit/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace llfit {

namespace {

constexpr double p_match = 1e-9;

// Published coefficients; rows are test x level.
constexpr std::array<ThetaCoefficients, 8> theta_rows{{
    {GofTest::ad, ConfidenceLevel::p85, {0.5644, -0.0026, 0.1307, 0.0406, 0.2612, -0.0432, 0.0001, 0.0350, -0.1715}},
    {GofTest::ad, ConfidenceLevel::p90, {0.6390, -0.0005, 0.1540, 0.0361, 0.2750, -0.0497, 0.0000, 0.0398, -0.2066}},
    {GofTest::ad, ConfidenceLevel::p95, {0.7669, -0.0189, 0.1927, 0.0094, 0.2914, -0.0641, 0.0001, 0.0494, -0.2364}},
    {GofTest::ad, ConfidenceLevel::p99, {1.0714, -0.0589, 0.2933, 0.0301, 0.3272, -0.0943, 0.0002, 0.0598, -0.1787}},
    {GofTest::ks, ConfidenceLevel::p85, {0.7421, -0.0492, 0.1565, -0.0517, 0.2210, -0.0238, 0.0000, 0.1492, -0.2115}},
    {GofTest::ks, ConfidenceLevel::p90, {0.7821, -0.0818, 0.1742, -0.0917, 0.2336, -0.0298, 0.0001, 0.1500, -0.2723}},
    {GofTest::ks, ConfidenceLevel::p95, {0.8443, -0.1204, 0.1987, -0.1318, 0.2470, -0.0298, 0.0001, 0.1417, -0.3753}},
    {GofTest::ks, ConfidenceLevel::p99, {0.9711, -0.1729, 0.2672, -0.1687, 0.2895, -0.0392, 0.0001, 0.1416, -0.5325}},
}};

std::string trim(std::string_view s)
{
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& token, std::size_t line_no)
{
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || !std::isfinite(v))
    throw InvalidParameter("critical-value table line " + std::to_string(line_no) + ": bad number '" + token + "'");
  return v;
}

// Shortest text that reads back to the same double.
std::string format_shortest(double v)
{
  char buf[40];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

// Distinct grid coordinates of one (test, level) slice.
struct Grid
{
  std::vector<double> p;
  std::vector<long> n;
};

Grid grid_of(const std::map<CriticalValueTable::Key, CriticalValue>& cells, GofTest test, ConfidenceLevel level)
{
  std::set<double> ps;
  std::set<long> ns;
  for (const auto& [key, value] : cells) {
    if (key.test == test && key.level == level) {
      ps.insert(key.p);
      ns.insert(key.n);
    }
  }
  return {{ps.begin(), ps.end()}, {ns.begin(), ns.end()}};
}

// Index i with xs[i] <= x <= xs[i+1]; nullopt outside [front, back].
template <class T, class F>
std::optional<std::size_t> bracket(const std::vector<T>& xs, double x, F coord)
{
  if (xs.empty() || x < coord(xs.front()) || x > coord(xs.back()))
    return std::nullopt;
  if (xs.size() == 1)
    return 0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (x <= coord(xs[i + 1]))
      return i;
  }
  return xs.size() - 2;
}

}  // namespace

ConfidenceLevel confidence_level(int pct)
{
  for (auto level : all_levels) {
    if (percent(level) == pct)
      return level;
  }
  throw InvalidParameter("unsupported confidence level " + std::to_string(pct) + " (expected 85, 90, 95 or 99)");
}

std::string_view to_string(GofTest test) { return test == GofTest::ks ? "KS" : "AD"; }

GofTest parse_test(std::string_view name)
{
  std::string upper;
  for (char c : name)
    upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (upper == "KS")
    return GofTest::ks;
  if (upper == "AD")
    return GofTest::ad;
  throw InvalidParameter("unknown goodness-of-fit test '" + std::string(name) + "'");
}

double truncation_percentage(double eta) { return eta / (1.0 + eta); }

double eta_from_percentage(double p)
{
  if (!(p >= 0.0 && p < 1.0))
    throw DomainError("truncation percentage must lie in [0, 1)");
  return p / (1.0 - p);
}

CriticalValueTable CriticalValueTable::parse(std::string_view text)
{
  CriticalValueTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const auto raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty())
      continue;
    if (line.front() == '#') {
      table.header_.push_back(trim(std::string_view(line).substr(1)));
      continue;
    }
    std::istringstream fields(line);
    std::string test, level, p, n, q, se, extra;
    if (!(fields >> test >> level >> p >> n >> q >> se) || (fields >> extra))
      throw InvalidParameter("critical-value table line " + std::to_string(line_no) + ": expected 6 fields");
    Key key{};
    try {
      key.test = parse_test(test);
      key.level = confidence_level(static_cast<int>(parse_number(level, line_no)));
    } catch (const InvalidParameter& e) {
      throw InvalidParameter("critical-value table line " + std::to_string(line_no) + ": " + e.what());
    }
    key.p = parse_number(p, line_no);
    const double n_value = parse_number(n, line_no);
    if (n_value < 1 || n_value != std::floor(n_value))
      throw InvalidParameter("critical-value table line " + std::to_string(line_no) + ": bad sample size");
    key.n = static_cast<long>(n_value);
    if (table.cells_.contains(key))
      throw InvalidParameter("critical-value table line " + std::to_string(line_no) + ": duplicate record");
    table.insert(key, {parse_number(q, line_no), parse_number(se, line_no)});
    table.spelling_[key] = {q, se};
  }
  return table;
}

CriticalValueTable CriticalValueTable::load(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open critical-value table '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const CriticalValueTable& CriticalValueTable::embedded()
{
  static const CriticalValueTable table = parse(embedded_table_text());
  return table;
}

void CriticalValueTable::insert(const Key& key, CriticalValue value)
{
  cells_[key] = value;
  spelling_.erase(key);
}

std::optional<CriticalValue> CriticalValueTable::exact(GofTest test, ConfidenceLevel level, double p, long n) const
{
  for (const auto& [key, value] : cells_) {
    if (key.test == test && key.level == level && key.n == n && std::abs(key.p - p) <= p_match)
      return value;
  }
  return std::nullopt;
}

std::optional<double> CriticalValueTable::lookup(GofTest test, ConfidenceLevel level, double p, long n) const
{
  if (auto hit = exact(test, level, p, n))
    return hit->quantile;
  if (!(p >= 0.0 && p < 1.0) || n < 1)
    return std::nullopt;

  const Grid grid = grid_of(cells_, test, level);
  auto sqrt_eta = [](double pp) { return std::sqrt(eta_from_percentage(pp)); };
  auto log_n = [](long nn) { return std::log(static_cast<double>(nn)); };
  const double x = sqrt_eta(p);
  const double y = log_n(n);
  const auto i = bracket(grid.p, x, sqrt_eta);
  const auto j = bracket(grid.n, y, log_n);
  if (!i || !j)
    return std::nullopt;

  const std::size_t i1 = std::min(*i + 1, grid.p.size() - 1);
  const std::size_t j1 = std::min(*j + 1, grid.n.size() - 1);
  auto corner = [&](std::size_t a, std::size_t b) -> std::optional<double> {
    auto it = cells_.find(Key{test, level, grid.p[a], grid.n[b]});
    if (it == cells_.end())
      return std::nullopt;
    return it->second.quantile;
  };
  const auto q00 = corner(*i, *j), q01 = corner(*i, j1), q10 = corner(i1, *j), q11 = corner(i1, j1);
  if (!q00 || !q01 || !q10 || !q11)
    return std::nullopt;

  const double x0 = sqrt_eta(grid.p[*i]), x1 = sqrt_eta(grid.p[i1]);
  const double y0 = log_n(grid.n[*j]), y1 = log_n(grid.n[j1]);
  const double tx = x1 > x0 ? (x - x0) / (x1 - x0) : 0.0;
  const double ty = y1 > y0 ? (y - y0) / (y1 - y0) : 0.0;
  return (1 - tx) * (1 - ty) * *q00 + (1 - tx) * ty * *q01 + tx * (1 - ty) * *q10 + tx * ty * *q11;
}

std::string CriticalValueTable::to_text() const
{
  std::ostringstream out;
  for (const auto& line : header_)
    out << "# " << line << '\n';
  // Group KS before AD, then by level, p and N.
  std::vector<std::pair<Key, CriticalValue>> rows(cells_.begin(), cells_.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tuple(a.first.test != GofTest::ks, a.first.level, a.first.p, a.first.n) <
           std::tuple(b.first.test != GofTest::ks, b.first.level, b.first.p, b.first.n);
  });
  for (const auto& [key, value] : rows) {
    std::string p_text = format_shortest(key.p);
    std::string q_text = format_shortest(value.quantile);
    std::string se_text = format_shortest(value.std_err);
    if (auto it = spelling_.find(key); it != spelling_.end()) {
      q_text = it->second.first;
      se_text = it->second.second;
    }
    out << to_string(key.test) << ' ' << percent(key.level) << ' ' << p_text << ' ' << key.n << ' ' << q_text << ' '
        << se_text << '\n';
  }
  return out.str();
}

const ThetaCoefficients& theta_coefficients(GofTest test, ConfidenceLevel level)
{
  for (const auto& row : theta_rows) {
    if (row.test == test && row.level == level)
      return row;
  }
  throw InvalidParameter("no interpolation coefficients for this test and level");
}

double critical_interpolated(GofTest test, ConfidenceLevel level, double eta, long n)
{
  if (!(eta >= 0.0) || !std::isfinite(eta))
    throw DomainError("eta must be non-negative and finite");
  if (n < 2)
    throw DomainError("sample size must be at least 2");
  const auto& t = theta_coefficients(test, level).theta;
  const double se = std::sqrt(eta);
  const double nn = static_cast<double>(n);
  return (t[0] * eta + t[1] * se + t[2]) / (t[3] * se + t[4] + eta) + t[5] * std::sqrt(eta / nn) +
         t[6] * eta * se + t[7] / std::sqrt(nn) + t[8] / nn;
}

std::optional<double> critical_table(GofTest test, ConfidenceLevel level, double p, long n,
                                     const CriticalValueTable& table)
{
  return table.lookup(test, level, p, n);
}

}  // namespace llfit
