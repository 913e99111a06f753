#include "cli.hpp"

#include "llfit/critical_tables.hpp"
#include "llfit/distribution.hpp"
#include "llfit/errors.hpp"
#include "llfit/gof.hpp"
#include "llfit/montecarlo.hpp"
#include "llfit/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace llfit::cli {

using nlohmann::json;

namespace {

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

std::string fmt(const char* format, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

const char* mark(bool pass) { return pass ? "✓" : "✗"; }

struct Options
{
  std::string input;
  std::vector<double> x_l{0.0};
  std::vector<int> levels{95};
  std::vector<int> mc_levels{85, 90, 95, 99};
  std::string format = "table";
  std::string out_path;
  std::string tables_path;
  std::uint64_t seed = 20230101;
  std::vector<long> n;
  long reps = 10000;
  std::vector<double> p_grid{0.0};
  double beta_gen = 1.0;
  int workers = 0;
  double alpha = 1.0;
  double beta = 1.0;
  bool scan = false;
  std::string dump_raw;
};

std::vector<ConfidenceLevel> parse_levels(const std::vector<int>& raw)
{
  std::vector<ConfidenceLevel> levels;
  for (int v : raw)
    levels.push_back(confidence_level(v));
  return levels;
}

// Writes to --out when given, otherwise to the command's stdout.
class Sink
{
public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback)
  {
    if (!path.empty()) {
      file_.open(path);
      if (!file_)
        throw std::runtime_error("cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

private:
  std::ofstream file_;
  std::ostream* stream_;
};

const char* outcome_name(const FitOutcome& o)
{
  if (o.is_regular())
    return "regular";
  if (o.is_pareto())
    return "pareto_boundary";
  return "no_finite_maximum";
}

json diagnostics_json(const FitDiagnostics& d)
{
  json j;
  j["beta0"] = d.beta0;
  j["beta_c"] = d.beta_c;
  j["n"] = d.n;
  j["x_l"] = d.x_l;
  j["eta_hat"] = d.eta_hat;
  j["bracket"] = {d.bracket_lo, d.bracket_hi};
  if (d.sign_changes >= 0)
    j["sign_changes"] = d.sign_changes;
  return j;
}

json outcome_json(const FitOutcome& o)
{
  json j;
  j["outcome"] = outcome_name(o);
  if (o.is_regular()) {
    const auto& r = o.regular();
    j["alpha_hat"] = r.alpha_hat;
    j["beta_hat"] = r.beta_hat;
    j["lambda_hat"] = std::isfinite(r.lambda_hat) ? json(r.lambda_hat) : json(nullptr);
    j["log_lambda_hat"] = r.log_lambda_hat;
    j["loglik"] = r.loglik;
  } else if (o.is_pareto()) {
    j["beta0"] = o.pareto().beta0;
    j["loglik"] = o.pareto().loglik;
  } else {
    j["x1"] = std::get<NoFiniteMaximum>(o.result).x1;
  }
  j["diagnostics"] = diagnostics_json(o.diagnostics);
  return j;
}

json report_json(const GofReport& report)
{
  json j;
  j["ks"] = report.statistics.ks_scaled;
  j["ad"] = report.statistics.ad;
  j["ad_clamped"] = report.statistics.ad_clamped;
  j["eta_hat"] = report.eta_hat;
  j["decisions"] = json::array();
  for (const auto& d : report.decisions) {
    json row;
    row["test"] = std::string(to_string(d.test));
    row["level"] = percent(d.level);
    row["statistic"] = d.statistic;
    row["critical_interpolated"] = d.critical_interpolated;
    row["pass_interpolated"] = d.pass_interpolated;
    row["critical_table"] = d.critical_table ? json(*d.critical_table) : json(nullptr);
    row["pass_table"] = d.pass_table ? json(*d.pass_table) : json(nullptr);
    j["decisions"].push_back(row);
  }
  return j;
}

std::string non_regular_note(const FitOutcome& o)
{
  std::ostringstream s;
  if (o.is_pareto()) {
    s << "boundary / Pareto limit: beta0 = " << fmt("%.6g", o.pareto().beta0) << " <= beta_c = "
      << fmt("%.6g", o.diagnostics.beta_c) << "; the likelihood is maximized at lambda = 0 by the Pareto density "
      << "beta0/x_L (x/x_L)^-(1+beta0), ln L = " << fmt("%.2f", o.pareto().loglik);
  } else {
    s << "no finite maximum: all " << o.diagnostics.n << " observations equal "
      << fmt("%.6g", std::get<NoFiniteMaximum>(o.result).x1)
      << "; the profile likelihood increases strictly in beta and no MLE exists";
  }
  return s.str();
}

struct Row
{
  Ingested data;
  FitOutcome outcome;
  std::optional<GofReport> report;
};

std::vector<Row> fit_rows(const Options& opt, bool with_gof, const std::vector<ConfidenceLevel>& levels,
                          const CriticalValueTable& table)
{
  if (opt.input.empty())
    throw InvalidParameter("--input is required");
  std::vector<Row> rows;
  FitOptions fit_options;
  fit_options.scan = opt.scan;
  for (double x_l : opt.x_l) {
    auto data = ingest(opt.input, x_l);
    auto outcome = fit(data.sample, fit_options);
    std::optional<GofReport> report;
    if (with_gof && outcome.is_regular())
      report = run_gof(data.sample, outcome, levels, table);
    rows.push_back({std::move(data), std::move(outcome), std::move(report)});
  }
  return rows;
}

void print_fit_table(std::ostream& out, const std::vector<Row>& rows, bool with_gof,
                     const std::vector<ConfidenceLevel>& levels)
{
  out << "     x_L      N   alpha_hat   beta_hat       ln L";
  if (with_gof) {
    out << "   KS(sqrtN D)   AD(A^2)";
    for (auto level : levels)
      out << "  KS" << percent(level) << "  AD" << percent(level);
  } else {
    out << "      beta0     beta_c    eta_hat";
  }
  out << '\n';
  std::vector<std::string> notes;
  for (const auto& row : rows) {
    const auto& o = row.outcome;
    out << fmt("%8.6g", row.data.sample.x_l()) << fmt("%7.0f", static_cast<double>(row.data.sample.size()));
    if (!o.is_regular()) {
      out << "   (see note)\n";
      notes.push_back("x_L = " + fmt("%g", row.data.sample.x_l()) + ": " + non_regular_note(o));
      continue;
    }
    const auto& r = o.regular();
    out << fmt("%12.2f", r.alpha_hat) << fmt("%11.4f", r.beta_hat) << fmt("%11.2f", r.loglik);
    if (with_gof) {
      const auto& rep = *row.report;
      out << fmt("%14.4f", rep.statistics.ks_scaled) << fmt("%10.4f", rep.statistics.ad);
      for (auto level : levels) {
        out << "     " << mark(rep.decision(GofTest::ks, level).pass_interpolated) << "     "
            << mark(rep.decision(GofTest::ad, level).pass_interpolated);
      }
    } else {
      const auto& d = o.diagnostics;
      out << fmt("%11.4f", d.beta0) << fmt("%11.4f", d.beta_c) << fmt("%11.4g", d.eta_hat);
    }
    out << '\n';
  }
  if (with_gof)
    out << "pass marks: statistic below the interpolated critical value\n";
  for (const auto& row : rows) {
    if (row.data.dropped > 0)
      notes.push_back("x_L = " + fmt("%g", row.data.sample.x_l()) + ": dropped " + std::to_string(row.data.dropped) +
                      " of " + std::to_string(row.data.total) + " values <= x_L");
  }
  for (const auto& note : notes)
    out << "note: " << note << '\n';
}

void print_fit_csv(std::ostream& out, const std::vector<Row>& rows, bool with_gof,
                   const std::vector<ConfidenceLevel>& levels)
{
  out << "x_l,n,dropped,outcome,alpha_hat,beta_hat,loglik,beta0,beta_c,eta_hat";
  if (with_gof) {
    out << ",ks,ad";
    for (auto level : levels)
      out << ",ks_crit" << percent(level) << ",ks_pass" << percent(level) << ",ad_crit" << percent(level)
          << ",ad_pass" << percent(level);
  }
  out << '\n';
  for (const auto& row : rows) {
    const auto& o = row.outcome;
    const auto& d = o.diagnostics;
    out << fmt("%.17g", row.data.sample.x_l()) << ',' << row.data.sample.size() << ',' << row.data.dropped << ','
        << outcome_name(o) << ',';
    if (o.is_regular())
      out << fmt("%.17g", o.regular().alpha_hat) << ',' << fmt("%.17g", o.regular().beta_hat) << ','
          << fmt("%.17g", o.regular().loglik);
    else if (o.is_pareto())
      out << ',' << fmt("%.17g", o.pareto().beta0) << ',' << fmt("%.17g", o.pareto().loglik);
    else
      out << ",,";
    out << ',' << fmt("%.17g", d.beta0) << ',' << fmt("%.17g", d.beta_c) << ',' << fmt("%.17g", d.eta_hat);
    if (with_gof) {
      if (row.report) {
        out << ',' << fmt("%.17g", row.report->statistics.ks_scaled) << ','
            << fmt("%.17g", row.report->statistics.ad);
        for (auto level : levels) {
          for (auto test : {GofTest::ks, GofTest::ad}) {
            const auto& dec = row.report->decision(test, level);
            out << ',' << fmt("%.17g", dec.critical_interpolated) << ',' << (dec.pass_interpolated ? 1 : 0);
          }
        }
      } else {
        out << ",,";
        for (std::size_t i = 0; i < levels.size(); ++i)
          out << ",,,,";
      }
    }
    out << '\n';
  }
}

int cmd_fit(const Options& opt, bool with_gof, std::ostream& out)
{
  const auto levels = parse_levels(opt.levels);
  std::optional<CriticalValueTable> override_table;
  if (!opt.tables_path.empty())
    override_table = CriticalValueTable::load(opt.tables_path);
  const auto& table = override_table ? *override_table : CriticalValueTable::embedded();
  const auto rows = fit_rows(opt, with_gof, levels, table);

  Sink sink(opt.out_path, out);
  auto& os = sink.get();
  if (opt.format == "json") {
    json doc;
    doc["command"] = with_gof ? "gof" : "fit";
    doc["input"] = opt.input;
    doc["version"] = version;
    doc["rows"] = json::array();
    for (const auto& row : rows) {
      json j = outcome_json(row.outcome);
      j["x_l"] = row.data.sample.x_l();
      j["n"] = row.data.sample.size();
      j["dropped"] = row.data.dropped;
      if (row.report)
        j["gof"] = report_json(*row.report);
      else if (!row.outcome.is_regular())
        j["note"] = non_regular_note(row.outcome);
      doc["rows"].push_back(j);
    }
    os << doc.dump(2) << '\n';
  } else if (opt.format == "csv") {
    print_fit_csv(os, rows, with_gof, levels);
  } else {
    print_fit_table(os, rows, with_gof, levels);
  }
  return 0;
}

int cmd_sample(const Options& opt, std::ostream& out)
{
  if (opt.n.size() != 1)
    throw InvalidParameter("sample needs exactly one --n");
  if (opt.x_l.size() != 1)
    throw InvalidParameter("sample needs exactly one --xl");
  const TruncatedLogLogistic d(opt.alpha, opt.beta, opt.x_l.front());
  if (opt.n.front() < 1)
    throw InvalidParameter("--n must be at least 1");
  const auto draws = sample(d, static_cast<std::size_t>(opt.n.front()), opt.seed);
  Sink sink(opt.out_path, out);
  for (double x : draws)
    sink.get() << fmt("%.17g", x) << '\n';
  return 0;
}

int cmd_mc_critical(const Options& opt, std::ostream& out, std::ostream& err)
{
  if (opt.n.empty())
    throw InvalidParameter("mc-critical needs --n");
  const auto levels = parse_levels(opt.mc_levels);
  std::vector<CellResult> cells;
  for (double p : opt.p_grid) {
    for (long n : opt.n) {
      SimConfig cfg;
      cfg.n = n;
      cfg.reps = opt.reps;
      cfg.p = p;
      cfg.beta_gen = opt.beta_gen;
      cfg.levels = levels;
      cfg.master_seed = opt.seed;
      cfg.workers = opt.workers;
      cfg.validate();
      err << "cell p=" << p << " n=" << n << " reps=" << opt.reps << '\n';
      const auto start = std::chrono::steady_clock::now();
      cells.push_back(run_cell(cfg, &err));
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      err << "  done in " << fmt("%.2f", secs) << " s\n";
    }
  }

  if (opt.format == "json") {
    json doc;
    doc["command"] = "mc-critical";
    doc["version"] = version;
    doc["master_seed"] = opt.seed;
    doc["cells"] = json::array();
    for (const auto& c : cells) {
      json j;
      j["p"] = c.config.p;
      j["n"] = c.config.n;
      j["reps"] = c.config.reps;
      j["kept"] = c.kept;
      j["discarded"] = c.discarded;
      j["failed"] = c.failed;
      for (std::size_t i = 0; i < levels.size(); ++i) {
        j["ks"].push_back({{"level", percent(levels[i])}, {"quantile", c.ks[i].quantile}, {"std_err", c.ks[i].std_err}});
        j["ad"].push_back({{"level", percent(levels[i])}, {"quantile", c.ad[i].quantile}, {"std_err", c.ad[i].std_err}});
      }
      doc["cells"].push_back(j);
    }
    out << doc.dump(2) << '\n';
  } else {
    out << "       p       N     reps     kept  discarded  failed  level   KS quantile (se)     AD quantile (se)\n";
    for (const auto& c : cells) {
      for (std::size_t i = 0; i < levels.size(); ++i) {
        out << fmt("%8.4g", c.config.p) << fmt("%8.0f", static_cast<double>(c.config.n))
            << fmt("%9.0f", static_cast<double>(c.config.reps)) << fmt("%9.0f", static_cast<double>(c.kept))
            << fmt("%11.0f", static_cast<double>(c.discarded)) << fmt("%8.0f", static_cast<double>(c.failed))
            << fmt("%6.0f%%", static_cast<double>(percent(levels[i]))) << fmt("%11.4f", c.ks[i].quantile)
            << fmt(" (%.4f)", c.ks[i].std_err) << fmt("%12.4f", c.ad[i].quantile) << fmt(" (%.4f)", c.ad[i].std_err)
            << '\n';
      }
      out << "         discarded fraction " << fmt("%.4f", static_cast<double>(c.discarded) / c.config.reps) << '\n';
    }
  }

  const auto asset = emit_table(cells);
  for (const auto& w : asset.warnings)
    err << "warning: " << w << '\n';
  if (!opt.out_path.empty()) {
    std::ofstream file(opt.out_path);
    if (!file)
      throw std::runtime_error("cannot open output file '" + opt.out_path + "'");
    file << asset.text;
    err << "wrote critical-value table to " << opt.out_path << '\n';
  }
  if (!opt.dump_raw.empty()) {
    for (const auto& c : cells) {
      for (auto test : {GofTest::ks, GofTest::ad}) {
        const std::string path = opt.dump_raw + "_" + std::string(to_string(test)) + "_p" + fmt("%g", c.config.p) +
                                 "_n" + std::to_string(c.config.n) + ".txt";
        std::ofstream file(path);
        if (!file)
          throw std::runtime_error("cannot open raw dump file '" + path + "'");
        write_raw(file, c, test);
      }
    }
  }
  return 0;
}

}  // namespace

Ingested ingest(const std::string& path, double x_l)
{
  if (!std::isfinite(x_l) || x_l < 0.0)
    throw InvalidParameter("truncation point must be non-negative");
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open input file '" + path + "'");

  std::vector<double> kept;
  std::size_t total = 0;
  std::size_t line_no = 0;
  bool seen_data = false;
  bool header_skipped = false;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string field = trim(line);
    if (field.empty() || field.front() == '#')
      continue;
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0' || !std::isfinite(v)) {
      if (!seen_data && !header_skipped) {
        header_skipped = true;  // CSV header
        continue;
      }
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": cannot parse '" + field + "' as a number");
    }
    seen_data = true;
    ++total;
    if (v > x_l)
      kept.push_back(v);
  }
  if (kept.empty())
    throw std::runtime_error(path + ": no observations above x_L = " + fmt("%g", x_l));
  if (kept.size() < 2)
    throw std::runtime_error(path + ": fitting needs at least two observations above x_L = " + fmt("%g", x_l));
  const std::size_t dropped = total - kept.size();
  return {Sample(std::move(kept), x_l), total, dropped};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Fit and test left-truncated log-logistic distributions"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);
  Options opt;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"table", "json", "csv"}));
    sub->add_option("--out", opt.out_path, "Write output to PATH instead of stdout");
  };

  auto* fit_cmd = app.add_subcommand("fit", "Maximum likelihood fit for each truncation point");
  auto* gof_cmd = app.add_subcommand("gof", "Fit, then KS and AD tests with critical values");
  for (auto* sub : {fit_cmd, gof_cmd}) {
    sub->add_option("--input", opt.input, "Data file, one value per line")->required();
    sub->add_option("--xl", opt.x_l, "Truncation point(s), comma separated")->delimiter(',');
    sub->add_flag("--scan", opt.scan, "Count sign changes of the master equation over a 512-point grid");
    add_format(sub);
  }
  gof_cmd->add_option("--levels", opt.levels, "Confidence levels: 85,90,95,99")->delimiter(',');
  gof_cmd->add_option("--tables", opt.tables_path, "Critical-value table overriding the embedded one");

  auto* sample_cmd = app.add_subcommand("sample", "Draw a truncated log-logistic sample");
  sample_cmd->add_option("--alpha", opt.alpha, "Scale")->required();
  sample_cmd->add_option("--beta", opt.beta, "Shape")->required();
  sample_cmd->add_option("--xl", opt.x_l, "Truncation point");
  sample_cmd->add_option("--n", opt.n, "Sample size")->required();
  sample_cmd->add_option("--seed", opt.seed, "Random seed");
  sample_cmd->add_option("--out", opt.out_path, "Write output to PATH instead of stdout");

  auto* mc_cmd = app.add_subcommand("mc-critical", "Regenerate critical values by Monte Carlo");
  mc_cmd->add_option("--n", opt.n, "Sample size(s), comma separated")->required()->delimiter(',');
  mc_cmd->add_option("--p-grid", opt.p_grid, "Truncation percentages, comma separated")->delimiter(',');
  mc_cmd->add_option("--reps", opt.reps, "Replications per cell");
  mc_cmd->add_option("--levels", opt.mc_levels, "Confidence levels: 85,90,95,99")->delimiter(',');
  mc_cmd->add_option("--beta-gen", opt.beta_gen, "Generator shape");
  mc_cmd->add_option("--workers", opt.workers, "OpenMP threads (0 = default)");
  mc_cmd->add_option("--seed", opt.seed, "Master seed");
  mc_cmd->add_option("--format", opt.format, "Summary format")->check(CLI::IsMember({"table", "json"}));
  mc_cmd->add_option("--out", opt.out_path, "Write the critical-value table to PATH");
  mc_cmd->add_option("--dump-raw", opt.dump_raw, "Write sorted raw statistics to PREFIX_<test>_p<p>_n<N>.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*fit_cmd)
      return cmd_fit(opt, false, out);
    if (*gof_cmd)
      return cmd_fit(opt, true, out);
    if (*sample_cmd)
      return cmd_sample(opt, out);
    if (*mc_cmd)
      return cmd_mc_critical(opt, out, err);
  } catch (const std::exception& e) {
    err << "llfit: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace llfit::cli
