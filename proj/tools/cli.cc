#include "cli.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "cuspwind/coding.h"
#include "cuspwind/pressure.h"
#include "cuspwind/spectrum.h"
#include "json.hpp"

namespace cuspwind::cli {

namespace {

using nlohmann::json;

constexpr double kGridSlack = 1e-12;

struct Options {
  std::string config;
  int L = 100;
  double tol = 1e-8;
  double newton_tol = 1e-10;
  std::string q;
  std::string b;
  std::string alpha;
  std::string alpha_grid;
  std::string out;
  std::string format = "csv";
  int threads = 1;
  int cusp = 0;
  std::string l_range = "20:200";
  std::string q_grid;
  std::string b_grid = "0.05:0.95:0.05";
  std::string weights = "rep";
  bool auto_L = false;
  int L_max = 1600;
};

// A table of numbers rendered as CSV (17 significant digits) or as a JSON
// array of records with the same keys.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string Render(const std::string& format) const {
    std::ostringstream os;
    if (format == "json") {
      json records = json::array();
      for (const auto& row : rows) {
        json rec = json::object();
        for (std::size_t k = 0; k < header.size(); ++k) rec[header[k]] = row[k];
        records.push_back(rec);
      }
      os << records.dump(2) << '\n';
      return os.str();
    }
    for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", row[k]);
        os << (k ? "," : "") << buf;
      }
      os << '\n';
    }
    return os.str();
  }
};

std::vector<std::string> Split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

double ParseNumber(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: \"" + text + "\"");
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw std::invalid_argument("not a number: \"" + text + "\"");
  }
  return v;
}

std::vector<double> ParseAxis(const std::string& spec) {
  const auto parts = Split(spec, ':');
  if (parts.size() != 3) {
    throw std::invalid_argument("grid axis \"" + spec + "\" must be start:stop:step");
  }
  const double start = ParseNumber(parts[0]);
  const double stop = ParseNumber(parts[1]);
  const double step = ParseNumber(parts[2]);
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (start > stop) throw std::invalid_argument("grid start exceeds stop");
  const double span = (stop - start) / step;
  const long count = static_cast<long>(std::floor(span + kGridSlack)) + 1;
  std::vector<double> values;
  values.reserve(count);
  for (long k = 0; k < count; ++k) values.push_back(start + k * step);
  if (std::abs(values.back() - stop) <= kGridSlack * std::max(1.0, std::abs(stop))) {
    values.back() = stop;
  }
  return values;
}

std::vector<double> RequireLength(const std::vector<double>& v, int m, const char* what) {
  if (static_cast<int>(v.size()) != m) {
    throw std::invalid_argument(std::string(what) + " needs " + std::to_string(m) +
                                " value(s), got " + std::to_string(v.size()));
  }
  return v;
}

void Emit(const Options& opt, const std::string& text, std::ostream& out) {
  if (opt.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(opt.out, std::ios::binary);
  if (!file) throw std::invalid_argument("cannot open output file " + opt.out);
  file << text;
}

WeightPolicy ParsePolicy(const std::string& name) {
  if (name == "rep") return WeightPolicy::kRepresentative;
  if (name == "sup") return WeightPolicy::kSupWeights;
  return WeightPolicy::kInfWeights;
}

int CmdValidate(const Options& opt, std::ostream& out) {
  ValidationReport report;
  try {
    report = Validate(LoadConfig(opt.config));
  } catch (const ValidationError& e) {
    report = e.report();
  }
  std::ostringstream os;
  if (opt.format == "json") {
    json j = {{"passed", report.passed}, {"checks", report.Lines()}};
    os << j.dump(2) << '\n';
  } else {
    for (const auto& line : report.Lines()) os << line << '\n';
  }
  Emit(opt, os.str(), out);
  return report.passed ? kOk : kValidationFailure;
}

int CmdDim(const Options& opt, std::ostream& out, std::ostream& err) {
  const GroupPresentation p = LoadConfig(opt.config);
  const TransferTable table(TruncatedAlphabet(p, opt.L), ParsePolicy(opt.weights),
                            opt.threads);
  const DimResult d = HausdorffDim(table, opt.tol);
  for (const auto& w : d.warnings) err << "warning: " << w << '\n';
  Table t{{"s", "low", "high", "L", "residual"},
          {{d.s, d.low, d.high, static_cast<double>(d.L), d.residual}}};
  Emit(opt, t.Render(opt.format), out);
  return kOk;
}

int CmdPressure(const Options& opt, std::ostream& out, std::ostream& err) {
  const GroupPresentation p = LoadConfig(opt.config);
  const int m = p.m();
  if (opt.b.empty()) throw std::invalid_argument("pressure needs --b");
  PotentialParams params;
  params.q = opt.q.empty() ? std::vector<double>(m, 0.0) : RequireLength(ParseList(opt.q), m, "--q");
  params.alpha = opt.alpha.empty() ? std::vector<double>(m, 0.0)
                                   : RequireLength(ParseList(opt.alpha), m, "--alpha");
  params.b = ParseNumber(opt.b);
  if (!InFiniteRegion(params)) {
    throw std::invalid_argument("(q, b) lies outside the finiteness region");
  }
  int L = opt.L;
  if (opt.auto_L) {
    const DoublingResult dr = PressureByDoubling(p, params, opt.L, opt.tol, opt.L_max);
    L = dr.truncations.back();
    if (!dr.converged) {
      err << "warning: |P_2L - P_L| >= " << opt.tol << " up to L = " << L << '\n';
    }
  }
  const TransferTable table(TruncatedAlphabet(p, L), WeightPolicy::kRepresentative,
                            opt.threads);
  const GibbsStats g = ComputeGibbsStats(table, params);
  Table t;
  t.header = {"P", "distortion_bound"};
  std::vector<double> row = {g.pressure, g.distortion_bound};
  for (int i = 0; i < m; ++i) {
    t.header.push_back("a_" + std::to_string(i + 1));
    row.push_back(g.a_integrals[i]);
  }
  for (const char* k : {"lambda", "entropy", "L", "iters"}) t.header.push_back(k);
  row.insert(row.end(), {g.lyapunov, g.entropy, static_cast<double>(L),
                         static_cast<double>(g.iterations)});
  t.rows.push_back(row);
  Emit(opt, t.Render(opt.format), out);
  return kOk;
}

int CmdSpectrum(const Options& opt, std::ostream& out, std::ostream& err) {
  const GroupPresentation p = LoadConfig(opt.config);
  const int m = p.m();
  std::vector<std::vector<double>> alphas;
  if (!opt.alpha_grid.empty()) {
    alphas = ParseGrid(opt.alpha_grid);
  } else if (!opt.alpha.empty()) {
    alphas.push_back(ParseList(opt.alpha));
  } else {
    throw std::invalid_argument("spectrum needs --alpha or --alpha-grid");
  }
  for (const auto& a : alphas) {
    RequireLength(a, m, "alpha");
    for (double x : a) {
      if (!(x > 0.0)) throw std::invalid_argument("alpha entries must be positive");
    }
  }
  SolverOptions so;
  so.tol = opt.newton_tol;
  SpectrumSolver solver(p, opt.L, so, opt.threads);
  const auto points = solver.Grid(alphas, opt.threads);

  Table t;
  for (int i = 0; i < m; ++i) t.header.push_back("alpha_" + std::to_string(i + 1));
  for (int i = 0; i < m; ++i) t.header.push_back("q_" + std::to_string(i + 1));
  for (const char* k : {"b", "residual_p", "residual_grad_max", "lambda", "entropy", "L", "iters"}) {
    t.header.push_back(k);
  }
  const double nan = std::nan("");
  int failures = 0;
  for (const auto& pt : points) {
    std::vector<double> row(pt.alpha);
    if (pt.converged) {
      row.insert(row.end(), pt.q.begin(), pt.q.end());
      row.insert(row.end(), {pt.b, pt.residual_p, pt.residual_grad_max(), pt.lyapunov,
                             pt.entropy});
    } else {
      ++failures;
      row.insert(row.end(), m + 5, nan);
      err << "error: alpha point " << t.rows.size() + 1 << ": " << pt.error << '\n';
    }
    row.push_back(static_cast<double>(pt.L));
    row.push_back(static_cast<double>(pt.newton_iterations));
    if (pt.saturated) {
      err << "warning: alpha point " << t.rows.size() + 1
          << " needs q <= 0 at this truncation (beyond the maximal-measure mean)\n";
    }
    t.rows.push_back(row);
  }
  Emit(opt, t.Render(opt.format), out);
  return failures == 0 ? kOk : kNumericalFailure;
}

int CmdDistortion(const Options& opt, std::ostream& out) {
  const GroupPresentation p = LoadConfig(opt.config);
  const auto range = Split(opt.l_range, ':');
  if (range.size() != 2) throw std::invalid_argument("--l-range must be l_min:l_max");
  const int l_min = static_cast<int>(ParseNumber(range[0]));
  const int l_max = static_cast<int>(ParseNumber(range[1]));
  Table t{{"cusp", "sign", "slope", "intercept"}, {}};
  for (int i = 0; i < p.m(); ++i) {
    if (opt.cusp != 0 && opt.cusp != i + 1) continue;
    for (int sign : {+1, -1}) {
      const DistortionFit fit = DistortionExponent(p, i, l_min, l_max, sign);
      t.rows.push_back({static_cast<double>(i + 1), static_cast<double>(sign), fit.slope,
                        fit.intercept});
    }
  }
  if (t.rows.empty()) throw std::invalid_argument("--cusp out of range");
  Emit(opt, t.Render(opt.format), out);
  return kOk;
}

int CmdOracle(const Options& opt, std::ostream& out) {
  const GroupPresentation p = LoadConfig(opt.config);
  const int m = p.m();
  if (opt.alpha.empty()) throw std::invalid_argument("oracle needs --alpha");
  const std::vector<double> alpha = RequireLength(ParseList(opt.alpha), m, "--alpha");
  std::string q_spec = opt.q_grid;
  if (q_spec.empty()) {
    for (int i = 0; i < m; ++i) q_spec += (i ? "x" : "") + std::string("0:2:0.05");
  }
  const auto q_grid = ParseGrid(q_spec);
  for (const auto& q : q_grid) RequireLength(q, m, "q grid point");
  std::vector<double> b_grid;
  for (const auto& b : ParseGrid(opt.b_grid)) {
    if (b.size() != 1) throw std::invalid_argument("--b-grid must have one axis");
    b_grid.push_back(b[0]);
  }
  const TransferTable table(TruncatedAlphabet(p, opt.L), WeightPolicy::kRepresentative,
                            opt.threads);
  const OracleResult r = BruteForceOracle(table, alpha, q_grid, b_grid);
  Table t{{"b_low", "b_high", "b_star"}, {}};
  std::vector<double> row = {r.b_low, r.b_high, r.b_star};
  for (int i = 0; i < m; ++i) {
    t.header.push_back("q_star_" + std::to_string(i + 1));
    row.push_back(r.q_star[i]);
  }
  t.rows.push_back(row);
  Emit(opt, t.Render(opt.format), out);
  return kOk;
}

}  // namespace

std::vector<std::vector<double>> ParseGrid(const std::string& spec) {
  std::vector<std::vector<double>> axes;
  for (const auto& axis : Split(spec, 'x')) axes.push_back(ParseAxis(axis));
  std::vector<std::vector<double>> points = {{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<double>> next;
    next.reserve(points.size() * axis.size());
    for (const auto& prefix : points) {
      for (double v : axis) {
        next.push_back(prefix);
        next.back().push_back(v);
      }
    }
    points = std::move(next);
  }
  return points;
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : Split(text, ',')) out.push_back(ParseNumber(part));
  return out;
}

GroupPresentation LoadConfig(const std::string& config) {
  const std::string prefix = "preset:";
  if (config.rfind(prefix, 0) == 0) return Preset(config.substr(prefix.size()));
  return LoadFile(config);
}

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hausdorff dimension and cusp-winding spectra of generalized Schottky groups",
               "cuspwind"};
  app.require_subcommand(1, 1);
  Options opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON config file or preset:NAME")->required();
    sub->add_option("--L", opt.L, "maximal parabolic power")->check(CLI::PositiveNumber);
    sub->add_option("--out", opt.out, "write results to this file");
    sub->add_option("--format", opt.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
  };

  CLI::App* validate = app.add_subcommand("validate", "check the Schottky conditions");
  common(validate);
  CLI::App* dim = app.add_subcommand("dim", "Hausdorff dimension of the conical limit set");
  common(dim);
  dim->add_option("--tol", opt.tol, "bisection tolerance on s");
  dim->add_option("--weights", opt.weights, "rep, sup or inf")
      ->check(CLI::IsMember({"rep", "sup", "inf"}));
  CLI::App* pressure = app.add_subcommand("pressure", "truncated pressure and Gibbs statistics");
  common(pressure);
  pressure->add_option("--q", opt.q, "comma-separated q (default 0)");
  pressure->add_option("--b", opt.b, "geometric exponent")->required();
  pressure->add_option("--alpha", opt.alpha, "comma-separated alpha (default 0)");
  pressure->add_option("--tol", opt.tol, "tail tolerance for --auto-L");
  pressure->add_flag("--auto-L", opt.auto_L, "double L until |P_2L - P_L| < tol");
  pressure->add_option("--L-max", opt.L_max, "largest L tried by --auto-L");
  CLI::App* spectrum = app.add_subcommand("spectrum", "solve for (q(alpha), b(alpha))");
  common(spectrum);
  spectrum->add_option("--alpha", opt.alpha, "comma-separated alpha");
  spectrum->add_option("--alpha-grid", opt.alpha_grid, "start:stop:step[xstart:stop:step...]");
  spectrum->add_option("--tol", opt.tol, "accepted for symmetry with dim");
  spectrum->add_option("--newton-tol", opt.newton_tol, "Newton residual tolerance");
  CLI::App* distortion = app.add_subcommand("distortion", "fit the parabolic derivative growth");
  common(distortion);
  distortion->add_option("--cusp", opt.cusp, "1-based cusp index (default all)");
  distortion->add_option("--l-range", opt.l_range, "l_min:l_max");
  CLI::App* oracle = app.add_subcommand("oracle", "grid scan for b(alpha)");
  common(oracle);
  oracle->add_option("--alpha", opt.alpha, "comma-separated alpha")->required();
  oracle->add_option("--q-grid", opt.q_grid, "per-axis start:stop:step joined by x");
  oracle->add_option("--b-grid", opt.b_grid, "start:stop:step");

  std::vector<std::string> storage = {"cuspwind"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (validate->parsed()) return CmdValidate(opt, out);
    if (dim->parsed()) return CmdDim(opt, out, err);
    if (pressure->parsed()) return CmdPressure(opt, out, err);
    if (spectrum->parsed()) return CmdSpectrum(opt, out, err);
    if (distortion->parsed()) return CmdDistortion(opt, out);
    if (oracle->parsed()) return CmdOracle(opt, out);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const GeometryError& e) {
    err << "geometry error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  err << "usage error: no command\n";
  return kUsageError;
}

}  // namespace cuspwind::cli
