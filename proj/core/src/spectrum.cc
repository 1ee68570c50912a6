#include "cuspwind/spectrum.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

namespace cuspwind {

namespace {

constexpr int kPolishSteps = 8;
constexpr int kOrbitIterations = 20;
constexpr double kOrbitTolerance = 1e-13;
constexpr double kContinuationStep = 0.25;
constexpr double kContinuationMinStep = 1e-3;
constexpr double kContinuationTol = 1e-8;

std::string Format(const char* fmt, double x) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), fmt, x);
  return buf;
}

double MaxAbs(const std::vector<double>& v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

// Solves j x = rhs in place by Gaussian elimination with partial pivoting.
// Returns false for a (numerically) singular system.
bool SolveLinear(std::vector<std::vector<double>> j, std::vector<double>& rhs) {
  const int n = static_cast<int>(rhs.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(j[r][col]) > std::abs(j[pivot][col])) pivot = r;
    }
    if (!(std::abs(j[pivot][col]) > 0.0) || !std::isfinite(j[pivot][col])) return false;
    std::swap(j[col], j[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (int r = col + 1; r < n; ++r) {
      const double f = j[r][col] / j[col][col];
      for (int c = col; c < n; ++c) j[r][c] -= f * j[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double acc = rhs[r];
    for (int c = r + 1; c < n; ++c) acc -= j[r][c] * rhs[c];
    rhs[r] = acc / j[r][r];
  }
  return true;
}

// x = (q_1..q_m, b). Returns (P, alpha - int a) and optionally the stats.
std::vector<double> Residual(PressureEvaluator& ev, const std::vector<double>& alpha,
                             const std::vector<double>& x, GibbsStats* stats = nullptr) {
  const int m = static_cast<int>(alpha.size());
  PotentialParams params{std::vector<double>(x.begin(), x.begin() + m), x[m], alpha};
  GibbsStats g = ev.Gibbs(params);
  std::vector<double> f(m + 1);
  f[0] = g.pressure;
  for (int i = 0; i < m; ++i) f[i + 1] = alpha[i] - g.a_integrals[i];
  if (stats != nullptr) *stats = std::move(g);
  return f;
}

// b in (0, 1) while every q_i > 0 (the pressure is finite for all b >= 0
// there); b in (1/2, 1) as soon as some q_i <= 0.
bool Feasible(const std::vector<double>& x, bool constrain_q) {
  bool positive = true;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) positive = positive && x[i] > 0.0;
  if (constrain_q && !positive) return false;
  const double b = x.back();
  const double floor = positive ? 0.0 : 0.5;
  return b > floor && b < 1.0;
}

}  // namespace

DimResult HausdorffDim(const TransferTable& table, double tol) {
  PressureEvaluator ev(table);
  const int m = table.alphabet().m();
  auto pressure = [&](double b) {
    return ev.Pressure(PotentialParams::Geometric(m, b)).value;
  };
  DimResult r;
  r.L = table.alphabet().L();
  double lo = kDimBracketLow;
  double hi = kDimBracketHigh;
  const double p_lo = pressure(lo);
  if (p_lo < 0.0) {
    throw NumericalError("no sign change on [" + Format("%.3f", lo) + ", " +
                         Format("%.3f", hi) + "]: P(" + Format("%.3f", lo) +
                         ") = " + Format("%.6g", p_lo) + " < 0");
  }
  double p_hi = pressure(hi);
  if (p_hi > 0.0) {
    r.warnings.push_back("P(" + Format("%.3f", hi) + ") = " + Format("%.6g", p_hi) +
                         " > 0; bracket widened to " + Format("%.1f", kDimBracketWide));
    hi = kDimBracketWide;
    p_hi = pressure(hi);
    if (p_hi > 0.0) {
      throw NumericalError("no sign change on [" + Format("%.3f", lo) + ", " +
                           Format("%.1f", hi) + "]: P stays positive");
    }
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (pressure(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double s = 0.5 * (lo + hi);
  // dP/db = -lyapunov, so one Newton step is s + P / lyapunov.
  double residual = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kPolishSteps; ++k) {
    const GibbsStats g = ev.Gibbs(PotentialParams::Geometric(m, s));
    if (std::abs(g.pressure) >= residual) break;
    residual = std::abs(g.pressure);
    r.s = s;
    if (residual == 0.0) break;
    s += g.pressure / g.lyapunov;
  }
  r.low = lo;
  r.high = hi;
  r.residual = residual;
  return r;
}

DimResult HausdorffDim(const GroupPresentation& presentation, int L, double tol,
                       WeightPolicy policy) {
  const TransferTable table(TruncatedAlphabet(presentation, L), policy);
  return HausdorffDim(table, tol);
}

double SpectrumPoint::residual_grad_max() const { return MaxAbs(residual_grad); }

SpectrumSolver::SpectrumSolver(const GroupPresentation& presentation, int L,
                               SolverOptions options, int threads)
    : table_(std::make_unique<TransferTable>(TruncatedAlphabet(presentation, L),
                                             WeightPolicy::kRepresentative, threads)),
      options_(options) {}

const DimResult& SpectrumSolver::dimension() {
  if (!dim_) dim_ = HausdorffDim(*table_, options_.dim_tol);
  return *dim_;
}

bool SpectrumSolver::Newton(PressureEvaluator& ev, const std::vector<double>& alpha,
                            std::vector<double>& x, bool constrain_q, double tol,
                            int& iterations, std::string& error) {
  const int dim = static_cast<int>(x.size());
  std::vector<double> f = Residual(ev, alpha, x);
  for (int it = 0; it <= options_.max_iterations; ++it) {
    iterations = it;
    const double norm = MaxAbs(f);
    if (norm < tol) return true;
    if (it == options_.max_iterations) break;

    std::vector<std::vector<double>> jac(dim, std::vector<double>(dim));
    for (int k = 0; k < dim; ++k) {
      std::vector<double> xp = x;
      xp[k] += options_.jacobian_step;
      const std::vector<double> fp = Residual(ev, alpha, xp);
      for (int r = 0; r < dim; ++r) jac[r][k] = (fp[r] - f[r]) / options_.jacobian_step;
    }
    std::vector<double> dx(dim);
    for (int r = 0; r < dim; ++r) dx[r] = -f[r];
    if (!SolveLinear(jac, dx)) {
      error = "singular Jacobian at iteration " + std::to_string(it);
      return false;
    }

    double step = 1.0;
    bool accepted = false;
    while (step >= 1e-10) {
      std::vector<double> xn(dim);
      for (int k = 0; k < dim; ++k) xn[k] = x[k] + step * dx[k];
      if (Feasible(xn, constrain_q)) {
        x = std::move(xn);
        f = Residual(ev, alpha, x);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      error = "line search stalled at iteration " + std::to_string(it) +
              " (residual " + Format("%.3g", norm) + ")";
      return false;
    }
  }
  error = "Newton did not converge in " + std::to_string(options_.max_iterations) +
          " iterations (residual " + Format("%.3g", MaxAbs(f)) + ")";
  return false;
}

bool SpectrumSolver::Continuation(PressureEvaluator& ev, const std::vector<double>& alpha,
                                  std::vector<double>& x, int& iterations,
                                  std::string& error) {
  // (q = 0, b = s) solves the system exactly for alpha = int a d(mu_max).
  const int m = static_cast<int>(alpha.size());
  x.assign(m + 1, 0.0);
  x[m] = dimension().s;
  const GibbsStats g = ev.Gibbs(PotentialParams{std::vector<double>(m, 0.0), x[m],
                                                std::vector<double>(m, 0.0)});
  std::vector<double> log_start(m), log_end(m);
  for (int i = 0; i < m; ++i) {
    if (!(g.a_integrals[i] > 0.0)) {
      error = "continuation anchor has zero winding mean";
      return false;
    }
    log_start[i] = std::log(g.a_integrals[i]);
    log_end[i] = std::log(alpha[i]);
  }
  double t = 0.0;
  double dt = kContinuationStep;
  std::vector<double> target(m);
  while (t < 1.0) {
    const double tn = std::min(1.0, t + dt);
    for (int i = 0; i < m; ++i) {
      target[i] = std::exp((1.0 - tn) * log_start[i] + tn * log_end[i]);
    }
    if (tn == 1.0) target = alpha;
    std::vector<double> xt = x;
    int its = 0;
    std::string step_error;
    const double tol = tn == 1.0 ? options_.tol : std::max(options_.tol, kContinuationTol);
    if (Newton(ev, target, xt, false, tol, its, step_error)) {
      x = std::move(xt);
      t = tn;
      dt *= 2.0;
    } else {
      dt *= 0.5;
      if (dt < kContinuationMinStep) {
        error = "continuation stalled at t = " + Format("%.4g", t) + ": " + step_error;
        iterations += its;
        return false;
      }
    }
    iterations += its;
  }
  return true;
}

SpectrumPoint SpectrumSolver::SolveWith(PressureEvaluator& ev,
                                        const std::vector<double>& alpha,
                                        const std::vector<double>& q0, double b0) {
  const int m = static_cast<int>(alpha.size());
  SpectrumPoint pt;
  pt.alpha = alpha;
  pt.L = table_->alphabet().L();

  std::vector<double> x(q0);
  x.push_back(b0);
  int iterations = 0;
  std::string error;
  bool ok = false;
  try {
    ok = Newton(ev, alpha, x, Feasible(x, true), options_.tol, iterations, error);
    if (!ok) {
      int more = 0;
      std::string second;
      ok = Continuation(ev, alpha, x, more, second);
      iterations += more;
      if (!ok) error += "; continuation: " + second;
    }
    if (ok && !options_.allow_saturation) {
      for (int i = 0; i < m; ++i) {
        if (!(x[i] > 0.0)) {
          ok = false;
          error = "solution requires q_" + std::to_string(i + 1) + " <= 0";
        }
      }
    }
  } catch (const NumericalError& e) {
    error = e.what();
    ok = false;
  }

  pt.q.assign(x.begin(), x.begin() + m);
  pt.b = x[m];
  pt.newton_iterations = iterations;
  pt.converged = ok;
  if (!ok) {
    pt.error = error;
    return pt;
  }
  GibbsStats g;
  const std::vector<double> f = Residual(ev, alpha, x, &g);
  pt.residual_p = f[0];
  pt.residual_grad.assign(f.begin() + 1, f.end());
  pt.a_integrals = g.a_integrals;
  pt.lyapunov = g.lyapunov;
  pt.entropy = g.entropy;
  pt.distortion_bound = g.distortion_bound;
  for (double qi : pt.q) pt.saturated = pt.saturated || !(qi > 0.0);
  return pt;
}

SpectrumPoint SpectrumSolver::Solve(const std::vector<double>& alpha,
                                    const std::optional<SpectrumPoint>& warm) {
  const int m = table_->alphabet().m();
  if (static_cast<int>(alpha.size()) != m) {
    throw std::invalid_argument("alpha must have length m = " + std::to_string(m));
  }
  for (double a : alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("alpha must lie in the open positive orthant");
    }
  }
  const double s = dimension().s;
  PressureEvaluator ev(*table_);
  if (warm && warm->converged && static_cast<int>(warm->q.size()) == m) {
    return SolveWith(ev, alpha, warm->q, warm->b);
  }
  return SolveWith(ev, alpha, std::vector<double>(m, 1.0), s);
}

std::vector<SpectrumPoint> SpectrumSolver::Grid(
    const std::vector<std::vector<double>>& alphas, int threads) {
  const int count = static_cast<int>(alphas.size());
  std::vector<SpectrumPoint> out(count);
  if (count == 0) return out;
  const int m = table_->alphabet().m();
  const double s = dimension().s;
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);

  auto block = [&](int t) {
    const int begin = static_cast<int>(static_cast<long>(count) * t / threads);
    const int end = static_cast<int>(static_cast<long>(count) * (t + 1) / threads);
    PressureEvaluator ev(*table_);
    std::vector<double> q(m, 1.0);
    double b = s;
    for (int i = begin; i < end; ++i) {
      const std::vector<double>& alpha = alphas[i];
      bool valid = static_cast<int>(alpha.size()) == m;
      for (double a : alpha) valid = valid && a > 0.0 && std::isfinite(a);
      if (!valid) {
        out[i].alpha = alpha;
        out[i].L = table_->alphabet().L();
        out[i].error = "alpha must have length m with positive entries";
        continue;
      }
      out[i] = SolveWith(ev, alpha, q, b);
      if (out[i].converged) {
        q = out[i].q;
        b = out[i].b;
      }
    }
  };
  if (threads == 1) {
    block(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(block, t);
    for (auto& th : pool) th.join();
  }
  return out;
}

SpectrumPoint SolveSpectrumPoint(const GroupPresentation& presentation,
                                 const std::vector<double>& alpha, int L, double tol) {
  SolverOptions options;
  options.tol = tol;
  SpectrumSolver solver(presentation, L, options);
  return solver.Solve(alpha);
}

std::vector<SpectrumPoint> SpectrumGrid(const GroupPresentation& presentation,
                                        const std::vector<std::vector<double>>& alphas,
                                        int L, double tol, int threads) {
  SolverOptions options;
  options.tol = tol;
  SpectrumSolver solver(presentation, L, options, threads);
  return solver.Grid(alphas, threads);
}

OracleResult BruteForceOracle(const TransferTable& table,
                              const std::vector<double>& alpha,
                              const std::vector<std::vector<double>>& q_grid,
                              const std::vector<double>& b_grid) {
  if (q_grid.empty() || b_grid.size() < 2) {
    throw std::invalid_argument("oracle grids must be non-empty (b_grid needs >= 2 values)");
  }
  if (!std::is_sorted(b_grid.begin(), b_grid.end())) {
    throw std::invalid_argument("oracle b_grid must be increasing");
  }
  PressureEvaluator ev(table);
  OracleResult r;
  r.b_values = b_grid;
  std::vector<std::vector<double>> argmins;
  for (double b : b_grid) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> arg;
    for (const auto& q : q_grid) {
      PotentialParams params{q, b, alpha};
      if (!InFiniteRegion(params)) continue;
      const double p = ev.Pressure(params).value;
      if (p < best) {
        best = p;
        arg = q;
      }
    }
    r.min_pressure.push_back(best);
    argmins.push_back(arg);
  }
  for (std::size_t k = 1; k < b_grid.size(); ++k) {
    const double p0 = r.min_pressure[k - 1];
    const double p1 = r.min_pressure[k];
    if (p0 >= 0.0 && p1 < 0.0 && std::isfinite(p0)) {
      r.b_low = b_grid[k - 1];
      r.b_high = b_grid[k];
      r.b_star = r.b_low + (r.b_high - r.b_low) * p0 / (p0 - p1);
      r.q_star = argmins[k - 1];
      return r;
    }
  }
  throw NumericalError("oracle: min_q P does not change sign over the b grid");
}

DistortionFit DistortionExponent(const GroupPresentation& presentation,
                                 int cusp_index, int l_min, int l_max, int sign) {
  if (l_min < 10 || l_max > 1000 || l_min >= l_max) {
    throw std::invalid_argument("distortion l_range must satisfy 10 <= l_min < l_max <= 1000");
  }
  if (cusp_index < 0 || cusp_index >= presentation.m()) {
    throw std::invalid_argument("cusp index out of range");
  }
  const DiscIsometry& base = presentation.parabolics()[cusp_index];
  const DiscIsometry gamma = sign < 0 ? Inverse(base) : base;
  std::vector<DiscIsometry> terminals;
  for (const auto& h : presentation.hyperbolics()) {
    terminals.push_back(h);
    terminals.push_back(Inverse(h));
  }
  DistortionFit fit;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int l = l_min; l <= l_max; ++l) {
    const DiscIsometry gl = Power(gamma, l);
    double y = -std::numeric_limits<double>::infinity();
    for (const auto& h : terminals) {
      y = std::max(y, LogDerivativeRange(gl, ParLetterArc(gamma, l, h)).second);
    }
    const double x = std::log(static_cast<double>(l));
    fit.powers.push_back(l);
    fit.log_sup.push_back(y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(fit.powers.size());
  fit.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / k;
  return fit;
}

OrbitStats PeriodicOrbitStats(const TruncatedAlphabet& alphabet, const Word& cycle) {
  if (cycle.empty()) throw std::invalid_argument("PeriodicOrbitStats: empty cycle");
  const int k = static_cast<int>(cycle.size());
  for (int j = 0; j < k; ++j) {
    if (!alphabet.Admissible(cycle[j], cycle[(j + 1) % k])) {
      throw std::invalid_argument("PeriodicOrbitStats: inadmissible junction at position " +
                                  std::to_string(j) + (j + 1 == k ? " (wrap)" : ""));
    }
  }
  DiscIsometry composed = alphabet.branch(cycle[0]);
  for (int j = 1; j < k; ++j) composed = Compose(alphabet.branch(cycle[j]), composed);
  const DiscIsometry contraction = Inverse(composed);

  OrbitStats out;
  double x = alphabet.arc(cycle[0]).mid();
  for (int it = 1; it <= kOrbitIterations; ++it) {
    const double next = contraction.ApplyBoundary(x);
    double delta = std::abs(next - x);
    delta = std::min(delta, kTwoPi - delta);
    x = next;
    out.iterations = it;
    if (delta < kOrbitTolerance) break;
  }
  out.periodic_point = x;
  out.a_avg.assign(alphabet.m(), 0.0);
  double lyap = 0.0;
  for (int j = 0; j < k; ++j) {
    const int a = cycle[j];
    lyap += alphabet.branch(a).LogBoundaryDerivative(x);
    if (alphabet.cusp_of(a) >= 0) out.a_avg[alphabet.cusp_of(a)] += alphabet.winding(a);
    x = alphabet.branch(a).ApplyBoundary(x);
  }
  for (double& v : out.a_avg) v /= k;
  out.lyapunov_avg = lyap / k;
  return out;
}

}  // namespace cuspwind
