// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cuspwind/coding.h"
#include "cuspwind/pressure.h"
#include "cuspwind/schottky.h"
#include "cuspwind/spectrum.h"

namespace cuspwind {
namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string Fmt(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Shared L = 400 state for the one-cusp spectrum criteria.
struct OneCusp400 {
  SpectrumSolver solver{Preset("one_cusp"), 400, SolverOptions{}, 0};
  double s = solver.dimension().s;
};

OneCusp400& Shared400() {
  static OneCusp400 state;
  return state;
}

Outcome BowenRootStability() {
  const auto t0 = std::chrono::steady_clock::now();
  const GroupPresentation p = Preset("one_cusp");
  const DimResult d50 = HausdorffDim(p, 50, 1e-12);
  const DimResult d200 = HausdorffDim(p, 200, 1e-12);
  const double elapsed = Seconds(t0);
  const double drift = std::abs(d50.s - d200.s);
  const bool ok = drift < 1e-3 && d200.s > 0.5 && d200.s < 1.0 && d50.s > 0.5 && d50.s < 1.0 &&
                  d50.residual < 1e-8 && d200.residual < 1e-8 && elapsed < 60.0;
  return {ok, Fmt("s(50)=%.10f s(200)=%.10f |diff|=%.3e (need < 1e-3) residuals %.1e/%.1e, %.1f s",
                  d50.s, d200.s, drift, d50.residual, d200.residual, elapsed)};
}

Outcome DistortionLaw() {
  bool ok = true;
  double worst = 0.0;
  for (const char* name : {"one_cusp", "two_cusp"}) {
    const GroupPresentation p = Preset(name);
    for (int i = 0; i < p.m(); ++i) {
      for (int sign : {+1, -1}) {
        const DistortionFit fit = DistortionExponent(p, i, 20, 200, sign);
        worst = std::max(worst, std::abs(fit.slope - 2.0));
        ok = ok && std::abs(fit.slope - 2.0) <= 0.05 && std::isfinite(fit.intercept);
      }
    }
  }
  return {ok, Fmt("max |slope - 2| = %.4f over all cusps and signs (need <= 0.05)", worst)};
}

Outcome FinitenessRegion() {
  const GroupPresentation p = Preset("one_cusp");
  struct Case {
    double q, b;
    bool finite;
  };
  bool ok = true;
  std::string detail;
  for (const Case& c : {Case{1.0, 0.0, true}, Case{0.0, 0.6, true}, Case{0.0, 0.45, false},
                        Case{-0.1, 1.0, false}}) {
    const FinitenessReport r = FinitenessCheck(p, {{c.q}, c.b, {0.0}});
    const bool good = r.trend_finite == c.finite && r.closed_form_finite == c.finite;
    ok = ok && good;
    detail += Fmt("(q=%g,b=%g) %s ratio=%.4f; ", c.q, c.b, r.trend_finite ? "finite" : "divergent",
                  r.increment_ratio);
  }
  return {ok, detail};
}

Outcome SolverConsistency() {
  OneCusp400& st = Shared400();
  bool ok = true;
  double worst_res = 0.0, worst_int = 0.0, worst_excess = -1.0, worst_vp = 0.0, min_q = 1e300;
  for (double a : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const SpectrumPoint pt = st.solver.Solve({a});
    if (!pt.converged) return {false, Fmt("alpha=%g did not converge: %s", a, pt.error.c_str())};
    const double res = std::max(std::abs(pt.residual_p), pt.residual_grad_max());
    const double dint = std::abs(pt.a_integrals[0] - a);
    const double vp = std::abs(pt.b * pt.lyapunov - pt.entropy);
    worst_res = std::max(worst_res, res);
    worst_int = std::max(worst_int, dint);
    worst_excess = std::max(worst_excess, pt.b - st.s);
    worst_vp = std::max(worst_vp, vp);
    min_q = std::min(min_q, pt.q[0]);
    ok = ok && res < 1e-8 && dint <= 1e-6 && pt.b <= st.s + 1e-6 &&
         vp <= 1e-6 + pt.distortion_bound && pt.q[0] > 0.0;
  }
  return {ok, Fmt("L=400: max residual %.1e, max |int a - alpha| %.1e, max b - s %.4f, "
                  "max |b lambda - h| %.1e, min q %.5f",
                  worst_res, worst_int, worst_excess, worst_vp, min_q)};
}

Outcome OracleEquivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const int L = 100;
  const double step = 0.05;
  std::vector<double> b_grid;
  for (int k = 1; k <= 19; ++k) b_grid.push_back(step * k);
  bool ok = true;
  std::string detail;
  struct Case {
    const char* preset;
    std::vector<double> alpha;
  };
  for (const Case& c : {Case{"one_cusp", {2.0}}, Case{"two_cusp", {1.0, 2.0}}}) {
    SpectrumSolver solver(Preset(c.preset), L, SolverOptions{}, 0);
    const SpectrumPoint pt = solver.Solve(c.alpha);
    const int m = static_cast<int>(c.alpha.size());
    std::vector<std::vector<double>> q_grid = {{}};
    for (int i = 0; i < m; ++i) {
      std::vector<std::vector<double>> next;
      for (const auto& prefix : q_grid) {
        for (int k = 0; k <= 20; ++k) {
          next.push_back(prefix);
          next.back().push_back(step * k);
        }
      }
      q_grid = std::move(next);
    }
    const OracleResult r = BruteForceOracle(solver.table(), c.alpha, q_grid, b_grid);
    bool good = pt.converged && r.b_low <= pt.b && pt.b <= r.b_high;
    for (int i = 0; i < m; ++i) good = good && std::abs(r.q_star[i] - pt.q[i]) <= step + 1e-12;
    ok = ok && good;
    detail += Fmt("%s b=%.4f in [%.2f, %.2f], q=(", c.preset, pt.b, r.b_low, r.b_high);
    for (int i = 0; i < m; ++i) detail += Fmt("%s%.4f", i ? "," : "", pt.q[i]);
    detail += ") vs q*=(";
    for (int i = 0; i < m; ++i) detail += Fmt("%s%.2f", i ? "," : "", r.q_star[i]);
    detail += "); ";
  }
  const double elapsed = Seconds(t0);
  ok = ok && elapsed < 600.0;
  return {ok, detail + Fmt("L=%d, %.1f s", L, elapsed)};
}

Outcome MonotonicityAndLimit() {
  OneCusp400& st = Shared400();
  std::vector<std::vector<double>> alphas;
  for (int k = 1; k <= 16; ++k) alphas.push_back({0.5 * k});
  const auto grid = st.solver.Grid(alphas);
  bool ok = true;
  double min_step = 1e300;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    ok = ok && grid[k].converged;
    if (k > 0) min_step = std::min(min_step, grid[k].b - grid[k - 1].b);
  }
  ok = ok && min_step > 0.0;
  const SpectrumPoint far = st.solver.Solve({100.0}, grid.back());
  const double gap = std::abs(far.b - st.s);
  ok = ok && far.converged && gap <= 0.05;
  return {ok, Fmt("min b increment %.3e on 0.5..8; b(100)=%.6f s=%.6f |diff|=%.4f (need <= 0.05)%s",
                  min_step, far.b, st.s, gap, far.saturated ? " [q(100) <= 0 at L=400]" : "")};
}

Outcome ConvexityAndRuelle() {
  const TransferTable table(BuildAlphabet(Preset("two_cusp"), 50));
  PressureEvaluator ev(table);
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> uq(0.05, 2.0), ub(0.55, 0.95);
  const std::vector<double> alpha = {1.0, 2.0};
  bool ok = true;
  double worst_d2 = 1e300, worst_q = 0.0, worst_b = 0.0;
  const double h = 1e-5;
  for (int seg = 0; seg < 3; ++seg) {
    const std::vector<double> q0 = {uq(rng), uq(rng)}, q1 = {uq(rng), uq(rng)};
    const double b = ub(rng);
    std::vector<double> vals;
    for (int k = 0; k < 5; ++k) {
      const double t = k / 4.0;
      vals.push_back(ev.Pressure({{(1 - t) * q0[0] + t * q1[0], (1 - t) * q0[1] + t * q1[1]}, b,
                                  alpha})
                         .value);
    }
    for (int k = 1; k < 4; ++k) {
      const double d2 = vals[k - 1] - 2 * vals[k] + vals[k + 1];
      worst_d2 = std::min(worst_d2, d2);
      ok = ok && d2 >= -1e-9;
    }
    const PotentialParams mid{{0.5 * (q0[0] + q1[0]), 0.5 * (q0[1] + q1[1])}, b, alpha};
    const GibbsStats g = ev.Gibbs(mid);
    const double tol = std::max(1e-4, g.distortion_bound);
    for (int i = 0; i < 2; ++i) {
      PotentialParams up = mid, dn = mid;
      up.q[i] += h;
      dn.q[i] -= h;
      const double fd = (ev.Pressure(up).value - ev.Pressure(dn).value) / (2 * h);
      const double err = std::abs(fd - (alpha[i] - g.a_integrals[i]));
      worst_q = std::max(worst_q, err);
      ok = ok && err <= tol;
    }
    PotentialParams up = mid, dn = mid;
    up.b += h;
    dn.b -= h;
    const double fd = (ev.Pressure(up).value - ev.Pressure(dn).value) / (2 * h);
    const double err = std::abs(fd + g.lyapunov);
    worst_b = std::max(worst_b, err);
    ok = ok && err <= tol;
  }
  return {ok, Fmt("min second difference %.3e (need >= -1e-9); max q-gradient error %.1e, "
                  "b-derivative error %.1e",
                  worst_d2, worst_q, worst_b)};
}

Outcome SymbolicGeometric() {
  bool ok = true;
  long pairs = 0, mismatches = 0, missing = 0;
  for (const char* name : {"one_cusp", "two_cusp"}) {
    for (int L = 1; L <= 10; ++L) {
      const TruncatedAlphabet al = BuildAlphabet(Preset(name), L);
      for (int a = 0; a < al.size(); ++a) {
        for (int b = 0; b < al.size(); ++b) {
          ++pairs;
          mismatches += AdmissibleGeometric(al, a, b) != Admissible(al.letter(a), al.letter(b));
        }
      }
    }
    const TruncatedAlphabet al5 = BuildAlphabet(Preset(name), 5);
    for (int a = 0; a < al5.size(); ++a) {
      for (int b = 0; b < al5.size(); ++b) missing += FindConnector(al5, a, b) < 0;
    }
  }
  ok = mismatches == 0 && missing == 0;
  return {ok, Fmt("%ld letter pairs, %ld mismatches; %ld pairs without a connector at L=5",
                  pairs, mismatches, missing)};
}

Outcome SmallWordBruteForce() {
  const TransferTable table(BuildAlphabet(Preset("one_cusp"), 3), WeightPolicy::kSupWeights);
  const TruncatedAlphabet& al = table.alphabet();
  const PotentialParams params{{0.5}, 0.6, {1.0}};
  const PressureResult pr = Pressure(table, params);
  const int n = al.size();
  const int N = 6;
  // log of the sup-weight of letter a followed by b.
  auto log_weight = [&](int a, int b) {
    const double c = params.q[0] * (params.alpha[0] - al.winding(a));
    return c - params.b * table.log_derivative(a, b);
  };
  std::vector<double> tail(n, -1e300);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (Admissible(al.letter(a), al.letter(b))) tail[a] = std::max(tail[a], log_weight(a, b));
    }
  }
  double total = 0.0;
  long words = 0;
  std::function<void(int, int, double)> walk = [&](int depth, int last, double acc) {
    if (depth == N) {
      total += std::exp(acc + tail[last]);
      ++words;
      return;
    }
    for (int b = 0; b < n; ++b) {
      if (Admissible(al.letter(last), al.letter(b))) walk(depth + 1, b, acc + log_weight(last, b));
    }
  };
  for (int a = 0; a < n; ++a) walk(1, a, 0.0);
  const double direct = std::log(total) / N;
  const double diff = std::abs(direct - pr.value);
  return {diff <= pr.distortion_bound,
          Fmt("%ld words: (1/N) log sum = %.6f, log rho = %.6f, |diff| %.4f (bound %.4f)", words,
              direct, pr.value, diff, pr.distortion_bound)};
}

Outcome MaximalMeasureDivergence() {
  const GroupPresentation p = Preset("one_cusp");
  const double s = Shared400().s;
  const std::vector<int> Ls = {50, 100, 200, 400};
  std::vector<double> integrals, sums;
  for (int L : Ls) {
    const TransferTable table(BuildAlphabet(p, L), WeightPolicy::kRepresentative, 0);
    integrals.push_back(ComputeGibbsStats(table, {{0.0}, s, {0.0}}).a_integrals[0]);
    double sum = 0.0;
    for (int l = 1; l <= L; ++l) sum += std::pow(l, 1.0 - 2.0 * s);
    sums.push_back(sum);
  }
  bool ok = true;
  std::vector<double> ratios;
  for (std::size_t k = 1; k < Ls.size(); ++k) {
    ok = ok && integrals[k] > integrals[k - 1];
    ratios.push_back((integrals[k] - integrals[k - 1]) / (sums[k] - sums[k - 1]));
  }
  double mean = 0.0;
  for (double r : ratios) mean += r / ratios.size();
  double worst = 0.0;
  for (double r : ratios) worst = std::max(worst, std::abs(r / mean - 1.0));
  ok = ok && worst <= 0.2;
  return {ok, Fmt("int a = %.4f, %.4f, %.4f, %.4f at L = 50..400; increment ratios vs "
                  "sum l^(1-2s) deviate by %.1f%% (need <= 20%%)",
                  integrals[0], integrals[1], integrals[2], integrals[3], 100 * worst)};
}

}  // namespace
}  // namespace cuspwind

int main() {
  using namespace cuspwind;
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"Bowen root stability", BowenRootStability},
      {"distortion law", DistortionLaw},
      {"finiteness region", FinitenessRegion},
      {"spectrum solver consistency", SolverConsistency},
      {"oracle equivalence", OracleEquivalence},
      {"monotonicity and limit", MonotonicityAndLimit},
      {"convexity and Ruelle formula", ConvexityAndRuelle},
      {"symbolic/geometric agreement", SymbolicGeometric},
      {"small-word brute force", SmallWordBruteForce},
      {"maximal-measure divergence", MaximalMeasureDivergence},
  };
  int failures = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.passed;
    std::printf("%s %2d %s: %s\n", o.passed ? "PASS" : "FAIL", index, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - failures, index);
  return failures;
}
