#include "cuspwind/pressure.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

namespace cuspwind {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(x) + exp(y)) without overflow.
double LogAddExp(double x, double y) {
  if (x == kNegInf) return y;
  if (y == kNegInf) return x;
  const double hi = std::max(x, y);
  return hi + std::log1p(std::exp(std::min(x, y) - hi));
}

double LetterShift(const TruncatedAlphabet& alphabet, int a,
                   const PotentialParams& params) {
  double c = 0.0;
  const int cusp = alphabet.cusp_of(a);
  for (std::size_t i = 0; i < params.q.size(); ++i) {
    const double wind = static_cast<int>(i) == cusp ? alphabet.winding(a) : 0.0;
    c += params.q[i] * (params.alpha[i] - wind);
  }
  return c;
}

std::string Format(const char* fmt, double x) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), fmt, x);
  return buf;
}

// Power iteration on M = diag(row_scale) * e. Both eigenvectors are
// normalized to unit sum.
PerronData PowerIterate(const DenseMatrix& e, const std::vector<double>& row_scale,
                        const SpectralOptions& options) {
  const int n = e.n;
  PerronData out;
  out.right.assign(n, 1.0 / n);
  out.left.assign(n, 1.0 / n);
  std::vector<double> w(n);
  std::vector<double> z(n);
  double prev_r = 0.0;
  double prev_l = 0.0;
  double change = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_iterations; ++it) {
    std::fill(z.begin(), z.end(), 0.0);
    double rho_r = 0.0;
    for (int a = 0; a < n; ++a) {
      const double* row = &e.data[static_cast<std::size_t>(a) * n];
      double acc = 0.0;
      for (int b = 0; b < n; ++b) acc += row[b] * out.right[b];
      w[a] = row_scale[a] * acc;
      rho_r += w[a];
      const double ua = out.left[a] * row_scale[a];
      if (ua != 0.0) {
        for (int b = 0; b < n; ++b) z[b] += ua * row[b];
      }
    }
    double rho_l = 0.0;
    for (int b = 0; b < n; ++b) rho_l += z[b];
    if (!(rho_r > 0.0) || !(rho_l > 0.0) || !std::isfinite(rho_r) ||
        !std::isfinite(rho_l)) {
      throw NumericalError("power iteration: spectral radius estimate is " +
                           Format("%.6g", rho_r) + " at iteration " +
                           std::to_string(it));
    }
    for (int a = 0; a < n; ++a) {
      out.right[a] = w[a] / rho_r;
      out.left[a] = z[a] / rho_l;
    }
    change = std::max(std::abs(rho_r - prev_r) / rho_r,
                      std::abs(rho_l - prev_l) / rho_l);
    prev_r = rho_r;
    prev_l = rho_l;
    if (it >= 3 && change <= options.tolerance) {
      out.rho = rho_r;
      out.iterations = it;
      return out;
    }
  }
  throw NumericalError("power iteration did not converge after " +
                       std::to_string(options.max_iterations) +
                       " iterations (last relative change " +
                       Format("%.3g", change) + ")");
}

}  // namespace

PotentialParams PotentialParams::Geometric(int m, double b) {
  return {std::vector<double>(m, 0.0), b, std::vector<double>(m, 0.0)};
}

void PotentialParams::Check(int m) const {
  if (static_cast<int>(q.size()) != m || static_cast<int>(alpha.size()) != m) {
    throw std::invalid_argument("potential parameters must have length m = " +
                                std::to_string(m));
  }
  bool finite = std::isfinite(b);
  for (double x : q) finite = finite && std::isfinite(x);
  for (double x : alpha) finite = finite && std::isfinite(x);
  if (!finite) throw std::invalid_argument("potential parameters must be finite");
}

bool InFiniteRegion(const PotentialParams& params) {
  bool all_positive = true;
  bool all_nonnegative = true;
  for (double x : params.q) {
    all_positive = all_positive && x > 0.0;
    all_nonnegative = all_nonnegative && x >= 0.0;
  }
  if (all_positive) return params.b >= 0.0;
  return all_nonnegative && params.b > 0.5;
}

FinitenessReport FinitenessCheck(const GroupPresentation& presentation,
                                 const PotentialParams& params) {
  params.Check(presentation.m());
  FinitenessReport report;
  report.closed_form_finite = InFiniteRegion(params);
  report.truncations = {100, 1000, 10000};

  const TruncatedAlphabet alphabet(presentation, report.truncations.back());
  // Log of the letter sums restricted to powers in (L_{k-1}, L_k].
  std::vector<double> block(report.truncations.size(), kNegInf);
  for (int a = 0; a < alphabet.size(); ++a) {
    const auto [lo, hi] = LogDerivativeRange(alphabet.branch(a), alphabet.arc(a));
    const double sup_phi =
        LetterShift(alphabet, a, params) + std::max(-params.b * lo, -params.b * hi);
    const int power = alphabet.letter(a).power;
    std::size_t k = 0;
    while (power > report.truncations[k]) ++k;
    block[k] = LogAddExp(block[k], sup_phi);
  }
  double running = kNegInf;
  for (double x : block) {
    running = LogAddExp(running, x);
    report.log_letter_sums.push_back(running);
  }
  report.increment_ratio = std::exp(block[2] - block[1]);
  bool finite_sums = true;
  for (double x : report.log_letter_sums) finite_sums = finite_sums && std::isfinite(x);
  if (block[1] == kNegInf && block[2] == kNegInf) report.increment_ratio = 0.0;
  report.trend_finite = finite_sums && report.increment_ratio <= kDivergenceRatio;
  return report;
}

TransferTable::TransferTable(TruncatedAlphabet alphabet, WeightPolicy policy,
                             int threads)
    : alphabet_(std::make_shared<const TruncatedAlphabet>(std::move(alphabet))),
      policy_(policy),
      log_deriv_(alphabet_->size()) {
  const int n = alphabet_->size();
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);
  std::vector<double> max_range(threads, 0.0);
  std::vector<double> min_deriv(threads, std::numeric_limits<double>::infinity());

  auto work = [&](int t) {
    const TruncatedAlphabet& al = *alphabet_;
    for (int a = t; a < n; a += threads) {
      const DiscIsometry& br = al.branch(a);
      const DiscIsometry& inv = al.inverse_branch(a);
      for (int b = 0; b < n; ++b) {
        if (!al.Admissible(a, b)) continue;
        const BoundaryArc arc = inv.ApplyArc(al.arc(b));
        const auto [lo, hi] = LogDerivativeRange(br, arc);
        double value = 0.0;
        switch (policy_) {
          case WeightPolicy::kRepresentative:
            value = br.LogBoundaryDerivative(arc.mid());
            break;
          case WeightPolicy::kSupWeights:
            value = lo;
            break;
          case WeightPolicy::kInfWeights:
            value = hi;
            break;
        }
        log_deriv_(a, b) = value;
        max_range[t] = std::max(max_range[t], hi - lo);
        min_deriv[t] = std::min(min_deriv[t], lo);
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  max_range_ = *std::max_element(max_range.begin(), max_range.end());
  min_log_deriv_ = *std::min_element(min_deriv.begin(), min_deriv.end());
}

DenseMatrix BuildWeightMatrix(const TransferTable& table,
                              const PotentialParams& params, RegionCheck check) {
  const TruncatedAlphabet& al = table.alphabet();
  params.Check(al.m());
  if (check == RegionCheck::kCountable && !InFiniteRegion(params)) {
    throw std::invalid_argument("potential parameters lie outside the finiteness region");
  }
  const int n = al.size();
  DenseMatrix w(n);
  for (int a = 0; a < n; ++a) {
    const double c = LetterShift(al, a, params);
    for (int b = 0; b < n; ++b) {
      if (al.Admissible(a, b)) w(a, b) = std::exp(c - params.b * table.log_derivative(a, b));
    }
  }
  return w;
}

PerronData SpectralRadius(const DenseMatrix& w, const SpectralOptions& options) {
  if (w.n <= 0) throw std::invalid_argument("SpectralRadius: empty matrix");
  return PowerIterate(w, std::vector<double>(w.n, 1.0), options);
}

PressureEvaluator::PressureEvaluator(const TransferTable& table,
                                     SpectralOptions options)
    : table_(table), options_(options) {}

void PressureEvaluator::PrepareExponentials(double b) {
  if (cache_valid_ && b == cached_b_) return;
  const TruncatedAlphabet& al = table_.alphabet();
  const int n = al.size();
  if (exp_.n != n) exp_ = DenseMatrix(n);
  for (int a = 0; a < n; ++a) {
    for (int c = 0; c < n; ++c) {
      exp_(a, c) = al.Admissible(a, c) ? std::exp(-b * table_.log_derivative(a, c)) : 0.0;
    }
  }
  cached_b_ = b;
  cache_valid_ = true;
}

PressureEvaluator::Solved PressureEvaluator::Solve(const PotentialParams& params) {
  const TruncatedAlphabet& al = table_.alphabet();
  params.Check(al.m());
  PrepareExponentials(params.b);
  const int n = al.size();
  Solved s;
  std::vector<double> c(n);
  s.shift = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a) {
    c[a] = LetterShift(al, a, params);
    s.shift = std::max(s.shift, c[a]);
  }
  s.row_scale.resize(n);
  for (int a = 0; a < n; ++a) s.row_scale[a] = std::exp(c[a] - s.shift);
  s.perron = PowerIterate(exp_, s.row_scale, options_);
  return s;
}

PressureResult PressureEvaluator::Pressure(const PotentialParams& params) {
  const Solved s = Solve(params);
  PressureResult r;
  r.value = std::log(s.perron.rho) + s.shift;
  r.distortion_bound = std::abs(params.b) * table_.max_range();
  r.L = table_.alphabet().L();
  r.iterations = s.perron.iterations;
  r.converged = true;
  return r;
}

GibbsStats PressureEvaluator::Gibbs(const PotentialParams& params, bool with_pairs) {
  const Solved s = Solve(params);
  const TruncatedAlphabet& al = table_.alphabet();
  const int n = al.size();
  const int m = al.m();
  const std::vector<double>& u = s.perron.left;
  const std::vector<double>& v = s.perron.right;
  const double rho = s.perron.rho;
  const double log_rho = std::log(rho);

  GibbsStats g;
  g.pressure = log_rho + s.shift;
  g.distortion_bound = std::abs(params.b) * table_.max_range();
  g.iterations = s.perron.iterations;
  g.a_integrals.assign(m, 0.0);
  g.letter_marginal.resize(n);
  if (with_pairs) g.pair_measure = DenseMatrix(n);

  double z = 0.0;
  for (int a = 0; a < n; ++a) z += u[a] * v[a];
  std::vector<double> log_v(n);
  for (int a = 0; a < n; ++a) log_v[a] = v[a] > 0.0 ? std::log(v[a]) : kNegInf;

  double lyapunov = 0.0;
  double entropy = 0.0;
  for (int a = 0; a < n; ++a) {
    const double pa = u[a] * v[a] / z;
    g.letter_marginal[a] = pa;
    const int cusp = al.cusp_of(a);
    if (cusp >= 0) g.a_integrals[cusp] += pa * al.winding(a);
    if (pa == 0.0) continue;
    const double row_weight = u[a] * s.row_scale[a] / (rho * z);
    const double log_row = std::log(s.row_scale[a]) - log_rho - log_v[a];
    const double* row = &exp_.data[static_cast<std::size_t>(a) * n];
    for (int b = 0; b < n; ++b) {
      if (row[b] == 0.0 || v[b] == 0.0) continue;
      const double pair = row_weight * row[b] * v[b];
      if (pair == 0.0) continue;
      const double ld = table_.log_derivative(a, b);
      lyapunov += pair * ld;
      // log of the transition probability W_ab v_b / (rho v_a).
      entropy -= pair * (log_row - params.b * ld + log_v[b]);
      if (with_pairs) g.pair_measure(a, b) = pair;
    }
  }
  g.lyapunov = lyapunov;
  g.entropy = entropy;
  return g;
}

PressureResult Pressure(const TransferTable& table, const PotentialParams& params) {
  params.Check(table.alphabet().m());
  if (!InFiniteRegion(params)) {
    throw std::invalid_argument("potential parameters lie outside the finiteness region");
  }
  PressureEvaluator ev(table);
  return ev.Pressure(params);
}

GibbsStats ComputeGibbsStats(const TransferTable& table,
                             const PotentialParams& params, bool with_pairs) {
  params.Check(table.alphabet().m());
  if (!InFiniteRegion(params)) {
    throw std::invalid_argument("potential parameters lie outside the finiteness region");
  }
  PressureEvaluator ev(table);
  return ev.Gibbs(params, with_pairs);
}

DoublingResult PressureByDoubling(const GroupPresentation& presentation,
                                  const PotentialParams& params, int L0,
                                  double tol, int L_max) {
  if (L0 < 1) throw std::invalid_argument("truncation L must be >= 1");
  DoublingResult out;
  for (int L = L0; L <= L_max; L *= 2) {
    const TransferTable table(TruncatedAlphabet(presentation, L));
    out.result = Pressure(table, params);
    out.truncations.push_back(L);
    out.values.push_back(out.result.value);
    const std::size_t k = out.values.size();
    if (k >= 2 && std::abs(out.values[k - 1] - out.values[k - 2]) < tol) {
      out.converged = true;
      break;
    }
  }
  const double q_min = *std::min_element(params.q.begin(), params.q.end());
  if (q_min > 0.0) {
    double tail = 0.0;
    for (long l = out.truncations.back() + 1; l < 100000000L; ++l) {
      const double term = std::exp(-2.0 * params.b * std::log(static_cast<double>(l)) - q_min * l);
      tail += term;
      if (term <= 1e-18 * tail || term == 0.0) break;
    }
    out.letter_tail = tail;
  } else {
    out.letter_tail = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

PressureResult PressureSubsystem(const TransferTable& table,
                                 const std::vector<int>& subset,
                                 const PotentialParams& params, RegionCheck check) {
  const TruncatedAlphabet& al = table.alphabet();
  params.Check(al.m());
  if (check == RegionCheck::kCountable && !InFiniteRegion(params)) {
    throw std::invalid_argument("potential parameters lie outside the finiteness region");
  }
  std::vector<int> letters = subset;
  std::sort(letters.begin(), letters.end());
  letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
  if (letters.empty()) throw std::invalid_argument("PressureSubsystem: empty subset");
  for (int a : letters) {
    if (a < 0 || a >= al.size()) {
      throw std::invalid_argument("PressureSubsystem: letter index out of range");
    }
  }
  const int k = static_cast<int>(letters.size());

  // Irreducibility: every letter reachable from letters[0] and back.
  auto reaches_all = [&](bool forward) {
    std::vector<char> seen(k, 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int y = 0; y < k; ++y) {
        const bool edge = forward ? al.Admissible(letters[x], letters[y])
                                  : al.Admissible(letters[y], letters[x]);
        if (edge && !seen[y]) {
          seen[y] = 1;
          ++count;
          stack.push_back(y);
        }
      }
    }
    return count == k;
  };
  if (!reaches_all(true) || !reaches_all(false)) {
    throw std::invalid_argument("PressureSubsystem: restricted transition graph is reducible");
  }

  PressureResult r;
  // A connector c fails only if it is Hyp(inverse of a's terminal) or its
  // terminal is inverse to a Hyp target b; count those per pair.
  const int n2 = 2 * al.n();
  std::vector<int> hyp_with_terminal(n2, 0);
  std::vector<int> with_terminal(n2, 0);
  for (int a : letters) {
    const Letter& l = al.letter(a);
    ++with_terminal[l.terminal];
    if (!l.is_par()) ++hyp_with_terminal[l.terminal];
  }
  int missing = 0;
  for (int a : letters) {
    for (int b : letters) {
      const int ta = al.letter(a).terminal ^ 1;
      int bad = hyp_with_terminal[ta];
      if (!al.letter(b).is_par()) {
        const int tb = al.letter(b).terminal ^ 1;
        bad += with_terminal[tb];
        if (ta == tb) bad -= hyp_with_terminal[ta];
      }
      if (k - bad <= 0) ++missing;
    }
  }
  if (missing > 0) {
    r.warnings.push_back(std::to_string(missing) +
                         " ordered letter pairs have no single connecting letter inside the subset");
  }

  DenseMatrix w(k);
  std::vector<double> c(k);
  double shift = -std::numeric_limits<double>::infinity();
  for (int x = 0; x < k; ++x) {
    c[x] = LetterShift(al, letters[x], params);
    shift = std::max(shift, c[x]);
  }
  for (int x = 0; x < k; ++x) {
    for (int y = 0; y < k; ++y) {
      if (al.Admissible(letters[x], letters[y])) {
        w(x, y) = std::exp(c[x] - shift - params.b * table.log_derivative(letters[x], letters[y]));
      }
    }
  }
  const PerronData perron = SpectralRadius(w);
  r.value = std::log(perron.rho) + shift;
  double range = 0.0;
  for (int a : letters) {
    for (int b : letters) {
      if (!al.Admissible(a, b)) continue;
      const auto [lo, hi] = LogDerivRange(al, {a, b});
      range = std::max(range, hi - lo);
    }
  }
  r.distortion_bound = std::abs(params.b) * range;
  r.L = al.L();
  r.iterations = perron.iterations;
  r.converged = true;
  return r;
}

}  // namespace cuspwind
