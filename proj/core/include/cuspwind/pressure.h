#ifndef CUSPWIND_PRESSURE_H_
#define CUSPWIND_PRESSURE_H_

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "cuspwind/coding.h"
#include "cuspwind/schottky.h"

namespace cuspwind {

// Raised when an iterative method fails to converge or leaves its domain.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// phi = <q, Phi + alpha> - b log|f'|, Phi = (-a_1, ..., -a_m).
struct PotentialParams {
  std::vector<double> q;
  double b = 0.0;
  std::vector<double> alpha;

  // Zero q and alpha of length m.
  static PotentialParams Geometric(int m, double b);
  void Check(int m) const;
};

// Closed-form finiteness region: all q_i > 0 and b >= 0, or all q_i >= 0
// with some q_i = 0 and b > 1/2.
bool InFiniteRegion(const PotentialParams& params);

struct FinitenessReport {
  bool closed_form_finite = false;
  bool trend_finite = false;
  std::vector<int> truncations;          // 100, 1000, 10000
  std::vector<double> log_letter_sums;   // log sum_a exp(sup phi|[a])
  double increment_ratio = 0.0;          // second increment / first
  bool consistent() const { return closed_form_finite == trend_finite; }
};

// Threshold on successive letter-sum increments above which the sum is
// declared divergent.
inline constexpr double kDivergenceRatio = 1.0 - 1e-3;

FinitenessReport FinitenessCheck(const GroupPresentation& presentation,
                                 const PotentialParams& params);

// Which value of log|branch(a)'| over the 2-cylinder [a b] enters W.
// kSupWeights takes the infimum of the derivative (largest weight for
// b >= 0), kInfWeights the supremum.
enum class WeightPolicy { kRepresentative, kSupWeights, kInfWeights };

// Row-major dense square matrix.
struct DenseMatrix {
  int n = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  explicit DenseMatrix(int size, double fill = 0.0)
      : n(size), data(static_cast<std::size_t>(size) * size, fill) {}
  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * n + j]; }
};

// log|branch(a)'| on every admissible 2-cylinder, computed once per alphabet.
class TransferTable {
 public:
  // threads <= 0 uses the hardware concurrency.
  explicit TransferTable(TruncatedAlphabet alphabet,
                         WeightPolicy policy = WeightPolicy::kRepresentative,
                         int threads = 1);

  const TruncatedAlphabet& alphabet() const { return *alphabet_; }
  int size() const { return alphabet_->size(); }
  WeightPolicy policy() const { return policy_; }
  // Meaningful only for admissible pairs.
  double log_derivative(int a, int b) const { return log_deriv_(a, b); }
  const DenseMatrix& log_derivatives() const { return log_deriv_; }
  // max over admissible pairs of (sup - inf) of log|branch(a)'| on [a b].
  double max_range() const { return max_range_; }
  // min over admissible pairs of the inf of log|branch(a)'| on [a b].
  double min_log_derivative() const { return min_log_deriv_; }

 private:
  std::shared_ptr<const TruncatedAlphabet> alphabet_;
  WeightPolicy policy_;
  DenseMatrix log_deriv_;
  double max_range_ = 0.0;
  double min_log_deriv_ = 0.0;
};

// kCountable rejects parameters outside the finiteness region of the full
// alphabet; kTruncated accepts any finite parameters, since a truncated
// matrix is always finite (e.g. the counting potential q = 0, b = 0).
enum class RegionCheck { kCountable, kTruncated };

// W[a][b] = exp(<q, alpha - cusp_vector(a)> - b log|branch(a)'|) on
// admissible pairs, 0 elsewhere. Throws std::invalid_argument outside the
// finiteness region under kCountable.
DenseMatrix BuildWeightMatrix(const TransferTable& table,
                              const PotentialParams& params,
                              RegionCheck check = RegionCheck::kCountable);

struct SpectralOptions {
  double tolerance = 1e-13;
  int max_iterations = 100000;
};

struct PerronData {
  double rho = 0.0;
  std::vector<double> right;  // W v = rho v, sum v = 1
  std::vector<double> left;   // u W = rho u, sum u = 1
  int iterations = 0;
};

// Power iteration; throws NumericalError on non-convergence.
PerronData SpectralRadius(const DenseMatrix& w,
                          const SpectralOptions& options = {});

struct PressureResult {
  double value = 0.0;
  double distortion_bound = 0.0;
  int L = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

struct GibbsStats {
  std::vector<double> letter_marginal;
  DenseMatrix pair_measure;  // empty unless requested
  std::vector<double> a_integrals;
  double lyapunov = 0.0;
  double entropy = 0.0;
  double pressure = 0.0;
  double distortion_bound = 0.0;
  int iterations = 0;
};

// Evaluates pressure and Gibbs statistics on one table, caching
// exp(-b log|f'|) between calls with the same b. Not thread-safe; use one
// evaluator per thread.
class PressureEvaluator {
 public:
  explicit PressureEvaluator(const TransferTable& table,
                             SpectralOptions options = {});

  PressureResult Pressure(const PotentialParams& params);
  GibbsStats Gibbs(const PotentialParams& params, bool with_pairs = false);
  const TransferTable& table() const { return table_; }

 private:
  struct Solved {
    PerronData perron;
    std::vector<double> row_scale;  // exp(c_a - shift)
    double shift = 0.0;
  };
  Solved Solve(const PotentialParams& params);
  void PrepareExponentials(double b);

  const TransferTable& table_;
  SpectralOptions options_;
  double cached_b_ = 0.0;
  bool cache_valid_ = false;
  DenseMatrix exp_;  // exp(-b log|f'|) on admissible pairs, 0 elsewhere
};

PressureResult Pressure(const TransferTable& table,
                        const PotentialParams& params);
GibbsStats ComputeGibbsStats(const TransferTable& table,
                             const PotentialParams& params,
                             bool with_pairs = false);

struct DoublingResult {
  PressureResult result;  // at the last truncation evaluated
  std::vector<int> truncations;
  std::vector<double> values;
  bool converged = false;  // |P_2L - P_L| < tol reached before L_max
  // sum_{l > L} l^{-2b} e^{-q_min l} at the last L; NaN unless q_min > 0.
  double letter_tail = 0.0;
};

// Doubles L from L0 until successive pressures differ by less than tol or
// L exceeds L_max.
DoublingResult PressureByDoubling(const GroupPresentation& presentation,
                                  const PotentialParams& params, int L0,
                                  double tol, int L_max = 1600);

// Pressure of W restricted to a letter subset. Throws std::invalid_argument
// when the subset is empty or the restricted graph is not irreducible; warns
// when some ordered pair has no connector inside the subset.
PressureResult PressureSubsystem(const TransferTable& table,
                                 const std::vector<int>& subset,
                                 const PotentialParams& params,
                                 RegionCheck check = RegionCheck::kCountable);

}  // namespace cuspwind

#endif  // CUSPWIND_PRESSURE_H_
