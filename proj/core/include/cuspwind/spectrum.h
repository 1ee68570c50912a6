#ifndef CUSPWIND_SPECTRUM_H_
#define CUSPWIND_SPECTRUM_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cuspwind/coding.h"
#include "cuspwind/pressure.h"
#include "cuspwind/schottky.h"

namespace cuspwind {

inline constexpr double kDimBracketLow = 0.501;
inline constexpr double kDimBracketHigh = 0.999;
inline constexpr double kDimBracketWide = 1.2;

struct DimResult {
  double s = 0.0;
  double low = 0.0;
  double high = 0.0;
  int L = 0;
  double residual = 0.0;  // |P(-s log|f'|)|
  std::vector<std::string> warnings;
};

// Root of b -> P(-b log|f'|) on the given table by bisection to `tol`,
// followed by Newton polishing of the residual. Throws NumericalError when
// the bracket has no sign change.
DimResult HausdorffDim(const TransferTable& table, double tol = 1e-10);
DimResult HausdorffDim(const GroupPresentation& presentation, int L,
                       double tol = 1e-10,
                       WeightPolicy policy = WeightPolicy::kRepresentative);

struct SpectrumPoint {
  std::vector<double> alpha;
  std::vector<double> q;
  double b = 0.0;
  double residual_p = 0.0;
  std::vector<double> residual_grad;  // alpha_i - int a_i dmu
  std::vector<double> a_integrals;
  double lyapunov = 0.0;
  double entropy = 0.0;
  double distortion_bound = 0.0;
  int L = 0;
  int newton_iterations = 0;
  bool converged = false;
  // True when the truncated solution needs some q_i <= 0: alpha exceeds the
  // cusp-winding mean reachable with positive q at this truncation.
  bool saturated = false;
  std::string error;

  double residual_grad_max() const;
};

struct SolverOptions {
  double tol = 1e-10;           // on max(|P|, |grad|)
  double jacobian_step = 1e-5;  // forward-difference step
  int max_iterations = 200;
  double dim_tol = 1e-12;
  // Accept solutions with some q_i <= 0 (alpha beyond the truncated
  // maximal-measure mean); otherwise they are reported as failures.
  bool allow_saturation = true;
};

// Holds the transfer table of one truncation and solves the implicit
// system P = 0, grad_q P = 0 for (q(alpha), b(alpha)).
class SpectrumSolver {
 public:
  SpectrumSolver(const GroupPresentation& presentation, int L,
                 SolverOptions options = {}, int threads = 1);

  const TransferTable& table() const { return *table_; }
  const SolverOptions& options() const { return options_; }
  // Bowen root at this truncation; computed on first use.
  const DimResult& dimension();

  // Throws std::invalid_argument unless all alpha_i > 0. Newton failure is
  // reported through converged/error, not thrown.
  SpectrumPoint Solve(const std::vector<double>& alpha,
                      const std::optional<SpectrumPoint>& warm = std::nullopt);

  // Independent solves, warm-started within contiguous blocks of the grid;
  // one block per thread. Output follows the input order.
  std::vector<SpectrumPoint> Grid(const std::vector<std::vector<double>>& alphas,
                                  int threads = 1);

 private:
  SpectrumPoint SolveWith(PressureEvaluator& ev, const std::vector<double>& alpha,
                          const std::vector<double>& q0, double b0);
  // Damped Newton from x; steps are halved while they leave the feasible
  // box (q > 0 when constrain_q; b in (0, 1), or (1/2, 1) once some q_i <= 0).
  bool Newton(PressureEvaluator& ev, const std::vector<double>& alpha,
              std::vector<double>& x, bool constrain_q, double tol,
              int& iterations, std::string& error);
  // Log-linear continuation in alpha from the exact solution at q = 0.
  bool Continuation(PressureEvaluator& ev, const std::vector<double>& alpha,
                    std::vector<double>& x, int& iterations, std::string& error);

  std::unique_ptr<TransferTable> table_;
  SolverOptions options_;
  std::optional<DimResult> dim_;
};

SpectrumPoint SolveSpectrumPoint(const GroupPresentation& presentation,
                                 const std::vector<double>& alpha, int L,
                                 double tol = 1e-10);
std::vector<SpectrumPoint> SpectrumGrid(const GroupPresentation& presentation,
                                        const std::vector<std::vector<double>>& alphas,
                                        int L, double tol = 1e-10, int threads = 1);

struct OracleResult {
  double b_low = 0.0;   // last grid b with min_q P >= 0
  double b_high = 0.0;  // first grid b with min_q P < 0
  double b_star = 0.0;  // linear interpolation of the crossing
  std::vector<double> q_star;          // argmin over the q grid at b_low
  std::vector<double> b_values;
  std::vector<double> min_pressure;    // min over the q grid, per b
};

// Coarse scan: for every b, minimizes P over the q grid. Throws
// NumericalError when min_q P does not change sign over b_grid.
OracleResult BruteForceOracle(const TransferTable& table,
                              const std::vector<double>& alpha,
                              const std::vector<std::vector<double>>& q_grid,
                              const std::vector<double>& b_grid);

struct DistortionFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<int> powers;
  std::vector<double> log_sup;  // sup log|(gamma^l)'| over the cylinders [gamma^l h]
};

// Least-squares fit of sup log|(gamma^l)'| against log l for l in
// [l_min, l_max] (within [10, 1000]). sign = -1 uses gamma^-1.
DistortionFit DistortionExponent(const GroupPresentation& presentation,
                                 int cusp_index, int l_min, int l_max,
                                 int sign = +1);

struct OrbitStats {
  std::vector<double> a_avg;
  double lyapunov_avg = 0.0;
  double periodic_point = 0.0;
  int iterations = 0;
};

// Periodic point of the letter cycle and its Birkhoff averages per letter.
// Throws std::invalid_argument when the cycle (with wrap) is inadmissible.
OrbitStats PeriodicOrbitStats(const TruncatedAlphabet& alphabet,
                              const Word& cycle);

}  // namespace cuspwind

#endif  // CUSPWIND_SPECTRUM_H_
