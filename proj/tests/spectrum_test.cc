#include "cuspwind/spectrum.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace cuspwind {
namespace {

constexpr int kL = 100;

class SpectrumTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    solver_ = new SpectrumSolver(Preset("one_cusp"), kL);
    std::vector<std::vector<double>> alphas;
    for (int k = 1; k <= 16; ++k) alphas.push_back({0.5 * k});
    grid_ = new std::vector<SpectrumPoint>(solver_->Grid(alphas));
  }
  static void TearDownTestSuite() {
    delete grid_;
    delete solver_;
  }
  static SpectrumSolver* solver_;
  static std::vector<SpectrumPoint>* grid_;
};

SpectrumSolver* SpectrumTest::solver_ = nullptr;
std::vector<SpectrumPoint>* SpectrumTest::grid_ = nullptr;

// Root of b -> P(q, b) by plain bisection on [lo, hi].
double PressureRootInB(PressureEvaluator& ev, std::vector<double> q, std::vector<double> alpha,
                       double lo, double hi) {
  for (int k = 0; k < 100; ++k) {
    const double mid = 0.5 * (lo + hi);
    (ev.Pressure({q, mid, alpha}).value > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(HausdorffDim, RootOfGeometricPressure) {
  const TransferTable table(BuildAlphabet(Preset("one_cusp"), kL));
  const DimResult d = HausdorffDim(table, 1e-12);
  EXPECT_GT(d.s, 0.5);
  EXPECT_LT(d.s, 1.0);
  EXPECT_LT(d.residual, 1e-8);
  EXPECT_LE(d.low, d.s);
  EXPECT_GE(d.high, d.s);
  // Independent bisection oracle.
  PressureEvaluator ev(table);
  EXPECT_NEAR(PressureRootInB(ev, {0.0}, {0.0}, 0.5 + 1e-9, 1.0), d.s, 1e-10);
}

TEST(HausdorffDim, WeightVariantsBracketRoot) {
  const GroupPresentation p = Preset("one_cusp");
  const double rep = HausdorffDim(p, 60, 1e-10).s;
  EXPECT_LE(HausdorffDim(p, 60, 1e-10, WeightPolicy::kInfWeights).s, rep);
  EXPECT_GE(HausdorffDim(p, 60, 1e-10, WeightPolicy::kSupWeights).s, rep);
}

TEST(HausdorffDim, RotationInvariant) {
  const GroupPresentation p = Preset("two_cusp");
  const double s0 = HausdorffDim(p, 40, 1e-12).s;
  const double s1 = HausdorffDim(p.Rotated(2.345), 40, 1e-12).s;
  EXPECT_LT(std::abs(s0 - s1), 1e-9);
}

TEST(HausdorffDim, TwoCuspExceedsOneCusp) {
  EXPECT_GT(HausdorffDim(Preset("two_cusp"), 40).s, HausdorffDim(Preset("one_cusp"), 40).s);
}

TEST_F(SpectrumTest, SolvesImplicitSystem) {
  const SpectrumPoint pt = solver_->Solve({2.0});
  ASSERT_TRUE(pt.converged) << pt.error;
  EXPECT_LT(std::abs(pt.residual_p), 1e-8);
  EXPECT_LT(pt.residual_grad_max(), 1e-8);
  EXPECT_NEAR(pt.a_integrals[0], 2.0, 1e-6);
  EXPECT_EQ(pt.L, kL);
  // Re-evaluate the residuals from scratch.
  const GibbsStats g = ComputeGibbsStats(solver_->table(), {pt.q, pt.b, pt.alpha});
  EXPECT_NEAR(g.pressure, 0.0, 1e-8);
  EXPECT_NEAR(g.a_integrals[0], 2.0, 1e-8);
  EXPECT_THROW(solver_->Solve({0.0}), std::invalid_argument);
  EXPECT_THROW(solver_->Solve({1.0, 1.0}), std::invalid_argument);
}

TEST_F(SpectrumTest, BelowDimensionAndPositiveQ) {
  const double s = solver_->dimension().s;
  for (double a : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const SpectrumPoint pt = solver_->Solve({a});
    ASSERT_TRUE(pt.converged) << a << ": " << pt.error;
    EXPECT_LE(pt.b, s + 1e-6) << a;
    EXPECT_GT(pt.q[0], 0.0) << a;
    EXPECT_FALSE(pt.saturated);
  }
}

TEST_F(SpectrumTest, ConditionalVariationalPrinciple) {
  for (const auto& pt : *grid_) {
    ASSERT_TRUE(pt.converged) << pt.alpha[0] << ": " << pt.error;
    EXPECT_NEAR(pt.b * pt.lyapunov, pt.entropy, std::max(1e-8, pt.distortion_bound));
    EXPECT_NEAR(pt.b * pt.lyapunov, pt.entropy, 1e-8);
    EXPECT_NEAR(pt.a_integrals[0], pt.alpha[0], solver_->options().tol);
  }
}

TEST_F(SpectrumTest, StrictlyIncreasingAndSmooth) {
  for (std::size_t k = 1; k < grid_->size(); ++k) {
    EXPECT_GT((*grid_)[k].b, (*grid_)[k - 1].b) << k;
  }
  std::vector<double> d2;
  for (std::size_t k = 1; k + 1 < grid_->size(); ++k) {
    d2.push_back(std::abs((*grid_)[k - 1].b - 2 * (*grid_)[k].b + (*grid_)[k + 1].b));
  }
  for (std::size_t k = 1; k + 1 < d2.size(); ++k) {
    EXPECT_LE(d2[k], 10 * std::max(d2[k - 1], d2[k + 1])) << k;
  }
}

TEST_F(SpectrumTest, GridMatchesIndependentSolves) {
  SpectrumSolver fresh(Preset("one_cusp"), kL);
  std::vector<std::vector<double>> alphas;
  for (const auto& pt : *grid_) alphas.push_back(pt.alpha);
  const auto parallel = fresh.Grid(alphas, 3);
  ASSERT_EQ(parallel.size(), grid_->size());
  for (std::size_t k = 0; k < parallel.size(); ++k) {
    EXPECT_EQ(parallel[k].alpha, (*grid_)[k].alpha);
    EXPECT_NEAR(parallel[k].b, (*grid_)[k].b, 1e-9);
  }
  const auto again = fresh.Grid(alphas, 3);
  for (std::size_t k = 0; k < again.size(); ++k) EXPECT_EQ(again[k].b, parallel[k].b);
}

TEST_F(SpectrumTest, GibbsMeasuresAreCompetitors) {
  PressureEvaluator ev(solver_->table());
  for (double q : {0.1, 0.3, 1.0}) {
    const double b = PressureRootInB(ev, {q}, {0.0}, 0.0, 1.0);
    const GibbsStats g = ev.Gibbs({{q}, b, {0.0}});
    const double a = g.a_integrals[0];
    if (a < 0.5 || a > 8.0) continue;
    const SpectrumPoint pt = solver_->Solve({a});
    ASSERT_TRUE(pt.converged);
    EXPECT_LE(g.entropy / g.lyapunov, pt.b + 2 * solver_->options().tol) << q;
  }
}

TEST(Spectrum, TwoCuspSymmetry) {
  SpectrumSolver solver(Preset("two_cusp"), 20);
  const SpectrumPoint x = solver.Solve({1.0, 2.0});
  const SpectrumPoint y = solver.Solve({2.0, 1.0});
  ASSERT_TRUE(x.converged && y.converged);
  EXPECT_NEAR(x.b, y.b, 1e-8);
  EXPECT_NEAR(x.q[0], y.q[1], 1e-6);
  EXPECT_NEAR(x.q[1], y.q[0], 1e-6);
}

TEST(Spectrum, SaturationOption) {
  // Beyond the truncated maximal-measure mean.
  SolverOptions strict;
  strict.allow_saturation = false;
  SpectrumSolver solver(Preset("one_cusp"), 60, strict);
  const SpectrumPoint pt = solver.Solve({10.0});
  EXPECT_FALSE(pt.converged);
  EXPECT_FALSE(pt.error.empty());
  SpectrumSolver loose(Preset("one_cusp"), 60);
  const SpectrumPoint sat = loose.Solve({10.0});
  ASSERT_TRUE(sat.converged) << sat.error;
  EXPECT_TRUE(sat.saturated);
  EXPECT_LE(sat.q[0], 0.0);
}

TEST(Oracle, BracketsNewtonSolution) {
  SpectrumSolver solver(Preset("one_cusp"), 40);
  const SpectrumPoint pt = solver.Solve({2.0});
  ASSERT_TRUE(pt.converged);
  std::vector<std::vector<double>> q_grid;
  for (int k = 0; k <= 40; ++k) q_grid.push_back({0.05 * k});
  std::vector<double> b_grid;
  for (int k = 1; k <= 19; ++k) b_grid.push_back(0.05 * k);
  const OracleResult r = BruteForceOracle(solver.table(), {2.0}, q_grid, b_grid);
  EXPECT_LE(r.b_low, pt.b);
  EXPECT_GE(r.b_high, pt.b);
  EXPECT_NEAR(r.q_star[0], pt.q[0], 0.05);
  for (std::size_t k = 1; k < r.min_pressure.size(); ++k) {
    if (std::isfinite(r.min_pressure[k - 1])) {
      EXPECT_LE(r.min_pressure[k], r.min_pressure[k - 1]);
    }
  }
  EXPECT_GE(r.min_pressure[std::find(b_grid.begin(), b_grid.end(), r.b_low) - b_grid.begin()], 0.0);
  EXPECT_THROW(BruteForceOracle(solver.table(), {2.0}, q_grid, {0.05, 0.1}), NumericalError);
}

TEST(Distortion, QuadraticLaw) {
  for (const char* name : {"one_cusp", "two_cusp"}) {
    const GroupPresentation p = Preset(name);
    for (int i = 0; i < p.m(); ++i) {
      const DistortionFit fwd = DistortionExponent(p, i, 20, 200, +1);
      const DistortionFit bwd = DistortionExponent(p, i, 20, 200, -1);
      EXPECT_NEAR(fwd.slope, 2.0, 0.05);
      EXPECT_TRUE(std::isfinite(fwd.intercept));
      EXPECT_NEAR(fwd.slope, bwd.slope, 1e-3);
      EXPECT_EQ(fwd.powers.size(), 181u);
    }
  }
  EXPECT_THROW(DistortionExponent(Preset("one_cusp"), 0, 5, 200), std::invalid_argument);
  EXPECT_THROW(DistortionExponent(Preset("one_cusp"), 1, 20, 200), std::invalid_argument);
}

TEST(PeriodicOrbit, ParabolicBlockCycle) {
  const GroupPresentation p = Preset("one_cusp");
  const TruncatedAlphabet al = BuildAlphabet(p, 10);
  for (int l : {1, 4, 9}) {
    const Word cycle = {al.IndexOf(Letter::Par(0, +1, l, 0)), al.IndexOf(Letter::Hyp(0))};
    const OrbitStats st = PeriodicOrbitStats(al, cycle);
    EXPECT_NEAR(st.a_avg[0], (l - 1) / 2.0, 1e-15);
    // Oracle: repelling fixed point of the composed branch map.
    const DiscIsometry f = Compose(al.branch(cycle[1]), al.branch(cycle[0]));
    double best = 0.0, x0 = 0.0;
    for (double x : f.FixedBoundaryPoints()) {
      if (f.LogBoundaryDerivative(x) > best) {
        best = f.LogBoundaryDerivative(x);
        x0 = x;
      }
    }
    const double d = WrapAngle(st.periodic_point - x0);
    EXPECT_LT(std::min(d, kTwoPi - d), 1e-10);
    EXPECT_NEAR(st.lyapunov_avg, best / 2, 1e-9);
    EXPECT_TRUE(al.arc(cycle[0]).Contains(st.periodic_point));
    // Zero-entropy orbit measures cannot beat the spectrum.
    if (l > 1) {
      const SpectrumPoint pt = SpectrumSolver(p, 30).Solve(st.a_avg);
      ASSERT_TRUE(pt.converged);
      EXPECT_LE(0.0 / st.lyapunov_avg, pt.b);
    }
  }
  EXPECT_THROW(PeriodicOrbitStats(al, {0, 1}), std::invalid_argument);
}

TEST(PeriodicOrbit, HyperbolicCycleHasNoWinding) {
  const DiscIsometry h = HyperbolicAlongImaginaryAxis(3.0, "h1");
  const GroupPresentation p({ParabolicFixingOne(4.0, "g1")},
                            {h, ConjugateByRotation(h, std::numbers::pi / 4).WithName("h2")});
  const TruncatedAlphabet al = BuildAlphabet(p, 3);
  const OrbitStats st = PeriodicOrbitStats(al, {0, 2});
  EXPECT_EQ(st.a_avg, std::vector<double>{0.0});
  EXPECT_GT(st.lyapunov_avg, 0.0);
}

}  // namespace
}  // namespace cuspwind
