#ifndef CUSPWIND_MOEBIUS_H_
#define CUSPWIND_MOEBIUS_H_

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cuspwind {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Tolerance on | |a|^2 - |b|^2 - 1 | for a matrix to count as normalized.
inline constexpr double kNormalizationTolerance = 1e-12;
// Tolerance on | |trace| - 2 | for parabolic detection.
inline constexpr double kParabolicTolerance = 1e-10;

// Raised for inputs that violate a geometric precondition (identity
// generator, elliptic element where a boundary fixed point is needed, ...).
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Reduces an angle to [0, 2pi).
double WrapAngle(double theta);

// An arc of the unit circle running counterclockwise from `start` over
// `length` radians. start is in [0, 2pi), length in (0, 2pi].
class BoundaryArc {
 public:
  BoundaryArc(double start, double length);

  double start() const { return start_; }
  double length() const { return length_; }
  double end() const { return WrapAngle(start_ + length_); }
  double mid() const { return WrapAngle(start_ + 0.5 * length_); }

  // Half-open membership: (theta - start) mod 2pi < length.
  bool Contains(double theta) const;

  // True if `other` lies inside this arc, allowing `slack` radians of
  // overhang at either end.
  bool ContainsArc(const BoundaryArc& other, double slack = 0.0) const;

  // Signed angular clearance between two arcs: the smaller of the two
  // complementary gaps when disjoint, a negative overlap depth otherwise.
  static double Gap(const BoundaryArc& x, const BoundaryArc& y);

 private:
  double start_;
  double length_;
};

enum class IsometryKind { kParabolic, kHyperbolic, kElliptic };

const char* ToString(IsometryKind kind);

// Orientation-preserving isometry of the Poincare disc,
//   z -> (a z + b) / (conj(b) z + conj(a)),   |a|^2 - |b|^2 = 1.
class DiscIsometry {
 public:
  DiscIsometry() = default;
  // Throws GeometryError if the pair is not normalized to within
  // kNormalizationTolerance.
  DiscIsometry(Complex a, Complex b, std::string name = {});

  // Divides by sqrt(|a|^2 - |b|^2). Throws if that quantity is not positive.
  static DiscIsometry Normalized(Complex a, Complex b, std::string name = {});
  static DiscIsometry Identity();
  // Rotation z -> e^{i phi} z.
  static DiscIsometry Rotation(double phi);

  const Complex& a() const { return a_; }
  const Complex& b() const { return b_; }
  const std::string& name() const { return name_; }
  DiscIsometry WithName(std::string name) const;

  double Determinant() const { return std::norm(a_) - std::norm(b_); }
  double Trace() const { return 2.0 * a_.real(); }
  bool IsIdentity(double tol = kNormalizationTolerance) const;

  // Image of the boundary point e^{i theta}, as an angle in [0, 2pi).
  double ApplyBoundary(double theta) const;
  // |g'(e^{i theta})| = 1 / |conj(b) e^{i theta} + conj(a)|^2.
  double BoundaryDerivative(double theta) const;
  // log |g'(e^{i theta})|.
  double LogBoundaryDerivative(double theta) const;
  // Angles where log|g'| is minimal / maximal on the whole circle.
  double MinDerivativeAngle() const;
  double MaxDerivativeAngle() const;

  // Image of an arc (orientation is preserved by Moebius maps).
  BoundaryArc ApplyArc(const BoundaryArc& arc) const;

  // Throws GeometryError("degenerate generator") for the identity.
  IsometryKind Classify(double tol = kParabolicTolerance) const;
  // One angle for parabolic, two (ascending) for hyperbolic. Throws for
  // elliptic input.
  std::vector<double> FixedBoundaryPoints(double tol = kParabolicTolerance) const;
  // Delta(g) = { z : |g'(z)| >= 1 }. Throws when b == 0.
  BoundaryArc IsometricArc() const;

 private:
  Complex a_{1.0, 0.0};
  Complex b_{0.0, 0.0};
  std::string name_;
};

// g o h (h applied first), renormalized.
DiscIsometry Compose(const DiscIsometry& g, const DiscIsometry& h);
DiscIsometry Inverse(const DiscIsometry& g);
// g^p for p >= 0 by repeated squaring; negative p uses the inverse.
DiscIsometry Power(const DiscIsometry& g, long p);
// r o g o r^{-1} for the rotation r by phi.
DiscIsometry ConjugateByRotation(const DiscIsometry& g, double phi);

// Inf / sup of log|g'| over the arc, evaluated exactly from the endpoints and
// the interior critical angles.
std::pair<double, double> LogDerivativeRange(const DiscIsometry& g,
                                             const BoundaryArc& arc);

}  // namespace cuspwind

#endif  // CUSPWIND_MOEBIUS_H_
