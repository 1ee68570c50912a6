#include "cuspwind/moebius.h"

#include <algorithm>
#include <cmath>

namespace cuspwind {

namespace {

Complex UnitPoint(double theta) { return std::polar(1.0, theta); }

// Argument of a*conj(b) written so that the result lands in [0, 2pi).
double ArgOfProduct(const Complex& num, const Complex& den) {
  return WrapAngle(std::arg(num * std::conj(den)));
}

// |conj(b) e^{i theta} + conj(a)|^2 for a normalized pair, written as
// (|a|-|b|)^2 + 4|a||b| cos^2((theta+psi)/2) with psi = arg(a conj(b)).
// Avoids the cancellation of the direct form near the maximal-derivative
// angle, where the modulus is O(1/|a|).
double DenominatorNormSquared(const Complex& a, const Complex& b,
                              double theta) {
  const double abs_a = std::abs(a);
  const double abs_b = std::abs(b);
  const double psi = std::arg(a * std::conj(b));
  const double c = std::cos(0.5 * (theta + psi));
  const double gap = 1.0 / (abs_a + abs_b);
  return gap * gap + 4.0 * abs_a * abs_b * c * c;
}

}  // namespace

double WrapAngle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

BoundaryArc::BoundaryArc(double start, double length)
    : start_(WrapAngle(start)), length_(length) {
  if (!(length > 0.0) || length > kTwoPi) {
    throw GeometryError("BoundaryArc: length must lie in (0, 2pi]");
  }
}

bool BoundaryArc::Contains(double theta) const {
  return WrapAngle(theta - start_) < length_;
}

bool BoundaryArc::ContainsArc(const BoundaryArc& other, double slack) const {
  double offset = WrapAngle(other.start_ - start_);
  // An inner arc starting a hair before this one wraps to ~2pi.
  if (offset > kTwoPi - slack) offset -= kTwoPi;
  return offset + other.length_ <= length_ + slack;
}

double BoundaryArc::Gap(const BoundaryArc& x, const BoundaryArc& y) {
  const double dxy = WrapAngle(y.start_ - x.start_);
  const double dyx = WrapAngle(x.start_ - y.start_);
  const double after_x = dxy - x.length_;
  const double after_y = dyx - y.length_;
  return std::min(after_x, after_y);
}

const char* ToString(IsometryKind kind) {
  switch (kind) {
    case IsometryKind::kParabolic:
      return "parabolic";
    case IsometryKind::kHyperbolic:
      return "hyperbolic";
    case IsometryKind::kElliptic:
      return "elliptic";
  }
  return "unknown";
}

DiscIsometry::DiscIsometry(Complex a, Complex b, std::string name)
    : a_(a), b_(b), name_(std::move(name)) {
  const double det = Determinant();
  if (!std::isfinite(det) ||
      std::abs(det - 1.0) > kNormalizationTolerance * std::max(1.0, std::norm(a))) {
    throw GeometryError("DiscIsometry " + name_ +
                        ": |a|^2 - |b|^2 must equal 1 (got " +
                        std::to_string(det) + ")");
  }
}

DiscIsometry DiscIsometry::Normalized(Complex a, Complex b, std::string name) {
  const double det = std::norm(a) - std::norm(b);
  if (!(det > 0.0) || !std::isfinite(det)) {
    throw GeometryError("DiscIsometry " + name +
                        ": |a|^2 - |b|^2 must be positive");
  }
  const double s = 1.0 / std::sqrt(det);
  DiscIsometry g;
  g.a_ = a * s;
  g.b_ = b * s;
  g.name_ = std::move(name);
  return g;
}

DiscIsometry DiscIsometry::Identity() { return DiscIsometry(); }

DiscIsometry DiscIsometry::Rotation(double phi) {
  return DiscIsometry(std::polar(1.0, 0.5 * phi), Complex(0.0, 0.0));
}

DiscIsometry DiscIsometry::WithName(std::string name) const {
  DiscIsometry g = *this;
  g.name_ = std::move(name);
  return g;
}

bool DiscIsometry::IsIdentity(double tol) const {
  // Projectively, a = -1 is the identity map as well.
  return std::abs(b_) <= tol && std::abs(a_.imag()) <= tol;
}

double DiscIsometry::ApplyBoundary(double theta) const {
  const Complex z = UnitPoint(theta);
  const Complex num = a_ * z + b_;
  const Complex den = std::conj(b_) * z + std::conj(a_);
  return ArgOfProduct(num, den);
}

double DiscIsometry::BoundaryDerivative(double theta) const {
  return 1.0 / DenominatorNormSquared(a_, b_, theta);
}

double DiscIsometry::LogBoundaryDerivative(double theta) const {
  return -std::log(DenominatorNormSquared(a_, b_, theta));
}

double DiscIsometry::MinDerivativeAngle() const {
  return WrapAngle(-std::arg(a_ * std::conj(b_)));
}

double DiscIsometry::MaxDerivativeAngle() const {
  return WrapAngle(std::numbers::pi - std::arg(a_ * std::conj(b_)));
}

BoundaryArc DiscIsometry::ApplyArc(const BoundaryArc& arc) const {
  const double s = arc.start();
  const double e = s + arc.length();
  const double image_start = ApplyBoundary(s);
  const double image_end = ApplyBoundary(e);
  const double raw = WrapAngle(image_end - image_start);
  // Chord lengths transform by sqrt(|g'(z)| |g'(w)|); this recovers short
  // image arcs to full relative precision.
  const double chord = 2.0 * std::sin(0.5 * std::min(arc.length(), std::numbers::pi)) *
                       std::sqrt(BoundaryDerivative(s) * BoundaryDerivative(e));
  double length = raw;
  if (arc.length() <= std::numbers::pi && chord < 1.0) {
    const double small = 2.0 * std::asin(0.5 * chord);
    length = raw <= std::numbers::pi ? small : kTwoPi - small;
  }
  if (!(length > 0.0)) {
    throw GeometryError("ApplyArc: image arc underflowed");
  }
  return BoundaryArc(image_start, std::min(length, kTwoPi));
}

IsometryKind DiscIsometry::Classify(double tol) const {
  if (IsIdentity()) {
    throw GeometryError("degenerate generator");
  }
  const double excess = std::abs(Trace()) - 2.0;
  if (std::abs(excess) <= tol) return IsometryKind::kParabolic;
  return excess > 0.0 ? IsometryKind::kHyperbolic : IsometryKind::kElliptic;
}

std::vector<double> DiscIsometry::FixedBoundaryPoints(double tol) const {
  const IsometryKind kind = Classify(tol);
  if (kind == IsometryKind::kElliptic) {
    throw GeometryError("no boundary fixed point");
  }
  // Roots of conj(b) z^2 + (conj(a) - a) z - b = 0.
  const Complex bc = std::conj(b_);
  const Complex center(0.0, a_.imag());
  if (kind == IsometryKind::kParabolic) {
    return {WrapAngle(std::arg(center / bc))};
  }
  const double root = std::sqrt(a_.real() * a_.real() - 1.0);
  std::vector<double> out = {WrapAngle(std::arg((center + root) / bc)),
                             WrapAngle(std::arg((center - root) / bc))};
  std::sort(out.begin(), out.end());
  return out;
}

BoundaryArc DiscIsometry::IsometricArc() const {
  if (std::abs(b_) == 0.0) {
    throw GeometryError("isometric arc undefined (derivative == 1)");
  }
  const double center = std::numbers::pi - std::arg(a_ * std::conj(b_));
  const double half = std::acos(std::clamp(std::abs(b_) / std::abs(a_), 0.0, 1.0));
  if (!(half > 0.0)) {
    throw GeometryError("isometric arc degenerated to a point");
  }
  return BoundaryArc(center - half, 2.0 * half);
}

DiscIsometry Compose(const DiscIsometry& g, const DiscIsometry& h) {
  const Complex a = g.a() * h.a() + g.b() * std::conj(h.b());
  const Complex b = g.a() * h.b() + g.b() * std::conj(h.a());
  return DiscIsometry::Normalized(a, b);
}

DiscIsometry Inverse(const DiscIsometry& g) {
  return DiscIsometry(std::conj(g.a()), -g.b(),
                      g.name().empty() ? std::string() : g.name() + "^-1");
}

DiscIsometry Power(const DiscIsometry& g, long p) {
  DiscIsometry base = p < 0 ? Inverse(g) : g;
  unsigned long n = p < 0 ? static_cast<unsigned long>(-p)
                          : static_cast<unsigned long>(p);
  DiscIsometry result = DiscIsometry::Identity();
  bool first = true;
  while (n != 0) {
    if (n & 1UL) {
      result = first ? base : Compose(base, result);
      first = false;
    }
    n >>= 1;
    if (n != 0) base = Compose(base, base);
  }
  return result;
}

DiscIsometry ConjugateByRotation(const DiscIsometry& g, double phi) {
  const DiscIsometry r = DiscIsometry::Rotation(phi);
  return Compose(Compose(r, g), Inverse(r)).WithName(g.name());
}

std::pair<double, double> LogDerivativeRange(const DiscIsometry& g,
                                             const BoundaryArc& arc) {
  const double s = arc.start();
  const double e = s + arc.length();
  double lo = std::min(g.LogBoundaryDerivative(s), g.LogBoundaryDerivative(e));
  double hi = std::max(g.LogBoundaryDerivative(s), g.LogBoundaryDerivative(e));
  if (std::abs(g.b()) > 0.0) {
    const double min_angle = g.MinDerivativeAngle();
    const double max_angle = g.MaxDerivativeAngle();
    if (arc.Contains(min_angle)) lo = g.LogBoundaryDerivative(min_angle);
    if (arc.Contains(max_angle)) hi = g.LogBoundaryDerivative(max_angle);
  }
  return {lo, hi};
}

}  // namespace cuspwind
