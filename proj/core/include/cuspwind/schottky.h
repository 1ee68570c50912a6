#ifndef CUSPWIND_SCHOTTKY_H_
#define CUSPWIND_SCHOTTKY_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cuspwind/moebius.h"

namespace cuspwind {

// Minimal clearance between arcs of distinct generator pairs.
inline constexpr double kSchottkyGap = 1e-6;

// Parameters of the built-in presets. The parabolic generator is
// (1 + i t, -i t), fixing the boundary point 1; the hyperbolic generator is
// (cosh s, i sinh s), fixing +-i.
inline constexpr double kPresetParabolicT = 1.15;
inline constexpr double kPresetHyperbolicS = 3.0;

DiscIsometry ParabolicFixingOne(double t, std::string name = "g1");
DiscIsometry HyperbolicAlongImaginaryAxis(double s, std::string name = "h1");

// Free group presentation G0 = Gamma0 u H0. Only one representative of each
// inverse pair is stored.
class GroupPresentation {
 public:
  GroupPresentation(std::vector<DiscIsometry> parabolics,
                    std::vector<DiscIsometry> hyperbolics);

  int m() const { return static_cast<int>(parabolics_.size()); }
  int n() const { return static_cast<int>(hyperbolics_.size()); }
  const std::vector<DiscIsometry>& parabolics() const { return parabolics_; }
  const std::vector<DiscIsometry>& hyperbolics() const { return hyperbolics_; }

  // Conjugates every generator by the rotation by phi.
  GroupPresentation Rotated(double phi) const;

  bool operator==(const GroupPresentation& other) const;

 private:
  std::vector<DiscIsometry> parabolics_;
  std::vector<DiscIsometry> hyperbolics_;
};

struct GeneratorCheck {
  std::string name;
  std::string expected;  // "parabolic" or "hyperbolic"
  std::string found;     // classification, or the failure reason
  bool passed = false;
};

struct PairGap {
  std::string first;
  std::string second;
  double gap = 0.0;  // negative when the arcs overlap
  bool passed = false;
};

struct ValidationReport {
  std::vector<GeneratorCheck> generators;
  std::vector<PairGap> gaps;
  double covered_length = 0.0;  // total length of the 2(m+n) arcs
  bool coverage_passed = false;
  bool passed = false;

  // One human-readable line per check.
  std::vector<std::string> Lines() const;
};

ValidationReport Validate(const GroupPresentation& presentation);

// "one_cusp" or "two_cusp". Throws std::invalid_argument otherwise.
GroupPresentation Preset(std::string_view name);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& what, ValidationReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

// Parses the JSON config
//   { "parabolic":  [ {"name": ..., "a": [re, im], "b": [re, im]}, ... ],
//     "hyperbolic": [ ... ] }
// normalizes and validates it. Throws ConfigError for parse/schema problems
// and ValidationError when the group fails Validate().
GroupPresentation Load(std::string_view config);
GroupPresentation LoadFile(const std::string& path);
std::string Serialize(const GroupPresentation& presentation);

}  // namespace cuspwind

#endif  // CUSPWIND_SCHOTTKY_H_
