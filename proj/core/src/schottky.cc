#include "cuspwind/schottky.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cuspwind {

namespace {

using nlohmann::json;

// Decimal inputs are accepted up to this normalization defect; anything
// already normalized to kNormalizationTolerance is kept bit-for-bit.
constexpr double kLoadNormalizationTolerance = 1e-8;

std::string FormatDouble(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

struct NamedArc {
  std::string name;
  BoundaryArc arc;
};

Complex ParseComplex(const json& node, const std::string& path) {
  if (!node.is_array() || node.size() != 2 || !node[0].is_number() ||
      !node[1].is_number()) {
    throw ConfigError(path + ": expected [re, im]");
  }
  return {node[0].get<double>(), node[1].get<double>()};
}

std::vector<DiscIsometry> ParseGenerators(const json& root,
                                          const std::string& key) {
  if (!root.contains(key)) {
    throw ConfigError("missing field \"" + key + "\"");
  }
  const json& list = root.at(key);
  if (!list.is_array() || list.empty()) {
    throw ConfigError(key + ": expected a non-empty array");
  }
  std::vector<DiscIsometry> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = key + "[" + std::to_string(i) + "]";
    const json& entry = list[i];
    if (!entry.is_object()) throw ConfigError(path + ": expected an object");
    for (const char* field : {"name", "a", "b"}) {
      if (!entry.contains(field)) {
        throw ConfigError(path + ": missing field \"" + field + "\"");
      }
    }
    if (!entry.at("name").is_string()) {
      throw ConfigError(path + ".name: expected a string");
    }
    const std::string name = entry.at("name").get<std::string>();
    const Complex a = ParseComplex(entry.at("a"), path + ".a");
    const Complex b = ParseComplex(entry.at("b"), path + ".b");
    const double det = std::norm(a) - std::norm(b);
    if (!std::isfinite(det) ||
        std::abs(det - 1.0) > kLoadNormalizationTolerance) {
      throw ConfigError(path + ": |a|^2 - |b|^2 = " + FormatDouble(det) +
                        " is outside the normalization tolerance");
    }
    if (std::abs(det - 1.0) <= kNormalizationTolerance) {
      out.emplace_back(a, b, name);
    } else {
      out.push_back(DiscIsometry::Normalized(a, b, name));
    }
  }
  return out;
}

json GeneratorsToJson(const std::vector<DiscIsometry>& gens) {
  json list = json::array();
  for (const auto& g : gens) {
    list.push_back({{"name", g.name()},
                    {"a", {g.a().real(), g.a().imag()}},
                    {"b", {g.b().real(), g.b().imag()}}});
  }
  return list;
}

}  // namespace

DiscIsometry ParabolicFixingOne(double t, std::string name) {
  return DiscIsometry(Complex(1.0, t), Complex(0.0, -t), std::move(name));
}

DiscIsometry HyperbolicAlongImaginaryAxis(double s, std::string name) {
  return DiscIsometry::Normalized(Complex(std::cosh(s), 0.0),
                                  Complex(0.0, std::sinh(s)), std::move(name));
}

GroupPresentation::GroupPresentation(std::vector<DiscIsometry> parabolics,
                                     std::vector<DiscIsometry> hyperbolics)
    : parabolics_(std::move(parabolics)), hyperbolics_(std::move(hyperbolics)) {
  if (parabolics_.empty() || hyperbolics_.empty()) {
    throw std::invalid_argument(
        "GroupPresentation needs at least one parabolic and one hyperbolic "
        "generator");
  }
}

GroupPresentation GroupPresentation::Rotated(double phi) const {
  std::vector<DiscIsometry> p;
  std::vector<DiscIsometry> h;
  for (const auto& g : parabolics_) p.push_back(ConjugateByRotation(g, phi));
  for (const auto& g : hyperbolics_) h.push_back(ConjugateByRotation(g, phi));
  return GroupPresentation(std::move(p), std::move(h));
}

bool GroupPresentation::operator==(const GroupPresentation& other) const {
  auto same = [](const std::vector<DiscIsometry>& x,
                 const std::vector<DiscIsometry>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].a() != y[i].a() || x[i].b() != y[i].b() ||
          x[i].name() != y[i].name()) {
        return false;
      }
    }
    return true;
  };
  return same(parabolics_, other.parabolics_) &&
         same(hyperbolics_, other.hyperbolics_);
}

std::vector<std::string> ValidationReport::Lines() const {
  std::vector<std::string> lines;
  for (const auto& g : generators) {
    lines.push_back(std::string(g.passed ? "PASS" : "FAIL") + " classify " +
                    g.name + ": expected " + g.expected + ", found " + g.found);
  }
  for (const auto& p : gaps) {
    lines.push_back(std::string(p.passed ? "PASS" : "FAIL") + " gap " +
                    p.first + " / " + p.second + ": " + FormatDouble(p.gap) +
                    " rad (need >= " + FormatDouble(kSchottkyGap) + ")");
  }
  lines.push_back(std::string(coverage_passed ? "PASS" : "FAIL") +
                  " coverage: arcs cover " + FormatDouble(covered_length) +
                  " of " + FormatDouble(kTwoPi) + " rad");
  lines.push_back(std::string(passed ? "PASS" : "FAIL") + " overall");
  return lines;
}

ValidationReport Validate(const GroupPresentation& presentation) {
  ValidationReport report;
  // Arcs of each generator pair; empty when the generator is unusable.
  std::vector<std::vector<NamedArc>> pair_arcs;

  auto check = [&](const DiscIsometry& g, IsometryKind expected) {
    GeneratorCheck entry;
    entry.name = g.name();
    entry.expected = ToString(expected);
    std::vector<NamedArc> arcs;
    try {
      const IsometryKind kind = g.Classify();
      entry.found = ToString(kind);
      entry.passed = kind == expected;
      if (kind != IsometryKind::kElliptic) {
        const DiscIsometry inv = Inverse(g);
        arcs.push_back({g.name(), g.IsometricArc()});
        arcs.push_back({inv.name(), inv.IsometricArc()});
      }
    } catch (const GeometryError& e) {
      entry.found = e.what();
      entry.passed = false;
    }
    if (!entry.passed && entry.found == ToString(IsometryKind::kElliptic)) {
      entry.found = "elliptic (not " + entry.expected + ")";
    }
    report.generators.push_back(entry);
    pair_arcs.push_back(std::move(arcs));
  };
  for (const auto& g : presentation.parabolics()) check(g, IsometryKind::kParabolic);
  for (const auto& g : presentation.hyperbolics()) check(g, IsometryKind::kHyperbolic);

  for (std::size_t i = 0; i < pair_arcs.size(); ++i) {
    for (const auto& x : pair_arcs[i]) report.covered_length += x.arc.length();
    for (std::size_t j = i + 1; j < pair_arcs.size(); ++j) {
      for (const auto& x : pair_arcs[i]) {
        for (const auto& y : pair_arcs[j]) {
          PairGap gap{x.name, y.name, BoundaryArc::Gap(x.arc, y.arc), false};
          gap.passed = gap.gap >= kSchottkyGap;
          report.gaps.push_back(gap);
        }
      }
    }
  }
  report.coverage_passed = report.covered_length < kTwoPi;

  bool ok = report.coverage_passed;
  for (const auto& g : report.generators) ok = ok && g.passed;
  for (const auto& p : report.gaps) ok = ok && p.passed;
  report.passed = ok;
  return report;
}

GroupPresentation Preset(std::string_view name) {
  const DiscIsometry gamma = ParabolicFixingOne(kPresetParabolicT, "g1");
  const DiscIsometry h = HyperbolicAlongImaginaryAxis(kPresetHyperbolicS, "h1");
  if (name == "one_cusp") {
    return GroupPresentation({gamma}, {h});
  }
  if (name == "two_cusp") {
    const DiscIsometry gamma2 =
        ConjugateByRotation(gamma, std::numbers::pi).WithName("g2");
    return GroupPresentation({gamma, gamma2}, {h});
  }
  throw std::invalid_argument("unknown preset \"" + std::string(name) +
                              "\" (expected one_cusp or two_cusp)");
}

GroupPresentation Load(std::string_view config) {
  json root;
  try {
    root = json::parse(config);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("top level must be an object");
  GroupPresentation presentation(ParseGenerators(root, "parabolic"),
                                 ParseGenerators(root, "hyperbolic"));
  ValidationReport report = Validate(presentation);
  if (!report.passed) {
    std::string first_failure = "validation failed";
    for (const auto& line : report.Lines()) {
      if (line.rfind("FAIL", 0) == 0) {
        first_failure = "validation failed: " + line.substr(5);
        break;
      }
    }
    throw ValidationError(first_failure, std::move(report));
  }
  return presentation;
}

GroupPresentation LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return Load(text.str());
}

std::string Serialize(const GroupPresentation& presentation) {
  json root;
  root["parabolic"] = GeneratorsToJson(presentation.parabolics());
  root["hyperbolic"] = GeneratorsToJson(presentation.hyperbolics());
  return root.dump(2) + "\n";
}

}  // namespace cuspwind
