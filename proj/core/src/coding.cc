#include "cuspwind/coding.h"

#include <stdexcept>

namespace cuspwind {

namespace {

constexpr double kInclusionSlack = 1e-9;

std::string SymbolName(const GroupPresentation& p, const Symbol& s) {
  const auto& list = s.parabolic ? p.parabolics() : p.hyperbolics();
  return list[s.generator()].name() + (s.inverse() ? "^-1" : "");
}

}  // namespace

std::vector<Symbol> Letter::Symbols() const {
  std::vector<Symbol> out;
  if (is_par()) {
    const Symbol gamma{true, 2 * cusp + (sign < 0 ? 1 : 0)};
    out.assign(power, gamma);
  }
  out.push_back({false, terminal});
  return out;
}

std::string Letter::ToString(const GroupPresentation& p) const {
  const std::string h = SymbolName(p, {false, terminal});
  if (!is_par()) return h;
  std::string g = p.parabolics()[cusp].name() + "^" +
                  std::to_string(sign * power);
  return g + " " + h;
}

int Tau(const Letter& letter) {
  return letter.is_par() ? letter.power + 1 : 1;
}

std::vector<double> CuspVector(const Letter& letter, int m) {
  std::vector<double> v(m, 0.0);
  if (letter.is_par()) v[letter.cusp] = letter.power - 1;
  return v;
}

bool Admissible(const Letter& a, const Letter& b) {
  return b.is_par() || b.terminal != (a.terminal ^ 1);
}

BoundaryArc ParLetterArc(const DiscIsometry& gamma_signed, int power,
                         const DiscIsometry& terminal) {
  return Power(gamma_signed, -static_cast<long>(power))
      .ApplyArc(terminal.IsometricArc());
}

TruncatedAlphabet::TruncatedAlphabet(GroupPresentation presentation, int L)
    : presentation_(std::move(presentation)), L_(L) {
  if (L < 1) throw std::invalid_argument("truncation L must be >= 1");
  const int m = presentation_.m();
  const int n = presentation_.n();
  for (const auto& h : presentation_.hyperbolics()) {
    symbol_maps_.push_back(h);
    symbol_maps_.push_back(Inverse(h));
  }
  for (const auto& g : presentation_.parabolics()) {
    symbol_maps_.push_back(g);
    symbol_maps_.push_back(Inverse(g));
  }

  const std::size_t total = 2 * n + 4 * static_cast<std::size_t>(m) * n * L;
  letters_.reserve(total);
  branch_.reserve(total);
  inverse_branch_.reserve(total);
  arcs_.reserve(total);
  winding_.reserve(total);

  for (int k = 0; k < 2 * n; ++k) {
    const DiscIsometry& h = symbol_maps_[k];
    letters_.push_back(Letter::Hyp(k));
    branch_.push_back(h);
    inverse_branch_.push_back(Inverse(h));
    arcs_.push_back(h.IsometricArc());
    winding_.push_back(0.0);
  }
  for (int i = 0; i < m; ++i) {
    for (int s = 0; s < 2; ++s) {
      const DiscIsometry& gamma = symbol_maps_[2 * n + 2 * i + s];
      // gamma^p by repeated squaring, one power per row of the block.
      for (int p = 1; p <= L; ++p) {
        const DiscIsometry gp = Power(gamma, p);
        const DiscIsometry gp_inv = Inverse(gp);
        for (int k = 0; k < 2 * n; ++k) {
          const DiscIsometry& h = symbol_maps_[k];
          letters_.push_back(Letter::Par(i, s == 0 ? +1 : -1, p, k));
          const DiscIsometry br = Compose(h, gp);
          branch_.push_back(br);
          inverse_branch_.push_back(Inverse(br));
          arcs_.push_back(gp_inv.ApplyArc(h.IsometricArc()));
          winding_.push_back(p - 1);
        }
      }
    }
  }
}

int TruncatedAlphabet::IndexOf(const Letter& letter) const {
  const int n2 = 2 * n();
  if (!letter.is_par()) return letter.terminal;
  const int s = letter.sign < 0 ? 1 : 0;
  return n2 + ((letter.cusp * 2 + s) * L_ + (letter.power - 1)) * n2 +
         letter.terminal;
}

const DiscIsometry& TruncatedAlphabet::SymbolMap(const Symbol& s) const {
  return symbol_maps_[s.parabolic ? 2 * n() + s.index : s.index];
}

TruncatedAlphabet BuildAlphabet(const GroupPresentation& presentation, int L) {
  return TruncatedAlphabet(presentation, L);
}

bool AdmissibleGeometric(const TruncatedAlphabet& alphabet, int a, int b) {
  const BoundaryArc image = alphabet.branch(a).ApplyArc(alphabet.arc(a));
  return image.ContainsArc(alphabet.arc(b), kInclusionSlack);
}

BoundaryArc CylinderArc(const TruncatedAlphabet& alphabet, const Word& word) {
  if (word.empty()) throw std::invalid_argument("CylinderArc: empty word");
  for (std::size_t k = 0; k + 1 < word.size(); ++k) {
    if (!alphabet.Admissible(word[k], word[k + 1])) {
      throw std::invalid_argument(
          "CylinderArc: inadmissible junction at position " +
          std::to_string(k) + " (" +
          alphabet.letter(word[k]).ToString(alphabet.presentation()) + " -> " +
          alphabet.letter(word[k + 1]).ToString(alphabet.presentation()) + ")");
    }
  }
  BoundaryArc arc = alphabet.arc(word.back());
  for (std::size_t k = word.size() - 1; k-- > 0;) {
    arc = alphabet.inverse_branch(word[k]).ApplyArc(arc);
  }
  return arc;
}

std::pair<double, double> LogDerivRange(const TruncatedAlphabet& alphabet,
                                        const Word& word) {
  return LogDerivativeRange(alphabet.branch(word.front()),
                            CylinderArc(alphabet, word));
}

double RepPoint(const TruncatedAlphabet& alphabet, const Word& word) {
  return CylinderArc(alphabet, word).mid();
}

int FindConnector(const TruncatedAlphabet& alphabet, int a, int b) {
  for (int c = 0; c < alphabet.size(); ++c) {
    if (alphabet.Admissible(a, c) && alphabet.Admissible(c, b)) return c;
  }
  return -1;
}

}  // namespace cuspwind
