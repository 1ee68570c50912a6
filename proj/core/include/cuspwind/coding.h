#ifndef CUSPWIND_CODING_H_
#define CUSPWIND_CODING_H_

#include <string>
#include <utility>
#include <vector>

#include "cuspwind/moebius.h"
#include "cuspwind/schottky.h"

namespace cuspwind {

// A generator or inverse. Hyperbolic symbols are numbered 2j (h_j) and
// 2j+1 (h_j^-1); parabolic symbols 2i (gamma_i) and 2i+1 (gamma_i^-1).
struct Symbol {
  bool parabolic = false;
  int index = 0;

  int generator() const { return index / 2; }
  bool inverse() const { return (index & 1) != 0; }
  Symbol Inverted() const { return {parabolic, index ^ 1}; }
  bool operator==(const Symbol&) const = default;
};

enum class LetterKind { kHyp, kPar };

// One letter of the induced alphabet: either a hyperbolic symbol h, or the
// block gamma^p h with gamma = gamma_cusp^sign.
struct Letter {
  LetterKind kind = LetterKind::kHyp;
  int cusp = -1;     // parabolic generator index (Par only)
  int sign = +1;     // +1 for gamma, -1 for gamma^-1 (Par only)
  int power = 0;     // p >= 1 (Par only)
  int terminal = 0;  // hyperbolic symbol index of the last symbol

  static Letter Hyp(int terminal) { return {LetterKind::kHyp, -1, +1, 0, terminal}; }
  static Letter Par(int cusp, int sign, int power, int terminal) {
    return {LetterKind::kPar, cusp, sign, power, terminal};
  }

  bool is_par() const { return kind == LetterKind::kPar; }
  // Symbol word s_0 ... s_{tau-1}.
  std::vector<Symbol> Symbols() const;
  std::string ToString(const GroupPresentation& p) const;
  bool operator==(const Letter&) const = default;
};

// Inducing time: 1 for Hyp, p+1 for Par (the whole block is consumed).
int Tau(const Letter& letter);
// Cusp-winding vector in Z^m: p-1 in coordinate cusp for Par, 0 otherwise.
std::vector<double> CuspVector(const Letter& letter, int m);

// Combinatorial transition rule: false iff b is Hyp(h^-1) where h is the
// last symbol of a.
bool Admissible(const Letter& a, const Letter& b);

// Alphabet truncated at parabolic power L, with the per-letter geometry
// precomputed. Letters: the 2n Hyp letters (h_1, h_1^-1, h_2, ...), then the
// Par letters ordered by (cusp, sign [+ before -], power, terminal).
class TruncatedAlphabet {
 public:
  TruncatedAlphabet(GroupPresentation presentation, int L);

  const GroupPresentation& presentation() const { return presentation_; }
  int L() const { return L_; }
  int m() const { return presentation_.m(); }
  int n() const { return presentation_.n(); }
  int size() const { return static_cast<int>(letters_.size()); }

  const Letter& letter(int i) const { return letters_[i]; }
  const std::vector<Letter>& letters() const { return letters_; }
  int IndexOf(const Letter& letter) const;

  // The isometry attached to a symbol.
  const DiscIsometry& SymbolMap(const Symbol& s) const;

  // f-tilde on the cylinder of letter i, and its inverse.
  const DiscIsometry& branch(int i) const { return branch_[i]; }
  const DiscIsometry& inverse_branch(int i) const { return inverse_branch_[i]; }
  // Cylinder arc of the one-letter word [i].
  const BoundaryArc& arc(int i) const { return arcs_[i]; }
  // Cusp index of a Par letter (-1 for Hyp) and its winding value p-1.
  int cusp_of(int i) const { return letters_[i].is_par() ? letters_[i].cusp : -1; }
  double winding(int i) const { return winding_[i]; }

  bool Admissible(int a, int b) const {
    return !(!letters_[b].is_par() && letters_[b].terminal == (letters_[a].terminal ^ 1));
  }

 private:
  GroupPresentation presentation_;
  int L_;
  std::vector<Letter> letters_;
  std::vector<DiscIsometry> symbol_maps_;  // hyperbolic symbols, then parabolic
  std::vector<DiscIsometry> branch_;
  std::vector<DiscIsometry> inverse_branch_;
  std::vector<BoundaryArc> arcs_;
  std::vector<double> winding_;
};

// Throws std::invalid_argument for L < 1.
TruncatedAlphabet BuildAlphabet(const GroupPresentation& presentation, int L);

// Cylinder of a one-letter Par word computed from scratch: gamma^{-p} Delta(h).
BoundaryArc ParLetterArc(const DiscIsometry& gamma_signed, int power,
                         const DiscIsometry& terminal);

// Geometric transition test: arc([b]) inside branch(a)(arc([a])).
bool AdmissibleGeometric(const TruncatedAlphabet& alphabet, int a, int b);

using Word = std::vector<int>;

// Throws std::invalid_argument for an empty word or an inadmissible junction.
BoundaryArc CylinderArc(const TruncatedAlphabet& alphabet, const Word& word);
// Inf / sup of log|branch(word[0])'| over the cylinder of the word.
std::pair<double, double> LogDerivRange(const TruncatedAlphabet& alphabet,
                                        const Word& word);
// Midpoint of the cylinder arc.
double RepPoint(const TruncatedAlphabet& alphabet, const Word& word);

// A letter c with a -> c -> b admissible, or -1 if none exists.
int FindConnector(const TruncatedAlphabet& alphabet, int a, int b);

}  // namespace cuspwind

#endif  // CUSPWIND_CODING_H_
