#include "twistorlab/exterior.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

#include "twistorlab/error.hpp"

namespace twistorlab {
namespace {

using Mask = ComplexForm::Mask;

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxFormDim) {
    throw Error("basis dimension out of range: " + std::to_string(dim));
  }
}

// Sign of ε^A ∧ ε^B relative to ε^{A∪B}: the number of transpositions a bubble
// sort needs, i.e. pairs (i in A, j in B) with i > j.
int merge_sign(Mask a, Mask b) {
  int swaps = 0;
  for (Mask rest = b; rest != 0; rest &= rest - 1) {
    const int j = std::countr_zero(rest);
    const Mask above = a & ~((Mask{2} << j) - 1);
    swaps += std::popcount(above);
  }
  return (swaps % 2 == 0) ? 1 : -1;
}

}  // namespace

ComplexForm::ComplexForm(int dim, int degree) : dim_(dim), degree_(degree) {
  check_dim(dim);
  if (degree < 0) throw Error("negative form degree");
}

ComplexForm ComplexForm::scalar(int dim, Complex value) {
  return from_terms(dim, 0, {{0, value}});
}

ComplexForm ComplexForm::basis(int dim, std::initializer_list<int> indices, Complex coeff) {
  return basis(dim, std::span<const int>(indices.begin(), indices.size()), coeff);
}

ComplexForm ComplexForm::basis(int dim, std::span<const int> indices, Complex coeff) {
  check_dim(dim);
  Mask mask = 0;
  int sign = 1;
  for (int idx : indices) {
    if (idx < 0 || idx >= dim) throw Error("basis index out of range");
    const Mask bit = Mask{1} << idx;
    if (mask & bit) return ComplexForm(dim, static_cast<int>(indices.size()));
    sign *= merge_sign(mask, bit);
    mask |= bit;
  }
  return from_terms(dim, static_cast<int>(indices.size()), {{mask, coeff * double(sign)}});
}

ComplexForm ComplexForm::one_form(std::span<const Complex> coeffs) {
  const int dim = static_cast<int>(coeffs.size());
  std::vector<Term> raw;
  for (int j = 0; j < dim; ++j) raw.push_back({Mask{1} << j, coeffs[j]});
  return from_terms(dim, 1, std::move(raw));
}

ComplexForm ComplexForm::one_form(const Eigen::VectorXcd& coeffs) {
  return one_form(std::span<const Complex>(coeffs.data(), coeffs.size()));
}

ComplexForm ComplexForm::two_form(const Eigen::MatrixXcd& comps) {
  const int dim = static_cast<int>(comps.rows());
  std::vector<Term> raw;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) raw.push_back({(Mask{1} << i) | (Mask{1} << j), comps(i, j)});
  return from_terms(dim, 2, std::move(raw));
}

ComplexForm ComplexForm::from_terms(int dim, int degree, std::vector<Term> raw) {
  ComplexForm out(dim, degree);
  out.terms_ = std::move(raw);
  out.normalize();
  return out;
}

void ComplexForm::normalize() {
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.mask < b.mask; });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (const Term& t : terms_) {
    if (!merged.empty() && merged.back().mask == t.mask) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return std::abs(t.coeff) < kZeroThreshold; });
  terms_ = std::move(merged);
}

Complex ComplexForm::coeff(std::initializer_list<int> increasing_indices) const {
  Mask mask = 0;
  int prev = -1;
  for (int idx : increasing_indices) {
    if (idx <= prev) throw Error("coefficient lookup requires strictly increasing indices");
    mask |= Mask{1} << idx;
    prev = idx;
  }
  return coeff_mask(mask);
}

Complex ComplexForm::coeff_mask(Mask mask) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), mask,
                             [](const Term& t, Mask m) { return t.mask < m; });
  return (it != terms_.end() && it->mask == mask) ? it->coeff : Complex{};
}

double ComplexForm::norm() const {
  double s = 0.0;
  for (const Term& t : terms_) s += std::norm(t.coeff);
  return std::sqrt(s);
}

double ComplexForm::max_abs() const {
  double m = 0.0;
  for (const Term& t : terms_) m = std::max(m, std::abs(t.coeff));
  return m;
}

ComplexForm ComplexForm::conj() const {
  ComplexForm out = *this;
  for (Term& t : out.terms_) t.coeff = std::conj(t.coeff);
  return out;
}

ComplexForm ComplexForm::conjugate(std::span<const int> involution) const {
  if (static_cast<int>(involution.size()) != dim_) throw Error("basis dimension mismatch");
  ComplexForm out(dim_, degree_);
  std::vector<int> image;
  for (const Term& t : terms_) {
    image.clear();
    for (int idx : indices_of(t.mask)) image.push_back(involution[idx]);
    out += basis(dim_, std::span<const int>(image), std::conj(t.coeff));
  }
  return out;
}

Complex ComplexForm::evaluate(std::span<const Eigen::VectorXcd> vectors) const {
  const int k = static_cast<int>(vectors.size());
  if (k != degree_) throw Error("evaluation needs exactly degree-many vectors");
  for (const auto& v : vectors)
    if (v.size() != dim_) throw Error("basis dimension mismatch");
  if (k == 0) return terms_.empty() ? Complex{} : terms_.front().coeff;
  Complex total{};
  Eigen::MatrixXcd block(k, k);
  for (const Term& t : terms_) {
    const auto idx = indices_of(t.mask);
    for (int r = 0; r < k; ++r)
      for (int s = 0; s < k; ++s) block(r, s) = vectors[s](idx[r]);
    total += t.coeff * block.determinant();
  }
  return total;
}

ComplexForm& ComplexForm::operator+=(const ComplexForm& other) {
  if (other.dim_ != dim_) throw Error("basis dimension mismatch");
  if (other.terms_.empty()) return *this;
  if (terms_.empty()) degree_ = other.degree_;
  if (other.degree_ != degree_) throw Error("cannot add forms of different degree");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  normalize();
  return *this;
}

ComplexForm& ComplexForm::operator-=(const ComplexForm& other) { return *this += -1.0 * other; }

ComplexForm& ComplexForm::operator*=(Complex s) {
  for (Term& t : terms_) t.coeff *= s;
  normalize();
  return *this;
}

std::vector<int> ComplexForm::indices_of(Mask mask) {
  std::vector<int> out;
  for (Mask rest = mask; rest != 0; rest &= rest - 1) out.push_back(std::countr_zero(rest));
  return out;
}

std::string ComplexForm::to_string(std::span<const std::string> basis_names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(6);
  bool first = true;
  for (const Term& t : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << t.coeff.real() << (t.coeff.imag() < 0 ? "" : "+") << t.coeff.imag() << "i)";
    for (int idx : indices_of(t.mask)) {
      os << (degree_ > 0 ? " " : "");
      if (idx < static_cast<int>(basis_names.size())) {
        os << basis_names[idx];
      } else {
        os << "e" << idx;
      }
    }
  }
  return os.str();
}

bool approx_equal(const ComplexForm& a, const ComplexForm& b, double tol) {
  if (a.dim() != b.dim()) throw Error("basis dimension mismatch");
  if (a.degree() != b.degree()) return a.norm() <= tol && b.norm() <= tol;
  return (a - b).norm() <= tol;
}

ComplexForm wedge(const ComplexForm& a, const ComplexForm& b) {
  if (a.dim() != b.dim()) throw Error("basis dimension mismatch");
  const int degree = a.degree() + b.degree();
  if (degree > a.dim()) return ComplexForm(a.dim(), std::min(degree, a.dim()));
  std::vector<ComplexForm::Term> raw;
  raw.reserve(a.terms().size() * b.terms().size());
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      if (ta.mask & tb.mask) continue;
      raw.push_back({ta.mask | tb.mask, ta.coeff * tb.coeff * double(merge_sign(ta.mask, tb.mask))});
    }
  }
  return ComplexForm::from_terms(a.dim(), degree, std::move(raw));
}

ComplexForm pullback(const ComplexForm& a, const Eigen::MatrixXcd& m) {
  if (m.rows() != a.dim()) throw Error("basis dimension mismatch");
  const int new_dim = static_cast<int>(m.cols());
  std::vector<ComplexForm> images;
  images.reserve(a.dim());
  for (int k = 0; k < a.dim(); ++k) images.push_back(ComplexForm::one_form(Eigen::VectorXcd(m.row(k).transpose())));
  ComplexForm out(new_dim, a.degree());
  for (const auto& t : a.terms()) {
    ComplexForm piece = ComplexForm::scalar(new_dim, t.coeff);
    for (int idx : ComplexForm::indices_of(t.mask)) piece = wedge(piece, images[idx]);
    out += piece;
  }
  return out;
}

ComplexForm hodge_star_4(const ComplexForm& a, int orientation) {
  if (a.dim() != 4) throw Error("hodge star defined only on 4-dim basis");
  if (orientation != 1 && orientation != -1) throw Error("orientation must be +1 or -1");
  constexpr Mask full = 0b1111;
  std::vector<ComplexForm::Term> raw;
  for (const auto& t : a.terms()) {
    const Mask comp = full & ~t.mask;
    raw.push_back({comp, t.coeff * double(merge_sign(t.mask, comp) * orientation)});
  }
  return ComplexForm::from_terms(4, 4 - a.degree(), std::move(raw));
}

SdAsdParts sd_asd_split(const ComplexForm& a) {
  if (a.dim() != 4) throw Error("hodge star defined only on 4-dim basis");
  if (a.degree() != 2) throw Error("split requires a 2-form");
  const ComplexForm star = hodge_star_4(a);
  return {0.5 * (a + star), 0.5 * (a - star)};
}

SdAsdBasis SdAsdBasis::standard() {
  const double r = 1.0 / std::sqrt(2.0);
  auto b = [](int i, int j) { return ComplexForm::basis(4, {i, j}); };
  SdAsdBasis out;
  out.plus = {r * (b(0, 1) + b(2, 3)), r * (b(0, 2) + b(3, 1)), r * (b(0, 3) + b(1, 2))};
  out.minus = {r * (b(0, 1) - b(2, 3)), r * (b(0, 2) - b(3, 1)), r * (b(0, 3) - b(1, 2))};
  return out;
}

std::array<ComplexForm, 6> SdAsdBasis::ordered() const {
  return {plus[0], plus[1], plus[2], minus[0], minus[1], minus[2]};
}

ComplexPairing ComplexPairing::split_halves(int dim) {
  if (dim % 2 != 0) throw Error("split_halves needs an even dimension");
  ComplexPairing p;
  for (int k = 0; k < dim / 2; ++k) p.pairs.emplace_back(k, k + dim / 2);
  return p;
}

std::vector<int> ComplexPairing::involution(int dim) const {
  std::vector<int> inv(dim, -1);
  for (auto [h, a] : pairs) {
    inv.at(h) = a;
    inv.at(a) = h;
  }
  if (std::find(inv.begin(), inv.end(), -1) != inv.end()) throw Error("pairing does not cover the basis");
  return inv;
}

BidegreeResult bidegree_project(const ComplexForm& a, const ComplexPairing& pairing, int p, int q) {
  if (p < 0 || q < 0 || p + q != a.degree()) return {ComplexForm(a.dim(), std::max(p + q, 0)), true};
  Mask holo = 0;
  Mask anti = 0;
  for (auto [h, c] : pairing.pairs) {
    holo |= Mask{1} << h;
    anti |= Mask{1} << c;
  }
  const Mask all = (a.dim() == 32) ? ~Mask{0} : ((Mask{1} << a.dim()) - 1);
  if ((holo | anti) != all || (holo & anti) != 0) throw Error("pairing does not cover the basis");
  std::vector<ComplexForm::Term> kept;
  for (const auto& t : a.terms()) {
    if (std::popcount(t.mask & holo) == p && std::popcount(t.mask & anti) == q) kept.push_back(t);
  }
  return {ComplexForm::from_terms(a.dim(), a.degree(), std::move(kept)), false};
}

}  // namespace twistorlab
