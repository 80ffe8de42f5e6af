#pragma once

// Polarised representations (rho, chi, pairing matrix A) with
// rho^c = A rho^dual A^{-1} chi on Gamma_0 and A = -chi(c~) A^t,
// Schur-based sign computation, polarisation constructors and the
// multiplicity-one sign extraction.

#include "galois.hpp"

namespace cgu {

struct PolarisationError : std::runtime_error {
  explicit PolarisationError(const std::string& m) : std::runtime_error(m) {}
};

// a character given on Gamma_0 only (indexed over the whole group for
// convenience; off-subgroup entries are ignored)
template <class F>
class CharOnGamma0 {
 public:
  CharOnGamma0(std::shared_ptr<const GaloisModel> model, std::vector<F> values)
      : model_(std::move(model)), values_(std::move(values)) {
    for (int a : model_->gamma0_elements()) {
      if (values_[a].is_zero())
        throw GroupError("character value is zero on gamma0");
      for (int b : model_->gamma0_elements())
        if (values_[model_->mul(a, b)] != values_[a] * values_[b])
          throw GroupError("gamma0 character is not multiplicative");
    }
  }
  static CharOnGamma0 trivial(std::shared_ptr<const GaloisModel> model,
                              const FieldCtx<F>& ctx) {
    std::vector<F> v(model->order(), FieldTraits<F>::from_int(ctx, 1));
    return CharOnGamma0(std::move(model), std::move(v));
  }
  static CharOnGamma0 restrict_from(const CharacterTable<F>& chi) {
    std::vector<F> v;
    v.reserve(chi.model().order());
    for (int g = 0; g < chi.model().order(); ++g) v.push_back(chi.at(g));
    return CharOnGamma0(chi.model_ptr(), std::move(v));
  }
  const GaloisModel& model() const { return *model_; }
  std::shared_ptr<const GaloisModel> model_ptr() const { return model_; }
  const F& at(int g) const {
    if (!model_->in_gamma0(g))
      throw GroupError("gamma0 character evaluated off gamma0");
    return values_[g];
  }
  bool is_c_invariant() const {
    for (int g : model_->gamma0_elements())
      if (values_[model_->c_conj(g)] != values_[g]) return false;
    return true;
  }

 private:
  std::shared_ptr<const GaloisModel> model_;
  std::vector<F> values_;
};

template <class F>
struct PolarisedRep {
  Rep<F> rho;
  CharacterTable<F> chi;  // on all of Gamma
  Matrix<F> A;            // pairing <x,y> = x^t A^{-1} y

  // sign := -chi(c~)
  F sign() const { return -chi.at(rho.model().c_tilde()); }
};

struct PolarisationCheck {
  bool ok = true;
  std::string detail;
};

template <class F>
PolarisationCheck validate_polarised(const PolarisedRep<F>& P) {
  const auto& m = P.rho.model();
  const auto& ctx = P.rho.context();
  auto one = FieldTraits<F>::from_int(ctx, 1);
  F chic = P.chi.at(m.c_tilde());
  if (chic * chic != one)
    return {false, "chi(c~) is not a square root of 1"};
  if (P.A != P.A.transpose() * (-chic))
    return {false, "A != -chi(c~) A^t"};
  auto Ainv = P.A.inverse();
  if (!Ainv) return {false, "pairing matrix A is singular"};
  auto rho_c = conjugate_rep(P.rho);
  auto rho_d = dual_rep(P.rho);
  for (int g : m.gamma0_elements()) {
    if (rho_c.at(g) != P.A * rho_d.at(g) * *Ainv * P.chi.at(g))
      return {false,
              "pairing identity fails at element " + std::to_string(g)};
  }
  return {true, ""};
}

template <class F>
struct SchurSign {
  int lambda = 0;  // +1 or -1
  Matrix<F> A;
  std::string certification;
};

namespace detail {

// dimension of {T : X_i T = T Y_i}, T of shape rows x cols
template <class F>
std::vector<Matrix<F>> hom_space(const std::vector<Matrix<F>>& X,
                                 const std::vector<Matrix<F>>& Y,
                                 std::size_t rows, std::size_t cols) {
  if (X.empty()) throw FieldError("hom_space: empty sequences");
  const auto& ctx = X[0].context();
  auto zero = FieldTraits<F>::from_int(ctx, 0);
  std::vector<std::vector<F>> eqs;
  for (std::size_t t = 0; t < X.size(); ++t) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        std::vector<F> eq(rows * cols, zero);
        // (X T - T Y)_{rc} = 0
        for (std::size_t k = 0; k < rows; ++k)
          eq[k * cols + c] = eq[k * cols + c] + X[t].at(r, k);
        for (std::size_t k = 0; k < cols; ++k)
          eq[r * cols + k] = eq[r * cols + k] - Y[t].at(k, c);
        eqs.push_back(std::move(eq));
      }
  }
  auto basis = kernel_basis(std::move(eqs), rows * cols, ctx);
  std::vector<Matrix<F>> out;
  for (auto& v : basis)
    out.push_back(cgu::detail::primitive_scale(
        Matrix<F>(ctx, rows, cols, std::move(v))));
  return out;
}

template <class F>
std::vector<Matrix<F>> gamma0_images(const Rep<F>& rho) {
  std::vector<Matrix<F>> v;
  for (int g : rho.model().gamma0_elements()) v.push_back(rho.at(g));
  return v;
}

// first nonzero entry scaled to 1, row-major
template <class F>
Matrix<F> normalize_leading(const Matrix<F>& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!m.at(i, j).is_zero()) return m * m.at(i, j).inverse();
  return m;
}

// invertible element of a matrix subspace, deterministic; nullopt when the
// generic determinant vanishes identically or the field is too small
template <class F>
std::optional<Matrix<F>> invertible_in_span(
    const std::vector<Matrix<F>>& basis) {
  if (basis.empty()) return std::nullopt;
  const auto& ctx = basis[0].context();
  std::size_t n = basis[0].rows(), d = basis.size();
  std::vector<std::vector<MultiPoly<F>>> sym(
      n, std::vector<MultiPoly<F>>(n, MultiPoly<F>(ctx, d)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t b = 0; b < d; ++b)
        if (!basis[b].at(i, j).is_zero())
          sym[i][j] = sym[i][j] +
                      MultiPoly<F>::variable(ctx, d, b) * basis[b].at(i, j);
  auto P = symbolic_det(sym, ctx, d);
  if (P.is_zero()) return std::nullopt;
  auto point = nonvanishing_point(P);
  if (!point) return std::nullopt;
  Matrix<F> A(ctx, n, n);
  for (std::size_t b = 0; b < d; ++b) A = A + basis[b] * (*point)[b];
  return A;
}

}  // namespace detail

// The Bellaiche-Chenevier sign: the symmetry type of the intertwiner
// between rho^c and rho^dual * chi.  The space must carry a single
// symmetry type and contain an invertible element; dimension one is the
// classical Schur situation, but fixtures with abelian Gamma_0 produce
// higher-dimensional spaces of uniform symmetry and are accepted.
template <class F>
SchurSign<F> schur_sign(const Rep<F>& rho, const CharOnGamma0<F>& chi0) {
  const auto& m = rho.model();
  const auto& ctx = rho.context();
  auto rho_c = conjugate_rep(rho);
  auto rho_d = dual_rep(rho);
  std::vector<Matrix<F>> X, Y;
  for (int g : m.gamma0_elements()) {
    X.push_back(rho_c.at(g));
    Y.push_back(rho_d.at(g) * chi0.at(g));
  }
  auto T = intertwiner_space(X, Y);  // {A : A (rho^dual chi) = rho^c A}
  if (T.empty())
    throw PolarisationError(
        "not conjugate self-dual with this character (intertwiner "
        "dimension 0)");
  bool all_sym = true, all_anti = true;
  for (const auto& B : T) {
    if (B != B.transpose()) all_sym = false;
    if (B != -B.transpose()) all_anti = false;
  }
  if (!all_sym && !all_anti)
    throw PolarisationError(
        "intertwiner space has mixed symmetry (dimension " +
        std::to_string(T.size()) + "): not irreducible, or multiplicity");
  auto inv = detail::invertible_in_span(T);
  if (!inv)
    throw PolarisationError(
        "intertwiner space contains no invertible element");
  SchurSign<F> out;
  out.lambda = all_sym ? +1 : -1;
  out.A = detail::normalize_leading(*inv);
  auto endo = intertwiner_space(detail::gamma0_images(rho),
                                detail::gamma0_images(rho));
  out.certification = (endo.size() == 1)
                          ? "schur (End = scalars)"
                          : "uniform symmetry on an intertwiner space of "
                            "dimension " +
                                std::to_string(T.size());
  return out;
}

// extend chi0 to Gamma with chi(c~) = -lambda and pair with the Schur A
template <class F>
PolarisedRep<F> polarise_irreducible(const Rep<F>& rho,
                                     const CharOnGamma0<F>& chi0) {
  const auto& m = rho.model();
  const auto& ctx = rho.context();
  auto fi = [&](std::int64_t v) { return FieldTraits<F>::from_int(ctx, v); };
  auto ss = schur_sign(rho, chi0);
  if (!chi0.is_c_invariant())
    throw PolarisationError("chi0 is not conjugation-invariant");
  F chic = fi(-ss.lambda);
  int csq = m.mul(m.c_tilde(), m.c_tilde());
  if (chi0.at(csq) != chic * chic)
    throw PolarisationError(
        "no extension with chi(c~) = -lambda exists: chi0(c~^2) != 1");
  std::vector<F> values(m.order(), fi(1));
  for (int g = 0; g < m.order(); ++g) {
    if (m.in_gamma0(g))
      values[g] = chi0.at(g);
    else
      values[g] = chic * chi0.at(m.mul(m.inv(m.c_tilde()), g));
  }
  PolarisedRep<F> P{rho, CharacterTable<F>(rho.model_ptr(), std::move(values)),
                    ss.A};
  auto check = validate_polarised(P);
  if (!check.ok)
    throw PolarisationError("constructed polarisation fails validation: " +
                            check.detail);
  return P;
}

template <class F>
struct Summand {
  Rep<F> rep;
  bool self_dual = false;  // false: contributes rep + (rep^c)^dual chi
};

// block-diagonal polarisation of a semisimple bundle; all self-dual
// summands must have one common sign
template <class F>
PolarisedRep<F> polarise_semisimple(const std::vector<Summand<F>>& summands,
                                    const CharOnGamma0<F>& chi0,
                                    int requested_sign = +1) {
  if (summands.empty()) throw PolarisationError("no summands");
  auto model = summands[0].rep.model_ptr();
  const auto& ctx = summands[0].rep.context();
  auto fi = [&](std::int64_t v) { return FieldTraits<F>::from_int(ctx, v); };

  int lambda = 0;
  std::vector<std::optional<SchurSign<F>>> schur(summands.size());
  for (std::size_t i = 0; i < summands.size(); ++i) {
    if (!summands[i].self_dual) continue;
    schur[i] = schur_sign(summands[i].rep, chi0);
    if (lambda == 0) {
      lambda = schur[i]->lambda;
    } else if (lambda != schur[i]->lambda) {
      throw PolarisationError(
          "self-dual summands carry different signs; no polarisation");
    }
  }
  if (lambda == 0) lambda = requested_sign;
  F chic = fi(-lambda);

  // assemble rho and A block by block
  std::optional<Rep<F>> rho;
  std::vector<std::pair<Matrix<F>, bool>> blocks;  // (block of A, is_pair)
  const auto& m = *model;
  for (std::size_t i = 0; i < summands.size(); ++i) {
    const Rep<F>& s = summands[i].rep;
    if (summands[i].self_dual) {
      rho = rho ? direct_sum(*rho, s) : s;
      blocks.emplace_back(schur[i]->A, false);
    } else {
      // t := (s^c)^dual * chi0 on Gamma_0
      auto t_base = dual_rep(conjugate_rep(s));
      std::vector<Matrix<F>> im(m.order(), Matrix<F>(ctx, 0, 0));
      for (int g : m.gamma0_elements()) im[g] = t_base.at(g) * chi0.at(g);
      Rep<F> t(model, s.dim(), std::move(im));
      auto pair = direct_sum(s, t);
      rho = rho ? direct_sum(*rho, pair) : pair;
      // antidiagonal block [[0, lambda I], [I, 0]]
      std::size_t d = s.dim();
      Matrix<F> blk(ctx, 2 * d, 2 * d);
      for (std::size_t k = 0; k < d; ++k) {
        blk.at(k, d + k) = fi(lambda);
        blk.at(d + k, k) = fi(1);
      }
      blocks.emplace_back(std::move(blk), true);
    }
  }
  std::size_t n = rho->dim();
  Matrix<F> A(ctx, n, n);
  std::size_t off = 0;
  for (auto& [blk, is_pair] : blocks) {
    for (std::size_t r = 0; r < blk.rows(); ++r)
      for (std::size_t c = 0; c < blk.cols(); ++c)
        A.at(off + r, off + c) = blk.at(r, c);
    off += blk.rows();
  }

  int csq = m.mul(m.c_tilde(), m.c_tilde());
  if (chi0.at(csq) != chic * chic)
    throw PolarisationError("no extension with the required chi(c~) exists");
  std::vector<F> values(m.order(), fi(1));
  for (int g = 0; g < m.order(); ++g) {
    if (m.in_gamma0(g))
      values[g] = chi0.at(g);
    else
      values[g] = chic * chi0.at(m.mul(m.inv(m.c_tilde()), g));
  }
  PolarisedRep<F> P{*rho, CharacterTable<F>(model, std::move(values)), A};
  auto check = validate_polarised(P);
  if (!check.ok)
    throw PolarisationError("constructed polarisation fails validation: " +
                            check.detail);
  return P;
}

// sign of a multiplicity-one conjugate self-dual constituent, extracted
// from the diagonal block of the pairing on its isotypic component;
// nullopt when the multiplicity is not one
template <class F>
std::optional<int> multiplicity_one_sign(const PolarisedRep<F>& P,
                                         const Rep<F>& r) {
  const auto& m = P.rho.model();
  const auto& ctx = P.rho.context();
  is_semisimple(P.rho);  // Maschke gate
  auto r_imgs = detail::gamma0_images(r);
  auto endo = intertwiner_space(r_imgs, r_imgs);
  if (endo.size() != 1)
    throw PolarisationError("constituent is not absolutely irreducible");
  // multiplicity = dim Hom(r, rho)
  auto homs = detail::hom_space(detail::gamma0_images(P.rho), r_imgs,
                                P.rho.dim(), r.dim());
  if (homs.empty())
    throw PolarisationError("constituent does not occur in the bundle");
  if (homs.size() != 1) return std::nullopt;  // multiplicity >= 2

  // r must be conjugate self-dual with respect to P's chi
  auto r_c = conjugate_rep(r);
  auto r_d = dual_rep(r);
  std::vector<Matrix<F>> X, Y;
  for (int g : m.gamma0_elements()) {
    X.push_back(r_c.at(g));
    Y.push_back(r_d.at(g) * P.chi.at(g));
  }
  if (intertwiner_space(X, Y).empty())
    throw PolarisationError(
        "constituent is not conjugate self-dual for the bundle character");

  // isotypic projector via the central idempotent of r
  auto fi = [&](std::int64_t v) { return FieldTraits<F>::from_int(ctx, v); };
  F scale = fi(static_cast<std::int64_t>(r.dim())) *
            fi(static_cast<std::int64_t>(m.gamma0_elements().size())).inverse();
  Matrix<F> proj(ctx, P.rho.dim(), P.rho.dim());
  for (int g : m.gamma0_elements())
    proj = proj + P.rho.at(g) * r.at(m.inv(g)).trace();
  proj = proj * scale;
  // column-space basis of the projector = the isotypic subspace
  std::vector<std::vector<F>> cols;
  for (std::size_t j = 0; j < proj.cols(); ++j) {
    std::vector<F> col(proj.rows());
    for (std::size_t i = 0; i < proj.rows(); ++i) col[i] = proj.at(i, j);
    cols.push_back(std::move(col));
  }
  auto pivots = rref_in_place(cols, ctx);
  (void)pivots;
  // rows of the reduced matrix span the column space (as row vectors)
  std::size_t iso_dim = cols.size();
  if (iso_dim != r.dim())
    throw PolarisationError("isotypic dimension does not match multiplicity "
                            "one");
  Matrix<F> S(ctx, P.rho.dim(), iso_dim);
  for (std::size_t k = 0; k < iso_dim; ++k)
    for (std::size_t i = 0; i < P.rho.dim(); ++i) S.at(i, k) = cols[k][i];
  // restrict the pairing form B = A^{-1}
  auto B = P.A.inverse_or_throw();
  Matrix<F> Br = S.transpose() * B * S;
  if (!Br.inverse())
    throw PolarisationError(
        "pairing degenerates on the isotypic component");
  if (Br == Br.transpose()) return +1;
  if (Br == -Br.transpose()) return -1;
  throw PolarisationError("restricted pairing has no symmetry type");
}

// both polarisations of r + r for a sign -1 constituent: diag(B, B) with
// sign -1 and the antidiagonal [[0,-B],[B,0]] with sign +1
template <class F>
std::pair<PolarisedRep<F>, PolarisedRep<F>> distinct_warning_pair(
    const Rep<F>& r, const CharOnGamma0<F>& chi0) {
  const auto& m = r.model();
  const auto& ctx = r.context();
  auto fi = [&](std::int64_t v) { return FieldTraits<F>::from_int(ctx, v); };
  auto ss = schur_sign(r, chi0);
  if (ss.lambda != -1)
    throw PolarisationError(
        "distinct_warning_pair needs a sign -1 constituent");
  const Matrix<F>& Bm = ss.A;
  auto rho = direct_sum(r, r);
  std::size_t d = r.dim(), n = 2 * d;

  auto extend = [&](int chic_sign) {
    int csq = m.mul(m.c_tilde(), m.c_tilde());
    if (chi0.at(csq) != fi(1))
      throw PolarisationError("chi0(c~^2) != 1; extension unavailable");
    std::vector<F> values(m.order(), fi(1));
    for (int g = 0; g < m.order(); ++g) {
      if (m.in_gamma0(g))
        values[g] = chi0.at(g);
      else
        values[g] =
            fi(chic_sign) * chi0.at(m.mul(m.inv(m.c_tilde()), g));
    }
    return CharacterTable<F>(r.model_ptr(), std::move(values));
  };

  Matrix<F> A1(ctx, n, n);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      A1.at(i, j) = Bm.at(i, j);
      A1.at(d + i, d + j) = Bm.at(i, j);
    }
  PolarisedRep<F> P1{rho, extend(+1), A1};  // sign -1

  Matrix<F> A2(ctx, n, n);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      A2.at(i, d + j) = -Bm.at(i, j);
      A2.at(d + i, j) = Bm.at(i, j);
    }
  PolarisedRep<F> P2{rho, extend(-1), A2};  // sign +1

  auto c1 = validate_polarised(P1);
  auto c2 = validate_polarised(P2);
  if (!c1.ok || !c2.ok)
    throw PolarisationError("distinct_warning_pair validation failed: " +
                            c1.detail + " / " + c2.detail);
  return {P1, P2};
}

}  // namespace cgu
