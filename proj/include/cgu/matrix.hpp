#pragma once

// Exact matrix algebra over the coefficient structures of fields.hpp:
// products, inverses, characteristic polynomial coefficients, Pfaffians,
// intertwiner spaces, conjugacy solving and symmetric-congruence
// normalization.  Everything is deterministic; conjugacy certification
// uses polynomial-identity testing on a symbolic determinant rather than
// randomization.

#include <cassert>
#include <functional>
#include <map>
#include <optional>
#include <utility>

#include "fields.hpp"

namespace cgu {

struct SqrtNeeded : FieldError {
  std::int64_t conductor_hint;
  explicit SqrtNeeded(std::int64_t hint)
      : FieldError("required square root absent from field"),
        conductor_hint(hint) {}
};

template <class F>
class Matrix {
 public:
  using ctx_type = FieldCtx<F>;

  Matrix() : rows_(0), cols_(0) {}
  Matrix(ctx_type ctx, std::size_t rows, std::size_t cols)
      : ctx_(ctx),
        rows_(rows),
        cols_(cols),
        e_(rows * cols, FieldTraits<F>::from_int(ctx, 0)) {}
  Matrix(ctx_type ctx, std::size_t rows, std::size_t cols, std::vector<F> e)
      : ctx_(ctx), rows_(rows), cols_(cols), e_(std::move(e)) {
    if (e_.size() != rows_ * cols_)
      throw FieldError("matrix entry count does not match dimensions");
  }

  static Matrix identity(ctx_type ctx, std::size_t n) {
    Matrix m(ctx, n, n);
    for (std::size_t i = 0; i < n; ++i)
      m.at(i, i) = FieldTraits<F>::from_int(ctx, 1);
    return m;
  }
  static Matrix scalar(ctx_type ctx, std::size_t n, const F& v) {
    Matrix m(ctx, n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = v;
    return m;
  }

  const ctx_type& context() const { return ctx_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  F& at(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
  const F& at(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
  }
  bool operator!=(const Matrix& o) const { return !(*this == o); }

  Matrix operator+(const Matrix& o) const {
    require_same_shape(o);
    Matrix r(ctx_, rows_, cols_);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i] + o.e_[i];
    return r;
  }
  Matrix operator-(const Matrix& o) const {
    require_same_shape(o);
    Matrix r(ctx_, rows_, cols_);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i] - o.e_[i];
    return r;
  }
  Matrix operator-() const {
    Matrix r(ctx_, rows_, cols_);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = -e_[i];
    return r;
  }
  Matrix operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw FieldError("matrix product shape mismatch");
    Matrix r(ctx_, rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const F& a = at(i, k);
        if (a.is_zero()) continue;
        for (std::size_t j = 0; j < o.cols_; ++j)
          r.at(i, j) = r.at(i, j) + a * o.at(k, j);
      }
    return r;
  }
  Matrix operator*(const F& s) const {
    Matrix r(ctx_, rows_, cols_);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i] * s;
    return r;
  }

  Matrix transpose() const {
    Matrix r(ctx_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
  }

  bool is_zero() const {
    for (const auto& x : e_)
      if (!x.is_zero()) return false;
    return true;
  }
  bool is_symmetric() const { return is_square() && *this == transpose(); }
  bool is_antisymmetric() const {
    if (!is_square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      if (!at(i, i).is_zero()) return false;
    return *this == -transpose();
  }

  F trace() const {
    F t = FieldTraits<F>::from_int(ctx_, 0);
    for (std::size_t i = 0; i < rows_; ++i) t = t + at(i, i);
    return t;
  }

  // Gauss-Jordan with unit pivots; correct over fields and over the local
  // ring Z/l^M (a column without unit entries forces a non-unit determinant).
  std::optional<Matrix> inverse() const {
    if (!is_square()) throw FieldError("inverse of a non-square matrix");
    std::size_t n = rows_;
    Matrix a = *this;
    Matrix inv = identity(ctx_, n);
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = n;
      for (std::size_t r = col; r < n; ++r) {
        if (is_unit(a.at(r, col))) {
          piv = r;
          break;
        }
      }
      if (piv == n) return std::nullopt;
      if (piv != col) {
        a.swap_rows(piv, col);
        inv.swap_rows(piv, col);
      }
      F s = a.at(col, col).inverse();
      a.scale_row(col, s);
      inv.scale_row(col, s);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col || a.at(r, col).is_zero()) continue;
        F f = a.at(r, col);
        a.addmul_row(r, col, f);
        inv.addmul_row(r, col, f);
      }
    }
    return inv;
  }

  Matrix inverse_or_throw() const {
    auto inv = inverse();
    if (!inv) throw FieldError("matrix is singular");
    return *inv;
  }

  Matrix pow(std::int64_t k) const {
    if (!is_square()) throw FieldError("power of a non-square matrix");
    Matrix base = *this;
    if (k < 0) {
      base = base.inverse_or_throw();
      k = -k;
    }
    Matrix r = identity(ctx_, rows_);
    while (k) {
      if (k & 1) r = r * base;
      base = base * base;
      k >>= 1;
    }
    return r;
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i) s += ";";
      for (std::size_t j = 0; j < cols_; ++j) {
        if (j) s += ",";
        s += at(i, j).to_string();
      }
    }
    return s + "]";
  }

 private:
  static bool is_unit(const F& x) {
    if constexpr (std::is_same_v<F, TruncatedLAdic>)
      return x.is_unit();
    else
      return !x.is_zero();
  }
  void require_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw FieldError("matrix shape mismatch");
  }
  void swap_rows(std::size_t a, std::size_t b) {
    for (std::size_t j = 0; j < cols_; ++j) std::swap(at(a, j), at(b, j));
  }
  void scale_row(std::size_t r, const F& s) {
    for (std::size_t j = 0; j < cols_; ++j) at(r, j) = at(r, j) * s;
  }
  void addmul_row(std::size_t r, std::size_t src, const F& f) {
    for (std::size_t j = 0; j < cols_; ++j)
      at(r, j) = at(r, j) - f * at(src, j);
  }

  ctx_type ctx_;
  std::size_t rows_, cols_;
  std::vector<F> e_;
};

// Phi_n: entry (i,j) = (-1)^{i+1} when i = n-j+1, else 0 (1-based indices).
template <class F>
Matrix<F> phi_matrix(const FieldCtx<F>& ctx, std::size_t n) {
  if (n < 1) throw FieldError("phi_matrix needs n >= 1");
  Matrix<F> m(ctx, n, n);
  for (std::size_t i = 1; i <= n; ++i) {
    std::size_t j = n - i + 1;
    m.at(i - 1, j - 1) = FieldTraits<F>::from_int(ctx, (i % 2 == 1) ? 1 : -1);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Characteristic polynomial (Berkowitz, division-free) and determinant
// ---------------------------------------------------------------------------

template <class F>
struct CharPolyCoeffs {
  // s_1..s_n with char(t) = t^n - s_1 t^{n-1} + ... + (-1)^n s_n
  std::vector<F> s;
};

template <class F>
CharPolyCoeffs<F> char_poly_coeffs(const Matrix<F>& m) {
  if (!m.is_square()) throw FieldError("char poly of a non-square matrix");
  const auto& ctx = m.context();
  std::size_t n = m.rows();
  auto fi = [&](std::int64_t v) { return FieldTraits<F>::from_int(ctx, v); };
  if (n == 0) return {{}};
  // V holds coefficients of det(tI - A_k) for the leading principal minor
  std::vector<F> V{fi(1), -m.at(0, 0)};
  for (std::size_t k = 2; k <= n; ++k) {
    // partition the k x k principal minor
    std::vector<F> coeffs{fi(1), -m.at(k - 1, k - 1)};
    std::vector<F> P(k - 1);
    for (std::size_t i = 0; i < k - 1; ++i) P[i] = m.at(i, k - 1);
    for (std::size_t i = 2; i <= k; ++i) {
      if (i > 2) {
        std::vector<F> Q(k - 1, fi(0));
        for (std::size_t r = 0; r < k - 1; ++r)
          for (std::size_t c = 0; c < k - 1; ++c)
            Q[r] = Q[r] + m.at(r, c) * P[c];
        P = std::move(Q);
      }
      F rp = fi(0);
      for (std::size_t c = 0; c < k - 1; ++c)
        rp = rp + m.at(k - 1, c) * P[c];
      coeffs.push_back(-rp);
    }
    std::vector<F> newV(k + 1, fi(0));
    for (std::size_t i = 0; i <= k; ++i)
      for (std::size_t j = 0; j < V.size(); ++j) {
        if (i < j || i - j >= coeffs.size()) continue;
        newV[i] = newV[i] + coeffs[i - j] * V[j];
      }
    V = std::move(newV);
  }
  CharPolyCoeffs<F> out;
  out.s.resize(n);
  F sign = fi(-1);
  for (std::size_t i = 1; i <= n; ++i) {
    out.s[i - 1] = sign * V[i];
    sign = -sign;
  }
  // out.s[i-1] = (-1)^i * V[i]
  return out;
}

template <class F>
F det(const Matrix<F>& m) {
  if (m.rows() == 0)
    return FieldTraits<F>::from_int(m.context(), 1);
  auto cp = char_poly_coeffs(m);
  return cp.s.back();
}

// ---------------------------------------------------------------------------
// Pfaffian by recursive expansion along the first row
// ---------------------------------------------------------------------------

template <class F>
F pfaffian(const Matrix<F>& m) {
  if (!m.is_square() || m.rows() % 2 != 0)
    throw FieldError("pfaffian needs an even-dimensional square matrix");
  if (!m.is_antisymmetric())
    throw FieldError("pfaffian needs an antisymmetric matrix");
  const auto& ctx = m.context();
  std::size_t n = m.rows();
  if (n == 0) return FieldTraits<F>::from_int(ctx, 1);
  if (n > 30) throw FieldError("pfaffian: dimension out of scope");
  // expansion along the lowest remaining row, memoized on the subset of
  // remaining indices
  std::map<std::uint32_t, F> memo;
  std::function<F(std::uint32_t)> rec = [&](std::uint32_t mask) -> F {
    if (mask == 0) return FieldTraits<F>::from_int(ctx, 1);
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    std::size_t first = 0;
    while (!(mask & (1u << first))) ++first;
    std::uint32_t rest = mask & ~(1u << first);
    F acc = FieldTraits<F>::from_int(ctx, 0);
    int parity = 0;  // counts remaining indices skipped before j
    for (std::size_t j = first + 1; j < n; ++j) {
      if (!(rest & (1u << j))) continue;
      const F& a = m.at(first, j);
      if (!a.is_zero()) {
        F term = a * rec(rest & ~(1u << j));
        acc = (parity % 2 == 0) ? acc + term : acc - term;
      }
      ++parity;
    }
    memo.emplace(mask, acc);
    return acc;
  };
  return rec((n >= 32) ? ~0u : ((1u << n) - 1u));
}

// ---------------------------------------------------------------------------
// Intertwiner spaces and kernels
// ---------------------------------------------------------------------------

// Reduced row echelon form; returns pivot columns.  Field coefficients only.
template <class F>
std::vector<std::size_t> rref_in_place(std::vector<std::vector<F>>& rows,
                                       const FieldCtx<F>& ctx) {
  static_assert(FieldTraits<F>::is_field || true, "");
  (void)ctx;
  std::vector<std::size_t> pivots;
  if (rows.empty()) return pivots;
  std::size_t ncols = rows[0].size();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < ncols && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][col].is_zero()) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    F inv = rows[rank][col].inverse();
    for (auto& v : rows[rank]) v = v * inv;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][col].is_zero()) continue;
      F f = rows[r][col];
      for (std::size_t j = col; j < ncols; ++j)
        rows[r][j] = rows[r][j] - f * rows[rank][j];
    }
    pivots.push_back(col);
    ++rank;
  }
  rows.resize(rank);
  return pivots;
}

// nullspace basis of the homogeneous system rows * x = 0, canonical
// (free variables get unit coordinates, in increasing column order)
template <class F>
std::vector<std::vector<F>> kernel_basis(std::vector<std::vector<F>> rows,
                                         std::size_t ncols,
                                         const FieldCtx<F>& ctx) {
  auto zero = FieldTraits<F>::from_int(ctx, 0);
  auto one = FieldTraits<F>::from_int(ctx, 1);
  for (auto& r : rows)
    if (r.size() != ncols) throw FieldError("kernel: ragged system");
  auto pivots = rref_in_place(rows, ctx);
  std::vector<bool> is_pivot(ncols, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<F>> basis;
  for (std::size_t free_col = 0; free_col < ncols; ++free_col) {
    if (is_pivot[free_col]) continue;
    std::vector<F> v(ncols, zero);
    v[free_col] = one;
    for (std::size_t r = 0; r < pivots.size(); ++r)
      v[pivots[r]] = -rows[r][free_col];
    basis.push_back(std::move(v));
  }
  return basis;
}

namespace detail {

// over Q and Q(zeta_N): rescale to the primitive integral representative,
// keeping exact spans while stopping coordinate growth in later stages
template <class F>
Matrix<F> primitive_scale(Matrix<F> m) {
  if constexpr (std::is_same_v<F, Rational> || std::is_same_v<F, CycloElem>) {
    bigint den_lcm = 1, num_gcd = 0;
    auto absorb = [&](const Rational& r) {
      if (r.is_zero()) return;
      den_lcm = den_lcm / gcd(den_lcm, r.den()) * r.den();
      num_gcd = gcd(num_gcd, r.num());
    };
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if constexpr (std::is_same_v<F, Rational>) {
          absorb(m.at(i, j));
        } else {
          for (const auto& c : m.at(i, j).coeffs()) absorb(c);
        }
      }
    if (num_gcd == 0) return m;
    Rational scale(den_lcm, num_gcd);
    if constexpr (std::is_same_v<F, Rational>) {
      return m * scale;
    } else {
      return m * CycloElem::from_rational(m.context(), scale);
    }
  } else {
    return m;
  }
}

}  // namespace detail

// basis of {A : A * Y_i = X_i * A for all i}
template <class F>
std::vector<Matrix<F>> intertwiner_space(const std::vector<Matrix<F>>& X,
                                         const std::vector<Matrix<F>>& Y) {
  if (X.size() != Y.size())
    throw FieldError("intertwiner_space: sequence length mismatch");
  if (X.empty()) throw FieldError("intertwiner_space: empty sequences");
  const auto& ctx = X[0].context();
  std::size_t n = X[0].rows();
  for (const auto& m : X)
    if (!m.is_square() || m.rows() != n)
      throw FieldError("intertwiner_space: dimension mismatch");
  for (const auto& m : Y)
    if (!m.is_square() || m.rows() != n)
      throw FieldError("intertwiner_space: dimension mismatch");
  auto zero = FieldTraits<F>::from_int(ctx, 0);
  // unknowns: entries of A, row-major; equations: (A Y - X A)_{rc} = 0
  std::vector<std::vector<F>> rows;
  for (std::size_t t = 0; t < X.size(); ++t) {
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        std::vector<F> eq(n * n, zero);
        for (std::size_t k = 0; k < n; ++k) {
          eq[r * n + k] = eq[r * n + k] + Y[t].at(k, c);
          eq[k * n + c] = eq[k * n + c] - X[t].at(r, k);
        }
        rows.push_back(std::move(eq));
      }
  }
  auto basis = kernel_basis(std::move(rows), n * n, ctx);
  std::vector<Matrix<F>> out;
  out.reserve(basis.size());
  for (auto& v : basis)
    out.push_back(detail::primitive_scale(Matrix<F>(ctx, n, n, std::move(v))));
  return out;
}

// ---------------------------------------------------------------------------
// Sparse multivariate polynomials for deterministic identity testing
// ---------------------------------------------------------------------------

template <class F>
class MultiPoly {
 public:
  using Expo = std::vector<int>;

  explicit MultiPoly(FieldCtx<F> ctx, std::size_t nvars)
      : ctx_(ctx), nvars_(nvars) {}

  static MultiPoly constant(FieldCtx<F> ctx, std::size_t nvars, const F& c) {
    MultiPoly p(ctx, nvars);
    if (!c.is_zero()) p.terms_[Expo(nvars, 0)] = c;
    return p;
  }
  static MultiPoly variable(FieldCtx<F> ctx, std::size_t nvars,
                            std::size_t i) {
    MultiPoly p(ctx, nvars);
    Expo e(nvars, 0);
    e[i] = 1;
    p.terms_[e] = FieldTraits<F>::from_int(ctx, 1);
    return p;
  }

  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  int degree_in(std::size_t var) const {
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
    return d;
  }

  MultiPoly operator+(const MultiPoly& o) const {
    MultiPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
  }
  MultiPoly operator-(const MultiPoly& o) const {
    MultiPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
    return r;
  }
  MultiPoly operator*(const MultiPoly& o) const {
    MultiPoly r(ctx_, nvars_);
    for (const auto& [e1, c1] : terms_)
      for (const auto& [e2, c2] : o.terms_) {
        Expo e(nvars_);
        for (std::size_t i = 0; i < nvars_; ++i) e[i] = e1[i] + e2[i];
        r.add_term(e, c1 * c2);
      }
    return r;
  }
  MultiPoly operator*(const F& s) const {
    MultiPoly r(ctx_, nvars_);
    if (s.is_zero()) return r;
    for (const auto& [e, c] : terms_) r.add_term(e, c * s);
    return r;
  }
  MultiPoly operator-() const {
    MultiPoly r(ctx_, nvars_);
    for (const auto& [e, c] : terms_) r.terms_[e] = -c;
    return r;
  }

  // substitute a value for one variable, keeping the others symbolic
  MultiPoly substitute(std::size_t var, const F& value) const {
    MultiPoly r(ctx_, nvars_);
    for (const auto& [e, c] : terms_) {
      F coeff = c;
      for (int k = 0; k < e[var]; ++k) coeff = coeff * value;
      Expo e2 = e;
      e2[var] = 0;
      r.add_term(e2, coeff);
    }
    return r;
  }

  F evaluate(const std::vector<F>& point) const {
    F acc = FieldTraits<F>::from_int(ctx_, 0);
    for (const auto& [e, c] : terms_) {
      F t = c;
      for (std::size_t i = 0; i < nvars_; ++i)
        for (int k = 0; k < e[i]; ++k) t = t * point[i];
      acc = acc + t;
    }
    return acc;
  }

  const FieldCtx<F>& context() const { return ctx_; }
  std::size_t nvars() const { return nvars_; }

 private:
  void add_term(const Expo& e, const F& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
    } else {
      it->second = it->second + c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }
  FieldCtx<F> ctx_;
  std::size_t nvars_;
  std::map<Expo, F> terms_;
};

namespace detail {

// determinant of a matrix with MultiPoly entries, by minor expansion with
// memoization over row subsets (entries indexed [row][col])
template <class F>
MultiPoly<F> symbolic_det(const std::vector<std::vector<MultiPoly<F>>>& m,
                          const FieldCtx<F>& ctx, std::size_t nvars) {
  std::size_t n = m.size();
  std::map<std::uint32_t, MultiPoly<F>> memo;
  std::function<MultiPoly<F>(std::uint32_t, std::size_t)> rec =
      [&](std::uint32_t rowmask, std::size_t col) -> MultiPoly<F> {
    if (col == n) return MultiPoly<F>::constant(ctx, nvars,
                                                FieldTraits<F>::from_int(ctx, 1));
    auto it = memo.find(rowmask);
    if (it != memo.end()) return it->second;
    MultiPoly<F> acc(ctx, nvars);
    int sign = 1;
    for (std::size_t r = 0; r < n; ++r) {
      if (!(rowmask & (1u << r))) continue;
      if (!m[r][col].is_zero()) {
        auto sub = rec(rowmask & ~(1u << r), col + 1);
        auto term = m[r][col] * sub;
        acc = (sign > 0) ? acc + term : acc - term;
      }
      sign = -sign;
    }
    memo.emplace(rowmask, acc);
    return acc;
  };
  return rec((n >= 32) ? ~0u : ((1u << n) - 1u), 0);
}

// deterministic search for a non-vanishing point of a nonzero polynomial,
// fixing variables in order against the field grid (lexicographically
// first admissible point wins)
template <class F>
std::optional<std::vector<F>> nonvanishing_point(const MultiPoly<F>& poly) {
  const auto& ctx = poly.context();
  std::size_t nvars = poly.nvars();
  std::vector<F> point;
  MultiPoly<F> cur = poly;
  for (std::size_t v = 0; v < nvars; ++v) {
    int deg = cur.degree_in(v);
    bool fixed = false;
    for (std::int64_t k = 0; k <= deg; ++k) {
      auto gv = FieldTraits<F>::grid_value(ctx, k);
      if (!gv) return std::nullopt;  // field too small
      MultiPoly<F> sub = cur.substitute(v, *gv);
      if (!sub.is_zero()) {
        point.push_back(*gv);
        cur = std::move(sub);
        fixed = true;
        break;
      }
    }
    if (!fixed) return std::nullopt;  // cannot happen for nonzero poly
  }
  return point;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Simultaneous conjugacy with exact certification
// ---------------------------------------------------------------------------

enum class ConjugacyStatus { Conjugate, NonConjugate, Undetermined };

template <class F>
struct ConjugacyResult {
  ConjugacyStatus status = ConjugacyStatus::Undetermined;
  std::optional<Matrix<F>> witness;
  std::string detail;
};

// invertible A with A X_i A^{-1} = Y_i for all i, certified NonConjugate
// when the determinant of the generic intertwiner combination vanishes
// identically, Undetermined only when the field has too few elements
template <class F>
ConjugacyResult<F> simultaneous_conjugator(const std::vector<Matrix<F>>& X,
                                           const std::vector<Matrix<F>>& Y) {
  ConjugacyResult<F> res;
  auto basis = intertwiner_space(Y, X);  // {A : A X_i = Y_i A}
  if (basis.empty()) {
    res.status = ConjugacyStatus::NonConjugate;
    res.detail = "empty intertwiner space";
    return res;
  }
  const auto& ctx = X[0].context();
  std::size_t n = X[0].rows();
  std::size_t d = basis.size();
  std::vector<std::vector<MultiPoly<F>>> sym(
      n, std::vector<MultiPoly<F>>(n, MultiPoly<F>(ctx, d)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t b = 0; b < d; ++b)
        if (!basis[b].at(i, j).is_zero())
          sym[i][j] = sym[i][j] + MultiPoly<F>::variable(ctx, d, b) *
                                      basis[b].at(i, j);
  auto P = detail::symbolic_det(sym, ctx, d);
  if (P.is_zero()) {
    res.status = ConjugacyStatus::NonConjugate;
    res.detail = "determinant of generic intertwiner combination is "
                 "identically zero (dim " +
                 std::to_string(d) + ")";
    return res;
  }
  auto point = detail::nonvanishing_point(P);
  if (!point) {
    res.status = ConjugacyStatus::Undetermined;
    res.detail = "field too small for the interpolation grid";
    return res;
  }
  Matrix<F> A(ctx, n, n);
  for (std::size_t b = 0; b < d; ++b)
    A = A + basis[b] * (*point)[b];
  // exactness check of the witness
  auto Ainv = A.inverse_or_throw();
  for (std::size_t t = 0; t < X.size(); ++t)
    if (A * X[t] * Ainv != Y[t])
      throw FieldError("internal: conjugator witness failed verification");
  res.status = ConjugacyStatus::Conjugate;
  res.witness = std::move(A);
  res.detail = "witness at first admissible grid point";
  return res;
}

// ---------------------------------------------------------------------------
// Symmetric congruence normalization: h with h A h^t = I
// ---------------------------------------------------------------------------

template <class F>
Matrix<F> symmetric_congruence(const Matrix<F>& A) {
  if (!A.is_symmetric())
    throw FieldError("symmetric_congruence needs a symmetric matrix");
  const auto& ctx = A.context();
  std::size_t n = A.rows();
  auto fi = [&](std::int64_t v) { return FieldTraits<F>::from_int(ctx, v); };
  Matrix<F> D = A;
  Matrix<F> H = Matrix<F>::identity(ctx, n);
  auto congruence_rowcol = [&](const Matrix<F>& E) {
    D = E * D * E.transpose();
    H = E * H;
  };
  for (std::size_t k = 0; k < n; ++k) {
    if (D.at(k, k).is_zero()) {
      std::size_t j = k + 1;
      while (j < n && D.at(j, j).is_zero()) ++j;
      if (j < n) {
        Matrix<F> E = Matrix<F>::identity(ctx, n);
        E.at(k, k) = fi(0);
        E.at(j, j) = fi(0);
        E.at(k, j) = fi(1);
        E.at(j, k) = fi(1);
        congruence_rowcol(E);
      } else {
        // all remaining diagonal entries vanish; use an off-diagonal one
        std::size_t r = k, c = k;
        bool found = false;
        for (std::size_t i = k; i < n && !found; ++i)
          for (std::size_t j2 = i + 1; j2 < n && !found; ++j2)
            if (!D.at(i, j2).is_zero()) {
              r = i;
              c = j2;
              found = true;
            }
        if (!found) throw FieldError("symmetric_congruence: singular matrix");
        Matrix<F> E = Matrix<F>::identity(ctx, n);
        E.at(r, c) = fi(1);  // row r += row c, col r += col c
        congruence_rowcol(E);
        if (D.at(k, k).is_zero()) {
          // char 2 would land here; out of supported scope
          if (r != k) {
            Matrix<F> S = Matrix<F>::identity(ctx, n);
            S.at(k, k) = fi(0);
            S.at(r, r) = fi(0);
            S.at(k, r) = fi(1);
            S.at(r, k) = fi(1);
            congruence_rowcol(S);
          }
          if (D.at(k, k).is_zero())
            throw FieldError(
                "symmetric_congruence: cannot create a pivot (char 2?)");
        }
      }
    }
    F piv = D.at(k, k);
    Matrix<F> E = Matrix<F>::identity(ctx, n);
    bool any = false;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (D.at(r, k).is_zero()) continue;
      E.at(r, k) = -(D.at(r, k) / piv);
      any = true;
    }
    if (any) congruence_rowcol(E);
  }
  // scale: h = diag(1/sqrt(d_k)) * H
  Matrix<F> S(ctx, n, n);
  for (std::size_t k = 0; k < n; ++k) {
    auto sq = field_sqrt(D.at(k, k));
    if (!sq.present()) throw SqrtNeeded(sq.conductor_hint);
    S.at(k, k) = sq.root->inverse();
  }
  Matrix<F> h = S * H;
  if (h * A * h.transpose() != Matrix<F>::identity(ctx, n))
    throw FieldError("internal: symmetric_congruence verification failed");
  return h;
}

}  // namespace cgu
