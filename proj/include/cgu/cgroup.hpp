#pragma once

// Concrete points of C-groups of unitary and general unitary groups.
//
// CU elements are stored in theta-coordinates (a, b) = (g mu^{1-n}, mu^2)
// of the class of a raw pair (g, mu); the two lifts of a class map to the
// same coordinates, so equality is plain coordinate equality.  The
// conjugation-coset action on theta-coordinates is derived mechanically
// from the defining raw action pushed through theta, and the resulting
// exponent law is cached per n (the printed transported formula in the
// literature is not trusted).
//
// CGU elements are stored as raw triples (g, lambda, mu) together with the
// coset, normalized so that the serialized mu is lexicographically minimal
// among the two central-quotient representatives.

#include <mutex>

#include "matrix.hpp"

namespace cgu {

namespace detail {

// Derive the exponent e with  c.(a, b) = (Phi a^{-t} Phi^{-1} b^e, b)
// by transporting the defining action c.(g, mu) = (Phi g^{-t} Phi^{-1}, mu)
// through theta on rational samples.  Cached per n.
inline int cu_twist_exponent(std::size_t n) {
  static std::map<std::size_t, int> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  RationalCtx ctx{};
  auto fi = [&](std::int64_t v) { return Rational(bigint(v)); };
  auto phi = phi_matrix<Rational>(ctx, n);
  auto phi_inv = phi.inverse_or_throw();
  Rng rng(0x5eedULL + n);
  int found = 0;
  bool have = false;
  for (int sample = 0; sample < 2; ++sample) {
    // random invertible g, mu = 2 (so powers of b = 4 are distinguishable)
    Matrix<Rational> g(ctx, n, n);
    do {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          g.at(i, j) = fi(rng.below(7) - 3);
    } while (!g.inverse());
    Rational mu = fi(2);
    Rational mu_pow = fi(1);
    for (std::size_t k = 0; k + 1 < n; ++k) mu_pow = mu_pow * mu;  // mu^{n-1}
    // theta(g, mu) = (g mu^{1-n}, mu^2)
    Matrix<Rational> a = g * mu_pow.inverse();
    Rational b = mu * mu;
    // raw action, then theta
    Matrix<Rational> cg = phi * g.inverse_or_throw().transpose() * phi_inv;
    Matrix<Rational> ca = cg * mu_pow.inverse();
    // solve ca = phi a^{-t} phi^{-1} b^e for integer e
    Matrix<Rational> base =
        phi * a.inverse_or_throw().transpose() * phi_inv;
    int e_here = 0;
    bool ok = false;
    for (int e = -2 * static_cast<int>(n) - 2;
         e <= 2 * static_cast<int>(n) + 2; ++e) {
      Rational scale = fi(1);
      for (int k = 0; k < (e >= 0 ? e : -e); ++k) scale = scale * b;
      if (e < 0) scale = scale.inverse();
      if (base * scale == ca) {
        e_here = e;
        ok = true;
        break;
      }
    }
    if (!ok) throw FieldError("internal: could not derive the cu twist law");
    if (have && e_here != found)
      throw FieldError("internal: inconsistent cu twist law across samples");
    found = e_here;
    have = true;
  }
  cache.emplace(n, found);
  return found;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CU elements
// ---------------------------------------------------------------------------

template <class F>
class CUElement {
 public:
  CUElement(Matrix<F> a, F b, int coset)
      : a_(std::move(a)), b_(std::move(b)), coset_(coset) {
    if (!a_.is_square()) throw FieldError("CU element matrix must be square");
    if (b_.is_zero()) throw FieldError("CU element scalar must be nonzero");
    if (coset_ != 0 && coset_ != 1) throw FieldError("bad coset tag");
  }

  // canonical theta-coordinates of the class of raw (g, mu)
  static CUElement from_raw(const Matrix<F>& g, const F& mu, int coset) {
    if (mu.is_zero()) throw FieldError("cu_from_raw: mu must be nonzero");
    if (!g.inverse()) throw FieldError("cu_from_raw: singular matrix");
    std::size_t n = g.rows();
    F mu_pow = power(mu, static_cast<std::int64_t>(n) - 1);
    return CUElement(g * mu_pow.inverse(), mu * mu, coset);
  }

  static CUElement one(const FieldCtx<F>& ctx, std::size_t n) {
    return CUElement(Matrix<F>::identity(ctx, n),
                     FieldTraits<F>::from_int(ctx, 1), 0);
  }

  const Matrix<F>& a() const { return a_; }
  const F& b() const { return b_; }
  int coset() const { return coset_; }
  std::size_t n() const { return a_.rows(); }
  const FieldCtx<F>& context() const { return a_.context(); }

  bool operator==(const CUElement& o) const {
    return coset_ == o.coset_ && b_ == o.b_ && a_ == o.a_;
  }
  bool operator!=(const CUElement& o) const { return !(*this == o); }

  // the defining Galois action transported through theta
  CUElement galois_twisted() const {
    int e = detail::cu_twist_exponent(n());
    auto phi = phi_matrix<F>(context(), n());
    Matrix<F> a2 = phi * a_.inverse_or_throw().transpose() *
                   phi.inverse_or_throw() * power(b_, e);
    return CUElement(std::move(a2), b_, coset_);
  }

  CUElement operator*(const CUElement& o) const {
    if (n() != o.n()) throw FieldError("CU product size mismatch");
    CUElement rhs = (coset_ == 1) ? o.galois_twisted() : o;
    return CUElement(a_ * rhs.a_, b_ * rhs.b_, coset_ ^ o.coset_);
  }

  CUElement inverse() const {
    CUElement raw_inv(a_.inverse_or_throw(), b_.inverse(), coset_);
    return (coset_ == 1) ? raw_inv.galois_twisted() : raw_inv;
  }

  std::string to_string() const {
    return std::string("(") + a_.to_string() + ", " + b_.to_string() + ")" +
           (coset_ ? "c" : "");
  }

  static F power(const F& x, std::int64_t e) {
    F base = (e < 0) ? x.inverse() : x;
    std::uint64_t k = static_cast<std::uint64_t>(e < 0 ? -e : e);
    F acc = base * base.inverse();  // one
    while (k) {
      if (k & 1) acc = acc * base;
      base = base * base;
      k >>= 1;
    }
    return acc;
  }

 private:
  Matrix<F> a_;
  F b_;
  int coset_;
};

// the map d: value of the similitude-square coordinate, coset-independent
template <class F>
F d_map(const CUElement<F>& x) {
  return x.b();
}

// h x h^{-1} for h in the identity component
template <class F>
CUElement<F> cu_conjugate(const CUElement<F>& h, const CUElement<F>& x) {
  if (h.coset() != 0)
    throw FieldError("cu_conjugate: conjugator must lie in the identity "
                     "component");
  return h * x * h.inverse();
}

// ---------------------------------------------------------------------------
// CGU elements
// ---------------------------------------------------------------------------

// The Galois action on the identity component is configurable so that the
// local/global conjugacy verdicts can be re-checked under variants.
enum class CGUActionVariant {
  det_lambda,      // c.(g, l, m) = (Phi g^{-t} Phi^{-1}, det(g) l, m)
  det_inv_lambda,  // c.(g, l, m) = (Phi g^{-t} Phi^{-1}, det(g)^{-1} l, m)
  plain_lambda,    // c.(g, l, m) = (Phi g^{-t} Phi^{-1}, l, m)
};

inline const char* to_string(CGUActionVariant v) {
  switch (v) {
    case CGUActionVariant::det_lambda: return "det_lambda";
    case CGUActionVariant::det_inv_lambda: return "det_inv_lambda";
    case CGUActionVariant::plain_lambda: return "plain_lambda";
  }
  return "?";
}

template <class F>
class CGUElement {
 public:
  CGUElement(Matrix<F> g, F lambda, F mu, int coset,
             CGUActionVariant action = CGUActionVariant::det_lambda)
      : g_(std::move(g)),
        lambda_(std::move(lambda)),
        mu_(std::move(mu)),
        coset_(coset),
        action_(action) {
    if (!g_.is_square()) throw FieldError("CGU element matrix must be square");
    if (lambda_.is_zero() || mu_.is_zero())
      throw FieldError("CGU element scalars must be nonzero");
    if (coset_ != 0 && coset_ != 1) throw FieldError("bad coset tag");
    canonicalize();
  }

  const Matrix<F>& g() const { return g_; }
  const F& lambda() const { return lambda_; }
  const F& mu() const { return mu_; }
  int coset() const { return coset_; }
  std::size_t n() const { return g_.rows(); }
  const FieldCtx<F>& context() const { return g_.context(); }
  CGUActionVariant action() const { return action_; }

  static CGUElement one(const FieldCtx<F>& ctx, std::size_t n,
                        CGUActionVariant action = CGUActionVariant::det_lambda) {
    auto fi = [&](std::int64_t v) { return FieldTraits<F>::from_int(ctx, v); };
    return CGUElement(Matrix<F>::identity(ctx, n), fi(1), fi(1), 0, action);
  }

  bool operator==(const CGUElement& o) const {
    return coset_ == o.coset_ && lambda_ == o.lambda_ && mu_ == o.mu_ &&
           g_ == o.g_;
  }
  bool operator!=(const CGUElement& o) const { return !(*this == o); }

  CGUElement galois_twisted() const {
    auto phi = phi_matrix<F>(context(), n());
    Matrix<F> g2 = phi * g_.inverse_or_throw().transpose() *
                   phi.inverse_or_throw();
    F l2 = lambda_;
    switch (action_) {
      case CGUActionVariant::det_lambda: l2 = det(g_) * lambda_; break;
      case CGUActionVariant::det_inv_lambda:
        l2 = det(g_).inverse() * lambda_;
        break;
      case CGUActionVariant::plain_lambda: break;
    }
    return CGUElement(std::move(g2), l2, mu_, coset_, action_);
  }

  CGUElement operator*(const CGUElement& o) const {
    if (n() != o.n()) throw FieldError("CGU product size mismatch");
    if (action_ != o.action_)
      throw FieldError("CGU product across action variants");
    CGUElement rhs = (coset_ == 1) ? o.galois_twisted() : o;
    return CGUElement(g_ * rhs.g_, lambda_ * rhs.lambda_, mu_ * rhs.mu_,
                      coset_ ^ o.coset_, action_);
  }

  CGUElement inverse() const {
    CGUElement raw_inv(g_.inverse_or_throw(), lambda_.inverse(),
                       mu_.inverse(), coset_, action_);
    return (coset_ == 1) ? raw_inv.galois_twisted() : raw_inv;
  }

  std::string to_string() const {
    return std::string("(") + g_.to_string() + ", " + lambda_.to_string() +
           ", " + mu_.to_string() + ")" + (coset_ ? "c" : "");
  }

 private:
  // pick the representative with lexicographically minimal serialized mu
  // among (g, l, mu) and ((-1)^{n-1} g, l, -mu)
  void canonicalize() {
    F alt_mu = -mu_;
    if (alt_mu.to_string() < mu_.to_string()) {
      mu_ = alt_mu;
      if (n() % 2 == 0) g_ = -g_;  // (-I)^{n-1} = -I exactly for even n
    }
  }

  Matrix<F> g_;
  F lambda_, mu_;
  int coset_;
  CGUActionVariant action_;
};

template <class F>
CGUElement<F> cgu_conjugate(const CGUElement<F>& h, const CGUElement<F>& x) {
  if (h.coset() != 0)
    throw FieldError("cgu_conjugate: conjugator must lie in the identity "
                     "component");
  return h * x * h.inverse();
}

}  // namespace cgu
