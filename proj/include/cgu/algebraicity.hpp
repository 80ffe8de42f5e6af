#pragma once

// Root datum of U(a,b), twisting elements, the twisting cocharacter, and
// archimedean parameter classification.  Half-integers are stored doubled
// so that all lattice arithmetic stays integral.

#include <numeric>

#include "cgroup.hpp"

namespace cgu {

// X^*(T) = Z^n with <E_i, E_j'> = delta_ij; the conjugation action is
// a |-> -reverse(a) (so c.(a_1..a_n) = (-a_n, ..., -a_1))
struct RootDatum {
  std::size_t n;

  static std::int64_t pairing(const std::vector<std::int64_t>& chi,
                              const std::vector<std::int64_t>& cochar) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < chi.size(); ++i) s += chi[i] * cochar[i];
    return s;
  }
  std::vector<std::int64_t> galois_act(
      const std::vector<std::int64_t>& a) const {
    std::vector<std::int64_t> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[a.size() - 1 - i];
    return r;
  }
  // simple coroot E_i' - E_{i+1}', i in [0, n-2]
  std::vector<std::int64_t> simple_coroot(std::size_t i) const {
    std::vector<std::int64_t> v(n, 0);
    v[i] = 1;
    v[i + 1] = -1;
    return v;
  }
};

// entries are doubled: value i holds 2*a_i
struct ArchParam {
  std::size_t n = 0;
  std::vector<std::int64_t> doubled;

  static ArchParam parse(const std::string& s) {
    // "a1,a2,..." with halves written as "p/2"
    ArchParam p;
    std::string cur;
    auto flush = [&]() {
      auto slash = cur.find('/');
      if (slash == std::string::npos) {
        p.doubled.push_back(2 * std::stoll(cur));
      } else {
        if (cur.substr(slash + 1) != "2")
          throw FieldError("archimedean parameters allow halves only");
        p.doubled.push_back(std::stoll(cur.substr(0, slash)));
      }
      cur.clear();
    };
    for (char ch : s) {
      if (ch == ',') {
        flush();
      } else if (!isspace(static_cast<unsigned char>(ch))) {
        cur.push_back(ch);
      }
    }
    if (!cur.empty()) flush();
    p.n = p.doubled.size();
    return p;
  }
  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < doubled.size(); ++i) {
      if (i) s += ",";
      if (doubled[i] % 2 == 0)
        s += std::to_string(doubled[i] / 2);
      else
        s += std::to_string(doubled[i]) + "/2";
    }
    return s;
  }
};

// ((n-1)/2, (n-3)/2, ..., (1-n)/2), doubled
inline std::vector<std::int64_t> half_sum_positive_roots(std::size_t n) {
  std::vector<std::int64_t> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = static_cast<std::int64_t>(n) - 1 - 2 * static_cast<std::int64_t>(i);
  return v;
}

struct TwistingElementResult {
  // integral character vector when it exists
  std::optional<std::vector<std::int64_t>> element;
  std::string certificate;
  bool exists() const { return element.has_value(); }
};

// the pairing constraints force theta = (a_1, a_1-1, ..., a_1-n+1) and
// Galois stability forces a_1 = (n-1)/2, integral exactly when n is odd
inline TwistingElementResult twisting_element(std::size_t n) {
  if (n < 1) throw FieldError("twisting_element needs n >= 1");
  if (n % 2 == 1) {
    auto doubled = half_sum_positive_roots(n);
    std::vector<std::int64_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = doubled[i] / 2;
    return {v, "delta is integral and Galois-stable"};
  }
  return {std::nullopt,
          "constraints force a_1 = (n-1)/2 = " + std::to_string(n - 1) +
              "/2, not an integer for even n"};
}

enum class Algebraicity { L, C, Both, Neither };

inline const char* to_string(Algebraicity a) {
  switch (a) {
    case Algebraicity::L: return "L";
    case Algebraicity::C: return "C";
    case Algebraicity::Both: return "Both";
    case Algebraicity::Neither: return "Neither";
  }
  return "?";
}

// L iff all a_i integral; C iff all a_i in Z + (n-1)/2
inline Algebraicity classify_algebraicity(const ArchParam& p) {
  bool all_int = true, all_shifted = true;
  std::int64_t parity = static_cast<std::int64_t>(p.n - 1) % 2;
  for (auto d : p.doubled) {
    std::int64_t m = ((d % 2) + 2) % 2;
    if (m != 0) all_int = false;
    if (m != parity) all_shifted = false;
  }
  if (p.n % 2 == 1) return all_int ? Algebraicity::Both : Algebraicity::Neither;
  if (all_int) return Algebraicity::L;
  if (all_shifted) return Algebraicity::C;
  return Algebraicity::Neither;
}

// multiplicity at most two: the non-degenerate limit-of-discrete-series shape
inline bool is_nondegenerate_lds_shape(const ArchParam& p) {
  std::map<std::int64_t, int> mult;
  for (auto d : p.doubled) ++mult[d];
  for (auto& [k, m] : mult)
    if (m > 2) return false;
  return true;
}

struct PairingSymmetryOptions {
  bool symmetric_possible = true;
  bool antisymmetric_possible = false;
};

// A intertwining r(z) is block-supported on equal-parameter classes;
// an invertible antisymmetric block exists iff every multiplicity is even
inline PairingSymmetryOptions pairing_symmetry_options(const ArchParam& p) {
  std::map<std::int64_t, int> mult;
  for (auto d : p.doubled) ++mult[d];
  PairingSymmetryOptions o;
  o.antisymmetric_possible = true;
  for (auto& [k, m] : mult)
    if (m % 2 != 0) o.antisymmetric_possible = false;
  return o;
}

// r(j) = (A Phi_n^{-1}) c with parameter matrix A
template <class F>
struct WeilParamR {
  ArchParam param;
  Matrix<F> A;
};

// diag((z/zbar)^{a_i}) evaluated at z = zeta^k with zeta of order N
template <class F>
Matrix<F> weil_r_value(const WeilParamR<F>& w, const F& zeta,
                       std::int64_t k) {
  const auto& ctx = w.A.context();
  std::size_t n = w.param.n;
  Matrix<F> d(ctx, n, n);
  for (std::size_t i = 0; i < n; ++i)
    d.at(i, i) = CUElement<F>::power(zeta, w.param.doubled[i] * k);
  return d;
}

// the relation r(j) r(z) r(j)^{-1} = r(zbar), checked exactly at all
// powers of the sampled root of unity
template <class F>
bool weil_relation_holds(const WeilParamR<F>& w, const F& zeta,
                         std::int64_t order) {
  auto Ainv = w.A.inverse();
  if (!Ainv) return false;
  for (std::int64_t k = 0; k < order; ++k) {
    auto d = weil_r_value(w, zeta, k);
    auto dinv = d.inverse_or_throw();
    if (w.A * dinv * *Ainv != dinv) return false;
  }
  return true;
}

struct WeilSquareReport {
  bool consistent = false;
  bool forced_symmetry_holds = false;
  std::string forced_symmetry;  // "A = A^t" or "A = (-1)^{n-1} A^t"
  std::string detail;
};

// compares A A^{-t} (-1)^{n-1} with r(-1) = diag((-1)^{2 a_i}) and reports
// the symmetry type the algebraicity class forces on A
template <class F>
WeilSquareReport weil_square_check(const WeilParamR<F>& w,
                                   Algebraicity alg) {
  const auto& ctx = w.A.context();
  std::size_t n = w.param.n;
  auto fi = [&](std::int64_t v) { return FieldTraits<F>::from_int(ctx, v); };
  WeilSquareReport rep;
  auto Ainv_t = w.A.inverse_or_throw().transpose();
  Matrix<F> lhs = w.A * Ainv_t * fi((n % 2 == 1) ? 1 : -1);
  Matrix<F> rminus1(ctx, n, n);
  for (std::size_t i = 0; i < n; ++i)
    rminus1.at(i, i) = fi((w.param.doubled[i] % 2 == 0) ? 1 : -1);
  rep.consistent = (lhs == rminus1);
  if (alg == Algebraicity::C || (alg == Algebraicity::Both && n % 2 == 1)) {
    rep.forced_symmetry = "A = A^t";
    rep.forced_symmetry_holds = (w.A == w.A.transpose());
  } else {
    rep.forced_symmetry = (n % 2 == 1) ? "A = A^t" : "A = -A^t";
    rep.forced_symmetry_holds =
        (w.A == w.A.transpose() * fi((n % 2 == 1) ? 1 : -1));
  }
  rep.detail = rep.consistent ? "r(j^2) matches r(-1)"
                              : "A A^{-t} (-1)^{n-1} differs from r(-1)";
  return rep;
}

enum class SqrtBranch { plus, minus };

// theta(z) with raw coordinates (diag(z^{(n-1)/2}, ..., z^{(1-n)/2}), z^{1/2});
// both branches land on the same CU element
template <class F>
CUElement<F> twisting_cocharacter(const FieldCtx<F>& ctx, std::size_t n,
                                  const F& z, SqrtBranch branch) {
  auto sq = field_sqrt(z);
  if (!sq.present()) throw SqrtNeeded(sq.conductor_hint);
  F w = (branch == SqrtBranch::plus) ? *sq.root : -*sq.root;
  Matrix<F> g(ctx, n, n);
  for (std::size_t i = 1; i <= n; ++i)
    g.at(i - 1, i - 1) = CUElement<F>::power(
        w, static_cast<std::int64_t>(n) + 1 - 2 * static_cast<std::int64_t>(i));
  return CUElement<F>::from_raw(g, w, 0);
}

}  // namespace cgu
