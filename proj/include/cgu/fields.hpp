#pragma once

// Exact coefficient arithmetic: rationals, cyclotomic fields Q(zeta_N),
// prime fields F_p and the truncated ring Z/l^M, behind one generic
// element interface.  All values are immutable after construction and
// safe to share between threads.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <numeric>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cgu {

using bigint = boost::multiprecision::cpp_int;

struct FieldError : std::runtime_error {
  explicit FieldError(const std::string& m) : std::runtime_error(m) {}
};

namespace detail {

inline bigint gcd(bigint a, bigint b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    bigint t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline bool is_small_prime(std::int64_t p) {
  if (p < 2) return false;
  for (std::int64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

inline std::int64_t euler_phi(std::int64_t n) {
  std::int64_t result = n, m = n;
  for (std::int64_t p = 2; p * p <= m; ++p) {
    if (m % p == 0) {
      while (m % p == 0) m /= p;
      result -= result / p;
    }
  }
  if (m > 1) result -= result / m;
  return result;
}

// Dense integer polynomials, little-endian coefficients.
using ZPoly = std::vector<bigint>;

inline void zpoly_trim(ZPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline ZPoly zpoly_mul(const ZPoly& a, const ZPoly& b) {
  if (a.empty() || b.empty()) return {};
  ZPoly r(a.size() + b.size() - 1, bigint(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

// Exact division of integer polynomials; caller guarantees divisibility.
inline ZPoly zpoly_divexact(ZPoly num, const ZPoly& den) {
  zpoly_trim(num);
  if (num.empty()) return {};
  ZPoly q(num.size() - den.size() + 1, bigint(0));
  for (std::size_t i = q.size(); i-- > 0;) {
    bigint c = num[i + den.size() - 1] / den.back();
    q[i] = c;
    if (c != 0)
      for (std::size_t j = 0; j < den.size(); ++j)
        num[i + j] -= c * den[j];
  }
  return q;
}

// N-th cyclotomic polynomial, memoized.  Computed as (x^N - 1) divided by
// the cyclotomic polynomials of the proper divisors of N.
inline const ZPoly& cyclotomic_poly(std::int64_t N) {
  static std::map<std::int64_t, ZPoly> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(N);
  if (it != cache.end()) return it->second;

  // iterative fill to keep recursion out of the lock
  for (std::int64_t d = 1; d <= N; ++d) {
    if (N % d != 0 || cache.count(d)) continue;
    ZPoly num(static_cast<std::size_t>(d) + 1, bigint(0));
    num[0] = -1;
    num.back() = 1;  // x^d - 1
    for (std::int64_t e = 1; e < d; ++e)
      if (d % e == 0) num = zpoly_divexact(std::move(num), cache.at(e));
    cache.emplace(d, std::move(num));
  }
  return cache.at(N);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Rational
// ---------------------------------------------------------------------------

class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long v) : num_(v), den_(1) {}  // NOLINT: implicit by design
  Rational(bigint n) : num_(std::move(n)), den_(1) {}
  Rational(bigint n, bigint d) : num_(std::move(n)), den_(std::move(d)) {
    normalize();
  }

  const bigint& num() const { return num_; }
  const bigint& den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool is_integer() const { return den_ == 1; }

  Rational operator-() const { return Rational(-num_, den_, tag{}); }
  Rational operator+(const Rational& o) const {
    return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
  }
  Rational operator-(const Rational& o) const {
    return Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
  }
  Rational operator*(const Rational& o) const {
    return Rational(num_ * o.num_, den_ * o.den_);
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw FieldError("rational division by zero");
    return Rational(num_ * o.den_, den_ * o.num_);
  }
  Rational inverse() const {
    if (num_ == 0) throw FieldError("rational inverse of zero");
    return Rational(den_, num_);
  }

  bool operator==(const Rational& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const {
    return num_ * o.den_ < o.num_ * den_;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << num_ << "/" << den_;
    return os.str();
  }

  static Rational parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(bigint(s));
    return Rational(bigint(s.substr(0, slash)), bigint(s.substr(slash + 1)));
  }

 private:
  struct tag {};
  Rational(bigint n, bigint d, tag) : num_(std::move(n)), den_(std::move(d)) {}
  void normalize() {
    if (den_ == 0) throw FieldError("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    bigint g = detail::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }
  bigint num_, den_;
};

// ---------------------------------------------------------------------------
// CycloElem: element of Q(zeta_N) in the power basis modulo Phi_N
// ---------------------------------------------------------------------------

struct CycloCtx {
  std::int64_t N = 1;
  bool operator==(const CycloCtx& o) const { return N == o.N; }
};

class CycloElem {
 public:
  CycloElem() : N_(1), c_(1, Rational(0)) {}
  CycloElem(CycloCtx ctx, std::vector<Rational> coeffs)
      : N_(ctx.N), c_(std::move(coeffs)) {
    auto phi = static_cast<std::size_t>(detail::euler_phi(N_));
    if (c_.size() != phi)
      throw FieldError("cyclotomic coefficient vector has wrong length");
  }

  static CycloElem from_rational(CycloCtx ctx, const Rational& r) {
    std::vector<Rational> c(detail::euler_phi(ctx.N), Rational(0));
    c[0] = r;
    return CycloElem(ctx, std::move(c));
  }

  // zeta_N^k, any integer k
  static CycloElem zeta_pow(CycloCtx ctx, std::int64_t k) {
    k %= ctx.N;
    if (k < 0) k += ctx.N;
    std::size_t phi = detail::euler_phi(ctx.N);
    std::vector<Rational> raw(static_cast<std::size_t>(ctx.N) + 1,
                              Rational(0));
    raw[static_cast<std::size_t>(k)] = Rational(1);
    reduce(raw, ctx.N);
    raw.resize(phi, Rational(0));
    return CycloElem(ctx, std::move(raw));
  }

  std::int64_t conductor() const { return N_; }
  CycloCtx context() const { return CycloCtx{N_}; }
  const std::vector<Rational>& coeffs() const { return c_; }

  bool is_zero() const {
    for (const auto& x : c_)
      if (!x.is_zero()) return false;
    return true;
  }
  bool is_rational() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
      if (!c_[i].is_zero()) return false;
    return true;
  }
  Rational rational_value() const {
    if (!is_rational()) throw FieldError("cyclotomic element is irrational");
    return c_[0];
  }

  CycloElem operator-() const {
    std::vector<Rational> r(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] = -c_[i];
    return CycloElem(context(), std::move(r));
  }
  CycloElem operator+(const CycloElem& o) const {
    check(o);
    std::vector<Rational> r(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] = c_[i] + o.c_[i];
    return CycloElem(context(), std::move(r));
  }
  CycloElem operator-(const CycloElem& o) const {
    check(o);
    std::vector<Rational> r(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] = c_[i] - o.c_[i];
    return CycloElem(context(), std::move(r));
  }
  CycloElem operator*(const CycloElem& o) const {
    check(o);
    if (c_.empty() || o.c_.empty()) return *this;
    std::vector<Rational> prod(c_.size() + o.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i].is_zero()) continue;
      for (std::size_t j = 0; j < o.c_.size(); ++j) {
        if (o.c_[j].is_zero()) continue;
        prod[i + j] = prod[i + j] + c_[i] * o.c_[j];
      }
    }
    reduce(prod, N_);
    prod.resize(c_.size(), Rational(0));
    return CycloElem(context(), std::move(prod));
  }
  CycloElem inverse() const {
    if (is_zero()) throw FieldError("cyclotomic inverse of zero");
    // extended Euclid in Q[x] against Phi_N
    const auto& phiN = detail::cyclotomic_poly(N_);
    std::vector<Rational> r0(phiN.size());
    for (std::size_t i = 0; i < phiN.size(); ++i) r0[i] = Rational(phiN[i]);
    std::vector<Rational> r1 = c_;
    trim(r1);
    std::vector<Rational> s0{Rational(0)}, s1{Rational(1)};
    while (true) {
      trim(r1);
      if (r1.empty()) throw FieldError("cyclotomic inverse: unexpected gcd");
      if (r1.size() == 1) break;
      auto [q, rem] = divmod(r0, r1);
      r0 = r1;
      r1 = rem;
      auto t = sub(s0, mul(q, s1));
      s0 = s1;
      s1 = t;
    }
    // r1 is a nonzero constant: inverse = s1 / r1
    Rational scale = r1[0].inverse();
    std::vector<Rational> inv = s1;
    for (auto& x : inv) x = x * scale;
    reduce(inv, N_);
    inv.resize(c_.size(), Rational(0));
    return CycloElem(context(), std::move(inv));
  }
  CycloElem operator/(const CycloElem& o) const { return *this * o.inverse(); }

  bool operator==(const CycloElem& o) const {
    return N_ == o.N_ && c_ == o.c_;
  }
  bool operator!=(const CycloElem& o) const { return !(*this == o); }

  std::string to_string() const {
    std::ostringstream os;
    os << N_ << ":[";
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (i) os << ",";
      os << c_[i].to_string();
    }
    os << "]";
    return os.str();
  }

  static CycloElem parse(CycloCtx ctx, const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos)
      return from_rational(ctx, Rational::parse(s));
    std::int64_t N = std::stoll(s.substr(0, colon));
    if (N != ctx.N) throw FieldError("cyclotomic conductor mismatch in parse");
    std::string body = s.substr(colon + 1);
    if (body.size() < 2 || body.front() != '[' || body.back() != ']')
      throw FieldError("bad cyclotomic literal: " + s);
    body = body.substr(1, body.size() - 2);
    std::vector<Rational> coeffs;
    std::string cur;
    for (char ch : body) {
      if (ch == ',') {
        coeffs.push_back(Rational::parse(cur));
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    if (!cur.empty()) coeffs.push_back(Rational::parse(cur));
    return CycloElem(ctx, std::move(coeffs));
  }

  // lexicographic order on coordinate vectors, used for canonical branches
  static bool lex_less(const CycloElem& a, const CycloElem& b) {
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] < b.c_[i]) return true;
      if (b.c_[i] < a.c_[i]) return false;
    }
    return false;
  }

 private:
  void check(const CycloElem& o) const {
    if (N_ != o.N_) throw FieldError("cyclotomic conductor mismatch");
  }
  static void trim(std::vector<Rational>& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
  }
  static std::vector<Rational> mul(const std::vector<Rational>& a,
                                   const std::vector<Rational>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<Rational> r(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        r[i + j] = r[i + j] + a[i] * b[j];
    return r;
  }
  static std::vector<Rational> sub(std::vector<Rational> a,
                                   const std::vector<Rational>& b) {
    if (a.size() < b.size()) a.resize(b.size(), Rational(0));
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = a[i] - b[i];
    return a;
  }
  static std::pair<std::vector<Rational>, std::vector<Rational>> divmod(
      std::vector<Rational> num, const std::vector<Rational>& den) {
    trim(num);
    if (num.size() < den.size()) return {{}, num};
    std::vector<Rational> q(num.size() - den.size() + 1, Rational(0));
    Rational lead = den.back().inverse();
    for (std::size_t i = q.size(); i-- > 0;) {
      Rational c = num[i + den.size() - 1] * lead;
      q[i] = c;
      if (!c.is_zero())
        for (std::size_t j = 0; j < den.size(); ++j)
          num[i + j] = num[i + j] - c * den[j];
    }
    trim(num);
    return {q, num};
  }
  // reduce a raw coefficient vector modulo Phi_N in place
  static void reduce(std::vector<Rational>& p, std::int64_t N) {
    const auto& phiN = detail::cyclotomic_poly(N);
    std::size_t deg = phiN.size() - 1;
    for (std::size_t i = p.size(); i-- > deg;) {
      if (p[i].is_zero()) continue;
      Rational c = p[i];  // Phi_N is monic
      p[i] = Rational(0);
      for (std::size_t j = 0; j < deg; ++j)
        p[i - deg + j] = p[i - deg + j] - c * Rational(phiN[j]);
    }
    p.resize(deg, Rational(0));
  }

  std::int64_t N_;
  std::vector<Rational> c_;
};

// canonical inclusion Q(zeta_N) -> Q(zeta_N'), N | N'
inline CycloElem embed(const CycloElem& x, std::int64_t Nprime) {
  std::int64_t N = x.conductor();
  if (Nprime % N != 0)
    throw FieldError("embed: target conductor not a multiple of source");
  CycloCtx ctx{Nprime};
  std::int64_t step = Nprime / N;
  CycloElem out = CycloElem::from_rational(ctx, Rational(0));
  for (std::size_t i = 0; i < x.coeffs().size(); ++i) {
    if (x.coeffs()[i].is_zero()) continue;
    CycloElem term =
        CycloElem::zeta_pow(ctx, step * static_cast<std::int64_t>(i));
    out = out + term * CycloElem::from_rational(ctx, x.coeffs()[i]);
  }
  return out;
}

inline Rational embed(const Rational& x, std::int64_t) { return x; }

// attempt to express an element of Q(zeta_N') in Q(zeta_N), N | N'
inline std::optional<CycloElem> try_descend(const CycloElem& x,
                                            std::int64_t N) {
  std::int64_t Np = x.conductor();
  if (Np % N != 0) return std::nullopt;
  std::size_t phi = detail::euler_phi(N);
  // solve sum_i c_i * embed(zeta_N^i) = x by matching coordinates
  std::vector<CycloElem> basis;
  basis.reserve(phi);
  for (std::size_t i = 0; i < phi; ++i)
    basis.push_back(embed(CycloElem::zeta_pow(CycloCtx{N}, i), Np));
  std::size_t dim = x.coeffs().size();
  // Gaussian elimination on the phi x dim system (transposed storage)
  std::vector<std::vector<Rational>> rows(dim,
                                          std::vector<Rational>(phi + 1));
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t i = 0; i < phi; ++i) rows[r][i] = basis[i].coeffs()[r];
    rows[r][phi] = x.coeffs()[r];
  }
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_col;
  for (std::size_t col = 0; col < phi && rank < dim; ++col) {
    std::size_t piv = rank;
    while (piv < dim && rows[piv][col].is_zero()) ++piv;
    if (piv == dim) continue;
    std::swap(rows[rank], rows[piv]);
    Rational inv = rows[rank][col].inverse();
    for (auto& v : rows[rank]) v = v * inv;
    for (std::size_t r = 0; r < dim; ++r) {
      if (r == rank || rows[r][col].is_zero()) continue;
      Rational f = rows[r][col];
      for (std::size_t i = col; i <= phi; ++i)
        rows[r][i] = rows[r][i] - f * rows[rank][i];
    }
    pivot_col.push_back(col);
    ++rank;
  }
  for (std::size_t r = rank; r < dim; ++r)
    if (!rows[r][phi].is_zero()) return std::nullopt;
  std::vector<Rational> sol(phi, Rational(0));
  for (std::size_t r = 0; r < rank; ++r) sol[pivot_col[r]] = rows[r][phi];
  return CycloElem(CycloCtx{N}, std::move(sol));
}

// ---------------------------------------------------------------------------
// PrimeFieldElem
// ---------------------------------------------------------------------------

struct FpCtx {
  std::int64_t p = 2;
  bool operator==(const FpCtx& o) const { return p == o.p; }
};

class PrimeFieldElem {
 public:
  PrimeFieldElem() : p_(2), v_(0) {}
  PrimeFieldElem(FpCtx ctx, std::int64_t v) : p_(ctx.p) {
    if (!detail::is_small_prime(p_))
      throw FieldError("prime field modulus is not prime");
    v_ = v % p_;
    if (v_ < 0) v_ += p_;
  }

  std::int64_t modulus() const { return p_; }
  std::int64_t value() const { return v_; }
  FpCtx context() const { return FpCtx{p_}; }

  bool is_zero() const { return v_ == 0; }
  bool is_one() const { return v_ == 1; }

  PrimeFieldElem operator-() const { return make((p_ - v_) % p_); }
  PrimeFieldElem operator+(const PrimeFieldElem& o) const {
    check(o);
    return make((v_ + o.v_) % p_);
  }
  PrimeFieldElem operator-(const PrimeFieldElem& o) const {
    check(o);
    return make((v_ - o.v_ % p_ + p_) % p_);
  }
  PrimeFieldElem operator*(const PrimeFieldElem& o) const {
    check(o);
    return make(static_cast<std::int64_t>(
        (static_cast<__int128>(v_) * o.v_) % p_));
  }
  PrimeFieldElem inverse() const {
    if (v_ == 0) throw FieldError("prime field inverse of zero");
    std::int64_t t = 0, newt = 1, r = p_, newr = v_;
    while (newr != 0) {
      std::int64_t q = r / newr;
      std::swap(t -= q * newt, newt);
      std::swap(r -= q * newr, newr);
    }
    return make((t % p_ + p_) % p_);
  }
  PrimeFieldElem operator/(const PrimeFieldElem& o) const {
    return *this * o.inverse();
  }

  bool operator==(const PrimeFieldElem& o) const {
    return p_ == o.p_ && v_ == o.v_;
  }
  bool operator!=(const PrimeFieldElem& o) const { return !(*this == o); }

  std::string to_string() const {
    return std::to_string(p_) + ":" + std::to_string(v_);
  }
  static PrimeFieldElem parse(FpCtx ctx, const std::string& s) {
    auto colon = s.find(':');
    std::string body = s;
    if (colon != std::string::npos) {
      if (std::stoll(s.substr(0, colon)) != ctx.p)
        throw FieldError("prime field modulus mismatch in parse");
      body = s.substr(colon + 1);
    }
    auto slash = body.find('/');
    if (slash != std::string::npos) {
      PrimeFieldElem n(ctx, std::stoll(body.substr(0, slash)));
      PrimeFieldElem d(ctx, std::stoll(body.substr(slash + 1)));
      return n / d;
    }
    return PrimeFieldElem(ctx, std::stoll(body));
  }

 private:
  void check(const PrimeFieldElem& o) const {
    if (p_ != o.p_) throw FieldError("prime field modulus mismatch");
  }
  PrimeFieldElem make(std::int64_t v) const {
    PrimeFieldElem e;
    e.p_ = p_;
    e.v_ = v;
    return e;
  }
  std::int64_t p_, v_;
};

// ---------------------------------------------------------------------------
// TruncatedLAdic: Z/l^M; not a field, division only by units
// ---------------------------------------------------------------------------

struct ZlCtx {
  std::int64_t ell = 2;
  int M = 1;
  bool operator==(const ZlCtx& o) const { return ell == o.ell && M == o.M; }
  bigint modulus() const {
    bigint m = 1;
    for (int i = 0; i < M; ++i) m *= ell;
    return m;
  }
};

class TruncatedLAdic {
 public:
  TruncatedLAdic() : ell_(2), M_(1), v_(0) {}
  TruncatedLAdic(ZlCtx ctx, bigint v) : ell_(ctx.ell), M_(ctx.M) {
    if (!detail::is_small_prime(ell_))
      throw FieldError("truncated l-adic modulus is not prime");
    if (M_ < 1) throw FieldError("truncated l-adic precision must be >= 1");
    bigint m = ctx.modulus();
    v_ = v % m;
    if (v_ < 0) v_ += m;
  }

  std::int64_t ell() const { return ell_; }
  int precision() const { return M_; }
  const bigint& value() const { return v_; }
  ZlCtx context() const { return ZlCtx{ell_, M_}; }

  bool is_zero() const { return v_ == 0; }
  bool is_unit() const { return v_ % ell_ != 0; }

  TruncatedLAdic operator-() const {
    return TruncatedLAdic(context(), -v_);
  }
  TruncatedLAdic operator+(const TruncatedLAdic& o) const {
    check(o);
    return TruncatedLAdic(context(), v_ + o.v_);
  }
  TruncatedLAdic operator-(const TruncatedLAdic& o) const {
    check(o);
    return TruncatedLAdic(context(), v_ - o.v_);
  }
  TruncatedLAdic operator*(const TruncatedLAdic& o) const {
    check(o);
    return TruncatedLAdic(context(), v_ * o.v_);
  }
  TruncatedLAdic inverse() const {
    if (!is_unit())
      throw FieldError("truncated l-adic inverse of a non-unit");
    bigint m = context().modulus();
    bigint t = 0, newt = 1, r = m, newr = v_;
    while (newr != 0) {
      bigint q = r / newr;
      bigint tmp = t - q * newt;
      t = newt;
      newt = tmp;
      tmp = r - q * newr;
      r = newr;
      newr = tmp;
    }
    return TruncatedLAdic(context(), t);
  }
  TruncatedLAdic operator/(const TruncatedLAdic& o) const {
    return *this * o.inverse();
  }

  bool operator==(const TruncatedLAdic& o) const {
    return ell_ == o.ell_ && M_ == o.M_ && v_ == o.v_;
  }
  bool operator!=(const TruncatedLAdic& o) const { return !(*this == o); }

  std::string to_string() const {
    std::ostringstream os;
    os << ell_ << "^" << M_ << ":" << v_;
    return os.str();
  }
  static TruncatedLAdic parse(ZlCtx ctx, const std::string& s) {
    auto colon = s.find(':');
    std::string body = (colon == std::string::npos) ? s : s.substr(colon + 1);
    auto slash = body.find('/');
    if (slash != std::string::npos) {
      TruncatedLAdic n(ctx, bigint(body.substr(0, slash)));
      TruncatedLAdic d(ctx, bigint(body.substr(slash + 1)));
      return n / d;
    }
    return TruncatedLAdic(ctx, bigint(body));
  }

 private:
  void check(const TruncatedLAdic& o) const {
    if (ell_ != o.ell_ || M_ != o.M_)
      throw FieldError("truncated l-adic context mismatch");
  }
  std::int64_t ell_;
  int M_;
  bigint v_;
};

// value mod l^m at lower precision m <= M
inline TruncatedLAdic ring_reduce(const TruncatedLAdic& x, int m) {
  if (m > x.precision())
    throw FieldError("ring_reduce: requested precision exceeds stored one");
  return TruncatedLAdic(ZlCtx{x.ell(), m}, x.value());
}

// ---------------------------------------------------------------------------
// Square roots with canonical branch
// ---------------------------------------------------------------------------

template <class F>
struct SqrtResult {
  std::optional<F> root;
  // for roots of unity: minimal conductor multiple where a root exists
  std::int64_t conductor_hint = 0;
  bool present() const { return root.has_value(); }
};

inline SqrtResult<Rational> field_sqrt(const Rational& x) {
  if (x.is_zero()) return {Rational(0), 0};
  if (x.num() < 0) return {std::nullopt, 0};
  bigint sn = boost::multiprecision::sqrt(x.num());
  bigint sd = boost::multiprecision::sqrt(x.den());
  if (sn * sn == x.num() && sd * sd == x.den())
    return {Rational(sn, sd), 0};
  return {std::nullopt, 0};
}

inline SqrtResult<PrimeFieldElem> field_sqrt(const PrimeFieldElem& x) {
  // smallest representative wins; moduli are desk-scale
  for (std::int64_t k = 0; k < x.modulus(); ++k) {
    PrimeFieldElem c(x.context(), k);
    if (c * c == x) return {c, 0};
  }
  return {std::nullopt, 0};
}

inline SqrtResult<TruncatedLAdic> field_sqrt(const TruncatedLAdic& x) {
  if (x.is_zero()) return {TruncatedLAdic(x.context(), 0), 0};
  ZlCtx ctx = x.context();
  if (ctx.ell != 2 && x.is_unit()) {
    // base square root mod l, then Hensel lifting
    std::int64_t ell = ctx.ell;
    std::int64_t base = -1;
    std::int64_t x0 = static_cast<std::int64_t>(x.value() % ell);
    for (std::int64_t k = 0; k < ell; ++k)
      if ((k * k) % ell == x0) {
        base = k;
        break;
      }
    if (base < 0) return {std::nullopt, 0};
    TruncatedLAdic y(ctx, base);
    TruncatedLAdic two(ctx, 2);
    for (int i = 0; i < ctx.M; ++i)
      y = y - (y * y - x) / (two * y);
    if (y * y == x) {
      TruncatedLAdic alt = -y;
      return {(y.value() <= alt.value()) ? y : alt, 0};
    }
    return {std::nullopt, 0};
  }
  // non-unit or ell = 2: brute force when the ring is small
  bigint m = ctx.modulus();
  if (m <= 1 << 20) {
    for (bigint k = 0; k < m; ++k) {
      TruncatedLAdic c(ctx, k);
      if (c * c == x) return {c, 0};
    }
  }
  return {std::nullopt, 0};
}

namespace detail {

inline int legendre_symbol(std::int64_t a, std::int64_t p) {
  a %= p;
  if (a < 0) a += p;
  if (a == 0) return 0;
  std::int64_t r = 1, base = a, e = (p - 1) / 2;
  while (e) {
    if (e & 1) r = (__int128)r * base % p;
    base = (__int128)base * (__int128)base % p;
    e >>= 1;
  }
  return r == 1 ? 1 : -1;
}

// sqrt of a squarefree positive integer inside Q(zeta_N) via Gauss sums;
// returns nullopt and the needed conductor factor if unavailable
inline std::optional<CycloElem> cyclo_sqrt_squarefree(
    std::int64_t d, std::int64_t N, std::int64_t& needed) {
  CycloCtx ctx{N};
  CycloElem acc = CycloElem::from_rational(ctx, Rational(1));
  bool need_i = false;
  std::int64_t need = 1;
  auto lcm = [](std::int64_t a, std::int64_t b) {
    return a / std::gcd(a, b) * b;
  };
  std::int64_t rest = d;
  for (std::int64_t q = 2; q * q <= rest || rest > 1;) {
    if (rest == 1) break;
    if (q * q > rest) q = rest;
    if (rest % q != 0) {
      ++q;
      continue;
    }
    rest /= q;
    if (q == 2) {
      if (N % 8 == 0) {
        // sqrt(2) = zeta_8 + zeta_8^{-1}
        acc = acc * (CycloElem::zeta_pow(ctx, N / 8) +
                     CycloElem::zeta_pow(ctx, -N / 8));
      } else {
        need = lcm(need, 8);
      }
    } else if (q % 4 == 1) {
      if (N % q == 0) {
        CycloElem g = CycloElem::from_rational(ctx, Rational(0));
        for (std::int64_t t = 1; t < q; ++t)
          g = g + CycloElem::from_rational(
                      ctx, Rational(legendre_symbol(t, q))) *
                      CycloElem::zeta_pow(ctx, t * (N / q));
        acc = acc * g;  // g^2 = q
      } else {
        need = lcm(need, q);
      }
    } else {  // q % 4 == 3: Gauss sum squares to -q
      if (N % q == 0) {
        CycloElem g = CycloElem::from_rational(ctx, Rational(0));
        for (std::int64_t t = 1; t < q; ++t)
          g = g + CycloElem::from_rational(
                      ctx, Rational(legendre_symbol(t, q))) *
                      CycloElem::zeta_pow(ctx, t * (N / q));
        acc = acc * g;
        need_i = !need_i;  // carries a factor sqrt(-1)
      } else {
        need = lcm(need, 4 * q);
      }
    }
  }
  if (need_i) {
    if (N % 4 == 0) {
      // divide by i to turn sqrt(-q) factors into sqrt(q)
      acc = acc * CycloElem::zeta_pow(ctx, -N / 4);
    } else {
      need = lcm(need, 4);
    }
  }
  if (need > 1) {
    needed = need;
    return std::nullopt;
  }
  return acc;
}

}  // namespace detail

inline SqrtResult<CycloElem> field_sqrt(const CycloElem& x) {
  CycloCtx ctx = x.context();
  std::int64_t N = ctx.N;
  if (x.is_zero()) return {CycloElem::from_rational(ctx, Rational(0)), 0};

  auto lcm = [](std::int64_t a, std::int64_t b) {
    return a / std::gcd(a, b) * b;
  };

  // detect x = r * zeta_N^k with r rational
  for (std::int64_t k = 0; k < N; ++k) {
    CycloElem y = x * CycloElem::zeta_pow(ctx, -k);
    if (!y.is_rational()) continue;
    Rational r = y.rational_value();
    std::int64_t needed = N;
    std::int64_t kk = k;
    // fold a negative sign into the root of unity when possible
    if (r.num() < 0) {
      if (N % 2 == 0) {
        kk = (k + N / 2) % N;
        r = -r;
      }
    }
    bool neg = r.num() < 0;
    if (neg) r = -r;
    // r = s^2 * d with d squarefree
    bigint num = r.num(), den = r.den();
    bigint sn = boost::multiprecision::sqrt(num),
           sd = boost::multiprecision::sqrt(den);
    bigint d_num = 1, d_den = 1;
    bigint s_num = 1, s_den = 1;
    auto split = [](bigint v, bigint& square_root, bigint& squarefree) {
      square_root = 1;
      squarefree = 1;
      for (bigint p = 2; p * p <= v; ++p) {
        int e = 0;
        while (v % p == 0) {
          v /= p;
          ++e;
        }
        for (int i = 0; i < e / 2; ++i) square_root *= p;
        if (e % 2) squarefree *= p;
      }
      squarefree *= v;  // leftover prime
    };
    if (sn * sn == num && sd * sd == den) {
      s_num = sn;
      s_den = sd;
    } else {
      if (num > 2000000000 || den > 2000000000) continue;  // out of scope
      split(num, s_num, d_num);
      split(den, s_den, d_den);
    }
    // sqrt(a/b) = sqrt(a*b)/b on the squarefree parts
    bigint d = d_num * d_den;
    Rational scalar(s_num, s_den * d_den);
    CycloElem root = CycloElem::from_rational(ctx, scalar);
    if (d > 1) {
      if (d > 1000000) continue;
      std::int64_t extra = 1;
      auto piece =
          detail::cyclo_sqrt_squarefree(static_cast<std::int64_t>(d), N,
                                        extra);
      if (!piece) {
        needed = lcm(needed, extra);
        // fall through to hint computation below
        std::int64_t hint = needed;
        if (kk % 2 != 0 && N % 2 == 0) hint = lcm(hint, 2 * N);
        if (neg && N % 4 != 0) hint = lcm(hint, 4);
        return {std::nullopt, hint};
      }
      root = root * (*piece);
    }
    if (neg) {
      if (N % 4 == 0) {
        root = root * CycloElem::zeta_pow(ctx, N / 4);
      } else {
        std::int64_t hint = lcm(needed, 4);
        if (kk % 2 != 0 && N % 2 == 0) hint = lcm(hint, 2 * N);
        return {std::nullopt, hint};
      }
    }
    // root of unity part
    if (kk % 2 == 0) {
      root = root * CycloElem::zeta_pow(ctx, kk / 2);
    } else if (N % 2 == 1) {
      root = root * CycloElem::zeta_pow(ctx, (kk + N) / 2);
    } else {
      return {std::nullopt, lcm(needed, 2 * N)};
    }
    if (root * root != x) continue;  // wrong branch bookkeeping; keep looking
    CycloElem alt = -root;
    return {CycloElem::lex_less(root, alt) ? root : alt, 0};
  }
  return {std::nullopt, 0};
}

// ---------------------------------------------------------------------------
// Field traits: the single point the generic layers program against
// ---------------------------------------------------------------------------

template <class F>
struct FieldTraits;

struct RationalCtx {
  bool operator==(const RationalCtx&) const { return true; }
};

template <>
struct FieldTraits<Rational> {
  using ctx_type = RationalCtx;
  static constexpr bool is_field = true;
  static std::string name(const ctx_type&) { return "rational"; }
  static Rational from_int(const ctx_type&, std::int64_t v) {
    return Rational(bigint(v));
  }
  static std::int64_t residue_characteristic(const ctx_type&) { return 0; }
  static Rational parse(const ctx_type&, const std::string& s) {
    return Rational::parse(s);
  }
  // 0, 1, -1, 2, -2, ...
  static std::optional<Rational> grid_value(const ctx_type&, std::int64_t k) {
    std::int64_t v = (k % 2 == 1) ? (k + 1) / 2 : -(k / 2);
    return Rational(bigint(v));
  }
};

template <>
struct FieldTraits<CycloElem> {
  using ctx_type = CycloCtx;
  static constexpr bool is_field = true;
  static std::string name(const ctx_type& c) {
    return "cyclo:" + std::to_string(c.N);
  }
  static CycloElem from_int(const ctx_type& c, std::int64_t v) {
    return CycloElem::from_rational(c, Rational(bigint(v)));
  }
  static std::int64_t residue_characteristic(const ctx_type&) { return 0; }
  static CycloElem parse(const ctx_type& c, const std::string& s) {
    return CycloElem::parse(c, s);
  }
  // 0, 1, -1, then the powers of zeta and their negatives, then +-2, ...
  static std::optional<CycloElem> grid_value(const ctx_type& c,
                                             std::int64_t k) {
    if (k < 3) return from_int(c, k == 2 ? -1 : k);
    std::int64_t zeta_vals = 2 * (c.N - 1);
    if (k - 3 < zeta_vals) {
      std::int64_t e = 1 + (k - 3) / 2;
      auto z = CycloElem::zeta_pow(c, e);
      return ((k - 3) % 2 == 0) ? z : -z;
    }
    std::int64_t rest = k - 3 - zeta_vals;
    std::int64_t v = (rest % 2 == 0) ? 2 + rest / 2 : -(2 + rest / 2);
    return from_int(c, v);
  }
};

template <>
struct FieldTraits<PrimeFieldElem> {
  using ctx_type = FpCtx;
  static constexpr bool is_field = true;
  static std::string name(const ctx_type& c) {
    return "fp:" + std::to_string(c.p);
  }
  static PrimeFieldElem from_int(const ctx_type& c, std::int64_t v) {
    return PrimeFieldElem(c, v);
  }
  static std::int64_t residue_characteristic(const ctx_type& c) { return c.p; }
  static PrimeFieldElem parse(const ctx_type& c, const std::string& s) {
    return PrimeFieldElem::parse(c, s);
  }
  static std::optional<PrimeFieldElem> grid_value(const ctx_type& c,
                                                  std::int64_t k) {
    if (k >= c.p) return std::nullopt;
    return PrimeFieldElem(c, k);
  }
};

template <>
struct FieldTraits<TruncatedLAdic> {
  using ctx_type = ZlCtx;
  static constexpr bool is_field = false;
  static std::string name(const ctx_type& c) {
    return "ladic:" + std::to_string(c.ell) + "," + std::to_string(c.M);
  }
  static TruncatedLAdic from_int(const ctx_type& c, std::int64_t v) {
    return TruncatedLAdic(c, bigint(v));
  }
  static std::int64_t residue_characteristic(const ctx_type& c) {
    return c.ell;
  }
  static TruncatedLAdic parse(const ctx_type& c, const std::string& s) {
    return TruncatedLAdic::parse(c, s);
  }
  static std::optional<TruncatedLAdic> grid_value(const ctx_type& c,
                                                  std::int64_t k) {
    if (bigint(k) >= c.modulus()) return std::nullopt;
    return TruncatedLAdic(c, bigint(k));
  }
};

template <class F>
using FieldCtx = typename FieldTraits<F>::ctx_type;

// deterministic splitmix64; the artifact never uses std distributions
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::int64_t below(std::int64_t n) {
    return static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(n));
  }

 private:
  std::uint64_t state_;
};

template <class F>
F random_element(const FieldCtx<F>& ctx, Rng& rng, int height = 5) {
  if constexpr (std::is_same_v<F, Rational>) {
    (void)ctx;
    return Rational(bigint(rng.below(2 * height + 1) - height));
  } else if constexpr (std::is_same_v<F, CycloElem>) {
    std::vector<Rational> c(detail::euler_phi(ctx.N));
    for (auto& x : c) x = Rational(bigint(rng.below(2 * height + 1) - height));
    return CycloElem(ctx, std::move(c));
  } else if constexpr (std::is_same_v<F, PrimeFieldElem>) {
    return PrimeFieldElem(ctx, rng.below(ctx.p));
  } else {
    static_assert(std::is_same_v<F, TruncatedLAdic>);
    return TruncatedLAdic(ctx, bigint(rng.below(1 << 20)));
  }
}

}  // namespace cgu
