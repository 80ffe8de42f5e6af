#include <doctest.h>

#include "cgu/matrix.hpp"

using namespace cgu;

namespace {

RationalCtx rc{};

Matrix<Rational> rat_matrix(std::size_t n, std::vector<long> entries) {
  std::vector<Rational> e;
  for (long v : entries) e.emplace_back(v);
  return Matrix<Rational>(rc, n, n, std::move(e));
}

template <class F>
Matrix<F> random_matrix(const FieldCtx<F>& ctx, std::size_t n, Rng& rng) {
  Matrix<F> m(ctx, n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m.at(i, j) = random_element<F>(ctx, rng);
  return m;
}

template <class F>
Matrix<F> random_invertible(const FieldCtx<F>& ctx, std::size_t n, Rng& rng) {
  while (true) {
    auto m = random_matrix<F>(ctx, n, rng);
    if (m.inverse()) return m;
  }
}

// independent oracle: elementary symmetric polynomials of given values
std::vector<Rational> elementary_symmetric(const std::vector<Rational>& v) {
  std::vector<Rational> e(v.size() + 1, Rational(0));
  e[0] = Rational(1);
  for (const auto& x : v)
    for (std::size_t k = e.size() - 1; k >= 1; --k)
      e[k] = e[k] + e[k - 1] * x;
  return e;
}

// independent oracle: Pfaffian by explicit perfect-matching enumeration
Rational pfaffian_matchings(const Matrix<Rational>& m) {
  std::size_t n = m.rows();
  std::vector<std::size_t> left;
  std::function<Rational(std::vector<bool>&, int)> rec =
      [&](std::vector<bool>& used, int sign_acc) -> Rational {
    std::size_t first = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i]) {
        first = i;
        break;
      }
    if (first == n) return Rational(sign_acc);
    Rational total(0);
    used[first] = true;
    int skipped = 0;
    for (std::size_t j = first + 1; j < n; ++j) {
      if (used[j]) continue;
      used[j] = true;
      // pairing (first, j) contributes sign (-1)^{#unused elements between}
      int sgn = (skipped % 2 == 0) ? 1 : -1;
      total = total + m.at(first, j) * rec(used, sign_acc * sgn);
      used[j] = false;
      ++skipped;
    }
    used[first] = false;
    return total;
  };
  std::vector<bool> used(n, false);
  return rec(used, 1);
}

}  // namespace

TEST_CASE("phi_matrix matches the entry formula") {
  for (std::size_t n : {1u, 2u, 3u, 5u}) {
    auto phi = phi_matrix<Rational>(rc, n);
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 1; j <= n; ++j) {
        Rational expect =
            (i == n - j + 1) ? Rational((i % 2 == 1) ? 1 : -1) : Rational(0);
        CHECK(phi.at(i - 1, j - 1) == expect);
      }
  }
  CHECK(phi_matrix<Rational>(rc, 1) == rat_matrix(1, {1}));
  CHECK(phi_matrix<Rational>(rc, 2) == rat_matrix(2, {0, 1, -1, 0}));
  CHECK(phi_matrix<Rational>(rc, 3) ==
        rat_matrix(3, {0, 0, 1, 0, -1, 0, 1, 0, 0}));
}

TEST_CASE("Phi_n identities: transpose, inverse, square") {
  for (std::size_t n : {2u, 3u, 4u, 5u}) {
    auto phi = phi_matrix<Rational>(rc, n);
    Rational sgn((n % 2 == 1) ? 1 : -1);
    CHECK(phi.transpose() == phi * sgn);
    CHECK(phi * phi == Matrix<Rational>::identity(rc, n) * sgn);
    CHECK(phi.inverse_or_throw() == phi * sgn);
  }
}

TEST_CASE("char_poly_coeffs on pinned examples") {
  auto cp_id = char_poly_coeffs(Matrix<Rational>::identity(rc, 2));
  CHECK(cp_id.s == std::vector<Rational>{Rational(2), Rational(1)});
  auto d = rat_matrix(3, {1, 0, 0, 0, 2, 0, 0, 0, 3});
  auto cp = char_poly_coeffs(d);
  // oracle: elementary symmetric polynomials of (1, 2, 3)
  auto e = elementary_symmetric({Rational(1), Rational(2), Rational(3)});
  CHECK(cp.s == std::vector<Rational>{e[1], e[2], e[3]});
  CHECK(cp.s == std::vector<Rational>{Rational(6), Rational(11), Rational(6)});
  auto cp_phi = char_poly_coeffs(phi_matrix<Rational>(rc, 2));
  CHECK(cp_phi.s == std::vector<Rational>{Rational(0), Rational(1)});
  CHECK_THROWS_AS(char_poly_coeffs(Matrix<Rational>(rc, 2, 3)), FieldError);
}

TEST_CASE("char_poly s_1 is the trace and s_n the determinant") {
  Rng rng(21);
  for (int t = 0; t < 10; ++t) {
    auto m = random_matrix<Rational>(rc, 4, rng);
    auto cp = char_poly_coeffs(m);
    CHECK(cp.s.front() == m.trace());
    CHECK(cp.s.back() == det(m));
  }
}

TEST_CASE("char_poly is conjugation invariant on random samples") {
  Rng rng(22);
  FpCtx p13{13};
  for (int t = 0; t < 10; ++t) {
    auto m = random_matrix<PrimeFieldElem>(p13, 3, rng);
    auto g = random_invertible<PrimeFieldElem>(p13, 3, rng);
    auto conj = g * m * g.inverse_or_throw();
    CHECK(char_poly_coeffs(m).s == char_poly_coeffs(conj).s);
  }
}

TEST_CASE("char_poly works over the truncated ring (division-free)") {
  ZlCtx z53{5, 3};
  Matrix<TruncatedLAdic> m(z53, 2, 2);
  m.at(0, 0) = TruncatedLAdic(z53, 10);  // non-unit entries allowed
  m.at(0, 1) = TruncatedLAdic(z53, 3);
  m.at(1, 0) = TruncatedLAdic(z53, 7);
  m.at(1, 1) = TruncatedLAdic(z53, 5);
  auto cp = char_poly_coeffs(m);
  CHECK(cp.s[0] == TruncatedLAdic(z53, 15));
  CHECK(cp.s[1] == TruncatedLAdic(z53, 50 - 21));
}

TEST_CASE("pfaffian: 2x2 convention and 4x4 against the matching oracle") {
  auto a = rat_matrix(2, {0, 5, -5, 0});
  CHECK(pfaffian(a) == Rational(5));
  Rng rng(23);
  for (int t = 0; t < 10; ++t) {
    Matrix<Rational> m(rc, 4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        m.at(i, j) = random_element<Rational>(rc, rng);
        m.at(j, i) = -m.at(i, j);
      }
    // a12 a34 - a13 a24 + a14 a23
    Rational expect = m.at(0, 1) * m.at(2, 3) - m.at(0, 2) * m.at(1, 3) +
                      m.at(0, 3) * m.at(1, 2);
    CHECK(pfaffian(m) == expect);
    CHECK(pfaffian(m) == pfaffian_matchings(m));
    CHECK(pfaffian(m) * pfaffian(m) == det(m));
  }
}

TEST_CASE("pfaffian transforms by det under congruence") {
  Rng rng(24);
  for (std::size_t n : {2u, 4u}) {
    for (int t = 0; t < 5; ++t) {
      Matrix<Rational> m(rc, n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          m.at(i, j) = random_element<Rational>(rc, rng);
          m.at(j, i) = -m.at(i, j);
        }
      auto g = random_invertible<Rational>(rc, n, rng);
      CHECK(pfaffian(g * m * g.transpose()) == det(g) * pfaffian(m));
    }
  }
}

TEST_CASE("pfaffian input validation") {
  CHECK_THROWS_AS(pfaffian(rat_matrix(3, {0, 1, 2, -1, 0, 3, -2, -3, 0})),
                  FieldError);
  CHECK_THROWS_AS(pfaffian(rat_matrix(2, {0, 1, 1, 0})), FieldError);
}

TEST_CASE("pfaffian of 6x6 and 8x8 squares to the determinant") {
  Rng rng(25);
  for (std::size_t n : {6u, 8u}) {
    Matrix<Rational> m(rc, n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        m.at(i, j) = random_element<Rational>(rc, rng, 3);
        m.at(j, i) = -m.at(i, j);
      }
    CHECK(pfaffian(m) * pfaffian(m) == det(m));
  }
}

TEST_CASE("intertwiner space: identity pair spans all matrices") {
  auto id = Matrix<Rational>::identity(rc, 3);
  auto basis = intertwiner_space<Rational>({id}, {id});
  CHECK(basis.size() == 9);
}

TEST_CASE("intertwiner space of an irreducible pair is one-dimensional") {
  // the 2-dimensional irreducible of Q8 over F_13 (i = 5)
  FpCtx p13{13};
  auto fi = [&](long v) { return PrimeFieldElem(p13, v); };
  Matrix<PrimeFieldElem> mi(p13, 2, 2), mj(p13, 2, 2);
  mi.at(0, 0) = fi(5);
  mi.at(1, 1) = fi(-5);
  mj.at(0, 1) = fi(1);
  mj.at(1, 0) = fi(-1);
  auto self = intertwiner_space<PrimeFieldElem>({mi, mj}, {mi, mj});
  CHECK(self.size() == 1);
  // non-isomorphic: against the images of a character twist
  auto basis = intertwiner_space<PrimeFieldElem>({mi, mj}, {mi, -mj});
  CHECK(basis.empty());
}

TEST_CASE("simultaneous_conjugator on the pinned examples") {
  auto X = rat_matrix(2, {1, 0, 0, 2});
  auto self = simultaneous_conjugator<Rational>({X}, {X});
  REQUIRE(self.status == ConjugacyStatus::Conjugate);
  CHECK(*self.witness * X == X * *self.witness);

  auto Y = rat_matrix(2, {2, 0, 0, 1});
  auto r = simultaneous_conjugator<Rational>({X}, {Y});
  REQUIRE(r.status == ConjugacyStatus::Conjugate);
  CHECK(*r.witness == rat_matrix(2, {0, 1, 1, 0}));

  auto Z = rat_matrix(2, {1, 0, 0, 3});
  auto nc = simultaneous_conjugator<Rational>({X}, {Z});
  CHECK(nc.status == ConjugacyStatus::NonConjugate);
}

TEST_CASE("conjugator verdicts agree with exhaustive search over small F_p") {
  for (std::int64_t p : {3, 5}) {
    FpCtx ctx{p};
    Rng rng(100 + p);
    for (int trial = 0; trial < 12; ++trial) {
      auto X = random_matrix<PrimeFieldElem>(ctx, 2, rng);
      Matrix<PrimeFieldElem> Y(ctx, 2, 2);
      if (trial % 2 == 0) {
        auto g = random_invertible<PrimeFieldElem>(ctx, 2, rng);
        Y = g * X * g.inverse_or_throw();
      } else {
        Y = random_matrix<PrimeFieldElem>(ctx, 2, rng);
      }
      // exhaustive oracle over all invertible 2x2 matrices
      bool oracle = false;
      for (std::int64_t a = 0; a < p && !oracle; ++a)
        for (std::int64_t b = 0; b < p && !oracle; ++b)
          for (std::int64_t c = 0; c < p && !oracle; ++c)
            for (std::int64_t d = 0; d < p && !oracle; ++d) {
              Matrix<PrimeFieldElem> A(ctx, 2, 2);
              A.at(0, 0) = PrimeFieldElem(ctx, a);
              A.at(0, 1) = PrimeFieldElem(ctx, b);
              A.at(1, 0) = PrimeFieldElem(ctx, c);
              A.at(1, 1) = PrimeFieldElem(ctx, d);
              auto inv = A.inverse();
              if (inv && A * X * *inv == Y) oracle = true;
            }
      auto r = simultaneous_conjugator<PrimeFieldElem>({X}, {Y});
      if (oracle) {
        CHECK(r.status == ConjugacyStatus::Conjugate);
      } else {
        CHECK(r.status == ConjugacyStatus::NonConjugate);
      }
    }
  }
}

TEST_CASE("symmetric_congruence on pinned and random inputs") {
  auto A = rat_matrix(2, {4, 0, 0, 9});
  auto h = symmetric_congruence(A);
  CHECK(h * A * h.transpose() == Matrix<Rational>::identity(rc, 2));
  std::vector<Rational> expect{Rational(1, 2), Rational(0), Rational(0),
                               Rational(1, 3)};
  CHECK(h == Matrix<Rational>(rc, 2, 2, expect));

  CycloCtx c8{8};
  Matrix<CycloElem> B(c8, 2, 2);
  B.at(0, 1) = CycloElem::from_rational(c8, Rational(1));
  B.at(1, 0) = CycloElem::from_rational(c8, Rational(1));
  auto h2 = symmetric_congruence(B);
  CHECK(h2 * B * h2.transpose() == Matrix<CycloElem>::identity(c8, 2));

  FpCtx p13{13};
  Rng rng(31);
  for (int t = 0; t < 10; ++t) {
    auto g = random_invertible<PrimeFieldElem>(p13, 3, rng);
    auto S = g * g.transpose();  // symmetric invertible
    auto h3 = symmetric_congruence(S);
    CHECK(h3 * S * h3.transpose() == Matrix<PrimeFieldElem>::identity(p13, 3));
  }
}

TEST_CASE("symmetric_congruence error paths") {
  CHECK_THROWS_AS(symmetric_congruence(rat_matrix(2, {0, 1, -1, 0})),
                  FieldError);  // not symmetric
  CHECK_THROWS_AS(symmetric_congruence(rat_matrix(2, {1, 1, 1, 1})),
                  FieldError);  // singular
  // sqrt(2) is missing over Q
  CHECK_THROWS_AS(symmetric_congruence(rat_matrix(1, {2})), SqrtNeeded);
  // over Q(zeta_4) the hint points at conductor 8
  CycloCtx c4{4};
  Matrix<CycloElem> M(c4, 1, 1);
  M.at(0, 0) = CycloElem::from_rational(c4, Rational(2));
  try {
    symmetric_congruence(M);
    CHECK(false);
  } catch (const SqrtNeeded& e) {
    CHECK(e.conductor_hint == 8);
  }
}

TEST_CASE("matrix inverse over the local ring Z/l^M") {
  ZlCtx z53{5, 3};
  Matrix<TruncatedLAdic> m(z53, 2, 2);
  m.at(0, 0) = TruncatedLAdic(z53, 2);
  m.at(0, 1) = TruncatedLAdic(z53, 5);
  m.at(1, 0) = TruncatedLAdic(z53, 0);
  m.at(1, 1) = TruncatedLAdic(z53, 3);
  auto inv = m.inverse();
  REQUIRE(inv.has_value());
  CHECK(m * *inv == Matrix<TruncatedLAdic>::identity(z53, 2));
  // determinant divisible by 5: not invertible in the ring
  m.at(1, 1) = TruncatedLAdic(z53, 5);
  m.at(0, 1) = TruncatedLAdic(z53, 5);
  m.at(1, 0) = TruncatedLAdic(z53, 5);
  CHECK(!m.inverse());
}
