#include <doctest.h>

#include "cgu/gu.hpp"

using namespace cgu;

namespace {

CycloCtx c16{16};

GUWitnessPair<CycloElem> witness4() {
  return build_witness_pair<CycloElem>(c16, 4, CycloElem::zeta_pow(c16, 4));
}

template <class F>
Matrix<F> random_invertible(const FieldCtx<F>& ctx, std::size_t n, Rng& rng,
                            int height = 4) {
  while (true) {
    Matrix<F> m(ctx, n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        m.at(i, j) = random_element<F>(ctx, rng, height);
    if (m.inverse()) return m;
  }
}

// a monomial conjugator (permutation times a diagonal of roots of unity):
// exact conjugation stays coefficient-friendly at desk scale
Matrix<CycloElem> random_monomial(const CycloCtx& ctx, std::size_t n,
                                  Rng& rng) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = n; i-- > 1;)
    std::swap(perm[i], perm[rng.below(static_cast<std::int64_t>(i) + 1)]);
  Matrix<CycloElem> m(ctx, n, n);
  for (std::size_t i = 0; i < n; ++i)
    m.at(perm[i], i) = CycloElem::zeta_pow(ctx, rng.below(ctx.N));
  return m;
}

}  // namespace

TEST_CASE("build_witness_pair validates and matches the displayed formulas") {
  auto P = witness4();
  auto fi = [&](long v) { return CycloElem::from_rational(c16, Rational(v)); };
  // R((0,0)) is the identity
  CHECK(P.r1[GUWitnessPair<CycloElem>::idx(0, 0)] ==
        CGUElement<CycloElem>::one(c16, 4));
  // generator images: (diag(I_m, Phi_m) Phi_n, 1, 1) c and its transpose
  // arrangement, with R2 the zeta-scaled variant
  auto phin = phi_matrix<CycloElem>(c16, 4);
  auto phim = phi_matrix<CycloElem>(c16, 2);
  Matrix<CycloElem> b01(c16, 4, 4), b10(c16, 4, 4);
  for (int i = 0; i < 2; ++i) {
    b01.at(i, i) = fi(1);
    b10.at(2 + i, 2 + i) = fi(1);
    for (int j = 0; j < 2; ++j) {
      b01.at(2 + i, 2 + j) = phim.at(i, j);
      b10.at(i, j) = phim.at(i, j);
    }
  }
  auto zeta = CycloElem::zeta_pow(c16, 4);
  CHECK(P.r1[GUWitnessPair<CycloElem>::idx(0, 1)] ==
        CGUElement<CycloElem>(b01 * phin, fi(1), fi(1), 1));
  CHECK(P.r1[GUWitnessPair<CycloElem>::idx(1, 0)] ==
        CGUElement<CycloElem>(b10 * phin, fi(1), fi(1), 1));
  CHECK(P.r2[GUWitnessPair<CycloElem>::idx(0, 1)] ==
        CGUElement<CycloElem>(b01 * phin * zeta, fi(1), fi(1), 1));
  CHECK(P.r2[GUWitnessPair<CycloElem>::idx(1, 0)] ==
        CGUElement<CycloElem>(b10 * phin * zeta, fi(1), fi(1), 1));
  // generator images commute and have order dividing 4
  for (const auto* R : {&P.r1, &P.r2}) {
    auto x = (*R)[GUWitnessPair<CycloElem>::idx(0, 1)];
    auto y = (*R)[GUWitnessPair<CycloElem>::idx(1, 0)];
    CHECK(x * y == y * x);
    auto e = CGUElement<CycloElem>::one(c16, 4);
    CHECK(x * x * x * x == e);
    CHECK(y * y * y * y == e);
  }
}

TEST_CASE("build_witness_pair input validation") {
  CHECK_THROWS_AS(
      build_witness_pair<CycloElem>(c16, 6, CycloElem::zeta_pow(c16, 4)),
      FieldError);
  // a non-primitive root is rejected
  CHECK_THROWS_AS(
      build_witness_pair<CycloElem>(c16, 4, CycloElem::zeta_pow(c16, 8)),
      FieldError);
}

TEST_CASE("everywhere locally conjugate: witnesses for all 16 elements") {
  auto P = witness4();
  auto loc = check_local_conjugacy(P);
  REQUIRE(loc.size() == 16);
  for (const auto& e : loc) {
    CHECK(e.status == ConjugacyStatus::Conjugate);
    REQUIRE(e.witness.has_value());
    CHECK(*e.witness * P.r1[e.element] * e.witness->inverse() ==
          P.r2[e.element]);
  }
  // the identity element gets the identity witness
  CHECK(loc[0].detail == "identity witness");
}

TEST_CASE("arity-1 invariants agree; an arity-2 separator exists") {
  auto P = witness4();
  auto sep = find_distinguishing_invariant(P);
  CHECK(sep.arity1_agree);
  REQUIRE(sep.found);
  CHECK(sep.tuple.size() == 2);
  CHECK(sep.descriptor.find("pf-polarisation") != std::string::npos);
  CHECK(sep.value1 != sep.value2);
}

TEST_CASE("not globally conjugate, with an exact certificate") {
  auto P = witness4();
  auto glob = check_global_conjugacy(P);
  CHECK(glob.status == ConjugacyStatus::NonConjugate);
  CHECK(!glob.certificate.empty());
}

TEST_CASE("sanity: a conjugated copy is detected as globally conjugate") {
  auto P = witness4();
  // a root-of-unity scaling with nontrivial lambda and mu coordinates
  CGUElement<CycloElem> h(
      Matrix<CycloElem>::identity(c16, 4) * CycloElem::zeta_pow(c16, 1),
      CycloElem::from_rational(c16, Rational(2)),
      CycloElem::from_rational(c16, Rational(3)), 0);
  auto Q = P;
  for (int a = 0; a < 16; ++a) Q.r2[a] = h * P.r1[a] * h.inverse();
  auto glob = check_global_conjugacy(Q);
  REQUIRE(glob.status == ConjugacyStatus::Conjugate);
  // and the separator search finds nothing
  auto sep = find_distinguishing_invariant(Q);
  CHECK(!sep.found);
  CHECK(sep.arity1_agree);
}

TEST_CASE("pfaffian polarisation: diagonal identity and multilinearity") {
  RationalCtx rc{};
  Rng rng(82);
  // two slots of 4x4: P(A, A) = 2! pf(A - A^t)
  for (int t = 0; t < 10; ++t) {
    Matrix<Rational> A(rc, 4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        A.at(i, j) = random_element<Rational>(rc, rng);
    CHECK(pfaffian_polarization<Rational>({A, A}) ==
          pfaffian(A - A.transpose()) * Rational(2));
  }
  // four slots of 8x8: P(A, A, A, A) = 4! pf(A - A^t)
  {
    Matrix<Rational> A(rc, 8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        A.at(i, j) = random_element<Rational>(rc, rng, 3);
    CHECK(pfaffian_polarization<Rational>({A, A, A, A}) ==
          pfaffian(A - A.transpose()) * Rational(24));
  }
  // symmetry under swapping arguments
  Matrix<Rational> A(rc, 4, 4), B(rc, 4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      A.at(i, j) = random_element<Rational>(rc, rng);
      B.at(i, j) = random_element<Rational>(rc, rng);
    }
  CHECK(pfaffian_polarization<Rational>({A, B}) ==
        pfaffian_polarization<Rational>({B, A}));
  // vanishes when an argument is symmetric
  auto S = B + B.transpose();
  CHECK(pfaffian_polarization<Rational>({A, S}).is_zero());
  // argument count must be half the size
  CHECK_THROWS_AS(pfaffian_polarization<Rational>({A, B, A}), FieldError);
}

TEST_CASE("pfaffian polarisation transforms by det under the slot action") {
  RationalCtx rc{};
  Rng rng(83);
  for (int t = 0; t < 5; ++t) {
    Matrix<Rational> A(rc, 4, 4), B(rc, 4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        A.at(i, j) = random_element<Rational>(rc, rng, 3);
        B.at(i, j) = random_element<Rational>(rc, rng, 3);
      }
    auto h = random_invertible<Rational>(rc, 4, rng, 2);
    CHECK(pfaffian_polarization<Rational>(
              {h * A * h.transpose(), h * B * h.transpose()}) ==
          det(h) * pfaffian_polarization<Rational>({A, B}));
  }
}

TEST_CASE("the composed pf invariant is constant on twisted orbits") {
  // the invariant value of the separator function is unchanged when every
  // slot is conjugated by one identity-component element
  auto P = witness4();
  Rng rng(84);
  for (int t = 0; t < 5; ++t) {
    CGUElement<CycloElem> h(random_monomial(c16, 4, rng),
                            CycloElem::from_rational(c16, Rational(5)),
                            CycloElem::from_rational(c16, Rational(7)), 0);
    auto phi = phi_matrix<CycloElem>(c16, 4);
    for (int a : {1, 4}) {
      for (int b : {1, 4}) {
        auto x1 = P.r1[a], x2 = P.r1[b];
        auto y1 = h * x1 * h.inverse(), y2 = h * x2 * h.inverse();
        auto v_before = pfaffian_polarization<CycloElem>(
                            {x1.g() * phi, x2.g() * phi}) *
                        x1.lambda();
        auto v_after = pfaffian_polarization<CycloElem>(
                           {y1.g() * phi, y2.g() * phi}) *
                       y1.lambda();
        CHECK(v_before == v_after);
      }
    }
  }
}

TEST_CASE("n = 8 stretch: the same phenomena one size up") {
  CycloCtx c32{32};
  auto P = build_witness_pair<CycloElem>(c32, 8, CycloElem::zeta_pow(c32, 4));
  auto loc = check_local_conjugacy(P);
  for (const auto& e : loc) CHECK(e.status == ConjugacyStatus::Conjugate);
  auto glob = check_global_conjugacy(P);
  CHECK(glob.status == ConjugacyStatus::NonConjugate);
}

TEST_CASE("action variants: the verdicts depend on the lambda twist") {
  // without the determinant twist on lambda the scalar zeta_8 I becomes a
  // legitimate conjugator and the two homomorphisms are globally conjugate
  auto P = build_witness_pair<CycloElem>(c16, 4, CycloElem::zeta_pow(c16, 4),
                                         CGUActionVariant::plain_lambda);
  auto loc = check_local_conjugacy(P);
  int conj = 0;
  for (const auto& e : loc)
    if (e.status == ConjugacyStatus::Conjugate) ++conj;
  CHECK(conj == 16);
  auto glob = check_global_conjugacy(P);
  CHECK(glob.status == ConjugacyStatus::Conjugate);

  // the inverse-det twist obstructs exactly like the default one
  auto Pi = build_witness_pair<CycloElem>(c16, 4, CycloElem::zeta_pow(c16, 4),
                                          CGUActionVariant::det_inv_lambda);
  auto globi = check_global_conjugacy(Pi);
  CHECK(globi.status == ConjugacyStatus::NonConjugate);
}
