#include <doctest.h>

#include "cgu/fields.hpp"

using namespace cgu;

namespace {

template <class F>
void check_field_axioms(const FieldCtx<F>& ctx, std::uint64_t seed,
                        int rounds) {
  Rng rng(seed);
  for (int i = 0; i < rounds; ++i) {
    F a = random_element<F>(ctx, rng);
    F b = random_element<F>(ctx, rng);
    F c = random_element<F>(ctx, rng);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    if (!a.is_zero()) {
      if constexpr (std::is_same_v<F, TruncatedLAdic>) {
        if (a.is_unit()) CHECK(a * a.inverse() == FieldTraits<F>::from_int(ctx, 1));
      } else {
        CHECK(a * a.inverse() == FieldTraits<F>::from_int(ctx, 1));
      }
    }
  }
}

}  // namespace

TEST_CASE("rational arithmetic and canonical form") {
  Rational a(bigint(6), bigint(-4));
  CHECK(a.num() == -3);
  CHECK(a.den() == 2);
  CHECK(a.to_string() == "-3/2");
  CHECK(Rational::parse("-3/2") == a);
  CHECK(Rational::parse("7") == Rational(7));
  CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
  CHECK_THROWS_AS(Rational(1).operator/(Rational(0)), FieldError);
}

TEST_CASE("field axioms hold on randomized triples") {
  check_field_axioms<Rational>(RationalCtx{}, 11, 25);
  check_field_axioms<CycloElem>(CycloCtx{8}, 12, 15);
  check_field_axioms<CycloElem>(CycloCtx{12}, 13, 10);
  check_field_axioms<PrimeFieldElem>(FpCtx{13}, 14, 40);
  check_field_axioms<TruncatedLAdic>(ZlCtx{5, 3}, 15, 40);
}

TEST_CASE("cyclotomic power basis reduction") {
  CycloCtx c8{8};
  auto z = CycloElem::zeta_pow(c8, 1);
  // zeta_8^4 = -1 in the power basis
  CHECK(CycloElem::zeta_pow(c8, 4) ==
        CycloElem::from_rational(c8, Rational(-1)));
  CHECK(z * CycloElem::zeta_pow(c8, 7) ==
        CycloElem::from_rational(c8, Rational(1)));
  // equality is equality of reduced coordinate vectors
  auto x = z * z * z * z * z;  // zeta^5 = -zeta
  CHECK(x == -z);
  // inverse
  auto y = CycloElem::from_rational(c8, Rational(1)) + z;
  CHECK(y * y.inverse() == CycloElem::from_rational(c8, Rational(1)));
  // conductor mismatch is an error
  CHECK_THROWS_AS(z + CycloElem::zeta_pow(CycloCtx{12}, 1), FieldError);
}

TEST_CASE("sqrt(4) in Q is 2") {
  auto r = field_sqrt(Rational(4));
  REQUIRE(r.present());
  CHECK(*r.root == Rational(2));
  CHECK(!field_sqrt(Rational(2)).present());
  CHECK(!field_sqrt(Rational(-4)).present());
  CHECK(*field_sqrt(Rational(bigint(9), bigint(25))).root == Rational(3, 5));
}

TEST_CASE("sqrt(-1) in Q(zeta_8) squares to -1, canonical branch stable") {
  CycloCtx c8{8};
  auto m1 = CycloElem::from_rational(c8, Rational(-1));
  auto r = field_sqrt(m1);
  REQUIRE(r.present());
  CHECK(*r.root * *r.root == m1);
  // i is a power of zeta_8: the root is +- zeta_8^2
  auto i = CycloElem::zeta_pow(c8, 2);
  CHECK((*r.root == i || *r.root == -i));
  auto again = field_sqrt(m1);
  CHECK(*again.root == *r.root);
}

TEST_CASE("sqrt(2) in Q(zeta_8): square the candidate and verify") {
  CycloCtx c8{8};
  // independent candidate: zeta_8 + zeta_8^{-1}
  auto cand = CycloElem::zeta_pow(c8, 1) + CycloElem::zeta_pow(c8, -1);
  auto two = CycloElem::from_rational(c8, Rational(2));
  REQUIRE(cand * cand == two);
  auto r = field_sqrt(two);
  REQUIRE(r.present());
  CHECK(*r.root * *r.root == two);
  CHECK((*r.root == cand || *r.root == -cand));
}

TEST_CASE("sqrt conductor hints") {
  // sqrt(zeta_8) needs Q(zeta_16)
  CycloCtx c8{8};
  auto r = field_sqrt(CycloElem::zeta_pow(c8, 1));
  CHECK(!r.present());
  CHECK(r.conductor_hint == 16);
  // sqrt(2) over Q(zeta_4) needs conductor 8
  CycloCtx c4{4};
  auto r2 = field_sqrt(CycloElem::from_rational(c4, Rational(2)));
  CHECK(!r2.present());
  CHECK(r2.conductor_hint == 8);
  // sqrt(-1) over Q(zeta_3) needs 4 | N'
  CycloCtx c3{3};
  auto r3 = field_sqrt(CycloElem::from_rational(c3, Rational(-1)));
  CHECK(!r3.present());
  CHECK(r3.conductor_hint % 4 == 0);
  CHECK(r3.conductor_hint % 3 == 0);
}

TEST_CASE("sqrt in larger cyclotomic fields via Gauss sums") {
  CycloCtx c5{5};
  auto five = CycloElem::from_rational(c5, Rational(5));
  auto r = field_sqrt(five);
  REQUIRE(r.present());
  CHECK(*r.root * *r.root == five);
  // 3 = -(zeta_3-zeta_3^2)^2 needs i as well: conductor 12
  CycloCtx c12{12};
  auto three = CycloElem::from_rational(c12, Rational(3));
  auto r3 = field_sqrt(three);
  REQUIRE(r3.present());
  CHECK(*r3.root * *r3.root == three);
}

TEST_CASE("prime field sqrt picks the smallest representative") {
  FpCtx p13{13};
  auto r = field_sqrt(PrimeFieldElem(p13, 12));  // -1 = 5^2 = 8^2
  REQUIRE(r.present());
  CHECK(r.root->value() == 5);
  CHECK(!field_sqrt(PrimeFieldElem(p13, 2)).present());  // 2 is not a QR
}

TEST_CASE("truncated l-adic sqrt via Hensel lifting") {
  ZlCtx z53{5, 3};
  auto x = TruncatedLAdic(z53, 124);  // -1 mod 125
  auto r = field_sqrt(x);
  REQUIRE(r.present());
  CHECK(*r.root * *r.root == x);
  CHECK(field_sqrt(TruncatedLAdic(z53, 0)).root->is_zero());
}

TEST_CASE("embed: zeta_4 -> zeta_8^2 and rationals unchanged") {
  CHECK(embed(CycloElem::zeta_pow(CycloCtx{4}, 1), 8) ==
        CycloElem::zeta_pow(CycloCtx{8}, 2));
  CHECK(embed(Rational(3, 2), 4) == Rational(3, 2));
  CHECK(embed(CycloElem::from_rational(CycloCtx{4}, Rational(3, 2)), 8) ==
        CycloElem::from_rational(CycloCtx{8}, Rational(3, 2)));
  CHECK_THROWS_AS(embed(CycloElem::zeta_pow(CycloCtx{8}, 1), 12), FieldError);
}

TEST_CASE("embed zeta_3 + 1 -> zeta_12^4 + 1 with minimal polynomial kept") {
  CycloCtx c3{3}, c12{12};
  auto x = CycloElem::zeta_pow(c3, 1) + CycloElem::from_rational(c3, Rational(1));
  auto e = embed(x, 12);
  auto expected = CycloElem::zeta_pow(c12, 4) +
                  CycloElem::from_rational(c12, Rational(1));
  CHECK(e == expected);
  // the image of zeta_3 still satisfies t^2 + t + 1 = 0
  auto z = CycloElem::zeta_pow(c12, 4);
  auto one = CycloElem::from_rational(c12, Rational(1));
  CHECK(z * z + z + one == CycloElem::from_rational(c12, Rational(0)));
}

TEST_CASE("embed is a ring homomorphism on random samples") {
  Rng rng(77);
  CycloCtx c6{6};
  for (int i = 0; i < 20; ++i) {
    auto a = random_element<CycloElem>(c6, rng);
    auto b = random_element<CycloElem>(c6, rng);
    CHECK(embed(a + b, 24) == embed(a, 24) + embed(b, 24));
    CHECK(embed(a * b, 24) == embed(a, 24) * embed(b, 24));
  }
}

TEST_CASE("try_descend inverts embed exactly when possible") {
  Rng rng(78);
  CycloCtx c4{4};
  for (int i = 0; i < 10; ++i) {
    auto a = random_element<CycloElem>(c4, rng);
    auto up = embed(a, 8);
    auto down = try_descend(up, 4);
    REQUIRE(down.has_value());
    CHECK(*down == a);
  }
  // zeta_8 itself does not descend to Q(zeta_4)
  CHECK(!try_descend(CycloElem::zeta_pow(CycloCtx{8}, 1), 4).has_value());
}

TEST_CASE("ring_reduce: 117 mod 25 = 17, identity at full precision") {
  ZlCtx z53{5, 3};
  TruncatedLAdic x(z53, 117);
  CHECK(ring_reduce(x, 2) == TruncatedLAdic(ZlCtx{5, 2}, 17));
  CHECK(ring_reduce(x, 3) == x);
  CHECK(ring_reduce(TruncatedLAdic(z53, 0), 1).is_zero());
  CHECK_THROWS_AS(ring_reduce(x, 4), FieldError);
}

TEST_CASE("ring_reduce is a ring homomorphism and composes") {
  Rng rng(79);
  ZlCtx z53{5, 3};
  for (int i = 0; i < 30; ++i) {
    auto a = random_element<TruncatedLAdic>(z53, rng);
    auto b = random_element<TruncatedLAdic>(z53, rng);
    CHECK(ring_reduce(a + b, 2) == ring_reduce(a, 2) + ring_reduce(b, 2));
    CHECK(ring_reduce(a * b, 2) == ring_reduce(a, 2) * ring_reduce(b, 2));
    CHECK(ring_reduce(ring_reduce(a, 2), 1) == ring_reduce(a, 1));
  }
}

TEST_CASE("division by a non-unit of Z/l^M is refused") {
  ZlCtx z53{5, 3};
  CHECK_THROWS_AS(TruncatedLAdic(z53, 10).inverse(), FieldError);
  CHECK(TruncatedLAdic(z53, 10).is_unit() == false);
  CHECK(TruncatedLAdic(z53, 7).is_unit());
}

TEST_CASE("serialization formats round trip") {
  CHECK(Rational(3, 2).to_string() == "3/2");
  CycloCtx c8{8};
  auto z = CycloElem::zeta_pow(c8, 2);
  CHECK(z.to_string() == "8:[0/1,0/1,1/1,0/1]");
  CHECK(CycloElem::parse(c8, z.to_string()) == z);
  FpCtx p13{13};
  CHECK(PrimeFieldElem(p13, 7).to_string() == "13:7");
  CHECK(PrimeFieldElem::parse(p13, "13:7") == PrimeFieldElem(p13, 7));
  CHECK(PrimeFieldElem::parse(p13, "1/2") == PrimeFieldElem(p13, 7));
  ZlCtx z53{5, 3};
  CHECK(TruncatedLAdic(z53, 117).to_string() == "5^3:117");
  CHECK(TruncatedLAdic::parse(z53, "5^3:117") == TruncatedLAdic(z53, 117));
}
