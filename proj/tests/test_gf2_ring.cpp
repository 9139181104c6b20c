#include <algorithm>
#include <random>

#include "doctest.h"
#include "equipart/gf2_ring.hpp"
#include "reference_poly.hpp"
#include "support.hpp"

using namespace equipart;

namespace {

TruncatedPolynomial random_poly(const RingShape& shape, std::mt19937& rng,
                                double density = 0.3) {
  std::bernoulli_distribution coin(density);
  auto p = TruncatedPolynomial::zero(shape);
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (coin(rng)) p += TruncatedPolynomial::monomial(shape, shape.exponents_of(i));
  }
  return p;
}

SignVector random_form(int k, std::mt19937& rng) {
  std::uniform_int_distribution<std::uint32_t> pick(1, (1u << k) - 1);
  return SignVector(k, pick(rng));
}

}  // namespace

TEST_SUITE("gf2_ring") {

TEST_CASE("ring shape indexing round-trips") {
  const RingShape shape(3, 4);
  CHECK(shape.size() == 125);
  for (std::size_t i = 0; i < shape.size(); ++i) {
    CHECK(shape.index_of(shape.exponents_of(i)) == i);
  }
  CHECK(shape.index_of(std::vector<int>{1, 2, 3}) == 1 + 5 * 2 + 25 * 3);
}

TEST_CASE("out-of-range shapes and exponents are rejected") {
  CHECK(kind_of([] { RingShape(0, 2); }) == ErrorKind::kRange);
  CHECK(kind_of([] { RingShape(2, -1); }) == ErrorKind::kRange);
  CHECK(kind_of([] { RingShape(20, 100); }) == ErrorKind::kRange);
  const RingShape shape(2, 3);
  CHECK(kind_of([&] { TruncatedPolynomial::monomial(shape, std::vector<int>{4, 0}); }) ==
        ErrorKind::kRange);
  CHECK(kind_of([&] { TruncatedPolynomial::monomial(shape, std::vector<int>{1}); }) ==
        ErrorKind::kRange);
}

TEST_CASE("sign vectors") {
  CHECK(kind_of([] { SignVector(3, 0); }) == ErrorKind::kDomain);
  CHECK(kind_of([] { SignVector(2, 4); }) == ErrorKind::kRange);
  const auto v = SignVector::from_bits(std::vector<int>{0, 1, 1});
  CHECK(v.mask() == 6u);
  CHECK(v.weight() == 2);
  CHECK(v.bits() == std::vector<int>{0, 1, 1});
  CHECK(SignVector::pair(3, 1, 2) == v);
  CHECK(SignVector::basis(3, 0).mask() == 1u);
}

TEST_CASE("canonical text form") {
  const RingShape shape(2, 3);
  CHECK(TruncatedPolynomial::zero(shape).to_string() == "0");
  CHECK(TruncatedPolynomial::one(shape).to_string() == "1");
  // (u1 + u2) * u1 * u2
  auto p = mul_linear(TruncatedPolynomial::monomial(shape, std::vector<int>{1, 1}),
                      SignVector(2, 3));
  CHECK(p.to_string() == "u1*u2^2 + u1^2*u2");
  CHECK(p.term_count() == 2);
}

TEST_CASE("top detection") {
  const RingShape shape(2, 3);
  const auto top = TruncatedPolynomial::monomial(shape, std::vector<int>{3, 3});
  CHECK(top.is_top());
  const auto extra = top + TruncatedPolynomial::monomial(shape, std::vector<int>{3, 0});
  CHECK_FALSE(extra.is_top());
  CHECK_FALSE(TruncatedPolynomial::zero(shape).is_top());
}

TEST_CASE("truncation kills overflowing products") {
  const RingShape shape(2, 2);
  auto p = TruncatedPolynomial::monomial(shape, std::vector<int>{2, 0});
  CHECK(mul_linear(p, SignVector::basis(2, 0)).is_zero());
  CHECK(mul_linear(p, SignVector::basis(2, 1)) ==
        TruncatedPolynomial::monomial(shape, std::vector<int>{2, 1}));
}

TEST_CASE("mixing shapes is a shape error") {
  const RingShape a(2, 2);
  const RingShape b(2, 3);
  CHECK(kind_of([&] { add(TruncatedPolynomial::one(a), TruncatedPolynomial::one(b)); }) ==
        ErrorKind::kShape);
  CHECK(kind_of([&] { mul_linear(TruncatedPolynomial::one(a), SignVector(3, 1)); }) ==
        ErrorKind::kShape);
}

TEST_CASE("arithmetic agrees with the sparse oracle") {
  std::mt19937 rng(11);
  for (int k = 1; k <= 4; ++k) {
    for (int d = 0; d <= 4; ++d) {
      const RingShape shape(k, d);
      for (int trial = 0; trial < 8; ++trial) {
        const auto p = random_poly(shape, rng);
        const auto q = random_poly(shape, rng);
        const auto f = random_form(k, rng);
        CHECK(oracle::from(p + q) == oracle::add(oracle::from(p), oracle::from(q)));
        CHECK(oracle::from(p * q) == oracle::mul(oracle::from(p), oracle::from(q), d));
        CHECK(oracle::from(mul_linear(p, f)) ==
              oracle::mul(oracle::from(p), oracle::linear(f.bits()), d));
      }
    }
  }
}

TEST_CASE("ring axioms") {
  std::mt19937 rng(5);
  const RingShape shape(3, 3);
  const auto zero = TruncatedPolynomial::zero(shape);
  const auto one = TruncatedPolynomial::one(shape);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_poly(shape, rng);
    const auto q = random_poly(shape, rng);
    const auto r = random_poly(shape, rng);
    CHECK(p + q == q + p);
    CHECK(p * q == q * p);
    CHECK((p + q) + r == p + (q + r));
    CHECK((p * q) * r == p * (q * r));
    CHECK(p * (q + r) == p * q + p * r);
    CHECK(p + zero == p);
    CHECK(p * one == p);
    CHECK((p + p).is_zero());
    CHECK((p * zero).is_zero());
  }
}

TEST_CASE("Frobenius: squaring is additive in characteristic two") {
  std::mt19937 rng(17);
  const RingShape shape(3, 4);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_poly(shape, rng);
    const auto q = random_poly(shape, rng);
    CHECK((p + q) * (p + q) == p * p + q * q);
  }
}

TEST_CASE("products of linear forms are homogeneous") {
  std::mt19937 rng(23);
  const RingShape shape(4, 5);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<SignVector> forms;
    const int n = 1 + trial % 12;
    for (int i = 0; i < n; ++i) forms.push_back(random_form(4, rng));
    const auto h = product_of_forms(shape, forms);
    for (const auto& e : h.support()) {
      int deg = 0;
      for (int v : e) deg += v;
      CHECK(deg == n);
    }
  }
}

TEST_CASE("product of forms ignores the order of the factors") {
  std::mt19937 rng(31);
  const RingShape shape(3, 6);
  std::vector<SignVector> forms;
  for (int i = 0; i < 18; ++i) forms.push_back(random_form(3, rng));
  const auto base = product_of_forms(shape, forms);
  std::vector<std::vector<int>> bits;
  for (const auto& f : forms) bits.push_back(f.bits());
  CHECK(oracle::from(base) == oracle::product(3, 6, bits));
  for (int shuffle = 0; shuffle < 120; ++shuffle) {
    std::shuffle(forms.begin(), forms.end(), rng);
    const auto h = product_of_forms(shape, forms);
    CHECK(h == base);
    CHECK(h.digest() == base.digest());
  }
}

TEST_CASE("JSON round trip and digest") {
  std::mt19937 rng(3);
  const RingShape shape(3, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_poly(shape, rng);
    const auto back = TruncatedPolynomial::from_json(p.to_json());
    CHECK(back == p);
    CHECK(back.digest() == p.digest());
  }
  const auto a = TruncatedPolynomial::one(shape);
  const auto b = TruncatedPolynomial::zero(shape);
  CHECK(a.digest() != b.digest());
  CHECK(a.digest().size() == 64);
  CHECK(kind_of([] { TruncatedPolynomial::from_json(nlohmann::json{{"k", 2}}); }) ==
        ErrorKind::kConfig);
}

}  // TEST_SUITE
