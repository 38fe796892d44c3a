#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "germ/error.hpp"
#include "germ/field.hpp"

using namespace germ;

namespace {

std::vector<FieldElement> all_elements(FieldRef f) {
  std::vector<FieldElement> out;
  for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(f->order()); ++c) out.emplace_back(f, c);
  return out;
}

unsigned mult_order(const FieldElement& x) {
  FieldElement y = x;
  unsigned n = 1;
  while (!y.is_one()) {
    y *= x;
    ++n;
  }
  return n;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::Internal;
}

}  // namespace

TEST_CASE("field_create examples") {
  FieldRef f3 = field_create(3, 1);
  CHECK(f3->order() == 3);
  CHECK(f3->modulus() == std::vector<std::uint64_t>{0, 1});

  FieldRef f9 = field_create(3, 2, std::vector<std::uint64_t>{1, 0, 1});
  CHECK(f9->order() == 9);
  // the default search also lands on x^2 + 1
  CHECK(field_create(3, 2) == f9);

  CHECK(code_of([] { field_create(4, 1); }) == Errc::CompositeP);
  CHECK(code_of([] { field_create(3, 2, std::vector<std::uint64_t>{2, 0, 1}); }) == Errc::ReducibleModulus);
  CHECK(code_of([] { field_create(2, 65); }) == Errc::FieldTooLarge);
}

TEST_CASE("default moduli are irreducible by exhaustive root and factor check") {
  for (auto [p, k] : {std::pair{2u, 2u}, {2u, 3u}, {2u, 4u}, {3u, 3u}, {5u, 2u}, {7u, 3u}}) {
    FieldRef f = field_create(p, k);
    FieldRef fp = prime_field(p);
    // a degree <= 3 polynomial is irreducible iff it has no root; for 2^4 also
    // rule out products of two irreducible quadratics by brute force
    Poly m;
    for (auto c : f->modulus()) m.emplace_back(fp, c);
    for (auto& z : all_elements(fp)) CHECK_FALSE(poly::eval(m, z).is_zero());
    if (k == 4) {
      for (std::uint64_t a = 0; a < 4; ++a) {
        for (std::uint64_t b = 0; b < 4; ++b) {
          Poly qa{{fp, a & 1}, {fp, a >> 1}, {fp, 1}};
          Poly qb{{fp, b & 1}, {fp, b >> 1}, {fp, 1}};
          CHECK(poly::sub(poly::mul(qa, qb), m) != Poly{});
        }
      }
    }
    // nothing lexicographically smaller is irreducible: the smaller monic
    // candidates of degree <= 3 each have a root
    if (k <= 3) {
      std::uint64_t code = 0;
      for (std::size_t i = k; i-- > 0;) code = code * p + f->modulus()[i];
      for (std::uint64_t c = 0; c < code; ++c) {
        Poly cand;
        std::uint64_t x = c;
        for (unsigned i = 0; i < k; ++i) {
          cand.emplace_back(fp, x % p);
          x /= p;
        }
        cand.emplace_back(fp, 1);
        bool has_root = false;
        for (auto& z : all_elements(fp)) has_root |= poly::eval(cand, z).is_zero();
        CHECK(has_root);
      }
    }
  }
}

TEST_CASE("arith examples") {
  FieldRef f3 = prime_field(3);
  CHECK(FieldElement(f3, 2).inverse() == FieldElement(f3, 2));
  FieldRef f9 = field_create(3, 2, std::vector<std::uint64_t>{1, 0, 1});
  FieldElement a = FieldElement::generator(f9);
  CHECK(a * a == FieldElement::from_int(f9, -1));
  CHECK((a * a).code() == 2);
  CHECK(code_of([&] { FieldElement::zero(f9).inverse(); }) == Errc::DivisionByZero);
  FieldRef f4 = field_create(2, 2);
  CHECK(code_of([&] { (void)(a + FieldElement::generator(f4)); }) == Errc::IncompatibleFields);
  // prime-field elements mix freely with extension elements
  CHECK((a + FieldElement(f3, 1)).field() == f9);
}

TEST_CASE("field axioms and Fermat on every small field") {
  std::mt19937_64 rng(7);
  for (auto [p, k] : {std::pair{2u, 1u}, {3u, 1u}, {2u, 2u}, {3u, 2u}, {2u, 4u}, {3u, 4u}, {5u, 3u},
                      {2u, 20u}, {3u, 17u}, {1000003u, 1u}, {65537u, 2u}}) {
    FieldRef f = field_create(p, k);
    std::uniform_int_distribution<std::uint64_t> dist(0, static_cast<std::uint64_t>(f->order() - 1));
    for (int trial = 0; trial < 200; ++trial) {
      FieldElement x(f, dist(rng)), y(f, dist(rng)), z(f, dist(rng));
      CHECK(x.pow(f->order()) == x);
      if (!x.is_zero()) CHECK((x * x.inverse()).is_one());
      CHECK((x + y) * z == x * z + y * z);
      CHECK((x * y) * z == x * (y * z));
      CHECK(x - y + y == x);
      CHECK((x + y).frobenius() == x.frobenius() + y.frobenius());
    }
  }
}

TEST_CASE("table arithmetic agrees with schoolbook polynomial arithmetic") {
  // F_16 via tables vs. independent reduction mod x^4 + x + 1
  FieldRef f = field_create(2, 4, std::vector<std::uint64_t>{1, 1, 0, 0, 1});
  for (std::uint64_t a = 0; a < 16; ++a) {
    for (std::uint64_t b = 0; b < 16; ++b) {
      std::uint64_t prod = 0;
      for (int i = 0; i < 4; ++i) {
        if ((b >> i) & 1) prod ^= a << i;
      }
      for (int i = 6; i >= 4; --i) {
        if ((prod >> i) & 1) prod ^= 0b10011ULL << (i - 4);
      }
      CHECK(f->mul(a, b) == prod);
      CHECK(f->add(a, b) == (a ^ b));
    }
  }
}

TEST_CASE("frobenius_root") {
  FieldRef f3 = prime_field(3);
  CHECK(frobenius_root(FieldElement(f3, 2), 1) == FieldElement(f3, 2));
  FieldRef f9 = field_create(3, 2);
  FieldElement a = FieldElement::generator(f9);
  std::vector<FieldElement> cubes_to_a;
  for (auto& y : all_elements(f9)) {
    if (y.pow(3) == a) cubes_to_a.push_back(y);
  }
  REQUIRE(cubes_to_a.size() == 1);
  CHECK(frobenius_root(a, 1) == cubes_to_a[0]);
  for (auto [p, k] : {std::pair{2u, 3u}, {3u, 2u}, {3u, 4u}, {5u, 2u}}) {
    FieldRef f = field_create(p, k);
    for (auto& x : all_elements(f)) {
      CHECK(frobenius_root(x.frobenius(), 1) == x);
      for (unsigned m = 0; m <= 4; ++m) {
        FieldElement y = frobenius_root(x, m);
        for (unsigned i = 0; i < m; ++i) y = y.frobenius();
        CHECK(y == x);
      }
    }
  }
}

TEST_CASE("poly_roots examples") {
  FieldRef f3 = prime_field(3);
  auto el = [&](int v) { return FieldElement::from_int(f3, v); };
  auto r = poly_roots({el(-1), el(0), el(1)}, false);
  CHECK(r.roots == std::vector<FieldElement>{el(1), el(2)});
  r = poly_roots({el(0), el(-1), el(0), el(1)}, false);
  CHECK(r.roots == std::vector<FieldElement>{el(0), el(1), el(2)});
  CHECK(code_of([&] { poly_roots({el(1), el(0), el(1)}, false); }) == Errc::NoRootInField);
  r = poly_roots({el(1), el(0), el(1)}, true);
  CHECK(r.field->order() == 9);
  REQUIRE(r.roots.size() == 2);
  for (auto& z : r.roots) CHECK((z * z + FieldElement::one(r.field)).is_zero());
  CHECK(code_of([&] { poly_roots({el(0)}, true); }) == Errc::ValidationError);
}

TEST_CASE("poly_roots matches exhaustive evaluation on fields up to 3^4") {
  std::mt19937_64 rng(11);
  for (auto [p, k] : {std::pair{2u, 1u}, {3u, 1u}, {2u, 2u}, {3u, 2u}, {2u, 3u}, {2u, 4u}, {3u, 3u}, {3u, 4u}, {5u, 2u}}) {
    FieldRef f = field_create(p, k);
    auto elems = all_elements(f);
    std::uniform_int_distribution<std::size_t> pick(0, elems.size() - 1);
    for (int trial = 0; trial < 40; ++trial) {
      // products of random linear factors times a random cofactor
      Poly g{FieldElement::one(f)};
      const int nlin = trial % 5;
      for (int i = 0; i < nlin; ++i) g = poly::mul(g, Poly{-elems[pick(rng)], FieldElement::one(f)});
      Poly extra;
      for (int i = 0; i < 3; ++i) extra.push_back(elems[pick(rng)]);
      extra.push_back(FieldElement::one(f));
      g = poly::mul(g, extra);
      std::vector<FieldElement> expect;
      for (auto& z : elems) {
        if (poly::eval(g, z).is_zero()) expect.push_back(z);
      }
      if (expect.empty()) {
        CHECK(code_of([&] { poly_roots(g, false, trial); }) == Errc::NoRootInField);
      } else {
        CHECK(poly_roots(g, false, static_cast<std::uint64_t>(trial)).roots == expect);
      }
    }
  }
}

TEST_CASE("root finding uses splitting on larger fields") {
  FieldRef f = field_create(3, 5);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::uint64_t> dist(0, 242);
  for (int trial = 0; trial < 20; ++trial) {
    std::set<std::uint64_t> chosen;
    Poly g{FieldElement::one(f)};
    for (int i = 0; i < 6; ++i) {
      auto c = dist(rng);
      chosen.insert(c);
      g = poly::mul(g, Poly{-FieldElement(f, c), FieldElement::one(f)});
    }
    auto r = poly_roots(g, false, static_cast<std::uint64_t>(trial));
    std::vector<std::uint64_t> got;
    for (auto& z : r.roots) got.push_back(z.code());
    CHECK(got == std::vector<std::uint64_t>(chosen.begin(), chosen.end()));
  }
  // characteristic 2 uses the trace splitting
  FieldRef g2 = field_create(2, 9);
  Poly h{FieldElement::one(g2)};
  for (std::uint64_t c : {3u, 77u, 300u, 511u}) h = poly::mul(h, Poly{FieldElement(g2, c), FieldElement::one(g2)});
  auto r = poly_roots(h, false, 3);
  std::vector<std::uint64_t> got;
  for (auto& z : r.roots) got.push_back(z.code());
  CHECK(got == std::vector<std::uint64_t>{3, 77, 300, 511});
}

TEST_CASE("unity_relation") {
  FieldRef f3 = prime_field(3);
  CHECK(unity_relation(FieldElement(f3, 2), 3));
  CHECK(unity_relation(FieldElement(f3, 0), 5));
  FieldRef f9 = field_create(3, 2);
  FieldElement alpha;
  for (auto& y : all_elements(f9)) {
    if (!y.is_zero() && mult_order(y) == 8) {
      alpha = y;
      break;
    }
  }
  REQUIRE(alpha.field() == f9);
  CHECK_FALSE(unity_relation(alpha, 3));
  CHECK(alpha.pow(3) != alpha);
}

TEST_CASE("embeddings are ring homomorphisms") {
  for (auto [p, a, b] : {std::tuple{3u, 2u, 4u}, {2u, 2u, 4u}, {2u, 3u, 6u}, {3u, 1u, 3u}}) {
    FieldRef from = field_create(p, a);
    FieldRef to = field_create(p, b);
    Embedding e = embedding(from, to);
    auto elems = all_elements(from);
    for (auto& x : elems) {
      for (auto& y : elems) {
        CHECK(e(x * y) == e(x) * e(y));
        CHECK(e(x + y) == e(x) + e(y));
      }
    }
    CHECK(e(FieldElement::one(from)).is_one());
    // injective
    std::set<std::uint64_t> images;
    for (auto& x : elems) images.insert(e(x).code());
    CHECK(images.size() == elems.size());
  }
}

TEST_CASE("extension roots satisfy the mapped polynomial") {
  FieldRef f9 = field_create(3, 2);
  FieldElement a = FieldElement::generator(f9);
  // z^2 - a has no root in F_9 (a has order 4, not a square of order-8 elements... checked below)
  bool square = false;
  for (auto& y : all_elements(f9)) square |= y * y == a;
  Poly g{-a, FieldElement::zero(f9), FieldElement::one(f9)};
  if (!square) {
    auto r = poly_roots(g, true, 1);
    REQUIRE(r.embedding.has_value());
    CHECK(r.field->k() == 4);
    for (auto& z : r.roots) CHECK(z * z == (*r.embedding)(a));
  }
  // z^2 - (primitive element) never has a root in F_9
  FieldElement prim;
  for (auto& y : all_elements(f9)) {
    if (!y.is_zero() && mult_order(y) == 8) {
      prim = y;
      break;
    }
  }
  auto r = poly_roots(Poly{-prim, FieldElement::zero(f9), FieldElement::one(f9)}, true, 1);
  CHECK(r.field->k() == 4);
  CHECK(r.roots.size() == 2);
  for (auto& z : r.roots) CHECK(z * z == (*r.embedding)(prim));
}
