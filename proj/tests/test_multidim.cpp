#include <random>

#include "doctest.h"
#include "germ/multidim.hpp"
#include "germ/normalizer.hpp"
#include "support/multi_fuzz.hpp"

using namespace germ;
using germ::testing::random_multigerm;
using germ::testing::random_multiseries;

namespace {

MultiSeries from_univariate(const FSeries& s, int T) {
  MultiSeries r(s.ctx(), 1, T);
  for (std::int64_t n = 0; n <= T && n < s.size(); ++n) r.set({static_cast<unsigned>(n)}, s[n]);
  return r;
}

FSeries to_univariate(const MultiSeries& s) {
  std::vector<FieldElement> v;
  for (int n = 0; n <= s.trunc(); ++n) v.push_back(s.coeff({static_cast<unsigned>(n)}));
  return FSeries(s.field(), std::move(v), s.trunc());
}

bool agree(const FSeries& a, const FSeries& b) { return !first_difference(a, b).has_value(); }

BigRational rat(std::int64_t a, std::int64_t b) { return BigRational(a) / BigRational(b); }

MultiMap scaling_map(const std::vector<FieldElement>& delta, int T) {
  MultiMap h;
  const unsigned n = static_cast<unsigned>(delta.size());
  for (unsigned i = 0; i < n; ++i) h.push_back(delta[i] * MultiSeries::var(delta[i].field(), n, T, i));
  return h;
}

}  // namespace

TEST_CASE("monomial index") {
  CHECK(MonomialIndex::get(1, 12).size() == 13);
  CHECK(MonomialIndex::get(2, 12).size() == 91);
  CHECK(MonomialIndex::get(3, 12).size() == 455);
  CHECK(MonomialIndex::get(4, 12).size() == 1820);
  const auto& I = MonomialIndex::get(3, 5);
  for (std::size_t i = 0; i < I.size(); ++i) CHECK(I.find(I.exps[i]) == static_cast<std::int64_t>(i));
  CHECK(I.find({3, 2, 1}) == -1);
  CHECK_THROWS_AS(MonomialIndex::get(0, 3), Error);
}

TEST_CASE("multivariate arithmetic") {
  FieldRef f3 = prime_field(3);
  const auto x0 = MultiSeries::var(f3, 2, 6, 0);
  const auto x1 = MultiSeries::var(f3, 2, 6, 1);
  const auto one = MultiSeries::one(f3, 2, 6);
  CHECK((one + x0) * (one - x0) == one - x0 * x0);
  CHECK(pow(x0 + x1, 3) == pow(x0, 3) + pow(x1, 3));  // Frobenius in characteristic 3
  CHECK(pow(x0 * x1, 4).is_zero());                     // degree 8 > 6
  CHECK((x0 * x1).order() == 2);
  CHECK((x0 + x1).with_trunc(0).is_zero());
  const auto t = (x0 * x1 + x0).terms();
  CHECK(t.size() == 2);
  CHECK(t.at({1, 1}) == FieldElement::one(f3));

  std::mt19937_64 rng(5);
  for (FieldRef f : {prime_field(5), field_create(2, 3)}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = random_multiseries(f, 1, 10, rng, 0, 70);
      const auto b = random_multiseries(f, 1, 10, rng, 0, 70);
      CHECK(agree(to_univariate(a * b), to_univariate(a) * to_univariate(b)));
      const auto c = random_multiseries(f, 3, 7, rng, 0, 40);
      const auto d = random_multiseries(f, 3, 7, rng, 0, 40);
      const auto e = random_multiseries(f, 3, 7, rng, 0, 40);
      CHECK((c * d) * e == c * (d * e));
      CHECK(c * (d + e) == c * d + c * e);
    }
  }
}

TEST_CASE("composition") {
  std::mt19937_64 rng(11);
  FieldRef f9 = field_create(3, 2);
  SUBCASE("one variable agrees with univariate composition") {
    for (int trial = 0; trial < 20; ++trial) {
      const auto h = random_multiseries(f9, 1, 12, rng, 0, 60);
      const auto g = random_multiseries(f9, 1, 12, rng, 1, 60);
      CHECK(agree(to_univariate(compose(h, MultiMap{g})), compose(to_univariate(h), to_univariate(g))));
    }
  }
  SUBCASE("associativity and identity") {
    for (int trial = 0; trial < 10; ++trial) {
      MultiMap F, G;
      for (int i = 0; i < 2; ++i) {
        F.push_back(random_multiseries(f9, 2, 8, rng, 1, 30));
        G.push_back(random_multiseries(f9, 2, 8, rng, 1, 30));
      }
      const auto h = random_multiseries(f9, 2, 8, rng, 0, 30);
      CHECK(compose(compose(h, F), G) == compose(h, compose(F, G)));
      CHECK(compose(h, identity_map(f9, 2, 8)) == h);
    }
  }
  SUBCASE("inverse map") {
    for (int trial = 0; trial < 10; ++trial) {
      MultiMap F = identity_map(f9, 3, 7);
      for (auto& s : F) s = s + random_multiseries(f9, 3, 7, rng, 2, 20);
      const MultiMap G = inverse_map(F);
      CHECK(compose(F, G) == identity_map(f9, 3, 7));
      CHECK(compose(G, F) == identity_map(f9, 3, 7));
    }
  }
  CHECK_THROWS_AS(compose(MultiSeries::one(f9, 1, 3), MultiMap{MultiSeries::one(f9, 1, 3)}), Error);
}

TEST_CASE("exact matrices") {
  CHECK(determinant({{2, 1}, {0, 2}}) == 4);
  CHECK(determinant({{0, 1}, {1, 0}}) == -1);
  CHECK(determinant({{1, 2, 3}, {4, 5, 6}, {7, 8, 10}}) == -3);
  CHECK(determinant({{1, 1}, {1, 1}}) == 0);
  CHECK(rank({{0, 1}, {0, 1}}) == 1);
  CHECK(rank({{0, 0}, {0, 0}}) == 0);

  const auto two = matrix_power_padic({{2, 0}, {0, 2}}, 1, 3);
  CHECK(two.M[0][0] == rat(1, 2));
  CHECK(two.M[0][1] == BigRational(0));
  CHECK(two.p_integral);
  CHECK(matrix_power_padic({{2, 1}, {0, 2}}, 1, 3).p_integral);
  CHECK(!matrix_power_padic({{2, 0}, {0, 2}}, 1, 2).p_integral);
  CHECK(matrix_power_padic({{2, 0}, {0, 2}}, 0, 2).p_integral);
  CHECK_THROWS_AS(matrix_power_padic({{1, 1}, {1, 1}}, 1, 3), Error);

  // D^{-k} D^k = Id, and p-integrality whenever p does not divide det D
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const std::uint64_t p = trial % 2 ? 2 : 3;
    const IntMatrix D = germ::testing::random_exponents(3, p, rng, trial % 4 < 2);
    const std::uint64_t k = 1 + rng() % 4;
    const auto inv = matrix_power_padic(D, k, p);
    RatMatrix prod = to_rational(D);
    for (std::uint64_t i = 1; i < k; ++i) prod = multiply(prod, to_rational(D));
    const RatMatrix id = multiply(inv.M, prod);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) CHECK(id[i][j] == BigRational(i == j ? 1 : 0));
    }
    if (determinant(D) % p != 0) CHECK(inv.p_integral);
  }
}

TEST_CASE("unit powers") {
  FieldRef f3 = prime_field(3);
  std::mt19937_64 rng(17);
  const int T = 12;
  auto unit = [&](FieldRef f, unsigned N) { return MultiSeries::one(f, N, T) + random_multiseries(f, N, T, rng, 1, 40); };
  const MultiMap u{unit(f3, 2), unit(f3, 2)};
  const auto same = multi_unit_power(u, to_rational({{1, 0}, {0, 1}}));
  CHECK(same[0] == u[0]);
  CHECK(same[1] == u[1]);
  const auto ones = multi_unit_power(u, to_rational({{0, 0}, {0, 0}}));
  CHECK(ones[0] == MultiSeries::one(f3, 2, T));
  CHECK(ones[1] == MultiSeries::one(f3, 2, T));
  const auto mixed = multi_unit_power(u, to_rational({{2, 1}, {0, 1}}));
  CHECK(mixed[0] == u[0] * u[0]);
  CHECK(mixed[1] == u[0] * u[1]);
  CHECK_THROWS_AS(multi_unit_power(u, RatMatrix{{rat(1, 3), BigRational(0)}, {BigRational(0), BigRational(1)}}), Error);

  // (1 + x)^{1/2} over F_3 against the univariate binomial series
  const FSeries onex(f3, {FieldElement::one(f3), FieldElement::one(f3)}, kExact);
  CHECK(agree(to_univariate(unit_power(from_univariate(onex, T), rat(1, 2))), binomial_pow(onex, 1, 2, T)));

  for (int trial = 0; trial < 40; ++trial) {
    FieldRef f = trial % 2 ? prime_field(5) : field_create(2, 2);
    const std::int64_t p = static_cast<std::int64_t>(f->p());
    std::int64_t b = 1 + static_cast<std::int64_t>(rng() % 12);
    while (b % p == 0) ++b;
    const std::int64_t a = static_cast<std::int64_t>(rng() % 50) - 25;
    const auto w = unit(f, 1);
    CHECK(agree(to_univariate(unit_power(w, rat(a, b))), binomial_pow(to_univariate(w), a, b)));
    const auto v = unit(f, 3);
    CHECK(pow(unit_power(v, rat(1, b)), static_cast<u128>(b)) == v);
    CHECK(unit_power(v, rat(a, b)) * unit_power(v, rat(1, b)) == unit_power(v, rat(a + 1, b)));
  }
}

TEST_CASE("germ validation") {
  FieldRef f3 = prime_field(3);
  auto germ = [&](IntMatrix D) {
    MultiGerm g;
    g.D = std::move(D);
    for (std::size_t j = 0; j < g.D.size(); ++j) {
      g.C.push_back(FieldElement::one(f3));
      g.eps.push_back(MultiSeries::zero(f3, static_cast<unsigned>(g.D.size()), 6));
    }
    return g;
  };
  CHECK_NOTHROW(germ({{2, 1}, {0, 2}}).validate());
  CHECK_NOTHROW(germ({{1, 1}, {1, 0}}).validate());  // x0 x1, x0: nilpotent linear part
  CHECK_THROWS_AS(germ({{1, 0}, {0, 1}}).validate(), Error);
  CHECK_THROWS_AS(germ({{0, 1}, {1, 0}}).validate(), Error);
  CHECK_THROWS_AS(germ({{0, 2}, {0, 0}}).validate(), Error);
  auto g = germ({{2, 0}, {0, 2}});
  g.eps[0] = MultiSeries::one(f3, 2, 6);
  CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("monomial conjugacy") {
  FieldRef f3 = prime_field(3);
  const int T = 12;
  SUBCASE("eps = 0 gives the identity") {
    MultiGerm g{{FieldElement::one(f3), FieldElement::from_int(f3, 2)}, {{2, 1}, {0, 2}},
                {MultiSeries::zero(f3, 2, T), MultiSeries::zero(f3, 2, T)}};
    const auto res = monomial_conjugacy(g, T);
    CHECK(res.Phi == identity_map(f3, 2, T));
    CHECK(res.factors == 0);
    CHECK(res.verified == T);
  }
  SUBCASE("D = [[2,1],[0,2]], eps = (x0, 0)") {
    MultiGerm g{{FieldElement::one(f3), FieldElement::one(f3)}, {{2, 1}, {0, 2}},
                {MultiSeries::var(f3, 2, T, 0), MultiSeries::zero(f3, 2, T)}};
    const auto res = monomial_conjugacy(g, T);
    CHECK(res.verified == T);
    CHECK(res.Phi != identity_map(f3, 2, T));
    for (std::size_t k = 1; k < res.orders.size(); ++k) CHECK(res.orders[k] > res.orders[k - 1]);
    // independent check: Φ∘f = (Φ_0^2, Φ_0 Φ_1^2)
    const MultiMap lhs = compose(res.Phi, g.to_map(T));
    CHECK(lhs[0] == res.Phi[0] * res.Phi[0]);
    CHECK(lhs[1] == res.Phi[0] * res.Phi[1] * res.Phi[1]);
  }
  SUBCASE("hypotheses") {
    auto zero = MultiSeries::zero(f3, 2, T);
    const MultiGerm bad{{FieldElement::one(f3), FieldElement::one(f3)}, {{2, 1}, {1, 2}}, {zero, zero}};
    try {
      monomial_conjugacy(bad, T);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::DetDivisibleByP);
    }
    const MultiGerm singular{{FieldElement::one(f3), FieldElement::one(f3)}, {{1, 1}, {1, 1}}, {zero, zero}};
    try {
      monomial_conjugacy(singular, T);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::SingularMatrix);
    }
  }
  SUBCASE("nilpotent linear part") {
    std::mt19937_64 rng(23);
    MultiGerm g{{FieldElement::one(f3), FieldElement::from_int(f3, 2)}, {{1, 1}, {1, 0}},
                {random_multiseries(f3, 2, T, rng, 1, 30), random_multiseries(f3, 2, T, rng, 1, 30)}};
    CHECK(monomial_conjugacy(g, T).verified == T);
  }
}

TEST_CASE("monomial conjugacy over random germs") {
  std::mt19937_64 rng(29);
  const int T = 12;
  const FieldRef fields[] = {prime_field(2), prime_field(3), field_create(2, 2), prime_field(5), field_create(3, 2)};
  for (int trial = 0; trial < 30; ++trial) {
    FieldRef f = fields[trial % 5];
    const unsigned N = 1 + static_cast<unsigned>(trial % 3);
    const MultiGerm g = random_multigerm(f, N, T, rng);
    const auto res = monomial_conjugacy(g, T);
    CHECK(res.verified == T);
    for (std::size_t k = 1; k < res.orders.size(); ++k) CHECK(res.orders[k] > res.orders[k - 1]);
    for (unsigned j = 0; j < N; ++j) {
      Exponent e(N, 0);
      e[j] = 1;
      CHECK(res.Phi[j].coeff(e) == FieldElement::one(f));
      CHECK(res.Phi[j].order() == 1);
    }
  }
}

TEST_CASE("one variable agrees with the product formula") {
  std::mt19937_64 rng(31);
  const int T = 12;
  int compared = 0;
  for (int trial = 0; trial < 50; ++trial) {
    FieldRef f = trial % 3 == 0 ? prime_field(2) : trial % 3 == 1 ? prime_field(3) : field_create(5, 1);
    const std::int64_t p = static_cast<std::int64_t>(f->p());
    std::int64_t d = 2 + static_cast<std::int64_t>(rng() % 6);
    while (d % p == 0) ++d;
    const MultiSeries eps = random_multiseries(f, 1, T, rng, 1, 60);
    const MultiGerm g{{FieldElement::one(f)}, {{d}}, {eps}};
    const auto res = monomial_conjugacy(g, T);
    REQUIRE(res.verified == T);
    const FSeries uni = to_univariate(g.to_map(T + static_cast<int>(d))[0]);
    const FSeries phi = bottcher_product(uni, T + d);
    CHECK(phi.trunc() >= T);
    CHECK(agree(to_univariate(res.Phi[0]), phi));
    // both witnesses conjugate to x^d
    const FSeries xd = FSeries::monomial(f, d, FieldElement::one(f), kExact);
    CHECK(verify_conjugacy(uni, xd, phi, T).success);
    ++compared;
  }
  CHECK(compared == 50);
}

TEST_CASE("C and D are invariant under x phi(x) conjugation") {
  std::mt19937_64 rng(37);
  const int T = 10;
  for (int trial = 0; trial < 12; ++trial) {
    FieldRef f = trial % 2 ? prime_field(3) : field_create(2, 2);
    const unsigned N = 1 + static_cast<unsigned>(trial % 3);
    const MultiGerm g = random_multigerm(f, N, T, rng);
    MultiMap Phi;
    for (unsigned j = 0; j < N; ++j) {
      const MultiSeries phi = MultiSeries::one(f, N, T) + random_multiseries(f, N, T, rng, 1, 30);
      Phi.push_back(MultiSeries::var(f, N, T, j) * phi);
    }
    const MultiMap conj = compose(Phi, compose(g.to_map(T), inverse_map(Phi)));
    const MultiGerm back = germ_from_map(conj);
    CHECK(back.D == g.D);
    for (unsigned j = 0; j < N; ++j) CHECK(back.C[j] == g.C[j]);
  }
}

TEST_CASE("diagonal scaling") {
  std::mt19937_64 rng(41);
  const int T = 8;
  SUBCASE("D = 2 Id over F_9") {
    FieldRef f9 = field_create(3, 2);
    for (int trial = 0; trial < 10; ++trial) {
      const std::vector<FieldElement> C{FieldElement(f9, 1 + rng() % 8), FieldElement(f9, 1 + rng() % 8)};
      const auto ds = diagonal_scaling(C, {{2, 0}, {0, 2}});
      REQUIRE(ds.delta);
      CHECK(!ds.extension);
      CHECK((*ds.delta)[0] == C[0].inverse());
      CHECK((*ds.delta)[1] == C[1].inverse());
    }
  }
  SUBCASE("eigenvalue 1") {
    FieldRef f3 = prime_field(3);
    const auto ds = diagonal_scaling({FieldElement::one(f3), FieldElement::from_int(f3, 2)}, {{1, 1}, {0, 2}});
    CHECK(!ds.delta);
    CHECK(ds.moduli_dimension == 1);
    CHECK(diagonal_scaling({FieldElement::one(f3)}, {{1}}).moduli_dimension == 0);
  }
  SUBCASE("C = 1") {
    FieldRef f4 = field_create(2, 2);
    const std::vector<FieldElement> C(3, FieldElement::one(f4));
    const auto ds = diagonal_scaling(C, {{2, 1, 0}, {0, 2, 1}, {1, 0, 2}});
    REQUIRE(ds.delta);
    for (const auto& x : *ds.delta) CHECK(x.is_one());
  }
  SUBCASE("conjugation normalizes C, extending when needed") {
    int extended = 0;
    for (int trial = 0; trial < 30; ++trial) {
      FieldRef f = trial % 3 == 0 ? prime_field(3) : trial % 3 == 1 ? field_create(2, 2) : prime_field(7);
      const unsigned N = 1 + static_cast<unsigned>(trial % 3);
      MultiGerm g = random_multigerm(f, N, T, rng);
      IntMatrix A = g.D;
      for (unsigned i = 0; i < N; ++i) A[i][i] -= 1;
      const auto ds = diagonal_scaling(g.C, g.D);
      REQUIRE((ds.delta.has_value()) == (determinant(A) != 0));
      if (!ds.delta) {
        CHECK(ds.moduli_dimension == rank(A));
        continue;
      }
      if (ds.extension) {
        ++extended;
        g = map_field(g, *ds.extension);
      }
      const MultiGerm s = scale_germ(g, *ds.delta);
      for (const auto& c : s.C) CHECK(c.is_one());
      // Δ^{-1} f(Δ x) by composition
      const MultiMap h = scaling_map(*ds.delta, T);
      std::vector<FieldElement> inv;
      for (const auto& x : *ds.delta) inv.push_back(x.inverse());
      const MultiMap lhs = compose(scaling_map(inv, T), compose(g.to_map(T), h));
      const MultiMap rhs = s.to_map(T);
      for (unsigned j = 0; j < N; ++j) CHECK(lhs[j] == rhs[j]);
    }
    CHECK(extended > 0);
  }
}
