// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "germ/analytic.hpp"
#include "germ/invariants.hpp"
#include "germ/multidim.hpp"
#include "germ/normalizer.hpp"
#include "support/ecalle_corpus.hpp"
#include "support/germ_fuzz.hpp"
#include "support/multi_fuzz.hpp"

using namespace germ;
using germ::testing::ipow;
using germ::testing::random_germ;
using germ::testing::random_multigerm;
using germ::testing::random_multiseries;
using germ::testing::random_poly_germ;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::string errors;

  // Keeps the first few failures; later ones only count.
  void fail(const std::string& why) {
    if (failures < 3) errors += (failures ? "; " : "") + why;
    pass = false;
    ++failures;
  }
  void expect(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
  int failures = 0;
};

InvariantProfile make_profile(std::uint64_t p, unsigned m, std::int64_t d, std::vector<std::int64_t> r) {
  InvariantProfile prof;
  prof.p = p;
  prof.m = m;
  prof.d = d;
  prof.e = nu_p(d, p);
  prof.r = std::move(r);
  return prof;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

FSeries embed_to(const FSeries& f, const Solution<FieldElement>& sol) {
  if (!sol.extension) return f;
  return map_coeffs(f, sol.extension->to, *sol.extension);
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void time_limit(Outcome& out, Clock::time_point t0, double limit) {
  const double s = seconds_since(t0);
  if (s >= limit) out.fail("took " + std::to_string(s) + " s, limit " + std::to_string(limit) + " s");
}

// J table, fibers and stable threshold for p = 3, r = (19, 12, 0).
void golden_jtable(Outcome& out) {
  const auto t0 = Clock::now();
  const InvariantProfile prof = make_profile(3, 0, 18, {19, 12, 0});
  const std::string golden = read_file(std::string(GERM_TEST_DATA_DIR) + "/golden/jtable_p3_r19_12_0.tsv");
  out.expect(!golden.empty(), "golden file missing");
  out.expect(jtable_tsv(prof, 29) == golden, "TSV differs from golden file");
  out.expect(big_j(prof, 9) == 1, "J(9) != 1");
  out.expect(big_j(prof, 18) == 2, "J(18) != 2");
  out.expect(big_j(prof, 21) == 3 && big_j(prof, 22) == 3, "J(21), J(22) != 3");
  for (std::int64_t n = 23; n < 30; ++n) out.expect(big_j(prof, n) == n - 19, "J(n) != n - 19 at n = " + std::to_string(n));
  out.expect(fiber(prof, 1) == std::vector<std::int64_t>{9, 15, 20}, "fiber of 1");
  out.expect(fiber(prof, 2) == std::vector<std::int64_t>{18}, "fiber of 2");
  out.expect(fiber(prof, 3) == std::vector<std::int64_t>{21, 22}, "fiber of 3");
  for (std::int64_t j = 4; j <= 10; ++j) {
    out.expect(fiber(prof, j) == std::vector<std::int64_t>{j + 19}, "fiber of " + std::to_string(j));
  }
  out.expect(stable_threshold(prof) == Rational(7, 2), "stable threshold != 7/2");
  time_limit(out, t0, 1.0);
  out.detail << "30 rows, fibers and threshold 7/2";
}

// normal_form over F_3, F_9, F_4 at truncation 64.
void solver_soundness(Outcome& out) {
  const auto t0 = Clock::now();
  const std::int64_t T = 64;
  FieldRef fields[] = {prime_field(3), field_create(3, 2), field_create(2, 2)};
  std::mt19937_64 rng(1001);
  int solved = 0, extended = 0, with_m = 0, resampled = 0;
  for (int trial = 0; solved < 500; ++trial) {
    FieldRef field = fields[trial % 3];
    const unsigned m = static_cast<unsigned>(rng() % 2);
    const std::int64_t d = 2 + static_cast<std::int64_t>(rng() % 17);
    const FSeries f = random_germ(field, rng, m, d, 1 + static_cast<std::int64_t>(rng() % 8), rng() % 2 == 0);
    const InvariantProfile prof = profile(f);
    if (minimal_order(prof) > T || (prof.e == 0 && prof.d == 1)) {
      ++resampled;
      continue;
    }
    const NRule rule{trial % 2 ? NRuleKind::NPrime : NRuleKind::NDoublePrime, {}};
    SolveOptions opts;
    opts.rule = rule;
    opts.seed = rng();
    try {
      const Solution<FieldElement> sol = normal_form(f, T, opts);
      const bool verified = verify_conjugacy(embed_to(f, sol), sol.normal_form, sol.conjugacy, T).success;
      const bool conditions = check_nf_conditions(sol.profile, sol.eps_tilde, rule).all();
      out.expect(verified, "conjugacy fails for " + f.to_string());
      out.expect(conditions, "normal form conditions fail for " + f.to_string());
      extended += sol.extension.has_value();
      with_m += prof.m > 0;
    } catch (const Error& e) {
      out.fail(std::string(e.what()) + " for " + f.to_string());
    }
    ++solved;
  }
  time_limit(out, t0, 300.0);
  out.detail << solved << " germs (" << with_m << " with m > 0, " << extended << " extended, " << resampled
             << " resampled past T)";
}

// profile(Φ∘f∘Φ^{-1}) = profile(f).
void conjugacy_invariance(Outcome& out) {
  const std::int64_t T = 64;
  std::mt19937_64 rng(1002);
  FieldRef fields[] = {prime_field(2), prime_field(3), field_create(3, 2), field_create(2, 2), prime_field(5)};
  int bases = 0, conjugates = 0;
  for (FieldRef field : fields) {
    for (int b = 0; b < 2; ++b) {
      const std::uint64_t p = field->p();
      const unsigned m = static_cast<unsigned>(b);
      const std::int64_t d = b == 0 ? static_cast<std::int64_t>(p) : 1 + static_cast<std::int64_t>(p);
      const FSeries f = random_germ(field, rng, m, d, 6, false);
      const InvariantProfile prof = profile(f);
      ++bases;
      for (int k = 0; k < 200; ++k) {
        const RandomConjugate c = random_conjugate(f, rng(), T);
        ++conjugates;
        try {
          out.expect(profile(c.f) == prof, "profile changed for " + f.to_string());
        } catch (const Error& e) {
          out.fail(std::string(e.what()) + " for " + f.to_string());
        }
      }
    }
  }
  out.detail << bases << " base germs, " << conjugates << " conjugates";
}

// m, d, e of a composite exactly; r within the bound, equal where certain.
void composition(Outcome& out) {
  std::mt19937_64 rng(1003);
  const std::uint64_t primes[] = {2, 3, 5};
  int pairs = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::uint64_t p = primes[trial % 3];
    FieldRef f = trial % 6 < 3 ? prime_field(p) : field_create(p, 2);
    auto pick = [&] {
      const unsigned m = static_cast<unsigned>(rng() % 2);
      std::int64_t d = 1 + static_cast<std::int64_t>(rng() % (2 * p));
      if (m == 0 && d < 2) d = static_cast<std::int64_t>(p);
      return random_poly_germ(f, rng, ipow(p, m) * d, 6, ipow(p, m));
    };
    const FSeries inner = pick();
    const FSeries outer = pick();
    const auto pi = profile(inner);
    const auto po = profile(outer);
    const auto actual = profile(compose(outer, inner));
    const auto cb = compose_bound(pi, po);
    const std::string ctx = " for " + po.to_string() + " after " + pi.to_string();
    out.expect(actual.m == cb.m && actual.d == cb.d && actual.e == cb.e, "m, d or e mismatch" + ctx);
    if (actual.e != cb.e) continue;
    out.expect(cb.certain.front() && cb.certain.back(), "u = 0 or u = e not certain" + ctx);
    for (unsigned u = 0; u <= cb.e; ++u) {
      out.expect(actual.r[u] >= cb.r_bound[u], "r bound violated" + ctx);
      if (cb.certain[u]) out.expect(actual.r[u] == cb.r_bound[u], "r not equal where certain" + ctx);
    }
    ++pairs;
  }
  FieldRef f3 = prime_field(3);
  const FSeries g(f3, {FieldElement::zero(f3), FieldElement::zero(f3), FieldElement::zero(f3), FieldElement::one(f3),
                       FieldElement::one(f3)},
                  kExact);
  const auto gg = profile(compose(g, g));
  out.expect(gg.r == std::vector<std::int64_t>{4, 3, 0}, "x^3(1+x) composed with itself gives r = " + gg.to_string());
  out.detail << pairs << " pairs, x^3(1+x) twice gives r = (4,3,0)";
}

// r_0 of the n-th iterate against brute-force composition.
void iterates(Outcome& out) {
  std::mt19937_64 rng(1004);
  const std::uint64_t primes[] = {2, 3, 5};
  int germs = 0, coprime = 0;
  for (int trial = 0; germs < 50; ++trial) {
    const std::uint64_t p = primes[trial % 3];
    FieldRef f = prime_field(p);
    const unsigned m = static_cast<unsigned>(rng() % 2);
    const std::int64_t d = static_cast<std::int64_t>(p) * (1 + static_cast<std::int64_t>(rng() % 2));
    const FSeries g = random_poly_germ(f, rng, ipow(p, m) * d, 3, ipow(p, m));
    const auto prof = profile(g);
    if (prof.e == 0) continue;
    ++germs;
    FSeries it = g;
    BigInt dn = 1;
    for (unsigned n = 1; n <= 3; ++n) {
      if (n > 1) it = compose(g, it);
      dn *= prof.d;
      const auto actual = profile(it);
      const BigInt closed = BigInt(prof.r0()) * (dn - 1) / (prof.d - 1);
      const auto pred = iterate_profile(prof, n);
      out.expect(BigInt(actual.r0()) == closed, "r_0 of iterate " + std::to_string(n) + " for " + prof.to_string());
      out.expect(pred.r0 == closed && BigInt(actual.d) == pred.d && BigInt(actual.m) == pred.m,
                 "iterate_profile disagrees for " + prof.to_string());
    }
  }
  for (int trial = 0; coprime < 20; ++trial) {
    const std::uint64_t p = primes[trial % 3];
    FieldRef f = prime_field(p);
    std::int64_t d = 2 + static_cast<std::int64_t>(rng() % 5);
    if (d % static_cast<std::int64_t>(p) == 0) ++d;
    const FSeries g = random_poly_germ(f, rng, d, 3);
    const auto prof = profile(g);
    if (prof.e != 0) continue;
    ++coprime;
    FSeries it = g;
    for (unsigned n = 1; n <= 3; ++n) {
      if (n > 1) it = compose(g, it);
      out.expect(profile(it).r0() == 0 && iterate_profile(prof, n).r0 == 0, "e = 0 iterate has r_0 != 0");
    }
  }
  out.detail << germs << " germs with e >= 1 for n <= 3, " << coprime << " with e = 0";
}

// e = 1, r_0 <= 4: shape of the normal form and b up to a root of unity.
void bhard(Outcome& out) {
  std::mt19937_64 rng(1005);
  FieldRef fields[] = {prime_field(2), prime_field(3), prime_field(5), field_create(2, 2)};
  int germs = 0;
  std::size_t forms = 0;
  for (int trial = 0; germs < 100; ++trial) {
    FieldRef field = fields[trial % 4];
    const std::uint64_t p = field->p();
    const unsigned m = static_cast<unsigned>(rng() % 2);
    std::int64_t unit = 1 + static_cast<std::int64_t>(rng() % 2);
    if (unit % static_cast<std::int64_t>(p) == 0) ++unit;
    const FSeries f = random_germ(field, rng, m, static_cast<std::int64_t>(p) * unit, 4, false);
    const InvariantProfile prof = profile(f);
    if (prof.e != 1 || prof.r0() > 4) continue;
    ++germs;
    const std::string ctx = " for " + f.to_string();
    try {
      const std::int64_t T = minimal_order(prof) + 1;
      const auto all = enumerate_normal_forms(f, T, NRule{});
      forms += all.size();
      const std::int64_t pm = ipow(p, prof.m);
      const std::int64_t dpm = prof.d * pm;
      const FieldElement b0 = bhard_extract(prof, all.front().eps_tilde).b;
      for (const auto& s : all) {
        FieldRef k = s.normal_form.ctx();
        const BhardShape shape = bhard_extract(prof, s.eps_tilde);
        std::int64_t deg = -1;
        for (std::size_t i = 0; i < shape.a.size(); ++i) {
          if (!shape.a[i].is_zero()) deg = static_cast<std::int64_t>(i);
        }
        out.expect(deg * static_cast<std::int64_t>(p - 1) < prof.r0(), "deg a >= r_0/(p-1)" + ctx);
        // x^{dp^m}(a(x^{p^{m+1}}) + b x^{r_0 p^m}) rebuilt independently
        std::vector<FieldElement> v(static_cast<std::size_t>(dpm + 1), FieldElement::zero(k));
        auto add = [&](std::int64_t n, const FieldElement& c) {
          if (static_cast<std::int64_t>(v.size()) <= n) v.resize(static_cast<std::size_t>(n + 1), FieldElement::zero(k));
          v[static_cast<std::size_t>(n)] = v[static_cast<std::size_t>(n)] + c;
        };
        for (std::size_t i = 0; i < shape.a.size(); ++i) add(dpm + static_cast<std::int64_t>(i) * pm * static_cast<std::int64_t>(p), shape.a[i]);
        add(dpm + prof.r0() * pm, shape.b);
        out.expect(!first_difference(FSeries(k, std::move(v), kExact), s.normal_form).has_value(), "shape" + ctx);
        out.expect(k == b0.field(), "normal forms over different fields" + ctx);
        out.expect(!shape.b.is_zero() && unity_relation(shape.b / b0, static_cast<u128>(dpm)), "b relation" + ctx);
      }
    } catch (const Error& e) {
      out.fail(std::string(e.what()) + ctx);
    }
  }
  out.detail << germs << " germs, " << forms << " normal forms enumerated";
}

// e = 0: product formula and solver both conjugate to x^{dp^m}.
void bottcher(Outcome& out) {
  std::mt19937_64 rng(1006);
  FieldRef fields[] = {prime_field(2), prime_field(3), prime_field(5), field_create(2, 2), field_create(3, 2)};
  int done = 0;
  for (int trial = 0; done < 100; ++trial) {
    FieldRef field = fields[trial % 5];
    const std::uint64_t p = field->p();
    const unsigned m = static_cast<unsigned>(rng() % 2);
    std::int64_t d = 2 + static_cast<std::int64_t>(rng() % 6);
    if (d % static_cast<std::int64_t>(p) == 0) ++d;
    const FSeries f = random_germ(field, rng, m, d, 5, true);
    const InvariantProfile prof = profile(f);
    if (prof.e != 0 || prof.d != d) continue;
    ++done;
    const std::string ctx = " for " + f.to_string();
    try {
      const std::int64_t T = minimal_order(prof) + 20;
      const auto sol = normal_form(f, T);
      const FSeries target = FSeries::monomial(field, d * ipow(p, prof.m), FieldElement::one(field));
      out.expect(!sol.extension && !first_difference(sol.normal_form, target).has_value(), "normal form != x^{dp^m}" + ctx);
      out.expect(verify_conjugacy(f, target, sol.conjugacy, T).success, "solver witness" + ctx);
      const FSeries phi = bottcher_product(f, T);
      out.expect(verify_conjugacy(f, target, phi, T).success, "product witness" + ctx);
    } catch (const Error& e) {
      out.fail(std::string(e.what()) + ctx);
    }
  }
  out.detail << done << " germs";
}

// Conjugacy to the truncation over F_3((t)) and the valuation bound.
void ecalle(Outcome& out) {
  const std::int64_t T = 200;
  const auto corpus = testing::ecalle_corpus(50, 1007);
  std::int64_t rows = 0;
  for (const auto& g : corpus) {
    const std::string ctx = " for d = " + std::to_string(g.d) + ", r_0 = " + std::to_string(g.r0);
    try {
      const auto sol = conjugacy_to_truncation(g.f, T);
      out.expect(sol.profile.m == 0 && sol.profile.e == 1 && sol.profile.r0() == g.r0, "profile" + ctx);
      out.expect(verify_conjugacy(g.f, sol.normal_form, sol.conjugacy, T).success, "conjugacy" + ctx);
      const auto cert = certificate(sol.profile, sol.phi, g.v);
      const auto rep = check_growth(sol.phi, cert);
      out.expect(rep.ok, "growth bound violated" + ctx);
      rows += static_cast<std::int64_t>(rep.rows.size());
      for (std::int64_t n = 0; n <= 10000; ++n) {
        if (cert.c_n(n) != cert.c_n_recursive(n)) {
          out.fail("c_n closed form disagrees at n = " + std::to_string(n) + ctx);
          break;
        }
      }
    } catch (const Error& e) {
      out.fail(std::string(e.what()) + ctx);
    }
  }
  LaurentContext ctx{prime_field(3)};
  const std::vector<LaurentScalar> flat(3, LaurentScalar::from_int(ctx, 1));
  const auto base = certificate(make_profile(3, 0, 3, {1, 0}), flat, 0);
  out.expect(base.s0 == 1 && base.c == 2, "r_0 = 1, v = 0 does not give s_0 = 1, c = 2");
  out.detail << corpus.size() << " germs at order " << T << ", " << rows << " coefficients bounded";
}

// Germs at infinity of random polynomials have r_0 <= d.
void polynomials(Outcome& out) {
  std::mt19937_64 rng(1008);
  std::int64_t total = 0;
  for (std::uint64_t p : {2, 3, 5}) {
    FieldRef f = prime_field(p);
    for (std::int64_t deg = 2; deg <= 12; ++deg) {
      for (int trial = 0; trial < 500; ++trial) {
        std::vector<FieldElement> c;
        for (std::int64_t i = 0; i < deg; ++i) c.emplace_back(f, rng() % p);
        c.emplace_back(f, 1 + rng() % (p - 1));
        const auto prof = profile(germ_at_infinity(c));
        out.expect(prof.r0() <= prof.d, "r_0 > d for p = " + std::to_string(p) + ", degree " + std::to_string(deg));
        ++total;
      }
    }
  }
  FieldRef f3 = prime_field(3);
  const std::vector<FieldElement> cubic{FieldElement::zero(f3), FieldElement::from_int(f3, -1), FieldElement::zero(f3),
                                        FieldElement::one(f3)};
  out.expect(profile(germ_at_infinity(cubic)) == make_profile(3, 0, 3, {2, 0}), "z^3 - z does not give (0,3,1,(2,0))");
  out.detail << total << " polynomials, z^3 - z gives (0,3,1,(2,0))";
}

// Monomial conjugacy in N <= 3 variables through total degree 12.
void multidim(Outcome& out) {
  const auto t0 = Clock::now();
  const int T = 12;
  std::mt19937_64 rng(1009);
  FieldRef fields[] = {prime_field(2), prime_field(3), field_create(2, 2), prime_field(7)};
  int verified = 0, rejected = 0, one_var = 0, scaled = 0, unscalable = 0;
  for (int trial = 0; trial < 120; ++trial) {
    FieldRef f = fields[trial % 4];
    const unsigned N = 1 + static_cast<unsigned>(trial % 3);
    MultiGerm g = random_multigerm(f, N, T, rng);
    const std::string ctx = " for N = " + std::to_string(N) + " over F_" + std::to_string(static_cast<std::uint64_t>(f->order()));
    try {
      const auto res = monomial_conjugacy(g, T);
      const int agree = verify_multi_conjugacy(g.to_map(T), g.monomial_map(T), res.Phi, T);
      out.expect(res.verified == T && agree == T, "composition check stops at " + std::to_string(agree) + ctx);
      ++verified;
    } catch (const Error& e) {
      out.fail(std::string(e.what()) + ctx);
    }
    // diagonal scaling exists exactly when 1 is not an eigenvalue of D
    IntMatrix A = g.D;
    for (unsigned i = 0; i < N; ++i) A[i][i] -= 1;
    const auto ds = diagonal_scaling(g.C, g.D);
    if (determinant(A) != 0) {
      if (!ds.delta) {
        out.fail("no scaling although det(D - Id) != 0" + ctx);
        continue;
      }
      if (ds.extension) g = map_field(g, *ds.extension);
      bool ones = true;
      for (const auto& c : scale_germ(g, *ds.delta).C) ones = ones && c.is_one();
      out.expect(ones, "scaling leaves C != 1" + ctx);
      ++scaled;
    } else {
      out.expect(!ds.delta && ds.moduli_dimension == rank(A), "scaling reported although det(D - Id) = 0" + ctx);
      ++unscalable;
    }
  }
  for (int trial = 0; trial < 20; ++trial) {
    FieldRef f = trial % 2 ? prime_field(3) : prime_field(2);
    const unsigned N = 1 + static_cast<unsigned>(trial % 3);
    MultiGerm g = random_multigerm(f, N, T, rng);
    for (;;) {
      g.D = testing::random_exponents(N, f->p(), rng, false);
      if (determinant(g.D) % f->p() == 0) break;
    }
    try {
      monomial_conjugacy(g, T);
      out.fail("p | det D accepted");
    } catch (const Error& e) {
      out.expect(e.code() == Errc::DetDivisibleByP, std::string("p | det D raised ") + e.what());
      ++rejected;
    }
  }
  for (int trial = 0; trial < 30; ++trial) {
    FieldRef f = trial % 3 == 0 ? prime_field(2) : trial % 3 == 1 ? prime_field(3) : prime_field(5);
    const std::int64_t p = static_cast<std::int64_t>(f->p());
    std::int64_t d = 2 + static_cast<std::int64_t>(rng() % 6);
    while (d % p == 0) ++d;
    const MultiGerm g{{FieldElement::one(f)}, {{d}}, {random_multiseries(f, 1, T, rng, 1, 60)}};
    const auto res = monomial_conjugacy(g, T);
    const MultiSeries img = g.to_map(T + static_cast<int>(d))[0];
    std::vector<FieldElement> v;
    for (int n = 0; n <= img.trunc(); ++n) v.push_back(img.coeff({static_cast<unsigned>(n)}));
    const FSeries phi = bottcher_product(FSeries(f, std::move(v), img.trunc()), T + d);
    bool same = phi.trunc() >= T;
    for (int n = 0; n <= T && same; ++n) same = res.Phi[0].coeff({static_cast<unsigned>(n)}) == phi[n];
    out.expect(same, "N = 1 disagrees with the product formula");
    ++one_var;
  }
  time_limit(out, t0, 600.0);
  out.detail << verified << " germs verified to degree " << T << ", " << rejected << " p | det D rejected, " << one_var
             << " one-variable agreements, scaling " << scaled << " normalized / " << unscalable << " with eigenvalue 1";
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Outcome&)> run;
  };
  const Criterion criteria[] = {
      {"jtable golden example", golden_jtable},
      {"solver soundness", solver_soundness},
      {"conjugacy invariance of the profile", conjugacy_invariance},
      {"composition formulas", composition},
      {"iterate r_0", iterates},
      {"e = 1 normal form shape and b", bhard},
      {"e = 0 product formula", bottcher},
      {"growth certificate over F_3((t))", ecalle},
      {"polynomials at infinity", polynomials},
      {"multidimensional monomial conjugacy", multidim},
  };
  int failed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome out;
    const auto t0 = Clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.fail(std::string("uncaught: ") + e.what());
    }
    failed += !out.pass;
    std::cout << (out.pass ? "PASS" : "FAIL") << " " << std::setw(2) << index << " " << c.name << ": " << out.detail.str()
              << (out.pass ? "" : " [" + std::to_string(out.failures) + " failures: " + out.errors + "]") << " (" << std::fixed << std::setprecision(2) << seconds_since(t0) << " s)" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
