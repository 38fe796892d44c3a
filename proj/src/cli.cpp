#include "germ/cli.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "CLI11.hpp"
#include "germ/analytic.hpp"
#include "germ/io.hpp"

namespace germ {

int exit_code(Errc code) {
  switch (code) {
    case Errc::ParseError:
    case Errc::ValidationError:
    case Errc::CompositeP:
    case Errc::ReducibleModulus:
    case Errc::FieldTooLarge:
    case Errc::IncompatibleFields:
    case Errc::NotSuperattracting:
    case Errc::InsufficientPrecision:
    case Errc::DegreeTooSmall:
    case Errc::CompositionWithUnit:
    case Errc::ZeroToPrecision:
      return kExitInput;
    default:
      return kExitMath;
  }
}

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string out;
};

Json header(const std::string& command, const Common& c) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["seed"] = c.seed;
  return j;
}

void emit(const std::string& text, const Common& c, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) fail(Errc::ValidationError, "cannot write " + c.out);
  f << text;
}

void emit(const Json& j, const Common& c, std::ostream& out) { emit(j.dump(2) + "\n", c, out); }

FSeries load_series(const std::string& path) {
  const GermFile g = germ_from_json(read_json_file(path));
  if (g.laurent) fail(Errc::ValidationError, path + ": expected coefficients in a finite field");
  return g.f;
}

std::vector<Json> elements(const std::vector<FieldElement>& v) {
  std::vector<Json> out;
  for (const auto& x : v) out.push_back(element_to_json(x));
  return out;
}

Json report_json(const ConjugacyReport& rep) {
  Json j;
  j["success"] = rep.success;
  j["requested"] = rep.requested;
  j["verified_order"] = rep.verified_order;
  j["first_difference"] = rep.first_difference ? Json(*rep.first_difference) : Json(nullptr);
  return j;
}

std::string big(const BigInt& x) { return x.str(); }

std::vector<std::int64_t> parse_int_list(const std::string& s, const char* what) {
  std::vector<std::int64_t> v;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoll(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      fail(Errc::ParseError, std::string("bad ") + what + " list \"" + s + "\"");
    }
  }
  if (v.empty()) fail(Errc::ParseError, std::string("empty ") + what + " list");
  return v;
}

FieldRef pick_field(const std::string& field, std::uint64_t p) {
  if (!field.empty()) {
    FieldRef f = field_from_string(field);
    if (p != 0 && f->p() != p) fail(Errc::ValidationError, "--p disagrees with --field");
    return f;
  }
  if (p == 0) fail(Errc::ValidationError, "need --p or --field");
  return prime_field(p);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Invariants and normal forms of superattracting germs in positive characteristic", "germ"};
  app.require_subcommand(1);
  std::function<void()> action;

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "seed for every random choice")->default_val(0);
    sub->add_option("--out", common.out, "write the report to this file");
  };

  // invariants
  std::string in_path;
  auto* inv = app.add_subcommand("invariants", "profile (m, d, e, r) of a germ");
  inv->add_option("germ", in_path, "germ JSON file")->required();
  add_common(inv);
  inv->callback([&] {
    action = [&] {
      const GermFile g = germ_from_json(read_json_file(in_path));
      const InvariantProfile prof = g.laurent ? profile(g.lf) : profile(g.f);
      Json j = header("invariants", common);
      j["p"] = prof.p;
      j.update(profile_to_json(prof));
      if (prof.e >= 1) j["stable_threshold"] = rational_to_string(stable_threshold(prof));
      emit(j, common, out);
    };
  });

  // normalize
  std::int64_t order = 0;
  std::string choice = "ndoubleprime";
  bool allow_extension = false;
  std::string transcript_path;
  auto* nrm = app.add_subcommand("normalize", "normal form and conjugacy of a germ");
  nrm->add_option("germ", in_path, "germ JSON file")->required();
  nrm->add_option("--order", order, "truncation order T (default: the smallest accepted)");
  nrm->add_option("--choice", choice, "representative rule")->check(CLI::IsMember({"nprime", "ndoubleprime"}));
  nrm->add_flag("--allow-extension", allow_extension, "extend the field when a root is missing");
  nrm->add_option("--transcript", transcript_path, "write the transcript as JSON lines");
  add_common(nrm);
  nrm->callback([&] {
    action = [&] {
      const FSeries f = load_series(in_path);
      const InvariantProfile prof = profile(f);
      const std::int64_t T = order > 0 ? order : minimal_order(prof);
      SolveOptions opts;
      opts.rule = NRule::parse(choice);
      opts.allow_extension = allow_extension;
      opts.seed = common.seed;
      const Solution<FieldElement> sol = normal_form(f, T, opts);
      const FSeries fe = sol.extension ? map_coeffs(f, sol.extension->to, *sol.extension) : f;
      const ConjugacyReport rep = verify_conjugacy(fe, sol.normal_form, sol.conjugacy, T);
      const NfConditions cond = check_nf_conditions(sol.profile, sol.eps_tilde, opts.rule);
      Json j = header("normalize", common);
      j["choice"] = opts.rule.name();
      j["order"] = T;
      j["profile"] = profile_to_json(sol.profile);
      j["field"] = field_to_json(sol.normal_form.ctx());
      j["extended"] = sol.extension.has_value();
      j["lambda"] = element_to_json(sol.lambda);
      j["eps_tilde"] = elements(sol.eps_tilde);
      j["phi"] = elements(sol.phi);
      j["normal_form"] = series_to_json(sol.normal_form);
      j["conjugacy"] = series_to_json(sol.conjugacy);
      j["verified"] = report_json(rep);
      j["nf_conditions"] = cond.all();
      Json tr = Json::array();
      for (const auto& t : sol.transcript) tr.push_back(transcript_entry_to_json(t));
      j["transcript"] = tr;
      if (!transcript_path.empty()) {
        std::ofstream tf(transcript_path, std::ios::binary);
        if (!tf) fail(Errc::ValidationError, "cannot write " + transcript_path);
        for (const auto& t : sol.transcript) tf << transcript_entry_to_json(t).dump() << "\n";
      }
      emit(j, common, out);
      if (!rep.success || !cond.all()) throw Error(Errc::Internal, "normal form failed its own checks");
    };
  });

  // bottcher
  auto* bot = app.add_subcommand("bottcher", "product-formula conjugacy to x^{d p^m} when gcd(d, p) = 1");
  bot->add_option("germ", in_path, "germ JSON file")->required();
  bot->add_option("--order", order, "truncation order T")->required();
  add_common(bot);
  bot->callback([&] {
    action = [&] {
      const FSeries f = load_series(in_path);
      const InvariantProfile prof = profile(f);
      const FSeries phi = bottcher_product(f, order);
      const std::int64_t deg = prof.d * detail::ipow64(prof.p, prof.m);
      const FSeries target = FSeries::monomial(f.ctx(), deg, FieldElement::one(f.ctx()));
      const std::int64_t T = std::min(order, phi.trunc());
      const ConjugacyReport rep = verify_conjugacy(f, target, phi, T);
      Json j = header("bottcher", common);
      j["order"] = order;
      j["profile"] = profile_to_json(prof);
      j["normal_form"] = series_to_json(target);
      j["conjugacy"] = series_to_json(phi);
      j["verified"] = report_json(rep);
      emit(j, common, out);
      if (!rep.success) throw Error(Errc::Internal, "product formula failed verification");
    };
  });

  // conjcheck
  std::string f_path, g_path, phi_path;
  auto* cc = app.add_subcommand("conjcheck", "check phi∘f = g∘phi up to the order");
  cc->add_option("f", f_path, "germ f")->required();
  cc->add_option("g", g_path, "germ g")->required();
  cc->add_option("phi", phi_path, "conjugacy phi")->required();
  cc->add_option("--order", order, "truncation order T")->required();
  add_common(cc);
  bool check_failed = false;
  cc->callback([&] {
    action = [&] {
      const FSeries f = load_series(f_path);
      const FSeries g = load_series(g_path);
      const FSeries phi = load_series(phi_path);
      if (f.ctx() != g.ctx() || f.ctx() != phi.ctx()) fail(Errc::IncompatibleFields, "inputs over different fields");
      const ConjugacyReport rep = verify_conjugacy(f, g, phi, order);
      Json j = header("conjcheck", common);
      j.update(report_json(rep));
      emit(j, common, out);
      check_failed = !rep.success;
    };
  });

  // compose
  auto* cmp = app.add_subcommand("compose", "f∘g with the predicted invariants");
  cmp->add_option("f", f_path, "outer germ")->required();
  cmp->add_option("g", g_path, "inner germ")->required();
  cmp->add_option("--order", order, "truncation order T")->required();
  add_common(cmp);
  cmp->callback([&] {
    action = [&] {
      const FSeries f = load_series(f_path).truncated(order);
      const FSeries g = load_series(g_path).truncated(order);
      if (f.ctx() != g.ctx()) fail(Errc::IncompatibleFields, "inputs over different fields");
      const FSeries h = compose(f, g);
      const InvariantProfile pf = profile(f), pg = profile(g), ph = profile(h);
      const CompositionBound bound = compose_bound(pg, pf);
      bool ok = bound.m == ph.m && bound.d == ph.d && bound.e == ph.e && bound.r_bound.size() == ph.r.size();
      for (std::size_t u = 0; ok && u < ph.r.size(); ++u) {
        if (ph.r[u] > bound.r_bound[u]) ok = false;
        if (bound.certain[u] && ph.r[u] != bound.r_bound[u]) ok = false;
      }
      Json j = header("compose", common);
      j["order"] = order;
      j["composite"] = series_to_json(h);
      j["profile_f"] = profile_to_json(pf);
      j["profile_g"] = profile_to_json(pg);
      j["profile"] = profile_to_json(ph);
      Json b;
      b["m"] = bound.m;
      b["d"] = bound.d;
      b["e"] = bound.e;
      b["r_bound"] = bound.r_bound;
      b["certain"] = bound.certain;
      j["predicted"] = b;
      j["consistent"] = ok;
      emit(j, common, out);
      check_failed = !ok;
    };
  });

  // iterate
  unsigned iterations = 2;
  auto* itr = app.add_subcommand("iterate", "invariants of the n-th iterate, predicted and by composition");
  itr->add_option("germ", in_path, "germ JSON file")->required();
  itr->add_option("--n", iterations, "number of iterations")->default_val(2)->check(CLI::Range(1u, 16u));
  itr->add_option("--order", order, "truncation order T")->required();
  add_common(itr);
  itr->callback([&] {
    action = [&] {
      const FSeries f = load_series(in_path).truncated(order);
      FSeries h = f;
      for (unsigned i = 1; i < iterations; ++i) h = compose(h, f);
      const InvariantProfile prof = profile(f);
      const InvariantProfile ph = profile(h);
      const IterateProfile pred = iterate_profile(prof, iterations);
      const bool ok = pred.m == ph.m && pred.d == ph.d && pred.e == ph.e && pred.r0 == ph.r0();
      Json j = header("iterate", common);
      j["n"] = iterations;
      j["order"] = order;
      j["profile"] = profile_to_json(prof);
      j["iterate_profile"] = profile_to_json(ph);
      Json p;
      p["m"] = big(pred.m);
      p["d"] = big(pred.d);
      p["e"] = big(pred.e);
      p["r0"] = big(pred.r0);
      j["predicted"] = p;
      j["consistent"] = ok;
      emit(j, common, out);
      check_failed = !ok;
    };
  });

  // infinity
  std::string field_spec;
  std::uint64_t p_opt = 0;
  std::string coeff_list;
  auto* inf = app.add_subcommand("infinity", "germ at infinity of a polynomial");
  inf->add_option("--p", p_opt, "characteristic (prime field)");
  inf->add_option("--field", field_spec, "field as p^k or q");
  inf->add_option("--coeffs", coeff_list, "c_0,c_1,...,c_D of P(z) = sum c_i z^i")->required();
  inf->add_option("--order", order, "truncation order (default 2D + 1)");
  add_common(inf);
  inf->callback([&] {
    action = [&] {
      FieldRef field = pick_field(field_spec, p_opt);
      std::vector<FieldElement> c;
      for (auto x : parse_int_list(coeff_list, "coefficient")) c.push_back(FieldElement::from_int(field, x));
      const FSeries g = germ_at_infinity(c, order > 0 ? std::optional<std::int64_t>(order) : std::nullopt);
      const InvariantProfile prof = profile(g);
      Json j = header("infinity", common);
      j["field"] = field_to_json(field);
      j["germ"] = series_to_json(g);
      j["profile"] = profile_to_json(prof);
      j["r0_le_d"] = prof.r0() <= prof.d;
      emit(j, common, out);
      check_failed = prof.r0() > prof.d;
    };
  });

  // multinorm
  int degree = 12;
  auto* mn = app.add_subcommand("multinorm", "conjugacy of C x^D (1 + eps) to its monomial part");
  mn->add_option("germ", in_path, "multivariate germ JSON file")->required();
  mn->add_option("--degree", degree, "total degree T")->default_val(12)->check(CLI::Range(1, 40));
  add_common(mn);
  mn->callback([&] {
    action = [&] {
      const MultiGerm g = multigerm_from_json(read_json_file(in_path));
      const MonomialConjugacy res = monomial_conjugacy(g, degree);
      const DiagonalScaling ds = diagonal_scaling(g.C, g.D);
      Json j = header("multinorm", common);
      j["degree"] = degree;
      j["det"] = determinant(g.D).str();
      Json phi = Json::array();
      for (const auto& s : res.Phi) phi.push_back(multiseries_to_json(s));
      j["conjugacy"] = phi;
      j["verified"] = res.verified;
      j["factors"] = res.factors;
      j["orders"] = res.orders;
      Json sc;
      sc["normalizes_C"] = ds.delta.has_value();
      sc["moduli_dimension"] = ds.moduli_dimension;
      if (ds.delta) {
        sc["delta"] = elements(*ds.delta);
        sc["field"] = field_to_json(ds.delta->front().field());
        sc["extended"] = ds.extension.has_value();
      }
      j["diagonal_scaling"] = sc;
      emit(j, common, out);
      check_failed = res.verified < degree;
    };
  });

  // growth
  std::string tsv_path;
  auto* gr = app.add_subcommand("growth", "conjugacy to the truncation over F_q((t)) and the valuation bound");
  gr->add_option("germ", in_path, "germ JSON file with Laurent coefficients")->required();
  gr->add_option("--order", order, "truncation order T")->required();
  gr->add_option("--tsv", tsv_path, "write n, -val(phi_n), W c_n as TSV");
  add_common(gr);
  gr->callback([&] {
    action = [&] {
      const GermFile gf = germ_from_json(read_json_file(in_path));
      if (!gf.laurent) fail(Errc::ValidationError, "growth needs Laurent coefficients");
      const auto sol = conjugacy_to_truncation(gf.lf, order);
      const GermData<LaurentScalar> data = germ_data(gf.lf);
      const LaurentScalar lead = data.eps[sol.profile.r0()];
      const std::int64_t v = lead.is_zero() ? 0 : lead.val();
      const GrowthCertificate cert = certificate(sol.profile, sol.phi, v);
      const GrowthReport rep = check_growth(sol.phi, cert);
      const ConjugacyReport conj = verify_conjugacy(gf.lf, sol.normal_form, sol.conjugacy, order);
      Json j = header("growth", common);
      j["order"] = order;
      j["profile"] = profile_to_json(sol.profile);
      j["truncation_target"] = truncation_target(sol.profile);
      j["truncation"] = germ_to_json(sol.normal_form);
      j["verified"] = report_json(conj);
      Json c;
      c["s0"] = cert.s0;
      c["v"] = cert.v;
      c["W"] = cert.W;
      c["eta"] = big_rational_to_string(cert.eta);
      c["c"] = big_rational_to_string(cert.c);
      c["A"] = big_rational_to_string(rep.A);
      c["B"] = big_rational_to_string(rep.B);
      j["certificate"] = c;
      j["bound_holds"] = rep.ok;
      j["first_violation"] = rep.first_violation ? Json(*rep.first_violation) : Json(nullptr);
      j["first_undetermined"] = rep.first_undetermined ? Json(*rep.first_undetermined) : Json(nullptr);
      j["max_ratio"] = big_rational_to_string(rep.max_ratio);
      if (!tsv_path.empty()) {
        Common t;
        t.out = tsv_path;
        emit(growth_tsv(rep), t, out);
      }
      emit(j, common, out);
      check_failed = !rep.ok || !conj.success;
    };
  });

  // jtable
  std::string r_list;
  std::int64_t d_opt = 0;
  unsigned m_opt = 0;
  std::int64_t rows = 30;
  auto* jt = app.add_subcommand("jtable", "the index map J as TSV");
  jt->add_option("--p", p_opt, "characteristic")->required();
  jt->add_option("--r", r_list, "r_0,...,r_e")->required();
  jt->add_option("--d", d_opt, "d (default p^e)");
  jt->add_option("--m", m_opt, "m")->default_val(0);
  jt->add_option("--rows", rows, "rows n = 0..rows-1")->default_val(30)->check(CLI::Range(1, 100000));
  add_common(jt);
  jt->callback([&] {
    action = [&] {
      InvariantProfile prof;
      prof.p = p_opt;
      prof.m = m_opt;
      prof.r = parse_int_list(r_list, "r");
      prof.e = static_cast<unsigned>(prof.r.size() - 1);
      prof.d = d_opt > 0 ? d_opt : detail::ipow64(p_opt, prof.e);
      validate_profile(prof);
      emit(jtable_tsv(prof, rows - 1), common, out);
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }
  try {
    action();
  } catch (const Error& e) {
    err << "germ: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "germ: " << e.what() << "\n";
    return kExitInput;
  }
  return check_failed ? kExitMath : kExitOk;
}

}  // namespace germ
