#include "germ/io.hpp"

#include <fstream>
#include <sstream>

namespace germ {

namespace {

template <class Fn>
auto guarded(const char* what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    fail(Errc::ParseError, std::string(what) + ": " + e.what());
  }
}

std::int64_t to_int(const Json& j, const char* what) {
  if (!j.is_number_integer()) fail(Errc::ParseError, std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

std::string index_key(const Exponent& e) {
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) s += (i ? "," : "") + std::to_string(e[i]);
  return s;
}

Exponent parse_key(const std::string& key, unsigned N) {
  Exponent e;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(part, &used);
      if (used != part.size() || v < 0) throw std::invalid_argument(part);
      e.push_back(static_cast<unsigned>(v));
    } catch (const std::exception&) {
      fail(Errc::ParseError, "bad multi-index \"" + key + "\"");
    }
  }
  if (e.size() != N) fail(Errc::ValidationError, "multi-index \"" + key + "\" needs " + std::to_string(N) + " entries");
  return e;
}

FieldRef germ_field(const Json& j) {
  if (j.contains("field")) {
    FieldRef f = field_from_json(j.at("field"));
    if (j.contains("p") && static_cast<std::uint64_t>(to_int(j.at("p"), "p")) != f->p()) {
      fail(Errc::ValidationError, "p disagrees with the field descriptor");
    }
    return f;
  }
  if (!j.contains("p")) fail(Errc::ParseError, "germ file needs \"p\" or \"field\"");
  const std::int64_t p = to_int(j.at("p"), "p");
  if (p < 2) fail(Errc::ValidationError, "p must be a prime");
  return prime_field(static_cast<std::uint64_t>(p));
}

std::int64_t trunc_from_json(const Json& j) {
  if (!j.contains("trunc") || j.at("trunc").is_null()) return kExact;
  const std::int64_t t = to_int(j.at("trunc"), "trunc");
  if (t < 0 || t >= kExact) fail(Errc::ValidationError, "truncation out of range");
  return t;
}

Json trunc_to_json(std::int64_t t) { return t >= kExact ? Json(nullptr) : Json(t); }

}  // namespace

Json field_to_json(FieldRef f) {
  Json j;
  j["p"] = f->p();
  j["k"] = f->k();
  j["modulus"] = f->modulus();
  return j;
}

FieldRef field_from_json(const Json& j) {
  return guarded("field", [&] {
    if (!j.is_object()) fail(Errc::ParseError, "field descriptor must be an object");
    const std::int64_t p = to_int(j.at("p"), "p");
    if (p < 2) fail(Errc::CompositeP, "p must be a prime");
    const std::int64_t k = j.contains("k") ? to_int(j.at("k"), "k") : 1;
    if (k < 1 || k > 64) fail(Errc::ValidationError, "k out of range");
    std::optional<std::vector<std::uint64_t>> modulus;
    if (j.contains("modulus") && !j.at("modulus").is_null()) {
      std::vector<std::uint64_t> m;
      for (const auto& c : j.at("modulus")) {
        const std::int64_t v = to_int(c, "modulus coefficient");
        if (v < 0 || v >= p) fail(Errc::ValidationError, "modulus coefficient out of range");
        m.push_back(static_cast<std::uint64_t>(v));
      }
      modulus = std::move(m);
    }
    return field_create(static_cast<std::uint64_t>(p), static_cast<unsigned>(k), modulus);
  });
}

FieldRef field_from_string(const std::string& s) {
  try {
    const auto caret = s.find('^');
    if (caret != std::string::npos) {
      const auto p = std::stoull(s.substr(0, caret));
      const auto k = std::stoul(s.substr(caret + 1));
      return field_create(p, static_cast<unsigned>(k));
    }
    std::uint64_t q = std::stoull(s);
    if (q < 2) fail(Errc::ValidationError, "field size must be a prime power");
    const auto primes = prime_divisors(q);
    if (primes.size() != 1) fail(Errc::ValidationError, s + " is not a prime power");
    unsigned k = 0;
    while (q > 1) {
      q /= primes.front();
      ++k;
    }
    return field_create(primes.front(), k);
  } catch (const std::logic_error&) {
    fail(Errc::ParseError, "bad field \"" + s + "\"; expected p^k or a prime power");
  }
}

Json element_to_json(const FieldElement& x) {
  auto d = x.coeffs();
  d.resize(x.field()->k(), 0);
  return Json(d);
}

FieldElement element_from_json(FieldRef f, const Json& j) {
  return guarded("element", [&] {
    if (j.is_number_integer()) return FieldElement::from_int(f, j.get<std::int64_t>());
    if (!j.is_array()) fail(Errc::ParseError, "field element must be a coefficient vector");
    if (j.size() > f->k()) fail(Errc::ValidationError, "coefficient vector longer than the field degree");
    std::vector<std::uint64_t> c;
    for (const auto& v : j) c.push_back(f->from_int(to_int(v, "element coefficient")));
    return FieldElement::from_coeffs(f, c);
  });
}

Json series_to_json(const FSeries& s) {
  Json j;
  j["trunc"] = trunc_to_json(s.trunc());
  Json c = Json::array();
  for (const auto& x : s.coeffs()) c.push_back(element_to_json(x));
  j["coeffs"] = std::move(c);
  return j;
}

FSeries series_from_json(FieldRef f, const Json& j) {
  return guarded("series", [&] {
    std::vector<FieldElement> v;
    for (const auto& c : j.at("coeffs")) v.push_back(element_from_json(f, c));
    return FSeries(f, std::move(v), trunc_from_json(j));
  });
}

Json laurent_to_json(const LaurentScalar& x) {
  Json j;
  if (x.is_zero()) {
    j["val"] = nullptr;
    j["unit"] = Json::array();
  } else {
    j["val"] = x.val();
    Json u = Json::array();
    for (const auto& d : x.unit()) u.push_back(element_to_json(d));
    j["unit"] = std::move(u);
  }
  j["prec"] = x.is_exact() ? Json(nullptr) : Json(x.abs_prec());
  return j;
}

LaurentScalar laurent_from_json(LaurentContext ctx, const Json& j) {
  return guarded("Laurent scalar", [&] {
    if (j.is_number_integer()) return LaurentScalar::from_int(ctx, j.get<std::int64_t>());
    if (!j.is_object()) fail(Errc::ParseError, "Laurent scalar must be an object");
    const std::int64_t prec =
        j.contains("prec") && !j.at("prec").is_null() ? to_int(j.at("prec"), "prec") : LaurentScalar::kInfinity;
    if (!j.contains("val") || j.at("val").is_null()) return LaurentScalar::zero_to(ctx, prec);
    std::vector<FieldElement> digits;
    for (const auto& d : j.at("unit")) digits.push_back(element_from_json(ctx.field, d));
    return LaurentScalar::from_digits(ctx, to_int(j.at("val"), "val"), std::move(digits), prec);
  });
}

Json series_to_json(const Series<LaurentScalar>& s) {
  Json j;
  j["trunc"] = trunc_to_json(s.trunc());
  Json c = Json::array();
  for (const auto& x : s.coeffs()) c.push_back(laurent_to_json(x));
  j["coeffs"] = std::move(c);
  return j;
}

GermFile germ_from_json(const Json& j) {
  return guarded("germ", [&] {
    if (!j.is_object()) fail(Errc::ParseError, "germ file must be a JSON object");
    GermFile g;
    g.field = germ_field(j);
    const Json& coeffs = j.at("coeffs");
    if (!coeffs.is_array()) fail(Errc::ParseError, "\"coeffs\" must be an array");
    for (const auto& c : coeffs) {
      if (c.is_object()) g.laurent = true;
    }
    if (!g.laurent) {
      g.f = series_from_json(g.field, j);
      return g;
    }
    LaurentContext ctx{g.field};
    if (j.contains("cap")) ctx.cap = static_cast<int>(to_int(j.at("cap"), "cap"));
    std::vector<LaurentScalar> v;
    for (const auto& c : coeffs) v.push_back(laurent_from_json(ctx, c));
    g.lf = Series<LaurentScalar>(ctx, std::move(v), trunc_from_json(j));
    return g;
  });
}

Json germ_to_json(const FSeries& f) {
  Json j;
  j["p"] = f.ctx()->p();
  j["field"] = field_to_json(f.ctx());
  const Json body = series_to_json(f);
  for (const auto& [k, v] : body.items()) j[k] = v;
  return j;
}

Json germ_to_json(const Series<LaurentScalar>& f) {
  Json j;
  j["p"] = f.ctx().field->p();
  j["field"] = field_to_json(f.ctx().field);
  j["cap"] = f.ctx().cap;
  const Json body = series_to_json(f);
  for (const auto& [k, v] : body.items()) j[k] = v;
  return j;
}

Json profile_to_json(const InvariantProfile& prof) {
  Json j;
  j["m"] = prof.m;
  j["d"] = prof.d;
  j["e"] = prof.e;
  j["r"] = prof.r;
  return j;
}

Json transcript_entry_to_json(const TranscriptEntry& t) {
  Json j;
  j["n"] = t.n;
  j["kind"] = t.kind;
  j["value"] = t.value;
  j["roots_considered"] = t.roots_considered;
  j["chosen"] = t.chosen;
  if (!t.note.empty()) j["note"] = t.note;
  return j;
}

Json multiseries_to_json(const MultiSeries& s) {
  Json j;
  j["degree"] = s.trunc();
  Json terms = Json::object();
  for (const auto& [e, c] : s.terms()) terms[index_key(e)] = element_to_json(c);
  j["terms"] = std::move(terms);
  return j;
}

MultiSeries multiseries_from_json(FieldRef f, unsigned N, int T, const Json& j) {
  return guarded("multivariate series", [&] {
    if (!j.is_object()) fail(Errc::ParseError, "multivariate series must be an object of multi-index terms");
    const Json& terms = j.contains("terms") ? j.at("terms") : j;
    MultiSeries s(f, N, T);
    for (const auto& [key, value] : terms.items()) {
      const Exponent e = parse_key(key, N);
      int deg = 0;
      for (auto a : e) deg += static_cast<int>(a);
      if (deg <= T) s.set(e, element_from_json(f, value));
    }
    return s;
  });
}

Json multigerm_to_json(const MultiGerm& g) {
  Json j;
  j["p"] = g.field()->p();
  j["field"] = field_to_json(g.field());
  j["N"] = g.N();
  j["degree"] = g.trunc();
  Json c = Json::array();
  for (const auto& x : g.C) c.push_back(element_to_json(x));
  j["C"] = std::move(c);
  j["D"] = g.D;
  Json eps = Json::array();
  for (const auto& e : g.eps) eps.push_back(multiseries_to_json(e)["terms"]);
  j["eps"] = std::move(eps);
  return j;
}

MultiGerm multigerm_from_json(const Json& j) {
  return guarded("multivariate germ", [&] {
    if (!j.is_object()) fail(Errc::ParseError, "multivariate germ must be a JSON object");
    FieldRef f = germ_field(j);
    const std::int64_t n = to_int(j.at("N"), "N");
    if (n < 1 || n > 6) fail(Errc::ValidationError, "N must be between 1 and 6");
    const std::int64_t T = j.contains("degree") ? to_int(j.at("degree"), "degree") : 12;
    if (T < 1) fail(Errc::ValidationError, "degree must be >= 1");
    MultiGerm g;
    for (const auto& c : j.at("C")) g.C.push_back(element_from_json(f, c));
    for (const auto& row : j.at("D")) {
      g.D.emplace_back();
      for (const auto& x : row) g.D.back().push_back(to_int(x, "D entry"));
    }
    for (const auto& e : j.at("eps")) g.eps.push_back(multiseries_from_json(f, static_cast<unsigned>(n), static_cast<int>(T), e));
    if (g.C.size() != static_cast<std::size_t>(n)) fail(Errc::ValidationError, "C needs N entries");
    g.validate();
    return g;
  });
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::ParseError, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    fail(Errc::ParseError, path + ": " + e.what());
  }
}

}  // namespace germ
