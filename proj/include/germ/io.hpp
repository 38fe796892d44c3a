#pragma once

// JSON formats for fields, elements, series, germs, profiles, transcripts and
// multivariate germs. Parsing failures raise ParseError; well-formed JSON with
// out-of-range content raises ValidationError.

#include <string>

#include "json.hpp"

#include "germ/invariants.hpp"
#include "germ/laurent.hpp"
#include "germ/multidim.hpp"
#include "germ/normalizer.hpp"

namespace germ {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json field_to_json(FieldRef f);
/// {"p": int, "k": int, "modulus": [c_0..c_k]}; k and modulus are optional.
FieldRef field_from_json(const Json& j);
/// "p^k" or a prime power q, as accepted by --field.
FieldRef field_from_string(const std::string& s);

/// Coefficient vector [c_0, ..., c_{k-1}] in the polynomial basis.
Json element_to_json(const FieldElement& x);
/// Accepts a coefficient vector or a plain integer.
FieldElement element_from_json(FieldRef f, const Json& j);

/// {"trunc": T or null for exact, "coeffs": [...]}.
Json series_to_json(const FSeries& s);
FSeries series_from_json(FieldRef f, const Json& j);

/// {"val": int, "unit": [elements], "prec": int or null for exact}.
Json laurent_to_json(const LaurentScalar& x);
LaurentScalar laurent_from_json(LaurentContext ctx, const Json& j);
Json series_to_json(const Series<LaurentScalar>& s);

/// Germ file: a series plus {"p": int, "field": descriptor}. Coefficients given
/// as objects are Laurent scalars over F_q((t)).
struct GermFile {
  FieldRef field = nullptr;
  bool laurent = false;
  FSeries f;
  Series<LaurentScalar> lf;
};

GermFile germ_from_json(const Json& j);
Json germ_to_json(const FSeries& f);
Json germ_to_json(const Series<LaurentScalar>& f);

Json profile_to_json(const InvariantProfile& prof);
Json transcript_entry_to_json(const TranscriptEntry& t);

/// {"degree": T, "terms": {"a,b,...": element}}.
Json multiseries_to_json(const MultiSeries& s);
MultiSeries multiseries_from_json(FieldRef f, unsigned N, int T, const Json& j);
/// {"p", "field", "N", "degree", "C": [...], "D": [[...]], "eps": [{"a,b": element}]}.
Json multigerm_to_json(const MultiGerm& g);
MultiGerm multigerm_from_json(const Json& j);

Json read_json_file(const std::string& path);

}  // namespace germ
