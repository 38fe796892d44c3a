#pragma once

// Coefficient rings for Series<R>. A specialization supplies a Context (what
// is needed to build zero/one), the characteristic, and the Frobenius hooks.

#include <cstdint>

#include "germ/field.hpp"

namespace germ {

template <class R>
struct RingTraits;

template <>
struct RingTraits<FieldElement> {
  using Context = FieldRef;

  static Context context(const FieldElement& x) { return x.field(); }
  static FieldElement zero(Context c) { return FieldElement::zero(c); }
  static FieldElement one(Context c) { return FieldElement::one(c); }
  static FieldElement from_int(Context c, std::int64_t n) { return FieldElement::from_int(c, n); }
  static bool is_zero(const FieldElement& x) { return x.is_zero(); }
  static bool is_exact_zero(const FieldElement& x) { return x.is_zero(); }
  static std::uint64_t characteristic(Context c) { return c->p(); }
  static FieldElement frobenius(const FieldElement& x) { return x.frobenius(); }
  static FieldElement frobenius_root(const FieldElement& x, unsigned m) { return germ::frobenius_root(x, m); }
  static FieldElement inverse(const FieldElement& x) { return x.inverse(); }
  static std::string to_string(const FieldElement& x) { return x.to_string(); }
};

}  // namespace germ
