#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace satgr {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

/// Domain errors raised by ring/lattice/operator preconditions.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed textual or JSON input.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

enum class RingKind {
    Rationals,
    PrimeField,
    Integers,
    ResidueRing,
    NilpotentExt,
};

/// Descriptor of a supported exact base ring.
///
/// Text grammar: `Q`, `Z`, `F<p>`, `Z/<n>`, `<base>[e]/e^<k>`.
class Ring {
public:
    Ring() : kind_(RingKind::Integers) {}

    static Ring rationals();
    static Ring integers();
    static Ring prime_field(const Int& p);
    static Ring residue_ring(const Int& n);
    static Ring nilpotent_ext(const Ring& base, int k);
    static Ring parse(std::string_view text);

    RingKind kind() const { return kind_; }
    const Int& modulus() const { return modulus_; }
    const Ring& base() const;
    int eps_order() const { return eps_order_; }

    bool is_field() const;
    /// Local ring with nilpotent maximal ideal over a field (chain ring).
    bool is_nilpotent_ext_of_field() const;
    /// Rings accepted by echelon/coker: field, Z, Z/n, NilpotentExt of a field.
    bool supports_linear_algebra() const;

    bool operator==(const Ring& o) const;
    bool operator!=(const Ring& o) const { return !(*this == o); }

    std::string to_string() const;

private:
    RingKind kind_;
    Int modulus_;                       // p for F_p, n for Z/n
    std::shared_ptr<const Ring> base_;  // NilpotentExt only
    int eps_order_ = 0;                 // k in R0[e]/e^k
};

/// Element of a Ring in canonical reduced form.
class Elem {
public:
    Elem() : ring_(Ring::integers()), int_(0) {}

    static Elem zero(const Ring& r);
    static Elem one(const Ring& r);
    static Elem from_int(const Ring& r, const Int& v);
    static Elem from_rat(const Ring& r, const Rat& v);
    /// NilpotentExt element from coefficients (low degree first, over base).
    static Elem from_coeffs(const Ring& r, std::vector<Elem> coeffs);
    static Elem parse(const Ring& r, std::string_view text);

    const Ring& ring() const { return ring_; }

    bool is_zero() const;
    bool is_one() const;

    Elem operator+(const Elem& o) const;
    Elem operator-(const Elem& o) const;
    Elem operator*(const Elem& o) const;
    Elem operator-() const;
    bool operator==(const Elem& o) const;
    bool operator!=(const Elem& o) const { return !(*this == o); }

    Elem pow(unsigned long e) const;

    /// Rational payload (Rationals only).
    const Rat& rat() const { return rat_; }
    /// Integer payload (Integers, PrimeField, ResidueRing).
    const Int& intval() const { return int_; }
    /// Coefficient of e^i (NilpotentExt), zero elem if i >= stored size.
    Elem coeff(int i) const;

    std::string to_string() const;

    /// Total order used only to make pivots and printing deterministic.
    static int cmp(const Elem& a, const Elem& b);

private:
    friend struct ElemOps;
    Ring ring_;
    Rat rat_;                   // Rationals
    Int int_;                   // Integers / PrimeField / ResidueRing, canonical in [0,n)
    std::vector<Elem> coeffs_;  // NilpotentExt, size == eps_order, entries canonical
};

struct UnitInfo {
    bool is_unit = false;
    std::optional<Elem> inverse;
    std::optional<int> nilpotency_index;  // least m >= 1 with a^m = 0
};

UnitInfo unit_info(const Elem& a);

inline bool is_unit(const Elem& a) { return unit_info(a).is_unit; }
inline bool is_nilpotent(const Elem& a) { return unit_info(a).nilpotency_index.has_value(); }

/// Inverse of a unit; throws DomainError otherwise.
Elem inverse(const Elem& a);

/// Exact division a/b where b is a unit, or exact quotient when it exists
/// over Z (throws if not divisible).
Elem div_exact(const Elem& a, const Elem& b);

enum class HomRule {
    Identity,
    ReduceIntToPrime,    // Z -> F_p
    ReduceIntToResidue,  // Z -> Z/n
    IncludeNilpotent,    // R0 -> R0[e]/e^k
    Augmentation,        // R0[e]/e^k -> R0, e |-> 0
};

/// Unital ring homomorphism between supported rings.
class RingHom {
public:
    RingHom(HomRule rule, Ring source, Ring target);

    static RingHom identity(const Ring& r);
    static RingHom reduce(const Ring& source, const Ring& target);  // Z -> F_p or Z -> Z/n
    static RingHom include_nilpotent(const Ring& target);           // base(target) -> target
    static RingHom augmentation(const Ring& source);                // source -> base(source)

    HomRule rule() const { return rule_; }
    const Ring& source() const { return source_; }
    const Ring& target() const { return target_; }

    Elem apply(const Elem& a) const;

private:
    HomRule rule_;
    Ring source_;
    Ring target_;
};

}  // namespace satgr
