#pragma once

#include "satgr/ring.hpp"

#include <map>

namespace satgr {

/// Finite Laurent polynomial over a supported ring; elements of the desk
/// model of R((t)). Canonical: no zero coefficients stored.
class LaurentPoly {
public:
    LaurentPoly() = default;
    explicit LaurentPoly(const Ring& r) : ring_(r) {}

    static LaurentPoly zero(const Ring& r) { return LaurentPoly(r); }
    static LaurentPoly one(const Ring& r) { return monomial(r, 0, Elem::one(r)); }
    static LaurentPoly monomial(const Ring& r, long exp, const Elem& coeff);
    static LaurentPoly parse(const Ring& r, std::string_view text);

    const Ring& ring() const { return ring_; }
    const std::map<long, Elem>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    long lo() const;  // least exponent with nonzero coefficient
    long hi() const;  // greatest exponent
    Elem coeff(long e) const;
    void set_coeff(long e, const Elem& c);

    LaurentPoly operator+(const LaurentPoly& o) const;
    LaurentPoly operator-(const LaurentPoly& o) const;
    LaurentPoly operator*(const LaurentPoly& o) const;
    LaurentPoly operator-() const;
    LaurentPoly scaled(const Elem& c) const;
    LaurentPoly shifted(long d) const;  // multiply by t^d
    bool operator==(const LaurentPoly& o) const;
    bool operator!=(const LaurentPoly& o) const { return !(*this == o); }

    std::string to_string() const;

private:
    Ring ring_;
    std::map<long, Elem> terms_;
};

/// Invertible element of R((t)) in normal form
///   u = t^n * u0 * (1 + plus) * (1 + minus)
/// with u0 a unit, plus supported in (0, d], minus supported in [-d, 0) with
/// nilpotent coefficients. The factorization is unique; it is computed by
/// Hensel lifting along the ideal generated by the sub-pivot coefficients.
struct Multiplier {
    LaurentPoly u;
    long n = 0;
    Elem u0;
    LaurentPoly plus;
    LaurentPoly minus;

    LaurentPoly reconstruct() const;
};

Multiplier multiplier_normalize(const LaurentPoly& u);
Multiplier multiplier_mul(const Multiplier& a, const Multiplier& b);

/// Classical tame symbol over a field:
/// (-1)^{nu(u) nu(v)} (u^{nu(v)} / v^{nu(u)})(0).
Elem tame_symbol_oracle(const Multiplier& u, const Multiplier& v);

}  // namespace satgr
