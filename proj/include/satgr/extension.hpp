#pragma once

#include "satgr/detline.hpp"

namespace satgr {

/// Injective endomorphism of R((t)) acting as an invertible multiplier
/// outside a finite window:
///   g(t^i) = u_neg * t^i        for i < -N
///   g(t^i) = columns[i + N]     for -N <= i < N
///   g(t^i) = u_pos * t^i        for i >= N
/// The class is closed under composition.
struct OperatorQ {
    Ring ring;
    Multiplier u_neg, u_pos;
    long N = 0;
    std::vector<LaurentPoly> columns;  // size 2N

    static OperatorQ identity(const Ring& r);
    static OperatorQ multiplication(const Multiplier& u);
    static OperatorQ window_map(const Ring& r, const Multiplier& u_neg, const Multiplier& u_pos,
                                long N, std::vector<LaurentPoly> columns);

    LaurentPoly apply_monomial(long i) const;
    LaurentPoly apply(const LaurentPoly& v) const;

    bool operator==(const OperatorQ& o) const;
    std::string to_string() const;
};

/// g(t^k R[[t]]) presented as a lattice.
Lattice operator_image_lattice(const OperatorQ& g, long s);

struct AdmissibleReport {
    bool ok = false;
    bool injective = false;
    bool q1_free = false, q2_free = false, q3_free = false;
    int q1_rank = 0, q2_rank = 0, q3_rank = 0;
    std::string message;
};

/// Membership test for the monoid Q: injectivity plus the three quotient
/// modules (V+ + gV+)/V+, (V+ + gV+)/gV+, V/gV finite free.
AdmissibleReport admissible_Q(const OperatorQ& g);

OperatorQ op_compose(const OperatorQ& g, const OperatorQ& f);

/// Grade of the twist line O(g) = det(q1)^* (x) det(q2) (x) det(q3)^*:
/// -rk q1 + rk q2 - rk q3, the amount by which g shifts the index.
long twist_grade(const OperatorQ& g);

/// Element of the central extension: an operator with a unit coordinate
/// against the canonical generator of O(g).
struct ExtElement {
    OperatorQ g;
    Elem twist;
};

/// Composition law in normalized coordinates:
/// (g, s) (f, r) = (gf, s r alpha(g, f)).
ExtElement ext_compose(const ExtElement& a, const ExtElement& b);

/// The factor system: the unit of the canonical isomorphism
/// g(O(f)) (x) O(g) = O(gf) in canonical generators, realized as the
/// coboundary of the determinant-fiber comparison along the standard point's
/// orbit.
Elem factor_alpha(const OperatorQ& g, const OperatorQ& f);

/// Fiber comparison unit Det(C(x w L0)) = Det(C(w L0)) (x) O(x) against
/// canonical generators; exposed for the verification suites.
Elem mu_probe(const OperatorQ& x, const OperatorQ& w, long slack = 0);

/// Antisymmetrized, coboundary-invariant pairing of commuting multiplication
/// operators; equals the tame symbol over a field and its artinian
/// refinement in general. Orientation fixed by <c, t> = c.
Elem commutator_symbol(const Multiplier& u, const Multiplier& v);

/// Image point g(L); requires the representable subclass (u_neg a monomial).
GrassPoint pushforward_point(const OperatorQ& g, const GrassPoint& L);

/// Unit by which (g, twist) acts on the determinant fiber at a point fixed
/// by g.
Elem fiber_action(const ExtElement& a, const GrassPoint& fixed);

/// The multiplicative section of the stabilizer extension:
/// sigma'(x) = mu(sigma(x))^{-1} sigma(x).
ExtElement split_section(const OperatorQ& x, const GrassPoint& fixed);

/// Quotient V/gV: a finite window presentation with a complete reduction.
struct VModImage {
    Ring ring;
    long lo = 0, hi = 0;  // window [lo, hi)
    Mat relations;        // reduced relation columns
    BasedModule based;    // canonical cokernel basis (requires free quotient)

    /// Reduce any finite Laurent element into window coordinates mod gV.
    std::vector<Elem> reduce(const LaurentPoly& v) const;

    CokerResult structure() const;

    // reduction data
    OperatorQ g;
    long slack = 0;
};

VModImage v_mod_image(const OperatorQ& g, long slack = 0, bool need_basis = true);

}  // namespace satgr
