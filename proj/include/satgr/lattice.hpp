#pragma once

#include "satgr/laurent.hpp"
#include "satgr/matrix.hpp"

namespace satgr {

/// Closed R-submodule of R((t)) commensurable with R[[t]]:
///   A = colspan(M) + t^hi R[[t]]
/// with M's rows indexed by the exponents lo..hi-1. Instances are kept in
/// normal form: canonical echelon columns, minimal window.
struct Lattice {
    Ring ring;
    long lo = 0, hi = 0;
    Mat M;  // (hi - lo) rows

    /// t^k R[[t]]; Std(0) is V+.
    static Lattice std_lattice(const Ring& r, long k);
    /// Normalized lattice from generator columns in the window [lo, hi).
    /// Validity is not checked here; see lattice_validate.
    static Lattice make(const Ring& r, long lo, long hi, const Mat& cols);
    /// Normalized lattice spanned by finite generators plus t^tail R[[t]].
    static Lattice from_generators(const Ring& r, const std::vector<LaurentPoly>& gens, long tail);

    bool operator==(const Lattice& o) const;
    std::string to_string() const;
};

/// Window presentation of A inside [lo, hi): its columns plus the implied
/// tail monomials t^j for A.hi <= j < hi. Requires lo <= A.lo and hi >= A.hi.
Mat lattice_window_columns(const Lattice& A, long lo, long hi);

std::vector<Elem> to_window(const LaurentPoly& v, long lo, long hi);
LaurentPoly from_window(const Ring& r, long lo, const std::vector<Elem>& v);

struct LatticeReport {
    bool ok = true;
    bool independent = true;
    bool window_flat = true;
    std::vector<Elem> invariants;  // cokernel obstructions when not flat
    std::string message;
};

/// Admission test: independent columns and flat window cokernel.
LatticeReport lattice_validate(const Lattice& A);

struct CommensurableResult {
    bool ok = false;
    int rank = 0;  // rank of (A+B)/(A cap B) when ok
};

CommensurableResult commensurable(const Lattice& A, const Lattice& B);

Lattice lattice_sum(const Lattice& A, const Lattice& B);
Lattice lattice_intersect(const Lattice& A, const Lattice& B);

bool lattice_subset(const Lattice& inner, const Lattice& outer);
bool lattice_member(const LaurentPoly& v, const Lattice& A);

/// Canonical ordered basis of A/B for B inside A with free quotient; ordering
/// by ascending pivot exponent is the generator convention every determinant
/// line downstream relies on.
std::vector<LaurentPoly> quotient_basis(const Lattice& A, const Lattice& B);

/// Structure of A/B (free rank and invariants) for B inside A; unlike
/// quotient_basis this does not require the quotient to be flat.
CokerResult lattice_quotient_structure(const Lattice& A, const Lattice& B);

Lattice base_change_lattice(const Lattice& A, const RingHom& h);

/// Same submodule re-presented on an enlarged window (for padding tests).
Lattice lattice_padded(const Lattice& A, long delta);

}  // namespace satgr
