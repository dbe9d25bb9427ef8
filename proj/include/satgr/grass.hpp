#pragma once

#include "satgr/lattice.hpp"

namespace satgr {

/// Point of the Grassmannian of R((t)):
///   L = colspan(M) + span{t^j : j < lo}
/// with M's rows indexed by lo..hi-1. The monomial tail points downward,
/// mirroring Lattice. Kept in normal form (canonical columns, minimal
/// window, maximal tail).
struct GrassPoint {
    Ring ring;
    long lo = 0, hi = 0;
    Mat M;

    /// span{t^j : j < k}; the standard point L0 is std_point(r, 0).
    static GrassPoint std_point(const Ring& r, long k);
    static GrassPoint make(const Ring& r, long lo, long hi, const Mat& cols);
    static GrassPoint from_generators(const Ring& r, const std::vector<LaurentPoly>& gens,
                                      long tail_below);

    bool operator==(const GrassPoint& o) const;
    std::string to_string() const;
};

/// Window presentation: M padded plus the tail monomials t^j for
/// lo <= j < L.lo. Requires lo <= L.lo and hi >= L.hi.
Mat point_window_columns(const GrassPoint& L, long lo, long hi);

struct PointReport {
    bool ok = true;
    bool independent = true;
    bool window_flat = true;
    long witness_std = 0;  // k with star_check(L, Std(k)) passing, when ok
    std::string message;
};

PointReport point_validate(const GrassPoint& L);

/// Joint-window data for the pair (L, A), shared by the star test, the
/// index, and the determinant lines.
struct StarData {
    long lo = 0, hi = 0;
    Mat Lcols, Acols;
    Mat cap_basis;    // canonical basis of L cap A in window coordinates
    bool cap_free = true;
    CokerResult coker;  // structure of V/(L+A)
};

StarData star_data(const GrassPoint& L, const Lattice& A, long slack = 0);

struct StarReport {
    bool ok = false;
    int cap_rank = 0;
    int coker_rank = 0;
};

/// Condition (*): V = L + A and L cap A finite free.
StarReport star_check(const GrassPoint& L, const Lattice& A);

/// True iff L ⊕ A = V.
bool in_chart(const GrassPoint& L, const Lattice& A);

/// rank(L cap A) - rank V/(L+A); requires both cohomologies finite free.
long index_of(const GrassPoint& L, const Lattice& A);

/// Constructive complement: a lattice C with L ⊕ C = V.
Lattice find_complement(const GrassPoint& L);

/// Enlarges B (keeping B inside) until (L, A) satisfies (*). Requires
/// L cap B = 0 and V/(L+B) finite free.
Lattice promote(const GrassPoint& L, const Lattice& B);

/// Determinant of B/(A cap B) -> A/(A cap B) obtained by projecting along L,
/// in the canonical quotient bases; a unit exactly on the chart overlap.
Elem chart_transition_det(const GrassPoint& L, const Lattice& A, const Lattice& B);

GrassPoint base_change_point(const GrassPoint& L, const RingHom& h);

GrassPoint point_padded(const GrassPoint& L, long delta);

/// Canonical complement columns of colspan(cols) in the ambient window,
/// representing the cokernel basis.
Mat window_coker_basis(const Mat& cols);

}  // namespace satgr
