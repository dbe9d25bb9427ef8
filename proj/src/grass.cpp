#include "satgr/grass.hpp"

#include <algorithm>
#include <sstream>

namespace satgr {

namespace {

// Echelon the columns, absorb a literal t^{lo} monomial column into the
// downward tail, drop zero rows at the top of the window.
GrassPoint normalize(const Ring& r, long lo, long hi, Mat cols) {
    while (true) {
        EchelonResult e = echelon(cols, false);
        cols = e.basis;
        bool trimmed = false;
        if (hi > lo && cols.cols() > 0 && e.pivot_rows[0] == 0) {
            bool is_monomial = cols.at(0, 0).is_one();
            for (int rr = 1; rr < cols.rows() && is_monomial; ++rr)
                if (!cols.at(rr, 0).is_zero()) is_monomial = false;
            if (is_monomial) {
                bool others_zero = true;
                for (int c = 1; c < cols.cols() && others_zero; ++c)
                    if (!cols.at(0, c).is_zero()) others_zero = false;
                if (others_zero) {
                    Mat shrunk(r, cols.rows() - 1, cols.cols() - 1);
                    for (int rr = 1; rr < cols.rows(); ++rr)
                        for (int c = 1; c < cols.cols(); ++c) shrunk.at(rr - 1, c - 1) = cols.at(rr, c);
                    cols = shrunk;
                    ++lo;
                    trimmed = true;
                }
            }
        }
        if (!trimmed) break;
    }
    while (hi > lo) {
        bool zero_row = true;
        int last = cols.rows() - 1;
        for (int c = 0; c < cols.cols() && zero_row; ++c)
            if (!cols.at(last, c).is_zero()) zero_row = false;
        if (!zero_row) break;
        Mat shrunk(r, cols.rows() - 1, cols.cols());
        for (int rr = 0; rr + 1 < cols.rows(); ++rr)
            for (int c = 0; c < cols.cols(); ++c) shrunk.at(rr, c) = cols.at(rr, c);
        cols = shrunk;
        --hi;
    }
    GrassPoint out;
    out.ring = r;
    out.lo = lo;
    out.hi = hi;
    out.M = cols;
    if (out.lo == out.hi) out.M = Mat(r, 0, 0);
    return out;
}

}  // namespace

GrassPoint GrassPoint::std_point(const Ring& r, long k) {
    GrassPoint out;
    out.ring = r;
    out.lo = out.hi = k;
    out.M = Mat(r, 0, 0);
    return out;
}

GrassPoint GrassPoint::make(const Ring& r, long lo, long hi, const Mat& cols) {
    if (hi < lo) throw DomainError("point window: hi < lo");
    if (cols.rows() != static_cast<int>(hi - lo)) throw DomainError("point window/matrix mismatch");
    return normalize(r, lo, hi, cols);
}

GrassPoint GrassPoint::from_generators(const Ring& r, const std::vector<LaurentPoly>& gens,
                                       long tail_below) {
    long lo = tail_below, hi = tail_below;
    for (const auto& g : gens) {
        if (g.is_zero()) continue;
        lo = std::min(lo, g.lo());
        hi = std::max(hi, g.hi() + 1);
    }
    lo = std::min(lo, tail_below);
    std::vector<std::vector<Elem>> cvec;
    for (const auto& g : gens)
        if (!g.is_zero()) cvec.push_back(to_window(g, lo, hi));
    for (long j = lo; j < tail_below; ++j) {
        std::vector<Elem> col(static_cast<size_t>(hi - lo), Elem::zero(r));
        col[static_cast<size_t>(j - lo)] = Elem::one(r);
        cvec.push_back(col);
    }
    return normalize(r, lo, hi, Mat::from_columns(r, static_cast<int>(hi - lo), cvec));
}

bool GrassPoint::operator==(const GrassPoint& o) const {
    return ring == o.ring && lo == o.lo && hi == o.hi && M == o.M;
}

std::string GrassPoint::to_string() const {
    std::ostringstream os;
    os << "Point[" << lo << "," << hi << ") over " << ring.to_string() << " cols=" << M.to_string();
    return os.str();
}

Mat point_window_columns(const GrassPoint& L, long lo, long hi) {
    if (lo > L.lo || hi < L.hi) throw DomainError("point_window_columns: window too small");
    int rows = static_cast<int>(hi - lo);
    std::vector<std::vector<Elem>> cols;
    for (long j = lo; j < L.lo; ++j) {
        std::vector<Elem> col(static_cast<size_t>(rows), Elem::zero(L.ring));
        col[static_cast<size_t>(j - lo)] = Elem::one(L.ring);
        cols.push_back(col);
    }
    for (int c = 0; c < L.M.cols(); ++c) {
        std::vector<Elem> col(static_cast<size_t>(rows), Elem::zero(L.ring));
        for (int r = 0; r < L.M.rows(); ++r)
            col[static_cast<size_t>(r + (L.lo - lo))] = L.M.at(r, c);
        cols.push_back(col);
    }
    return Mat::from_columns(L.ring, rows, cols);
}

Mat window_coker_basis(const Mat& cols) {
    return canonical_complement(echelon(cols, false).basis);
}

PointReport point_validate(const GrassPoint& L) {
    PointReport rep;
    if (L.M.cols() != 0) {
        EchelonResult e = echelon(L.M);
        if (e.kernel.cols() != 0) {
            rep.ok = rep.independent = false;
            rep.message = "columns are dependent";
        }
        CokerResult c = coker_structure(L.M, L.M.rows());
        if (!c.is_flat) {
            rep.ok = rep.window_flat = false;
            if (!rep.message.empty()) rep.message += "; ";
            rep.message += "window cokernel is not flat";
        }
    }
    if (!rep.ok) return rep;
    for (long k = L.hi; k >= L.lo - 1; --k) {
        if (star_check(L, Lattice::std_lattice(L.ring, k)).ok) {
            rep.witness_std = k;
            return rep;
        }
    }
    rep.ok = false;
    rep.message = "no standard chart witness";
    return rep;
}

StarData star_data(const GrassPoint& L, const Lattice& A, long slack) {
    if (L.ring != A.ring) throw DomainError("star_data: ring mismatch");
    StarData d;
    d.lo = std::min(L.lo, A.lo) - slack;
    d.hi = std::max(L.hi, A.hi) + slack;
    d.Lcols = point_window_columns(L, d.lo, d.hi);
    d.Acols = lattice_window_columns(A, d.lo, d.hi);

    // L cap A inside the window: kernel of [L | -A], pushed through L
    Mat Aneg(A.ring, d.Acols.rows(), d.Acols.cols());
    for (int r = 0; r < d.Acols.rows(); ++r)
        for (int c = 0; c < d.Acols.cols(); ++c) Aneg.at(r, c) = -d.Acols.at(r, c);
    EchelonResult k = echelon(d.Lcols.hstack(Aneg));
    Mat Ka(A.ring, d.Lcols.cols(), k.kernel.cols());
    for (int r = 0; r < d.Lcols.cols(); ++r)
        for (int c = 0; c < k.kernel.cols(); ++c) Ka.at(r, c) = k.kernel.at(r, c);
    EchelonResult cap = echelon(d.Lcols.mul(Ka));
    d.cap_basis = cap.basis;
    d.cap_free = cap.complete || A.ring.kind() == RingKind::Integers ||
                 A.ring.is_field();
    d.coker = coker_structure(d.Lcols.hstack(d.Acols), static_cast<int>(d.hi - d.lo));
    return d;
}

StarReport star_check(const GrassPoint& L, const Lattice& A) {
    StarData d = star_data(L, A);
    StarReport rep;
    rep.cap_rank = d.cap_basis.cols();
    rep.coker_rank = d.coker.free_rank;
    rep.ok = d.cap_free && d.coker.is_flat && d.coker.free_rank == 0 &&
             d.coker.invariants.empty();
    return rep;
}

bool in_chart(const GrassPoint& L, const Lattice& A) {
    StarReport rep = star_check(L, A);
    return rep.ok && rep.cap_rank == 0;
}

long index_of(const GrassPoint& L, const Lattice& A) {
    StarData d = star_data(L, A);
    if (!d.cap_free) throw DomainError("index: L cap A is not free");
    if (!d.coker.is_flat) throw DomainError("index: V/(L+A) is not flat");
    return static_cast<long>(d.cap_basis.cols()) - static_cast<long>(d.coker.free_rank);
}

Lattice find_complement(const GrassPoint& L) {
    PointReport rep = point_validate(L);
    if (!rep.ok) throw DomainError("find_complement: invalid point (" + rep.message + ")");
    if (L.M.cols() == 0) return Lattice::std_lattice(L.ring, L.lo);
    // B = Std(hi) misses L entirely; complement the window block of L inside
    // Std(lo)/Std(hi) and pull back.
    Mat comp = canonical_complement(L.M);
    Lattice C = Lattice::make(L.ring, L.lo, L.hi, comp);
    if (!in_chart(L, C)) throw DomainError("find_complement: internal failure");
    return C;
}

Lattice promote(const GrassPoint& L, const Lattice& B) {
    StarData d = star_data(L, B);
    if (d.cap_basis.cols() != 0) throw DomainError("promote: L cap B is nonzero");
    if (!d.coker.is_flat) throw DomainError("promote: V/(L+B) is not finite free");
    if (d.coker.free_rank == 0) return B;
    Mat comp = canonical_complement(echelon(d.Lcols.hstack(d.Acols), false).basis);
    Lattice A = Lattice::make(L.ring, d.lo, d.hi, d.Acols.hstack(comp));
    if (!star_check(L, A).ok || !lattice_subset(B, A))
        throw DomainError("promote: internal failure");
    return A;
}

Elem chart_transition_det(const GrassPoint& L, const Lattice& A, const Lattice& B) {
    if (!in_chart(L, A)) throw DomainError("chart_transition_det: L is not in the A-chart");
    Lattice I = lattice_intersect(A, B);
    auto basisB = quotient_basis(B, I);
    auto basisA = quotient_basis(A, I);
    if (basisA.size() != basisB.size())
        throw DomainError("chart_transition_det: rank mismatch between charts");
    int n = static_cast<int>(basisA.size());
    if (n == 0) return Elem::one(L.ring);

    long lo = std::min({L.lo, A.lo, B.lo, I.lo});
    long hi = std::max({L.hi, A.hi, B.hi, I.hi});
    for (const auto& v : basisA) { lo = std::min(lo, v.lo()); hi = std::max(hi, v.hi() + 1); }
    for (const auto& v : basisB) { lo = std::min(lo, v.lo()); hi = std::max(hi, v.hi() + 1); }
    Mat Lc = point_window_columns(L, lo, hi);
    Mat Ac = lattice_window_columns(A, lo, hi);
    Mat Ic = lattice_window_columns(I, lo, hi);
    Mat Am(L.ring, static_cast<int>(hi - lo), n);
    for (int c = 0; c < n; ++c) Am.set_column(c, to_window(basisA[static_cast<size_t>(c)], lo, hi));

    Mat T(L.ring, n, n);
    for (int c = 0; c < n; ++c) {
        // b = l + a uniquely; express the A-part in the A/I basis
        auto split = solve_in_span(Lc.hstack(Ac), to_window(basisB[static_cast<size_t>(c)], lo, hi));
        if (!split) throw DomainError("chart_transition_det: decomposition failed");
        std::vector<Elem> a(static_cast<size_t>(hi - lo), Elem::zero(L.ring));
        for (int r = 0; r < static_cast<int>(hi - lo); ++r) {
            Elem acc = Elem::zero(L.ring);
            for (int j = 0; j < Ac.cols(); ++j)
                acc = acc + Ac.at(r, j) * (*split)[static_cast<size_t>(Lc.cols() + j)];
            a[static_cast<size_t>(r)] = acc;
        }
        auto coords = solve_mod(Am, Ic, a);
        if (!coords) throw DomainError("chart_transition_det: projection not in quotient span");
        for (int r = 0; r < n; ++r) T.at(r, c) = (*coords)[static_cast<size_t>(r)];
    }
    return det(T);
}

GrassPoint base_change_point(const GrassPoint& L, const RingHom& h) {
    if (L.ring != h.source()) throw DomainError("base_change_point: ring mismatch");
    Mat M(h.target(), L.M.rows(), L.M.cols());
    for (int r = 0; r < L.M.rows(); ++r)
        for (int c = 0; c < L.M.cols(); ++c) M.at(r, c) = h.apply(L.M.at(r, c));
    GrassPoint out = normalize(h.target(), L.lo, L.hi, M);
    PointReport rep = point_validate(out);
    if (!rep.ok)
        throw DomainError("base_change_point: image fails validation (" + rep.message + ")");
    long lo = std::min(L.lo, out.lo), hi = std::max(L.hi, out.hi);
    if (echelon(point_window_columns(out, lo, hi)).kernel.cols() != 0)
        throw DomainError("base_change_point: image columns dependent");
    return out;
}

GrassPoint point_padded(const GrassPoint& L, long delta) {
    if (delta < 0) throw DomainError("point_padded: negative delta");
    long lo = L.lo - delta, hi = L.hi + delta;
    return GrassPoint::make(L.ring, lo, hi, point_window_columns(L, lo, hi));
}

}  // namespace satgr
