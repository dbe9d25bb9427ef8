#include "satgr/lattice.hpp"

#include <algorithm>
#include <sstream>

namespace satgr {

namespace {

// Canonicalize: echelon the columns, then shrink the window. A trailing
// monomial column t^{hi-1} is absorbed into the tail; leading zero rows are
// dropped.
Lattice normalize(const Ring& r, long lo, long hi, Mat cols) {
    while (true) {
        EchelonResult e = echelon(cols, false);
        cols = e.basis;
        bool trimmed = false;
        // absorb a literal monomial t^{hi-1} column into the tail
        if (hi > lo && cols.cols() > 0) {
            int last = cols.cols() - 1;
            if (e.pivot_rows[static_cast<size_t>(last)] == hi - lo - 1) {
                bool is_monomial = cols.at(hi - lo - 1, last).is_one();
                for (int rr = 0; rr + 1 < cols.rows() && is_monomial; ++rr)
                    if (!cols.at(rr, last).is_zero()) is_monomial = false;
                if (is_monomial) {
                    bool others_zero = true;
                    for (int c = 0; c < last && others_zero; ++c)
                        if (!cols.at(hi - lo - 1, c).is_zero()) others_zero = false;
                    if (others_zero) {
                        Mat shrunk(r, cols.rows() - 1, last);
                        for (int rr = 0; rr + 1 < cols.rows(); ++rr)
                            for (int c = 0; c < last; ++c) shrunk.at(rr, c) = cols.at(rr, c);
                        cols = shrunk;
                        --hi;
                        trimmed = true;
                    }
                }
            }
        }
        if (!trimmed) break;
    }
    // drop zero rows at the bottom of the window
    while (hi > lo) {
        bool zero_row = true;
        for (int c = 0; c < cols.cols() && zero_row; ++c)
            if (!cols.at(0, c).is_zero()) zero_row = false;
        if (!zero_row) break;
        Mat shrunk(r, cols.rows() - 1, cols.cols());
        for (int rr = 1; rr < cols.rows(); ++rr)
            for (int c = 0; c < cols.cols(); ++c) shrunk.at(rr - 1, c) = cols.at(rr, c);
        cols = shrunk;
        ++lo;
    }
    if (cols.cols() == 0) lo = hi;
    Lattice out;
    out.ring = r;
    out.lo = lo;
    out.hi = hi;
    out.M = cols;
    if (out.lo == out.hi) out.M = Mat(r, 0, 0);
    return out;
}

}  // namespace

Lattice Lattice::std_lattice(const Ring& r, long k) {
    Lattice out;
    out.ring = r;
    out.lo = out.hi = k;
    out.M = Mat(r, 0, 0);
    return out;
}

Lattice Lattice::make(const Ring& r, long lo, long hi, const Mat& cols) {
    if (hi < lo) throw DomainError("lattice window: hi < lo");
    if (cols.rows() != static_cast<int>(hi - lo)) throw DomainError("lattice window/matrix mismatch");
    return normalize(r, lo, hi, cols);
}

Lattice Lattice::from_generators(const Ring& r, const std::vector<LaurentPoly>& gens, long tail) {
    long lo = tail, hi = tail;
    for (const auto& g : gens) {
        if (g.is_zero()) continue;
        lo = std::min(lo, g.lo());
        hi = std::max(hi, g.hi() + 1);
    }
    hi = std::max(hi, tail);
    Mat cols(r, static_cast<int>(hi - lo), 0);
    std::vector<std::vector<Elem>> cvec;
    for (const auto& g : gens)
        if (!g.is_zero()) cvec.push_back(to_window(g, lo, hi));
    // implied tail monomials inside the window
    for (long j = tail; j < hi; ++j) {
        std::vector<Elem> col(static_cast<size_t>(hi - lo), Elem::zero(r));
        col[static_cast<size_t>(j - lo)] = Elem::one(r);
        cvec.push_back(col);
    }
    return normalize(r, lo, hi, Mat::from_columns(r, static_cast<int>(hi - lo), cvec));
}

bool Lattice::operator==(const Lattice& o) const {
    return ring == o.ring && lo == o.lo && hi == o.hi && M == o.M;
}

std::string Lattice::to_string() const {
    std::ostringstream os;
    os << "Lattice[" << lo << "," << hi << ") over " << ring.to_string() << " cols="
       << M.to_string();
    return os.str();
}

Mat lattice_window_columns(const Lattice& A, long lo, long hi) {
    if (lo > A.lo || hi < A.hi) throw DomainError("lattice_window_columns: window too small");
    int rows = static_cast<int>(hi - lo);
    std::vector<std::vector<Elem>> cols;
    for (int c = 0; c < A.M.cols(); ++c) {
        std::vector<Elem> col(static_cast<size_t>(rows), Elem::zero(A.ring));
        for (int r = 0; r < A.M.rows(); ++r)
            col[static_cast<size_t>(r + (A.lo - lo))] = A.M.at(r, c);
        cols.push_back(col);
    }
    for (long j = A.hi; j < hi; ++j) {
        std::vector<Elem> col(static_cast<size_t>(rows), Elem::zero(A.ring));
        col[static_cast<size_t>(j - lo)] = Elem::one(A.ring);
        cols.push_back(col);
    }
    return Mat::from_columns(A.ring, rows, cols);
}

std::vector<Elem> to_window(const LaurentPoly& v, long lo, long hi) {
    std::vector<Elem> out(static_cast<size_t>(hi - lo), Elem::zero(v.ring()));
    for (const auto& [e, c] : v.terms()) {
        if (e < lo || e >= hi) throw DomainError("to_window: support outside window");
        out[static_cast<size_t>(e - lo)] = c;
    }
    return out;
}

LaurentPoly from_window(const Ring& r, long lo, const std::vector<Elem>& v) {
    LaurentPoly out(r);
    for (size_t i = 0; i < v.size(); ++i) out.set_coeff(lo + static_cast<long>(i), v[i]);
    return out;
}

LatticeReport lattice_validate(const Lattice& A) {
    LatticeReport rep;
    if (A.M.cols() == 0) return rep;
    EchelonResult e = echelon(A.M);
    if (e.kernel.cols() != 0) {
        rep.ok = rep.independent = false;
        rep.message = "columns are dependent";
    }
    CokerResult c = coker_structure(A.M, A.M.rows());
    if (!c.is_flat) {
        rep.ok = rep.window_flat = false;
        rep.invariants = c.invariants;
        if (!rep.message.empty()) rep.message += "; ";
        rep.message += "window cokernel is not flat";
    }
    return rep;
}

namespace {

void require_valid(const Lattice& A, const char* who) {
    LatticeReport rep = lattice_validate(A);
    if (!rep.ok) throw DomainError(std::string(who) + ": invalid input lattice (" + rep.message + ")");
}

void require_same_ring(const Lattice& A, const Lattice& B, const char* who) {
    if (A.ring != B.ring) throw DomainError(std::string(who) + ": ring mismatch");
}

}  // namespace

Lattice lattice_sum(const Lattice& A, const Lattice& B) {
    require_same_ring(A, B, "lattice_sum");
    require_valid(A, "lattice_sum");
    require_valid(B, "lattice_sum");
    long lo = std::min(A.lo, B.lo), hi = std::max(A.hi, B.hi);
    Mat cols = lattice_window_columns(A, lo, hi).hstack(lattice_window_columns(B, lo, hi));
    Lattice S = normalize(A.ring, lo, hi, cols);
    LatticeReport rep = lattice_validate(S);
    if (!rep.ok) throw DomainError("lattice_sum: result fails validation (" + rep.message + ")");
    return S;
}

Lattice lattice_intersect(const Lattice& A, const Lattice& B) {
    require_same_ring(A, B, "lattice_intersect");
    require_valid(A, "lattice_intersect");
    require_valid(B, "lattice_intersect");
    long lo = std::min(A.lo, B.lo), hi = std::max(A.hi, B.hi);
    Mat Ap = lattice_window_columns(A, lo, hi);
    Mat Bp = lattice_window_columns(B, lo, hi);
    Mat BpNeg(B.ring, Bp.rows(), Bp.cols());
    for (int r = 0; r < Bp.rows(); ++r)
        for (int c = 0; c < Bp.cols(); ++c) BpNeg.at(r, c) = -Bp.at(r, c);
    EchelonResult k = echelon(Ap.hstack(BpNeg));
    // intersection generators: A-part coefficients of the kernel
    Mat Ka(A.ring, Ap.cols(), k.kernel.cols());
    for (int r = 0; r < Ap.cols(); ++r)
        for (int c = 0; c < k.kernel.cols(); ++c) Ka.at(r, c) = k.kernel.at(r, c);
    Mat gens = Ap.mul(Ka);
    Lattice I = normalize(A.ring, lo, hi, gens);
    // the common tail is implied: re-add it through from_generators semantics
    std::vector<LaurentPoly> g;
    for (int c = 0; c < gens.cols(); ++c) g.push_back(from_window(A.ring, lo, gens.column(c)));
    I = Lattice::from_generators(A.ring, g, hi);
    LatticeReport rep = lattice_validate(I);
    if (!rep.ok)
        throw DomainError("lattice_intersect: result fails validation (" + rep.message + ")");
    return I;
}

bool lattice_member(const LaurentPoly& v, const Lattice& A) {
    if (v.is_zero()) return true;
    if (v.lo() < A.lo) return false;
    long lo = A.lo, hi = std::max(A.hi, v.hi() + 1);
    Mat Ap = lattice_window_columns(A, lo, hi);
    return solve_in_span(Ap, to_window(v, lo, hi)).has_value();
}

bool lattice_subset(const Lattice& inner, const Lattice& outer) {
    if (inner.ring != outer.ring) throw DomainError("lattice_subset: ring mismatch");
    if (inner.lo < outer.lo) {
        // a generator could still vanish below outer.lo only if zero there
        for (int c = 0; c < inner.M.cols(); ++c)
            for (int r = 0; r < static_cast<int>(outer.lo - inner.lo) && r < inner.M.rows(); ++r)
                if (!inner.M.at(r, c).is_zero()) return false;
    }
    long lo = std::min(inner.lo, outer.lo), hi = std::max(inner.hi, outer.hi);
    Mat Op = lattice_window_columns(outer, lo, hi);
    Mat Ip = lattice_window_columns(inner, lo, hi);
    for (int c = 0; c < Ip.cols(); ++c)
        if (!solve_in_span(Op, Ip.column(c)).has_value()) return false;
    return true;
}

CommensurableResult commensurable(const Lattice& A, const Lattice& B) {
    require_same_ring(A, B, "commensurable");
    require_valid(A, "commensurable");
    require_valid(B, "commensurable");
    CommensurableResult res;
    Lattice S, I;
    try {
        S = lattice_sum(A, B);
        I = lattice_intersect(A, B);
    } catch (const DomainError&) {
        return res;  // V/(A+B) or V/(A cap B) not flat
    }
    try {
        auto basis = quotient_basis(S, I);
        res.ok = true;
        res.rank = static_cast<int>(basis.size());
    } catch (const DomainError&) {
        res.ok = false;
    }
    return res;
}

std::vector<LaurentPoly> quotient_basis(const Lattice& A, const Lattice& B) {
    require_same_ring(A, B, "quotient_basis");
    require_valid(A, "quotient_basis");
    require_valid(B, "quotient_basis");
    if (!lattice_subset(B, A)) throw DomainError("quotient_basis: B is not contained in A");
    long lo = std::min(A.lo, B.lo), hi = std::max(A.hi, B.hi);
    Mat Ap = lattice_window_columns(A, lo, hi);
    Mat Bp = lattice_window_columns(B, lo, hi);
    // coordinates of B's columns in A's basis
    Mat C(A.ring, Ap.cols(), Bp.cols());
    for (int c = 0; c < Bp.cols(); ++c) {
        auto x = solve_in_span(Ap, Bp.column(c));
        if (!x) throw DomainError("quotient_basis: internal containment failure");
        for (int r = 0; r < Ap.cols(); ++r) C.at(r, c) = (*x)[static_cast<size_t>(r)];
    }
    CokerResult co = coker_structure(C, Ap.cols());
    if (!co.is_flat) throw DomainError("quotient_basis: quotient is not flat");
    Mat comp = canonical_complement(echelon(C, false).basis);
    std::vector<LaurentPoly> out;
    for (int c = 0; c < comp.cols(); ++c) {
        std::vector<Elem> v(static_cast<size_t>(Ap.rows()), Elem::zero(A.ring));
        for (int r = 0; r < Ap.rows(); ++r) {
            Elem acc = Elem::zero(A.ring);
            for (int j = 0; j < Ap.cols(); ++j) acc = acc + Ap.at(r, j) * comp.at(j, c);
            v[static_cast<size_t>(r)] = acc;
        }
        out.push_back(from_window(A.ring, lo, v));
    }
    std::stable_sort(out.begin(), out.end(), [](const LaurentPoly& x, const LaurentPoly& y) {
        return x.lo() < y.lo();
    });
    return out;
}

CokerResult lattice_quotient_structure(const Lattice& A, const Lattice& B) {
    require_same_ring(A, B, "lattice_quotient_structure");
    if (!lattice_subset(B, A))
        throw DomainError("lattice_quotient_structure: B is not contained in A");
    long lo = std::min(A.lo, B.lo), hi = std::max(A.hi, B.hi);
    Mat Ap = lattice_window_columns(A, lo, hi);
    Mat Bp = lattice_window_columns(B, lo, hi);
    Mat C(A.ring, Ap.cols(), Bp.cols());
    for (int c = 0; c < Bp.cols(); ++c) {
        auto x = solve_in_span(Ap, Bp.column(c));
        if (!x) throw DomainError("lattice_quotient_structure: containment failure");
        for (int r = 0; r < Ap.cols(); ++r) C.at(r, c) = (*x)[static_cast<size_t>(r)];
    }
    return coker_structure(C, Ap.cols());
}

Lattice base_change_lattice(const Lattice& A, const RingHom& h) {
    if (A.ring != h.source()) throw DomainError("base_change_lattice: ring mismatch");
    Mat M(h.target(), A.M.rows(), A.M.cols());
    for (int r = 0; r < A.M.rows(); ++r)
        for (int c = 0; c < A.M.cols(); ++c) M.at(r, c) = h.apply(A.M.at(r, c));
    Lattice out = normalize(h.target(), A.lo, A.hi, M);
    LatticeReport rep = lattice_validate(out);
    if (!rep.ok)
        throw DomainError("base_change_lattice: image fails validation (" + rep.message + ")");
    // independence can be lost under reduction even when the image is clean
    long lo = std::min(A.lo, out.lo), hi = std::max(A.hi, out.hi);
    if (echelon(lattice_window_columns(out, lo, hi)).kernel.cols() != 0)
        throw DomainError("base_change_lattice: image columns dependent");
    return out;
}

Lattice lattice_padded(const Lattice& A, long delta) {
    if (delta < 0) throw DomainError("lattice_padded: negative delta");
    long lo = A.lo - delta, hi = A.hi + delta;
    return Lattice::make(A.ring, lo, hi, lattice_window_columns(A, lo, hi));
}

}  // namespace satgr
