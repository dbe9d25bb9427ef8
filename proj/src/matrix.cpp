#include "satgr/matrix.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <sstream>

namespace satgr {

namespace {

enum class Family { Field, Integer, Residue, Chain };

// n = p^k with p prime and k >= 1, or nullopt.
std::optional<std::pair<Int, int>> prime_power_split(const Int& n) {
    for (Int p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        Int m = n;
        int k = 0;
        while (m % p == 0) { m /= p; ++k; }
        if (m == 1) return std::make_pair(p, k);
        return std::nullopt;
    }
    return std::make_pair(n, 1);  // n prime
}

Family family_of(const Ring& r) {
    switch (r.kind()) {
        case RingKind::Rationals:
        case RingKind::PrimeField:
            return Family::Field;
        case RingKind::Integers:
            return Family::Integer;
        case RingKind::ResidueRing:
            // Z/p^k is a chain ring; other moduli fall back to the Z-lift.
            return prime_power_split(r.modulus()) ? Family::Chain : Family::Residue;
        case RingKind::NilpotentExt:
            if (r.is_nilpotent_ext_of_field()) return Family::Chain;
            throw DomainError("unsupported ring for linear algebra: " + r.to_string());
    }
    throw DomainError("unsupported ring for linear algebra");
}

// --- chain ring helpers (F[e]/e^k and Z/p^k) --------------------------------
//
// Every nonzero element is unit * pi^v for the uniformizer pi (e resp. p);
// that makes Hermite/Smith style elimination exact.

struct ChainCtx {
    Ring ring;
    bool residue = false;
    Int p;   // residue case
    int k;   // nilpotency order of the uniformizer

    static ChainCtx of(const Ring& r) {
        ChainCtx c;
        c.ring = r;
        if (r.kind() == RingKind::ResidueRing) {
            auto pk = prime_power_split(r.modulus());
            if (!pk) throw DomainError("chain ops: modulus is not a prime power");
            c.residue = true;
            c.p = pk->first;
            c.k = pk->second;
        } else if (r.is_nilpotent_ext_of_field()) {
            c.k = r.eps_order();
        } else {
            throw DomainError("chain ops: unsupported ring " + r.to_string());
        }
        return c;
    }

    int val(const Elem& a) const {
        if (residue) {
            if (a.is_zero()) return k;
            Int x = a.intval();
            int v = 0;
            while (x % p == 0) { x /= p; ++v; }
            return v;
        }
        for (int i = 0; i < k; ++i)
            if (!a.coeff(i).is_zero()) return i;
        return k;
    }

    Elem unit_part(const Elem& a) const {
        int v = val(a);
        if (residue) return Elem::from_int(ring, a.intval() / pow(p, static_cast<unsigned>(v)));
        std::vector<Elem> coeffs;
        for (int i = 0; i < k; ++i)
            coeffs.push_back(i + v < k ? a.coeff(i + v) : Elem::zero(ring.base()));
        return Elem::from_coeffs(ring, std::move(coeffs));
    }

    Elem power(int v) const {
        if (v >= k) return Elem::zero(ring);
        if (residue) return Elem::from_int(ring, pow(p, static_cast<unsigned>(v)));
        std::vector<Elem> coeffs(static_cast<size_t>(k), Elem::zero(ring.base()));
        coeffs[static_cast<size_t>(v)] = Elem::one(ring.base());
        return Elem::from_coeffs(ring, std::move(coeffs));
    }

    // exact quotient, defined when val(a) >= val(b)
    Elem div(const Elem& a, const Elem& b) const {
        if (a.is_zero()) return a;
        int va = val(a), vb = val(b);
        if (va < vb) throw DomainError("chain div: not divisible");
        return unit_part(a) * inverse(unit_part(b)) * power(va - vb);
    }

    // canonical remainder mod pi^v
    Elem trunc(const Elem& a, int v) const {
        if (residue) return Elem::from_int(ring, a.intval() % pow(p, static_cast<unsigned>(v)));
        std::vector<Elem> coeffs;
        for (int i = 0; i < k; ++i)
            coeffs.push_back(i < v ? a.coeff(i) : Elem::zero(ring.base()));
        return Elem::from_coeffs(ring, std::move(coeffs));
    }
};

// --- integer helpers --------------------------------------------------------

Int floor_div(const Int& a, const Int& b) {
    Int q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

// ---------------------------------------------------------------------------
// Mat basics

Mat Mat::identity(const Ring& ring, int n) {
    Mat m(ring, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = Elem::one(ring);
    return m;
}

Mat Mat::from_columns(const Ring& ring, int rows, const std::vector<std::vector<Elem>>& cols) {
    Mat m(ring, rows, static_cast<int>(cols.size()));
    for (int c = 0; c < m.cols(); ++c) {
        if (static_cast<int>(cols[static_cast<size_t>(c)].size()) != rows)
            throw DomainError("from_columns: column length mismatch");
        for (int r = 0; r < rows; ++r) m.at(r, c) = cols[static_cast<size_t>(c)][static_cast<size_t>(r)];
    }
    return m;
}

std::vector<Elem> Mat::column(int c) const {
    std::vector<Elem> v;
    v.reserve(static_cast<size_t>(rows_));
    for (int r = 0; r < rows_; ++r) v.push_back(at(r, c));
    return v;
}

void Mat::set_column(int c, const std::vector<Elem>& v) {
    for (int r = 0; r < rows_; ++r) at(r, c) = v[static_cast<size_t>(r)];
}

Mat Mat::hstack(const Mat& o) const {
    if (rows_ != o.rows_ || (cols_ > 0 && o.cols_ > 0 && ring_ != o.ring_))
        throw DomainError("hstack: shape or ring mismatch");
    Mat m(cols_ > 0 ? ring_ : o.ring_, rows_, cols_ + o.cols_);
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) m.at(r, c) = at(r, c);
        for (int c = 0; c < o.cols_; ++c) m.at(r, cols_ + c) = o.at(r, c);
    }
    return m;
}

Mat Mat::submat_cols(int c0, int c1) const {
    Mat m(ring_, rows_, c1 - c0);
    for (int r = 0; r < rows_; ++r)
        for (int c = c0; c < c1; ++c) m.at(r, c - c0) = at(r, c);
    return m;
}

Mat Mat::mul(const Mat& o) const {
    if (cols_ != o.rows_) throw DomainError("mul: shape mismatch");
    Mat m(ring_, rows_, o.cols_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < o.cols_; ++c) {
            Elem acc = Elem::zero(ring_);
            for (int k = 0; k < cols_; ++k) acc = acc + at(r, k) * o.at(k, c);
            m.at(r, c) = acc;
        }
    return m;
}

bool Mat::is_zero() const {
    for (const auto& e : data_)
        if (!e.is_zero()) return false;
    return true;
}

bool Mat::operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && ring_ == o.ring_ && data_ == o.data_;
}

std::string Mat::to_string() const {
    std::ostringstream os;
    os << "[";
    for (int r = 0; r < rows_; ++r) {
        os << "[";
        for (int c = 0; c < cols_; ++c) os << at(r, c).to_string() << (c + 1 < cols_ ? ", " : "");
        os << "]" << (r + 1 < rows_ ? ", " : "");
    }
    os << "]";
    return os.str();
}

// ---------------------------------------------------------------------------
// Echelon forms
//
// All variants perform column operations only, tracked in a square transform
// so kernels fall out of the zero columns. Pivot selection is fixed so the
// result is deterministic and canonical for the column span.

namespace {

struct ColumnWorkspace {
    Mat A;  // working copy
    Mat T;  // cols x cols transform, A = M * T throughout

    explicit ColumnWorkspace(const Mat& M) : A(M), T(Mat::identity(M.ring(), M.cols())) {}

    void swap_cols(int i, int j) {
        if (i == j) return;
        for (int r = 0; r < A.rows(); ++r) std::swap(A.at(r, i), A.at(r, j));
        for (int r = 0; r < T.rows(); ++r) std::swap(T.at(r, i), T.at(r, j));
    }
    void scale_col(int j, const Elem& u) {
        for (int r = 0; r < A.rows(); ++r) A.at(r, j) = A.at(r, j) * u;
        for (int r = 0; r < T.rows(); ++r) T.at(r, j) = T.at(r, j) * u;
    }
    void addmul_col(int dst, int src, const Elem& c) {
        for (int r = 0; r < A.rows(); ++r) A.at(r, dst) = A.at(r, dst) + A.at(r, src) * c;
        for (int r = 0; r < T.rows(); ++r) T.at(r, dst) = T.at(r, dst) + T.at(r, src) * c;
    }
    // appends the column c * A_src (a span element, so T gains c * T_src)
    void append_scaled(int src, const Elem& c) {
        Mat A2(A.ring(), A.rows(), A.cols() + 1);
        Mat T2(T.ring(), T.rows(), T.cols() + 1);
        for (int r = 0; r < A.rows(); ++r) {
            for (int j = 0; j < A.cols(); ++j) A2.at(r, j) = A.at(r, j);
            A2.at(r, A.cols()) = A.at(r, src) * c;
        }
        for (int r = 0; r < T.rows(); ++r) {
            for (int j = 0; j < T.cols(); ++j) T2.at(r, j) = T.at(r, j);
            T2.at(r, T.cols()) = T.at(r, src) * c;
        }
        A = A2;
        T = T2;
    }
};

// Reduced column echelon over a field.
void echelon_field(ColumnWorkspace& w, std::vector<int>& pivot_rows) {
    int p = 0;
    for (int r = 0; r < w.A.rows() && p < w.A.cols(); ++r) {
        int pj = -1;
        for (int j = p; j < w.A.cols(); ++j)
            if (!w.A.at(r, j).is_zero()) { pj = j; break; }
        if (pj < 0) continue;
        w.swap_cols(p, pj);
        w.scale_col(p, inverse(w.A.at(r, p)));
        for (int j = 0; j < w.A.cols(); ++j)
            if (j != p && !w.A.at(r, j).is_zero()) w.addmul_col(j, p, -w.A.at(r, j));
        pivot_rows.push_back(r);
        ++p;
    }
}

// Column Hermite form over Z: pivots positive, off-pivot entries in pivot
// rows reduced into [0, pivot).
void echelon_integer(ColumnWorkspace& w, std::vector<int>& pivot_rows) {
    const Ring& R = w.A.ring();
    int p = 0;
    for (int r = 0; r < w.A.rows() && p < w.A.cols(); ++r) {
        while (true) {
            int j1 = -1;
            Int best;
            for (int j = p; j < w.A.cols(); ++j) {
                const Int& v = w.A.at(r, j).intval();
                if (v == 0) continue;
                Int av = abs(v);
                if (j1 < 0 || av < best) { j1 = j; best = av; }
            }
            if (j1 < 0) break;
            bool reduced_any = false;
            for (int j = p; j < w.A.cols(); ++j) {
                if (j == j1) continue;
                const Int& v = w.A.at(r, j).intval();
                if (v == 0) continue;
                Int q = floor_div(v, w.A.at(r, j1).intval());
                w.addmul_col(j, j1, Elem::from_int(R, -q));
                reduced_any = true;
            }
            if (!reduced_any) {
                // single nonzero at (r, j1): make it the pivot
                w.swap_cols(p, j1);
                if (w.A.at(r, p).intval() < 0) w.scale_col(p, Elem::from_int(R, -1));
                for (int j = 0; j < p; ++j) {
                    Int q = floor_div(w.A.at(r, j).intval(), w.A.at(r, p).intval());
                    if (q != 0) w.addmul_col(j, p, Elem::from_int(R, -q));
                }
                pivot_rows.push_back(r);
                ++p;
                break;
            }
        }
    }
}

// Unit-pivot phase then chain pivots over a local chain ring.
void echelon_chain(ColumnWorkspace& w, std::vector<int>& pivot_rows,
                   std::vector<bool>& unit_pivot) {
    ChainCtx cx = ChainCtx::of(w.A.ring());
    int p = 0;
    std::vector<bool> row_used(static_cast<size_t>(w.A.rows()), false);
    // Phase 1: unit pivots, rescanning until exhausted.
    bool progress = true;
    while (progress) {
        progress = false;
        for (int r = 0; r < w.A.rows(); ++r) {
            if (row_used[static_cast<size_t>(r)]) continue;
            int pj = -1;
            for (int j = p; j < w.A.cols(); ++j)
                if (is_unit(w.A.at(r, j))) { pj = j; break; }
            if (pj < 0) continue;
            w.swap_cols(p, pj);
            w.scale_col(p, inverse(w.A.at(r, p)));
            for (int j = 0; j < w.A.cols(); ++j)
                if (j != p && !w.A.at(r, j).is_zero()) w.addmul_col(j, p, -w.A.at(r, j));
            row_used[static_cast<size_t>(r)] = true;
            pivot_rows.push_back(r);
            unit_pivot.push_back(true);
            ++p;
            progress = true;
        }
    }
    // Phase 2: chain pivots pi^v on the residual block. Each torsion pivot
    // adds its Howell shadow pi^{k-v} * column so the form is canonical for
    // the span and membership reduction stays complete.
    for (int r = 0; r < w.A.rows(); ++r) {
        if (row_used[static_cast<size_t>(r)]) continue;
        int pj = -1, bestv = 0;
        for (int j = p; j < w.A.cols(); ++j) {
            if (w.A.at(r, j).is_zero()) continue;
            int v = cx.val(w.A.at(r, j));
            if (pj < 0 || v < bestv) { pj = j; bestv = v; }
        }
        if (pj < 0) continue;
        w.swap_cols(p, pj);
        w.scale_col(p, inverse(cx.unit_part(w.A.at(r, p))));
        for (int j = 0; j < w.A.cols(); ++j) {
            if (j == p || w.A.at(r, j).is_zero()) continue;
            if (j >= p) {
                // all remaining entries at this row divide by the minimal pivot
                if (cx.val(w.A.at(r, j)) >= bestv)
                    w.addmul_col(j, p, -cx.div(w.A.at(r, j), w.A.at(r, p)));
            } else {
                Elem rem = cx.trunc(w.A.at(r, j), bestv);
                Elem q = cx.div(w.A.at(r, j) - rem, w.A.at(r, p));
                if (!q.is_zero()) w.addmul_col(j, p, -q);
            }
        }
        if (bestv > 0) {
            Elem shadow = cx.power(cx.k - bestv);
            bool nonzero = false;
            for (int rr = 0; rr < w.A.rows() && !nonzero; ++rr)
                if (!(w.A.at(rr, p) * shadow).is_zero()) nonzero = true;
            if (nonzero) w.append_scaled(p, shadow);
        }
        row_used[static_cast<size_t>(r)] = true;
        pivot_rows.push_back(r);
        unit_pivot.push_back(false);
        ++p;
    }
    // Order all pivot columns by pivot row.
    std::vector<int> order(pivot_rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return pivot_rows[static_cast<size_t>(a)] < pivot_rows[static_cast<size_t>(b)]; });
    Mat A2 = w.A, T2 = w.T;
    std::vector<int> pr2(pivot_rows.size());
    std::vector<bool> up2(pivot_rows.size());
    for (size_t i = 0; i < order.size(); ++i) {
        for (int r = 0; r < w.A.rows(); ++r) A2.at(r, static_cast<int>(i)) = w.A.at(r, order[i]);
        for (int r = 0; r < w.T.rows(); ++r) T2.at(r, static_cast<int>(i)) = w.T.at(r, order[i]);
        pr2[i] = pivot_rows[static_cast<size_t>(order[i])];
        up2[i] = unit_pivot[static_cast<size_t>(order[i])];
    }
    w.A = A2;
    w.T = T2;
    pivot_rows = pr2;
    unit_pivot = up2;
}

Mat lift_to_int(const Mat& M) {
    Ring Z = Ring::integers();
    Mat out(Z, M.rows(), M.cols());
    for (int r = 0; r < M.rows(); ++r)
        for (int c = 0; c < M.cols(); ++c) out.at(r, c) = Elem::from_int(Z, M.at(r, c).intval());
    return out;
}

Mat reduce_mod_n(const Mat& M, const Ring& Rn) {
    Mat out(Rn, M.rows(), M.cols());
    for (int r = 0; r < M.rows(); ++r)
        for (int c = 0; c < M.cols(); ++c) out.at(r, c) = Elem::from_int(Rn, M.at(r, c).intval());
    return out;
}

Mat augment_with_nI(const Mat& Mz, const Int& n) {
    Ring Z = Ring::integers();
    Mat nI(Z, Mz.rows(), Mz.rows());
    for (int i = 0; i < Mz.rows(); ++i) nI.at(i, i) = Elem::from_int(Z, n);
    return Mz.hstack(nI);
}

Mat drop_zero_columns(const Mat& M) {
    std::vector<std::vector<Elem>> cols;
    for (int c = 0; c < M.cols(); ++c) {
        bool z = true;
        for (int r = 0; r < M.rows(); ++r)
            if (!M.at(r, c).is_zero()) { z = false; break; }
        if (!z) cols.push_back(M.column(c));
    }
    return Mat::from_columns(M.ring(), M.rows(), cols);
}

}  // namespace

EchelonResult echelon(const Mat& M, bool with_kernel) {
    Family fam = family_of(M.ring());
    EchelonResult res;

    if (fam == Family::Residue) {
        // Z-lift: the span mod n corresponds to the integer lattice
        // colspan(M) + n Z^rows; its Hermite form reduced mod n is canonical.
        const Int& n = M.ring().modulus();
        Mat aug = augment_with_nI(lift_to_int(M), n);
        ColumnWorkspace w(aug);
        std::vector<int> pr;
        echelon_integer(w, pr);
        Mat H = w.A.submat_cols(0, static_cast<int>(pr.size()));
        Mat Hn = reduce_mod_n(H, M.ring());
        std::vector<std::vector<Elem>> cols;
        std::vector<int> pivots;
        std::vector<bool> units;
        for (int c = 0; c < Hn.cols(); ++c) {
            int r0 = -1;
            for (int r = 0; r < Hn.rows(); ++r)
                if (!Hn.at(r, c).is_zero()) { r0 = r; break; }
            if (r0 < 0) continue;
            cols.push_back(Hn.column(c));
            pivots.push_back(r0);
            units.push_back(is_unit(Hn.at(r0, c)));
        }
        res.basis = Mat::from_columns(M.ring(), M.rows(), cols);
        res.pivot_rows = pivots;
        res.unit_pivot = units;
        res.complete = std::all_of(units.begin(), units.end(), [](bool b) { return b; });
        if (with_kernel) {
            // kernel of M over Z/n: first block of the integer kernel of [M | nI]
            Mat K = w.T.submat_cols(static_cast<int>(pr.size()), w.T.cols());
            Mat Kfirst(Ring::integers(), M.cols(), K.cols());
            for (int r = 0; r < M.cols(); ++r)
                for (int c = 0; c < K.cols(); ++c) Kfirst.at(r, c) = K.at(r, c);
            Mat Kn = drop_zero_columns(reduce_mod_n(Kfirst, M.ring()));
            EchelonResult ke = echelon(Kn, false);
            res.kernel = ke.basis;
        } else {
            res.kernel = Mat(M.ring(), M.cols(), 0);
        }
        return res;
    }

    ColumnWorkspace w(M);
    std::vector<int> pr;
    std::vector<bool> up;
    switch (fam) {
        case Family::Field:
            echelon_field(w, pr);
            up.assign(pr.size(), true);
            break;
        case Family::Integer: {
            echelon_integer(w, pr);
            for (size_t j = 0; j < pr.size(); ++j)
                up.push_back(w.A.at(pr[j], static_cast<int>(j)).is_one());
            break;
        }
        case Family::Chain:
            echelon_chain(w, pr, up);
            break;
        case Family::Residue:
            break;  // handled above
    }
    int r = static_cast<int>(pr.size());
    res.basis = w.A.submat_cols(0, r);
    res.pivot_rows = pr;
    res.unit_pivot = up;
    res.complete = std::all_of(up.begin(), up.end(), [](bool b) { return b; });

    if (with_kernel) {
        if (fam == Family::Chain) {
            // Column transforms miss torsion relations; use the Smith form.
            SmithResult s = smith(M);
            const Ring& R = M.ring();
            ChainCtx cx = ChainCtx::of(R);
            int k = cx.k;
            std::vector<std::vector<Elem>> gens;
            int nd = static_cast<int>(s.diag.size());
            for (int i = 0; i < M.cols(); ++i) {
                Elem d = i < nd ? s.diag[static_cast<size_t>(i)] : Elem::zero(R);
                int a = d.is_zero() ? k : cx.val(d);
                if (a == 0) continue;  // unit diagonal: no relation
                // pi^{k-a} * e_i is killed by the diagonal
                std::vector<Elem> col(static_cast<size_t>(M.cols()), Elem::zero(R));
                col[static_cast<size_t>(i)] = a >= k ? Elem::one(R) : cx.power(k - a);
                gens.push_back(col);
            }
            Mat G = Mat::from_columns(R, M.cols(), gens);
            Mat K = s.W.mul(G);
            EchelonResult ke = echelon(drop_zero_columns(K), false);
            res.kernel = ke.basis;
        } else {
            Mat K = drop_zero_columns(w.T.submat_cols(r, w.T.cols()));
            EchelonResult ke = echelon(K, false);
            res.kernel = ke.basis;
        }
    } else {
        res.kernel = Mat(M.ring(), M.cols(), 0);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Smith normal form

namespace {

struct SmithWorkspace {
    Mat A, U, Uinv, W, Winv;

    explicit SmithWorkspace(const Mat& M)
        : A(M),
          U(Mat::identity(M.ring(), M.rows())),
          Uinv(Mat::identity(M.ring(), M.rows())),
          W(Mat::identity(M.ring(), M.cols())),
          Winv(Mat::identity(M.ring(), M.cols())) {}

    // row_i += c * row_j on A and U; inverse tracked on Uinv (column op).
    void addmul_row(int i, int j, const Elem& c) {
        for (int k = 0; k < A.cols(); ++k) A.at(i, k) = A.at(i, k) + A.at(j, k) * c;
        for (int k = 0; k < U.cols(); ++k) U.at(i, k) = U.at(i, k) + U.at(j, k) * c;
        for (int k = 0; k < Uinv.rows(); ++k) Uinv.at(k, j) = Uinv.at(k, j) - Uinv.at(k, i) * c;
    }
    void swap_rows(int i, int j) {
        if (i == j) return;
        for (int k = 0; k < A.cols(); ++k) std::swap(A.at(i, k), A.at(j, k));
        for (int k = 0; k < U.cols(); ++k) std::swap(U.at(i, k), U.at(j, k));
        for (int k = 0; k < Uinv.rows(); ++k) std::swap(Uinv.at(k, i), Uinv.at(k, j));
    }
    void scale_row(int i, const Elem& u, const Elem& uinv) {
        for (int k = 0; k < A.cols(); ++k) A.at(i, k) = A.at(i, k) * u;
        for (int k = 0; k < U.cols(); ++k) U.at(i, k) = U.at(i, k) * u;
        for (int k = 0; k < Uinv.rows(); ++k) Uinv.at(k, i) = Uinv.at(k, i) * uinv;
    }
    void addmul_col(int i, int j, const Elem& c) {
        for (int k = 0; k < A.rows(); ++k) A.at(k, i) = A.at(k, i) + A.at(k, j) * c;
        for (int k = 0; k < W.rows(); ++k) W.at(k, i) = W.at(k, i) + W.at(k, j) * c;
        for (int k = 0; k < Winv.cols(); ++k) Winv.at(j, k) = Winv.at(j, k) - Winv.at(i, k) * c;
    }
    void swap_cols(int i, int j) {
        if (i == j) return;
        for (int k = 0; k < A.rows(); ++k) std::swap(A.at(k, i), A.at(k, j));
        for (int k = 0; k < W.rows(); ++k) std::swap(W.at(k, i), W.at(k, j));
        for (int k = 0; k < Winv.cols(); ++k) {
            std::swap(Winv.at(i, k), Winv.at(j, k));
        }
    }
    void scale_col(int i, const Elem& u, const Elem& uinv) {
        for (int k = 0; k < A.rows(); ++k) A.at(k, i) = A.at(k, i) * u;
        for (int k = 0; k < W.rows(); ++k) W.at(k, i) = W.at(k, i) * u;
        for (int k = 0; k < Winv.cols(); ++k) Winv.at(i, k) = Winv.at(i, k) * uinv;
    }
};

void smith_integer(SmithWorkspace& w, std::vector<Elem>& diag) {
    const Ring& R = w.A.ring();
    int m = w.A.rows(), n = w.A.cols();
    int t = std::min(m, n);
    for (int d = 0; d < t; ++d) {
        while (true) {
            // locate minimal nonzero |entry| in the remaining block
            int pi = -1, pj = -1;
            Int best;
            for (int i = d; i < m; ++i)
                for (int j = d; j < n; ++j) {
                    const Int& v = w.A.at(i, j).intval();
                    if (v == 0) continue;
                    Int av = abs(v);
                    if (pi < 0 || av < best) { pi = i; pj = j; best = av; }
                }
            if (pi < 0) { pi = pj = -1; }
            if (pi < 0) break;
            w.swap_rows(d, pi);
            w.swap_cols(d, pj);
            bool clean = true;
            for (int i = d + 1; i < m; ++i) {
                Int q = floor_div(w.A.at(i, d).intval(), w.A.at(d, d).intval());
                if (q != 0) w.addmul_row(i, d, Elem::from_int(R, -q));
                if (w.A.at(i, d).intval() != 0) clean = false;
            }
            for (int j = d + 1; j < n; ++j) {
                Int q = floor_div(w.A.at(d, j).intval(), w.A.at(d, d).intval());
                if (q != 0) w.addmul_col(j, d, Elem::from_int(R, -q));
                if (w.A.at(d, j).intval() != 0) clean = false;
            }
            if (!clean) continue;
            // divisibility sweep: pivot must divide the remaining block
            bool ok = true;
            for (int i = d + 1; i < m && ok; ++i)
                for (int j = d + 1; j < n && ok; ++j)
                    if (w.A.at(i, j).intval() % w.A.at(d, d).intval() != 0) {
                        w.addmul_col(d, j, Elem::one(R));
                        ok = false;
                    }
            if (ok) break;
        }
        if (w.A.at(d, d).intval() < 0)
            w.scale_row(d, Elem::from_int(R, -1), Elem::from_int(R, -1));
    }
    for (int d = 0; d < t; ++d) diag.push_back(w.A.at(d, d));
}

void smith_chain(SmithWorkspace& w, std::vector<Elem>& diag) {
    const Ring& R = w.A.ring();
    ChainCtx cx = ChainCtx::of(R);
    int m = w.A.rows(), n = w.A.cols(), k = cx.k;
    int t = std::min(m, n);
    for (int d = 0; d < t; ++d) {
        int pi = -1, pj = -1, best = k;
        for (int i = d; i < m; ++i)
            for (int j = d; j < n; ++j) {
                if (w.A.at(i, j).is_zero()) continue;
                int v = cx.val(w.A.at(i, j));
                if (pi < 0 || v < best) { pi = i; pj = j; best = v; }
            }
        if (pi < 0) break;
        w.swap_rows(d, pi);
        w.swap_cols(d, pj);
        Elem u = cx.unit_part(w.A.at(d, d));
        w.scale_row(d, inverse(u), u);  // pivot becomes pi^best
        for (int i = d + 1; i < m; ++i)
            if (!w.A.at(i, d).is_zero())
                w.addmul_row(i, d, -cx.div(w.A.at(i, d), w.A.at(d, d)));
        for (int j = d + 1; j < n; ++j)
            if (!w.A.at(d, j).is_zero())
                w.addmul_col(j, d, -cx.div(w.A.at(d, j), w.A.at(d, d)));
    }
    for (int d = 0; d < t; ++d)
        diag.push_back(w.A.at(d, d).is_zero() ? Elem::zero(R) : cx.power(cx.val(w.A.at(d, d))));
}

}  // namespace

SmithResult smith(const Mat& M) {
    Family fam = family_of(M.ring());
    SmithWorkspace w(M);
    SmithResult res;
    switch (fam) {
        case Family::Integer:
            smith_integer(w, res.diag);
            break;
        case Family::Chain:
            smith_chain(w, res.diag);
            break;
        case Family::Field: {
            // Gaussian diagonalization with unit pivots.
            int m = w.A.rows(), n = w.A.cols(), t = std::min(m, n);
            for (int d = 0; d < t; ++d) {
                int pi = -1, pj = -1;
                for (int i = d; i < m && pi < 0; ++i)
                    for (int j = d; j < n; ++j)
                        if (!w.A.at(i, j).is_zero()) { pi = i; pj = j; break; }
                if (pi < 0) break;
                w.swap_rows(d, pi);
                w.swap_cols(d, pj);
                Elem piv = w.A.at(d, d);
                w.scale_row(d, inverse(piv), piv);
                for (int i = d + 1; i < m; ++i)
                    if (!w.A.at(i, d).is_zero()) w.addmul_row(i, d, -w.A.at(i, d));
                for (int j = d + 1; j < n; ++j)
                    if (!w.A.at(d, j).is_zero()) w.addmul_col(j, d, -w.A.at(d, j));
                res.diag.push_back(Elem::one(M.ring()));
            }
            break;
        }
        case Family::Residue:
            throw DomainError("smith: use coker_structure over Z/n");
    }
    res.D = w.A;
    res.U = w.U;
    res.Uinv = w.Uinv;
    res.W = w.W;
    res.Winv = w.Winv;
    return res;
}

// ---------------------------------------------------------------------------
// Cokernel structure

CokerResult coker_structure(const Mat& M, int ambient_rank) {
    if (M.rows() != ambient_rank) throw DomainError("coker_structure: ambient rank mismatch");
    Family fam = family_of(M.ring());
    CokerResult res;
    switch (fam) {
        case Family::Field: {
            EchelonResult e = echelon(M, false);
            res.free_rank = ambient_rank - e.rank();
            res.is_flat = true;
            return res;
        }
        case Family::Integer: {
            SmithResult s = smith(M);
            int nonzero = 0;
            for (const auto& d : s.diag) {
                if (d.is_zero()) continue;
                ++nonzero;
                if (!d.is_one()) res.invariants.push_back(d);
            }
            res.free_rank = ambient_rank - nonzero;
            res.is_flat = res.invariants.empty();
            return res;
        }
        case Family::Residue: {
            const Int& n = M.ring().modulus();
            Mat aug = augment_with_nI(lift_to_int(M), n);
            SmithResult s = smith(aug);
            for (const auto& d : s.diag) {
                const Int& v = d.intval();
                if (v == n) {
                    ++res.free_rank;
                } else if (v != 1) {
                    res.invariants.push_back(Elem::from_int(M.ring(), v));
                }
            }
            res.is_flat = res.invariants.empty();
            return res;
        }
        case Family::Chain: {
            SmithResult s = smith(M);
            ChainCtx cx = ChainCtx::of(M.ring());
            int ndiag = static_cast<int>(s.diag.size());
            res.free_rank = ambient_rank - ndiag;
            for (const auto& d : s.diag) {
                if (d.is_zero()) {
                    ++res.free_rank;
                } else {
                    int a = cx.val(d);
                    if (a > 0 && a < cx.k) res.invariants.push_back(d);
                }
            }
            res.is_flat = res.invariants.empty();
            return res;
        }
    }
    throw DomainError("unreachable");
}

// ---------------------------------------------------------------------------
// Determinant

namespace {

Elem det_field(Mat A) {
    const Ring& R = A.ring();
    int n = A.rows();
    Elem d = Elem::one(R);
    for (int c = 0; c < n; ++c) {
        int p = -1;
        for (int r = c; r < n; ++r)
            if (!A.at(r, c).is_zero()) { p = r; break; }
        if (p < 0) return Elem::zero(R);
        if (p != c) {
            for (int j = 0; j < n; ++j) std::swap(A.at(p, j), A.at(c, j));
            d = -d;
        }
        d = d * A.at(c, c);
        Elem inv = inverse(A.at(c, c));
        for (int r = c + 1; r < n; ++r) {
            if (A.at(r, c).is_zero()) continue;
            Elem f = A.at(r, c) * inv;
            for (int j = c; j < n; ++j) A.at(r, j) = A.at(r, j) - f * A.at(c, j);
        }
    }
    return d;
}

Elem det_chain(Mat A) {
    const Ring& R = A.ring();
    ChainCtx cx = ChainCtx::of(R);
    int n = A.rows();
    Elem d = Elem::one(R);
    for (int c = 0; c < n; ++c) {
        int pi = -1, pj = -1, best = cx.k;
        for (int i = c; i < n; ++i)
            for (int j = c; j < n; ++j) {
                if (A.at(i, j).is_zero()) continue;
                int v = cx.val(A.at(i, j));
                if (pi < 0 || v < best) { pi = i; pj = j; best = v; }
            }
        if (pi < 0) return Elem::zero(R);
        if (pi != c) {
            for (int j = 0; j < n; ++j) std::swap(A.at(pi, j), A.at(c, j));
            d = -d;
        }
        if (pj != c) {
            for (int i = 0; i < n; ++i) std::swap(A.at(i, pj), A.at(i, c));
            d = -d;
        }
        d = d * A.at(c, c);
        for (int i = c + 1; i < n; ++i) {
            if (A.at(i, c).is_zero()) continue;
            Elem f = cx.div(A.at(i, c), A.at(c, c));
            for (int j = c; j < n; ++j) A.at(i, j) = A.at(i, j) - f * A.at(c, j);
        }
    }
    return d;
}

}  // namespace

Elem det(const Mat& M) {
    if (M.rows() != M.cols()) throw DomainError("det: not square");
    if (M.rows() == 0) return Elem::one(M.ring());
    switch (family_of(M.ring())) {
        case Family::Field:
            return det_field(M);
        case Family::Integer: {
            Ring Q = Ring::rationals();
            Mat A(Q, M.rows(), M.cols());
            for (int r = 0; r < M.rows(); ++r)
                for (int c = 0; c < M.cols(); ++c)
                    A.at(r, c) = Elem::from_int(Q, M.at(r, c).intval());
            Elem d = det_field(A);
            return Elem::from_int(M.ring(), numerator(d.rat()));
        }
        case Family::Residue: {
            Ring Q = Ring::rationals();
            Mat A(Q, M.rows(), M.cols());
            for (int r = 0; r < M.rows(); ++r)
                for (int c = 0; c < M.cols(); ++c)
                    A.at(r, c) = Elem::from_int(Q, M.at(r, c).intval());
            Elem d = det_field(A);
            return Elem::from_int(M.ring(), numerator(d.rat()));
        }
        case Family::Chain:
            return det_chain(M);
    }
    throw DomainError("unreachable");
}

// ---------------------------------------------------------------------------
// Solving

namespace {

// Reduce b against an echelonized basis (and residual chain pivots), giving
// coordinates in the echelon columns; fails when not in the span.
std::optional<std::vector<Elem>> coords_in_echelon(const EchelonResult& e,
                                                   const std::vector<Elem>& b) {
    const Ring& R = e.basis.ring();
    Family fam = family_of(R);
    std::vector<Elem> rem = b;
    std::vector<Elem> coords(static_cast<size_t>(e.basis.cols()), Elem::zero(R));
    // Unit-pivot columns are zero at each other's pivot rows and chain
    // columns are zero at unit rows, so unit coordinates must be read first.
    std::vector<int> order;
    for (int j = 0; j < e.basis.cols(); ++j)
        if (e.unit_pivot[static_cast<size_t>(j)]) order.push_back(j);
    for (int j = 0; j < e.basis.cols(); ++j)
        if (!e.unit_pivot[static_cast<size_t>(j)]) order.push_back(j);
    for (int j : order) {
        int r = e.pivot_rows[static_cast<size_t>(j)];
        const Elem& x = rem[static_cast<size_t>(r)];
        if (x.is_zero()) continue;
        Elem c;
        const Elem& piv = e.basis.at(r, j);
        if (e.unit_pivot[static_cast<size_t>(j)]) {
            c = x * inverse(piv);
        } else if (fam == Family::Integer) {
            if (x.intval() % piv.intval() != 0) return std::nullopt;
            c = Elem::from_int(R, x.intval() / piv.intval());
        } else if (fam == Family::Chain) {
            ChainCtx cx = ChainCtx::of(R);
            if (cx.val(x) < cx.val(piv)) return std::nullopt;
            c = cx.div(x, piv);
        } else {
            return std::nullopt;
        }
        coords[static_cast<size_t>(j)] = c;
        for (int r2 = 0; r2 < static_cast<int>(rem.size()); ++r2)
            rem[static_cast<size_t>(r2)] = rem[static_cast<size_t>(r2)] - e.basis.at(r2, j) * c;
    }
    for (const auto& x : rem)
        if (!x.is_zero()) return std::nullopt;
    return coords;
}

}  // namespace

std::optional<std::vector<Elem>> solve_in_span(const Mat& M, const std::vector<Elem>& b) {
    if (static_cast<int>(b.size()) != M.rows()) throw DomainError("solve_in_span: length mismatch");
    Family fam = family_of(M.ring());
    if (fam == Family::Residue) {
        const Int& n = M.ring().modulus();
        Mat aug = augment_with_nI(lift_to_int(M), n);
        std::vector<Elem> bz;
        bz.reserve(b.size());
        for (const auto& x : b) bz.push_back(Elem::from_int(Ring::integers(), x.intval()));
        auto sol = solve_in_span(aug, bz);
        if (!sol) return std::nullopt;
        std::vector<Elem> out;
        out.reserve(static_cast<size_t>(M.cols()));
        for (int j = 0; j < M.cols(); ++j)
            out.push_back(Elem::from_int(M.ring(), (*sol)[static_cast<size_t>(j)].intval()));
        return out;
    }
    // Echelonize with transform so coordinates pull back to original columns.
    ColumnWorkspace w(M);
    std::vector<int> pr;
    std::vector<bool> up;
    switch (fam) {
        case Family::Field:
            echelon_field(w, pr);
            up.assign(pr.size(), true);
            break;
        case Family::Integer:
            echelon_integer(w, pr);
            for (size_t j = 0; j < pr.size(); ++j)
                up.push_back(w.A.at(pr[j], static_cast<int>(j)).is_one());
            break;
        case Family::Chain:
            echelon_chain(w, pr, up);
            break;
        case Family::Residue:
            break;
    }
    EchelonResult e;
    e.basis = w.A.submat_cols(0, static_cast<int>(pr.size()));
    e.pivot_rows = pr;
    e.unit_pivot = up;
    auto c = coords_in_echelon(e, b);
    if (!c) return std::nullopt;
    // x = T[:, :r] * c
    std::vector<Elem> x(static_cast<size_t>(M.cols()), Elem::zero(M.ring()));
    for (int i = 0; i < M.cols(); ++i) {
        Elem acc = Elem::zero(M.ring());
        for (int j = 0; j < static_cast<int>(pr.size()); ++j)
            acc = acc + w.T.at(i, j) * (*c)[static_cast<size_t>(j)];
        x[static_cast<size_t>(i)] = acc;
    }
    return x;
}

std::optional<std::vector<Elem>> solve_mod(const Mat& M, const Mat& D,
                                           const std::vector<Elem>& b) {
    Mat aug = M.hstack(D);
    auto sol = solve_in_span(aug, b);
    if (!sol) return std::nullopt;
    sol->resize(static_cast<size_t>(M.cols()), Elem::zero(M.ring()));
    return sol;
}

// ---------------------------------------------------------------------------
// Canonical complement

Mat canonical_complement(const Mat& M) {
    const Ring& R = M.ring();
    Family fam = family_of(R);
    EchelonResult e = echelon(M, false);
    int w = M.rows();
    switch (fam) {
        case Family::Field:
        case Family::Chain: {
            if (!e.complete)
                throw DomainError("canonical_complement: span is not a direct summand");
            std::vector<bool> is_pivot(static_cast<size_t>(w), false);
            for (int r : e.pivot_rows) is_pivot[static_cast<size_t>(r)] = true;
            std::vector<std::vector<Elem>> cols;
            for (int r = 0; r < w; ++r) {
                if (is_pivot[static_cast<size_t>(r)]) continue;
                std::vector<Elem> col(static_cast<size_t>(w), Elem::zero(R));
                col[static_cast<size_t>(r)] = Elem::one(R);
                cols.push_back(col);
            }
            return Mat::from_columns(R, w, cols);
        }
        case Family::Integer: {
            SmithResult s = smith(e.basis);
            for (const auto& d : s.diag)
                if (!d.is_one()) throw DomainError("canonical_complement: cokernel not free");
            std::vector<std::vector<Elem>> cols;
            for (int c = e.basis.cols(); c < w; ++c) cols.push_back(s.Uinv.column(c));
            return Mat::from_columns(R, w, cols);
        }
        case Family::Residue: {
            const Int& n = R.modulus();
            Mat aug = augment_with_nI(lift_to_int(e.basis), n);
            SmithResult s = smith(aug);
            std::vector<std::vector<Elem>> cols;
            for (size_t i = 0; i < s.diag.size(); ++i) {
                const Int& v = s.diag[i].intval();
                if (v == n) {
                    std::vector<Elem> zc = s.Uinv.column(static_cast<int>(i));
                    std::vector<Elem> col;
                    col.reserve(zc.size());
                    for (const auto& x : zc) col.push_back(Elem::from_int(R, x.intval()));
                    cols.push_back(col);
                } else if (v != 1) {
                    throw DomainError("canonical_complement: cokernel not free");
                }
            }
            return Mat::from_columns(R, w, cols);
        }
    }
    throw DomainError("unreachable");
}

}  // namespace satgr
