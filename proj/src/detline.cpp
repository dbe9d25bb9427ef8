#include "satgr/detline.hpp"

#include <algorithm>

namespace satgr {

DetLine line_tensor(const DetLine& x, const DetLine& y) {
    if (x.ring != y.ring) throw DomainError("line_tensor: ring mismatch");
    return DetLine{x.ring, x.grade + y.grade, x.tag + "(x)" + y.tag};
}

DetLine line_dual(const DetLine& x) { return DetLine{x.ring, -x.grade, x.tag + "^*"}; }

LineIso line_swap(const DetLine& x, const DetLine& y) {
    Elem u = Elem::one(x.ring);
    if ((x.grade % 2 != 0) && (y.grade % 2 != 0)) u = -u;
    return LineIso{line_tensor(x, y), line_tensor(y, x), u};
}

LineIso line_compose(const LineIso& f, const LineIso& g) {
    if (f.target.grade != g.source.grade || f.target.ring != g.source.ring)
        throw DomainError("line_compose: grade/ring mismatch");
    return LineIso{f.source, g.target, f.unit * g.unit};
}

LineIso line_double_dual(const DetLine& x) {
    return LineIso{line_dual(line_dual(x)), x, Elem::one(x.ring)};
}

// ---------------------------------------------------------------------------
// Based modules

BasedModule based_subquotient(const Ring& r, long lo, long hi, const Mat& num, const Mat& den,
                              std::string tag) {
    BasedModule m;
    m.ring = r;
    m.lo = lo;
    m.hi = hi;
    m.den = den;
    m.tag = std::move(tag);
    if (num.cols() == 0) {
        m.basis = Mat(r, static_cast<int>(hi - lo), 0);
        return m;
    }
    Mat whole = echelon(num.hstack(den), false).basis;  // span(num) + span(den)
    Mat C(r, whole.cols(), den.cols());
    for (int c = 0; c < den.cols(); ++c) {
        auto x = solve_in_span(whole, den.column(c));
        if (!x) throw DomainError("based_subquotient: denominator escapes the span");
        for (int rr = 0; rr < whole.cols(); ++rr) C.at(rr, c) = (*x)[static_cast<size_t>(rr)];
    }
    Mat comp = canonical_complement(echelon(C, false).basis);
    m.basis = whole.mul(comp);
    return m;
}

std::optional<std::vector<Elem>> module_coords(const BasedModule& m, const std::vector<Elem>& v) {
    return solve_mod(m.basis, m.den, v);
}

// ---------------------------------------------------------------------------
// seq_det

Elem seq_det(const Mat& iota, const Mat& pi) {
    const Ring& r = iota.cols() > 0 ? iota.ring() : pi.ring();
    int ry = iota.rows();
    if (pi.cols() != ry) throw DomainError("seq_det: shape mismatch");
    int rx = iota.cols(), rz = pi.rows();
    if (rx + rz != ry) throw DomainError("seq_det: ranks do not add up");
    if (rx > 0 && rz > 0 && !pi.mul(iota).is_zero()) throw DomainError("seq_det: not a complex");
    if (rx > 0 && echelon(iota).kernel.cols() != 0)
        throw DomainError("seq_det: injection has a kernel");
    Mat square(r, ry, ry);
    for (int c = 0; c < rx; ++c)
        for (int rr = 0; rr < ry; ++rr) square.at(rr, c) = iota.at(rr, c);
    for (int c = 0; c < rz; ++c) {
        std::vector<Elem> e(static_cast<size_t>(rz), Elem::zero(r));
        e[static_cast<size_t>(c)] = Elem::one(r);
        auto x = solve_in_span(pi, e);
        if (!x) throw DomainError("seq_det: projection not surjective");
        for (int rr = 0; rr < ry; ++rr) square.at(rr, rx + c) = (*x)[static_cast<size_t>(rr)];
    }
    return det(square);
}

// ---------------------------------------------------------------------------
// Graded word engine

void GradedWord::push_inverse_of(const GradedWord& w) {
    for (auto it = w.letters_.rbegin(); it != w.letters_.rend(); ++it)
        letters_.push_back({it->atom, it->grade, -it->exp});
    coeff_ = coeff_ * inverse(w.coeff_);
}

void GradedWord::mul_coeff(const Elem& u) { coeff_ = coeff_ * u; }

Elem GradedWord::reduce() const {
    std::vector<Letter> ls = letters_;
    Elem c = coeff_;
    auto key_less = [](const Letter& a, const Letter& b) {
        if (a.atom != b.atom) return a.atom < b.atom;
        return a.exp < b.exp;  // inverse before primal so contraction reads [X]^{-1}[X]
    };
    // bubble sort tracking Koszul signs, then contract adjacent inverse pairs
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i + 1 < ls.size(); ++i) {
            if (ls[i].atom == ls[i + 1].atom && ls[i].exp == -ls[i + 1].exp && ls[i].exp < 0) {
                ls.erase(ls.begin() + static_cast<long>(i), ls.begin() + static_cast<long>(i) + 2);
                changed = true;
                break;
            }
            if (key_less(ls[i + 1], ls[i])) {
                if (koszul_ && (ls[i].grade % 2 != 0) && (ls[i + 1].grade % 2 != 0)) c = -c;
                std::swap(ls[i], ls[i + 1]);
                changed = true;
            }
        }
    }
    if (!ls.empty()) throw DomainError("GradedWord::reduce: word does not cancel");
    return c;
}

// ---------------------------------------------------------------------------
// Alternating unit of a based exact sequence

Elem alt_unit(const BasedSeq& seq, bool koszul) {
    size_t k = seq.mods.size();
    if (k == 0) return Elem::one(Ring::rationals());
    const Ring& r = seq.mods[0].ring;
    if (seq.maps.size() + 1 != k) throw DomainError("alt_unit: map count mismatch");

    // images Im[i] inside mods[i]; Im[0] and Im[k] are zero
    std::vector<BasedModule> im(k + 1);
    im[0] = based_subquotient(r, seq.mods[0].lo, seq.mods[0].hi,
                              Mat(r, seq.mods[0].basis.rows(), 0), seq.mods[0].den, "0");
    for (size_t i = 1; i < k; ++i)
        im[i] = based_subquotient(r, seq.mods[i].lo, seq.mods[i].hi, seq.maps[i - 1],
                                  seq.mods[i].den, seq.mods[i].tag + ".im");
    im[k] = BasedModule{r, seq.mods[k - 1].lo, seq.mods[k - 1].hi,
                        Mat(r, seq.mods[k - 1].basis.rows(), 0),
                        Mat(r, seq.mods[k - 1].basis.rows(), 0), "0"};

    for (size_t i = 0; i < k; ++i)
        if (im[i].rank() + im[i + 1].rank() != seq.mods[i].rank())
            throw DomainError("alt_unit: sequence is not exact at " + seq.mods[i].tag);

    GradedWord word(r, koszul);
    int next_atom = 0;
    std::vector<int> mod_atom(k), im_atom(k + 1);
    for (size_t i = 0; i < k; ++i) mod_atom[i] = next_atom++;
    for (size_t i = 0; i <= k; ++i) im_atom[i] = next_atom++;

    for (size_t i = 0; i < k; ++i)
        word.push(mod_atom[i], seq.mods[i].rank(), (i % 2 == 0) ? 1 : -1);

    // short pieces 0 -> Im[i] -> E_i -> Im[i+1] -> 0
    for (size_t i = 0; i < k; ++i) {
        const BasedModule& E = seq.mods[i];
        int rx = im[i].rank(), rz = im[i + 1].rank();
        Mat square(r, E.rank(), E.rank());
        for (int c = 0; c < rx; ++c) {
            auto x = module_coords(E, im[i].basis.column(c));
            if (!x) throw DomainError("alt_unit: image does not land in module");
            for (int rr = 0; rr < E.rank(); ++rr) square.at(rr, c) = (*x)[static_cast<size_t>(rr)];
        }
        for (int c = 0; c < rz; ++c) {
            // preimage through maps[i]: coordinates in E's basis
            const Mat& images = seq.maps[i];
            auto x = solve_mod(images, seq.mods[i + 1].den, im[i + 1].basis.column(c));
            if (!x) throw DomainError("alt_unit: image basis has no preimage");
            for (int rr = 0; rr < E.rank(); ++rr)
                square.at(rr, rx + c) = (*x)[static_cast<size_t>(rr)];
        }
        Elem u = det(square);
        if (!is_unit(u)) throw DomainError("alt_unit: short piece is not based exact");
        // the word [Im_i][Im_{i+1}][E_i]^{-1} evaluates to u (-1)^{rk E_i}
        // under the Koszul contraction convention; insert it in primal or
        // exactly reversed-negated orientation
        if (koszul && seq.mods[i].rank() % 2 != 0) u = -u;
        if (i % 2 == 0) {
            word.push(im_atom[i], im[i].rank(), 1);
            word.push(im_atom[i + 1], im[i + 1].rank(), 1);
            word.push(mod_atom[i], seq.mods[i].rank(), -1);
            word.mul_coeff(inverse(u));
        } else {
            word.push(mod_atom[i], seq.mods[i].rank(), 1);
            word.push(im_atom[i + 1], im[i + 1].rank(), -1);
            word.push(im_atom[i], im[i].rank(), -1);
            word.mul_coeff(u);
        }
    }
    return word.reduce();
}

// ---------------------------------------------------------------------------
// Determinant lines of the chart complexes

DetLine complex_det(const GrassPoint& L, const Lattice& A) {
    StarData d = star_data(L, A);
    if (!d.cap_free) throw DomainError("complex_det: L cap A is not free");
    if (!d.coker.is_flat) throw DomainError("complex_det: V/(L+A) is not flat");
    DetLine line;
    line.ring = L.ring;
    line.grade = static_cast<long>(d.cap_basis.cols()) - static_cast<long>(d.coker.free_rank);
    line.tag = "det(L cap A)(x)det(V/(L+A))^*";
    return line;
}

namespace {

// canonical L cap A basis within a fixed window
Mat cap_basis_in_window(const Mat& Lcols, const Mat& Acols) {
    const Ring& r = Lcols.ring();
    Mat Aneg(r, Acols.rows(), Acols.cols());
    for (int rr = 0; rr < Acols.rows(); ++rr)
        for (int c = 0; c < Acols.cols(); ++c) Aneg.at(rr, c) = -Acols.at(rr, c);
    EchelonResult k = echelon(Lcols.hstack(Aneg));
    Mat Ka(r, Lcols.cols(), k.kernel.cols());
    for (int rr = 0; rr < Lcols.cols(); ++rr)
        for (int c = 0; c < k.kernel.cols(); ++c) Ka.at(rr, c) = k.kernel.at(rr, c);
    return echelon(Lcols.mul(Ka), false).basis;
}

}  // namespace

LineIso compare_charts(const GrassPoint& L, const Lattice& A, const Lattice& B, long slack) {
    if (L.ring != A.ring || L.ring != B.ring) throw DomainError("compare_charts: ring mismatch");
    const Ring& r = L.ring;
    Lattice I = lattice_intersect(A, B);

    long lo = std::min({L.lo, A.lo, B.lo, I.lo}) - slack;
    long hi = std::max({L.hi, A.hi, B.hi, I.hi}) + slack;
    Mat Lc = point_window_columns(L, lo, hi);
    Mat Ac = lattice_window_columns(A, lo, hi);
    Mat Bc = lattice_window_columns(B, lo, hi);
    Mat Ic = lattice_window_columns(I, lo, hi);
    Mat none(r, static_cast<int>(hi - lo), 0);

    BasedModule capI{r, lo, hi, cap_basis_in_window(Lc, Ic), none, "L^I"};
    BasedModule capA{r, lo, hi, cap_basis_in_window(Lc, Ac), none, "L^A"};
    BasedModule capB{r, lo, hi, cap_basis_in_window(Lc, Bc), none, "L^B"};
    BasedModule AmodI = based_subquotient(r, lo, hi, Ac, Ic, "A/I");
    BasedModule BmodI = based_subquotient(r, lo, hi, Bc, Ic, "B/I");
    Mat LI = Lc.hstack(Ic);
    BasedModule VLI{r, lo, hi, window_coker_basis(LI), LI, "V/(L+I)"};
    Mat LA = Lc.hstack(Ac);
    BasedModule VLA{r, lo, hi, window_coker_basis(LA), LA, "V/(L+A)"};
    Mat LB = Lc.hstack(Bc);
    BasedModule VLB{r, lo, hi, window_coker_basis(LB), LB, "V/(L+B)"};

    // psi_X: coordinate of Det(C_X) (x) lambda(X/I)^* against the core
    // Det(C_I), read off by cancelling the six-term relation word
    //   [capI][capX]^{-1}[X/I][VLI]^{-1}[VLX]  (value altX)
    // against [capX][VLX]^{-1}[X/I]^{-1}[VLI][capI]^{-1}.
    auto psi = [&](const BasedModule& capX, const BasedModule& XmodI, const BasedModule& VLX) {
        BasedSeq s;
        s.mods = {capI, capX, XmodI, VLI, VLX};
        s.maps = {capI.basis, capX.basis, XmodI.basis, VLI.basis};
        Elem altX = alt_unit(s);
        GradedWord w(r);
        enum { aI, aX, aXI, aVI, aVX };
        auto push = [&](int atom, long g, int e) { w.push(atom, g, e); };
        push(aX, capX.rank(), 1);
        push(aVX, VLX.rank(), -1);
        push(aXI, XmodI.rank(), -1);
        push(aVI, VLI.rank(), 1);
        push(aI, capI.rank(), -1);
        push(aI, capI.rank(), 1);
        push(aX, capX.rank(), -1);
        push(aXI, XmodI.rank(), 1);
        push(aVI, VLI.rank(), -1);
        push(aVX, VLX.rank(), 1);
        w.mul_coeff(inverse(altX));
        return w.reduce();
    };

    LineIso iso;
    iso.source = line_tensor(complex_det(L, A),
                             line_dual(DetLine{r, AmodI.rank(), "A/(A^B)"}));
    iso.target = line_tensor(complex_det(L, B),
                             line_dual(DetLine{r, BmodI.rank(), "B/(A^B)"}));
    iso.unit = psi(capA, AmodI, VLA) * inverse(psi(capB, BmodI, VLB));
    if (!is_unit(iso.unit)) throw DomainError("compare_charts: unit is not invertible");
    return iso;
}

}  // namespace satgr
