#pragma once

#include "satgr/grass.hpp"

namespace satgr {

/// Determinant line: a based line of the stated grade. The canonical
/// generator is implicit (ordered wedge of the canonical bases named by the
/// tag); all computations exchange unit coordinates relative to it.
struct DetLine {
    Ring ring;
    long grade = 0;
    std::string tag;
};

/// A canonical isomorphism between two lines, recorded as the coordinate of
/// the image of the source generator in the target generator.
struct LineIso {
    DetLine source, target;
    Elem unit;
};

DetLine line_tensor(const DetLine& x, const DetLine& y);
DetLine line_dual(const DetLine& x);
/// Braiding x (x) y -> y (x) x; the unit is the Koszul sign (-1)^{mn}.
LineIso line_swap(const DetLine& x, const DetLine& y);
LineIso line_compose(const LineIso& f, const LineIso& g);
/// dual(dual(x)) = x with unit 1.
LineIso line_double_dual(const DetLine& x);

/// Based subquotient (span(num) + span(den)) / span(den) of the free module
/// of window coordinates; basis entries are representative columns.
struct BasedModule {
    Ring ring;
    long lo = 0, hi = 0;
    Mat basis;  // representative columns, canonical for the subquotient
    Mat den;    // denominator generators (empty matrix permitted)
    std::string tag;

    int rank() const { return basis.cols(); }
};

/// Canonical based presentation; throws when the subquotient is not free.
BasedModule based_subquotient(const Ring& r, long lo, long hi, const Mat& num, const Mat& den,
                              std::string tag);

/// Coordinates of a window vector in the module's basis modulo den.
std::optional<std::vector<Elem>> module_coords(const BasedModule& m, const std::vector<Elem>& v);

/// Determinant of a based short exact sequence 0 -> X -> Y -> Z -> 0 given by
/// the matrix of the injection and of the projection in the chosen bases:
/// det of [iota | lift] in the Y-basis, independent of the chosen lift.
Elem seq_det(const Mat& iota, const Mat& pi);

/// Based exact sequence 0 -> E_0 -> E_1 -> ... -> E_{k-1} -> 0: mods[i] with
/// maps[i] : E_i -> E_{i+1} given by window images of E_i's basis columns.
struct BasedSeq {
    std::vector<BasedModule> mods;
    std::vector<Mat> maps;
};

/// Formal word in graded based lines with a unit coefficient. Letters carry
/// (atom id, grade, exponent +-1); in Koszul mode swapping letters costs
/// (-1)^{g g'} and contracting [X][X]^{-1} costs (-1)^g, while plain mode is
/// sign-free. An adjacent [X]^{-1}[X] pair always contracts to 1.
class GradedWord {
public:
    explicit GradedWord(const Ring& r, bool koszul = true)
        : ring_(r), koszul_(koszul), coeff_(Elem::one(r)) {}

    /// Rank-zero lines are canonically trivial (empty wedge); their letters
    /// carry no data and are dropped.
    void push(int atom, long grade, int exp) {
        if (grade != 0) letters_.push_back({atom, grade, exp});
    }
    void push_inverse_of(const GradedWord& w);
    void mul_coeff(const Elem& u);

    /// Sort (tracking signs) and contract; throws unless everything cancels.
    Elem reduce() const;

private:
    struct Letter {
        int atom;
        long grade;
        int exp;
    };
    Ring ring_;
    bool koszul_;
    Elem coeff_;
    std::vector<Letter> letters_;
};

/// Image modules of a based exact sequence with the determinant of each
/// splice 0 -> Im_i -> E_i -> Im_{i+1} -> 0 (raw determinants, no sign
/// normalization). im has seq.mods.size()+1 entries with zero ends.
struct ChainShorts {
    std::vector<BasedModule> im;
    std::vector<Elem> unit;
};

ChainShorts chain_shorts(const BasedSeq& seq);

/// Unit of the canonical trivialization of (x) lambda(E_i)^{(-1)^i} for a
/// based exact sequence, computed by splicing through image modules; the
/// value is independent of the interior image bases.
Elem alt_unit(const BasedSeq& seq, bool koszul = true);

/// Letter word reduced by explicit canonical moves: in-place splits and
/// fuses along short exact relations, with braiding tracked in the super
/// convention. This is the sign-sound evaluator for determinant
/// isomorphism units.
class RewriteWord {
public:
    struct Letter {
        int atom;
        long grade;
        int exp;
    };

    explicit RewriteWord(const Ring& r) : ring_(r), coeff_(Elem::one(r)) {}

    void push(int atom, long grade, int exp) {
        if (grade != 0) w_.push_back({atom, grade, exp});
    }
    void mul(const Elem& c) { coeff_ = coeff_ * c; }

    /// Replace the unique letter (atom, exp) in place by `by`, coeff *= c.
    void replace(int atom, int exp, const std::vector<Letter>& by, const Elem& c);
    /// Braid (atomZ,+1) adjacent after (atomX,+1) and fuse the pair into
    /// `to`, coeff *= c.
    void fuse(int atomX, int atomZ, Letter to, const Elem& c);
    /// Sorted super contraction; throws unless all letters cancel.
    Elem finish() const;

private:
    int find(int atom, int exp) const;
    Ring ring_;
    Elem coeff_;
    std::vector<Letter> w_;
};

/// Determinant line of the two-term complex L (+) A -> V:
/// lambda(L cap A) (x) lambda(V/(L+A))^*, graded by the index.
DetLine complex_det(const GrassPoint& L, const Lattice& A);

/// Canonical isomorphism
///   complex_det(L,A) (x) lambda(A/(A cap B))^*  ->
///   complex_det(L,B) (x) lambda(B/(A cap B))^*
/// computed through the six-term sequences over A cap B.
LineIso compare_charts(const GrassPoint& L, const Lattice& A, const Lattice& B, long slack = 0);

}  // namespace satgr
