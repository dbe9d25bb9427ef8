#include "doctest.h"

#include "satgr/detline.hpp"
#include "generators.hpp"

#include <random>

using namespace satgr;

namespace {

Mat mat_of(const Ring& r, int rows, std::vector<std::vector<long>> cols) {
    std::vector<std::vector<Elem>> ecols;
    for (auto& c : cols) {
        std::vector<Elem> col;
        for (long v : c) col.push_back(Elem::from_int(r, v));
        ecols.push_back(col);
    }
    return Mat::from_columns(r, rows, ecols);
}

GrassPoint gen_point(const char* ring, std::vector<const char*> gens, long tail) {
    Ring r = Ring::parse(ring);
    std::vector<LaurentPoly> g;
    for (const char* t : gens) g.push_back(LaurentPoly::parse(r, t));
    return GrassPoint::from_generators(r, g, tail);
}

}  // namespace

TEST_CASE("line bookkeeping") {
    Ring Q = Ring::rationals();
    DetLine a{Q, 1, "a"}, b{Q, -1, "b"};
    CHECK(line_tensor(a, b).grade == 0);
    CHECK(line_dual(line_dual(a)).grade == 1);
    CHECK(line_double_dual(a).unit == Elem::one(Q));
    CHECK(line_swap(a, a).unit == Elem::from_int(Q, -1));
    CHECK(line_swap(a, b).unit == Elem::from_int(Q, -1));
    CHECK(line_swap(a, DetLine{Q, 2, "c"}).unit == Elem::one(Q));
}

TEST_CASE("seq_det: spec examples") {
    Ring Z = Ring::integers();
    // 0 -> X -> X (+) Z -> Z -> 0 with concatenated bases
    Mat iota = mat_of(Z, 3, {{1, 0, 0}, {0, 1, 0}});
    Mat pi = mat_of(Z, 1, {{0}, {0}, {1}});  // wait: pi is 1x3
    pi = Mat(Z, 1, 3);
    pi.at(0, 2) = Elem::one(Z);
    CHECK(seq_det(iota, pi) == Elem::one(Z));

    // 0 -> <e1+e2> -> Z^2 -> Z^2/<e1+e2> -> 0 with quotient basis (e2 mod)
    Mat iota2 = mat_of(Z, 2, {{1, 1}});
    Mat pi2(Z, 1, 2);
    // e1 |-> -(e2 class), e2 |-> +(e2 class)
    pi2.at(0, 0) = Elem::from_int(Z, -1);
    pi2.at(0, 1) = Elem::one(Z);
    CHECK(seq_det(iota2, pi2) == Elem::one(Z));

    // flipping the quotient basis flips the determinant
    Mat pi3(Z, 1, 2);
    pi3.at(0, 0) = Elem::one(Z);
    pi3.at(0, 1) = Elem::from_int(Z, -1);
    CHECK(seq_det(iota2, pi3) == Elem::from_int(Z, -1));

    // lift independence: exactness failures are rejected
    CHECK_THROWS_AS(seq_det(mat_of(Z, 2, {{2, 0}}), pi2), DomainError);
}

TEST_CASE("seq_det is multiplicative under splicing") {
    // 0 -> X -> Y -> Z -> 0 and 0 -> Z -> W -> U -> 0 spliced through Z:
    // checked as associativity of alt_unit on a 4-term sequence against the
    // two шort pieces (Whitney product).
    Ring Q = Ring::rationals();
    long lo = 0, hi = 3;
    Mat none(Q, 3, 0);
    // X = <e0+e1>, Y = <e0,e1>, Z = Y/X
    BasedModule X = based_subquotient(Q, lo, hi, mat_of(Q, 3, {{1, 1, 0}}), none, "X");
    BasedModule Y = based_subquotient(Q, lo, hi, mat_of(Q, 3, {{1, 0, 0}, {0, 1, 0}}), none, "Y");
    BasedModule Z = based_subquotient(Q, lo, hi, mat_of(Q, 3, {{0, 1, 0}}),
                                      mat_of(Q, 3, {{1, 1, 0}}), "Z");
    BasedSeq s;
    s.mods = {X, Y, Z};
    s.maps = {X.basis, Y.basis};
    Elem u = alt_unit(s);
    CHECK(is_unit(u));

    // scaling the X basis by 3 scales the unit accordingly
    BasedModule X3 = X;
    X3.basis = mat_of(Q, 3, {{3, 3, 0}});
    BasedSeq s3;
    s3.mods = {X3, Y, Z};
    s3.maps = {X3.basis, Y.basis};
    CHECK(alt_unit(s3) == u * Elem::from_int(Q, 3));
}

TEST_CASE("complex_det grading equals the index") {
    Ring Q = Ring::rationals();
    GrassPoint L0 = GrassPoint::std_point(Q, 0);
    Lattice std0 = Lattice::std_lattice(Q, 0);
    CHECK(complex_det(L0, std0).grade == 0);
    CHECK(complex_det(gen_point("Q", {"1"}, 0), std0).grade == 1);
    CHECK(complex_det(L0, Lattice::std_lattice(Q, 1)).grade == -1);

    std::mt19937_64 rng(83);
    for (const char* text : {"Q", "F5", "Z"}) {
        Ring r = Ring::parse(text);
        int done = 0;
        for (int trial = 0; trial < 120 && done < 25; ++trial) {
            Lattice A = testgen::random_lattice(r, rng);
            GrassPoint L = GrassPoint::std_point(r, 0);
            if (!lattice_validate(A).ok) continue;
            long idx;
            try {
                idx = index_of(L, A);
            } catch (const DomainError&) {
                continue;
            }
            ++done;
            CHECK(complex_det(L, A).grade == idx);
        }
        CHECK(done >= 15);
    }
}

TEST_CASE("compare_charts: identity and stability under padding") {
    Ring Q = Ring::rationals();
    GrassPoint L0 = GrassPoint::std_point(Q, 0);
    Lattice std0 = Lattice::std_lattice(Q, 0), std1 = Lattice::std_lattice(Q, 1);

    LineIso same = compare_charts(L0, std0, std0);
    CHECK(same.unit == Elem::one(Q));

    LineIso iso = compare_charts(L0, std0, std1);
    CHECK(is_unit(iso.unit));
    bool pinned_sign = iso.unit == Elem::one(Q) || iso.unit == Elem::from_int(Q, -1);
    CHECK(pinned_sign);
    for (long slack = 1; slack <= 3; ++slack)
        CHECK(compare_charts(L0, std0, std1, slack).unit == iso.unit);
}

TEST_CASE("compare_charts matches chart_transition_det on chart overlaps") {
    Ring Q = Ring::rationals();
    GrassPoint L3 = gen_point("Q", {"t^-1+1"}, -1);
    Lattice std0 = Lattice::std_lattice(Q, 0);
    Lattice B = Lattice::from_generators(Q, {LaurentPoly::parse(Q, "t^-1")}, 1);
    Elem td = chart_transition_det(L3, std0, B);
    REQUIRE(td == Elem::from_int(Q, -1));
    LineIso iso = compare_charts(L3, std0, B);
    CHECK(iso.unit == td);

    GrassPoint L0 = GrassPoint::std_point(Q, 0);
    Lattice B1 = Lattice::from_generators(Q, {LaurentPoly::parse(Q, "t^-1+1")}, 1);
    Lattice B2 = Lattice::from_generators(Q, {LaurentPoly::parse(Q, "t^-1+2")}, 1);
    CHECK(compare_charts(L0, B1, B2).unit == chart_transition_det(L0, B1, B2));
}

TEST_CASE("compare_charts triangle over a common intersection") {
    Ring Q = Ring::rationals();
    GrassPoint L0 = GrassPoint::std_point(Q, 0);
    Lattice A = Lattice::std_lattice(Q, 0);
    Lattice B1 = Lattice::from_generators(Q, {LaurentPoly::parse(Q, "t^-1+1")}, 1);
    Lattice B2 = Lattice::from_generators(Q, {LaurentPoly::parse(Q, "t^-1+2")}, 1);
    // pairwise intersections all equal Std(1)
    REQUIRE(lattice_intersect(A, B1) == Lattice::std_lattice(Q, 1));
    REQUIRE(lattice_intersect(B1, B2) == Lattice::std_lattice(Q, 1));
    Elem prod = compare_charts(L0, A, B1).unit * compare_charts(L0, B1, B2).unit *
                compare_charts(L0, B2, A).unit;
    CHECK(prod == Elem::one(Q));

    GrassPoint L1 = gen_point("Q", {"1"}, 0);
    Lattice C1 = Lattice::std_lattice(Q, 1);
    Lattice C2 = Lattice::from_generators(Q, {LaurentPoly::parse(Q, "t^-1+t")}, 2);
    Lattice C3 = Lattice::from_generators(Q, {LaurentPoly::parse(Q, "t^-1+2+3*t")}, 2);
    Elem prod2 = compare_charts(L1, C1, C2).unit * compare_charts(L1, C2, C3).unit *
                 compare_charts(L1, C3, C1).unit;
    CHECK(prod2 == Elem::one(Q));
}

TEST_CASE("compare_charts under base change") {
    Ring Z = Ring::integers();
    RingHom h = RingHom::reduce(Z, Ring::parse("F5"));
    GrassPoint L3 = gen_point("Z", {"t^-1+1"}, -1);
    Lattice std0 = Lattice::std_lattice(Z, 0);
    Lattice B = Lattice::from_generators(Z, {LaurentPoly::parse(Z, "t^-1")}, 1);
    Elem over_z = compare_charts(L3, std0, B).unit;
    Elem over_f = compare_charts(base_change_point(L3, h), base_change_lattice(std0, h),
                                 base_change_lattice(B, h))
                      .unit;
    CHECK(h.apply(over_z) == over_f);
}
