#include "doctest.h"

#include "satgr/matrix.hpp"

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

Mat random_mat(const Ring& r, int rows, int cols, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> small(-4, 4);
    Mat m(r, rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m.at(i, j) = Elem::from_int(r, small(rng));
    return m;
}

bool in_span(const Mat& M, const std::vector<Elem>& v) {
    return solve_in_span(M, v).has_value();
}

bool same_span(const Mat& A, const Mat& B) {
    for (int c = 0; c < B.cols(); ++c)
        if (!in_span(A, B.column(c))) return false;
    for (int c = 0; c < A.cols(); ++c)
        if (!in_span(B, A.column(c))) return false;
    return true;
}

}  // namespace

TEST_CASE("echelon: identity over Q") {
    Ring Q = Ring::rationals();
    EchelonResult e = echelon(mat_of(Q, 2, {{1, 0}, {0, 1}}));
    CHECK(e.rank() == 2);
    CHECK(e.pivot_rows == std::vector<int>{0, 1});
    CHECK(e.kernel.cols() == 0);
    CHECK(e.complete);
}

TEST_CASE("echelon: integer column Hermite form") {
    Ring Z = Ring::integers();
    EchelonResult e = echelon(mat_of(Z, 2, {{2, 4}}));
    CHECK(e.rank() == 1);
    CHECK(e.basis.at(0, 0) == Elem::from_int(Z, 2));
    CHECK(e.basis.at(1, 0) == Elem::from_int(Z, 4));
    CHECK(e.kernel.cols() == 0);

    // pivots positive, off-pivot entries reduced
    EchelonResult f = echelon(mat_of(Z, 2, {{-3, 0}, {5, 2}}));
    REQUIRE(f.rank() == 2);
    CHECK(f.basis.at(0, 0).intval() > 0);
    CHECK(f.basis.at(0, 1).is_zero());
    CHECK(f.basis.at(1, 1).intval() > 0);
    CHECK(f.basis.at(1, 0).intval() >= 0);
    CHECK(f.basis.at(1, 0).intval() < f.basis.at(1, 1).intval());
}

TEST_CASE("echelon: kernel over F2 against brute-force enumeration") {
    Ring F2 = Ring::prime_field(2);
    Mat M = mat_of(F2, 2, {{1, 1}, {1, 1}});
    EchelonResult e = echelon(M);
    CHECK(e.rank() == 1);
    REQUIRE(e.kernel.cols() == 1);

    // enumerate the 4 vectors of F_2^2 and collect the true kernel
    std::vector<std::vector<Elem>> true_kernel;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            std::vector<Elem> x{Elem::from_int(F2, a), Elem::from_int(F2, b)};
            Elem y0 = M.at(0, 0) * x[0] + M.at(0, 1) * x[1];
            Elem y1 = M.at(1, 0) * x[0] + M.at(1, 1) * x[1];
            if (y0.is_zero() && y1.is_zero() && !(x[0].is_zero() && x[1].is_zero()))
                true_kernel.push_back(x);
        }
    REQUIRE(true_kernel.size() == 1);
    CHECK(e.kernel.column(0) == true_kernel[0]);
}

TEST_CASE("echelon idempotence across rings") {
    std::mt19937_64 rng(3);
    for (const char* text : {"Q", "Z", "F5", "Z/8", "F3[e]/e^2"}) {
        Ring r = Ring::parse(text);
        for (int trial = 0; trial < 25; ++trial) {
            Mat M = random_mat(r, 4, 3, rng);
            EchelonResult e1 = echelon(M, false);
            EchelonResult e2 = echelon(e1.basis, false);
            CHECK(e1.basis == e2.basis);
        }
    }
}

TEST_CASE("echelon over Z/8 reports non-unit pivots") {
    Ring Z8 = Ring::residue_ring(8);
    EchelonResult e = echelon(mat_of(Z8, 1, {{2}}));
    REQUIRE(e.rank() == 1);
    CHECK_FALSE(e.complete);
    CHECK_FALSE(e.unit_pivot[0]);
    // kernel of multiplication by 2 on Z/8 is generated by 4
    REQUIRE(e.kernel.cols() == 1);
    CHECK(e.kernel.at(0, 0) == Elem::from_int(Z8, 4));
}

TEST_CASE("coker_structure: diag(2,3) over Z is Z/6") {
    Ring Z = Ring::integers();
    Mat M = mat_of(Z, 2, {{2, 0}, {0, 3}});
    CokerResult c = coker_structure(M, 2);
    CHECK(c.free_rank == 0);
    REQUIRE(c.invariants.size() == 1);
    CHECK(c.invariants[0] == Elem::from_int(Z, 6));
    CHECK_FALSE(c.is_flat);

    // brute force: quotient group has order |det| = 6 and an element of order 6
    // (order of (1,1) + im M), hence is Z/6
    auto in_image = [&](long x, long y) { return x % 2 == 0 && y % 3 == 0; };
    int order = 0;
    for (int k = 1; k <= 6; ++k)
        if (in_image(k, k)) { order = k; break; }
    CHECK(order == 6);
}

TEST_CASE("coker_structure: spec examples") {
    Ring Q = Ring::rationals();
    CokerResult a = coker_structure(mat_of(Q, 2, {{1, 0}}), 2);
    CHECK(a.free_rank == 1);
    CHECK(a.is_flat);

    Ring Z = Ring::integers();
    CokerResult b = coker_structure(mat_of(Z, 2, {{2, 0}}), 2);
    CHECK(b.free_rank == 1);
    REQUIRE(b.invariants.size() == 1);
    CHECK(b.invariants[0] == Elem::from_int(Z, 2));
    CHECK_FALSE(b.is_flat);
}

TEST_CASE("coker_structure over chain rings and Z/n") {
    Ring Qe = Ring::parse("Q[e]/e^2");
    Mat M(Qe, 1, 1);
    M.at(0, 0) = Elem::parse(Qe, "e");
    CokerResult c = coker_structure(M, 1);
    CHECK(c.free_rank == 0);
    REQUIRE(c.invariants.size() == 1);
    CHECK_FALSE(c.is_flat);

    Ring Z8 = Ring::residue_ring(8);
    CokerResult d = coker_structure(mat_of(Z8, 1, {{2}}), 1);
    CHECK(d.free_rank == 0);
    REQUIRE(d.invariants.size() == 1);
    CHECK(d.invariants[0] == Elem::from_int(Z8, 2));

    CokerResult f = coker_structure(mat_of(Z8, 1, {{1}}), 1);
    CHECK(f.free_rank == 0);
    CHECK(f.is_flat);

    CokerResult g = coker_structure(Mat(Z8, 1, 0), 1);
    CHECK(g.free_rank == 1);
    CHECK(g.is_flat);
}

TEST_CASE("coker_structure is presentation invariant") {
    std::mt19937_64 rng(17);
    for (const char* text : {"Q", "Z", "F5", "Z/8", "F3[e]/e^2"}) {
        Ring r = Ring::parse(text);
        for (int trial = 0; trial < 20; ++trial) {
            Mat M = random_mat(r, 3, 2, rng);
            // append a column already in the span
            std::vector<Elem> extra(3, Elem::zero(r));
            Elem c0 = Elem::from_int(r, 2), c1 = Elem::from_int(r, -1);
            for (int i = 0; i < 3; ++i) extra[i] = M.at(i, 0) * c0 + M.at(i, 1) * c1;
            Mat M2 = M.hstack(Mat::from_columns(r, 3, {extra}));
            CokerResult a = coker_structure(M, 3), b = coker_structure(M2, 3);
            CHECK(a.free_rank == b.free_rank);
            CHECK(a.is_flat == b.is_flat);
            CHECK(a.invariants.size() == b.invariants.size());
            for (size_t i = 0; i < a.invariants.size(); ++i)
                CHECK(a.invariants[i] == b.invariants[i]);
            // the canonical basis itself is presentation invariant
            CHECK(echelon(M, false).basis == echelon(M2, false).basis);
        }
    }
}

TEST_CASE("smith transforms are exact") {
    std::mt19937_64 rng(23);
    for (const char* text : {"Z", "F3[e]/e^2", "Q"}) {
        Ring r = Ring::parse(text);
        for (int trial = 0; trial < 20; ++trial) {
            Mat M = random_mat(r, 3, 3, rng);
            SmithResult s = smith(M);
            CHECK(s.U.mul(M).mul(s.W) == s.D);
            CHECK(s.U.mul(s.Uinv) == Mat::identity(r, 3));
            CHECK(s.W.mul(s.Winv) == Mat::identity(r, 3));
            for (size_t i = 0; i + 1 < s.diag.size(); ++i) {
                if (r.kind() == RingKind::Integers && !s.diag[i + 1].is_zero() &&
                    !s.diag[i].is_zero())
                    CHECK(s.diag[i + 1].intval() % s.diag[i].intval() == 0);
            }
        }
    }
}

TEST_CASE("determinants") {
    Ring Z = Ring::integers();
    CHECK(det(mat_of(Z, 2, {{1, 1}, {0, 1}})) == Elem::from_int(Z, 1));
    CHECK(det(mat_of(Z, 2, {{2, 1}, {3, 2}})) == Elem::from_int(Z, 1));
    CHECK(det(mat_of(Z, 2, {{2, 0}, {0, 3}})) == Elem::from_int(Z, 6));

    Ring Qe = Ring::parse("Q[e]/e^2");
    Mat M(Qe, 2, 2);
    M.at(0, 0) = Elem::parse(Qe, "e");
    M.at(0, 1) = Elem::parse(Qe, "1");
    M.at(1, 0) = Elem::parse(Qe, "-1");
    M.at(1, 1) = Elem::parse(Qe, "e");
    CHECK(det(M) == Elem::parse(Qe, "1"));  // e*e + 1

    std::mt19937_64 rng(5);
    // multiplicativity over assorted rings
    for (const char* text : {"Q", "Z", "F5", "Z/8", "F3[e]/e^2"}) {
        Ring r = Ring::parse(text);
        for (int trial = 0; trial < 10; ++trial) {
            Mat A = random_mat(r, 3, 3, rng), B = random_mat(r, 3, 3, rng);
            CHECK(det(A.mul(B)) == det(A) * det(B));
        }
    }
}

TEST_CASE("solve_in_span across rings") {
    std::mt19937_64 rng(29);
    for (const char* text : {"Q", "Z", "F5", "Z/8", "F3[e]/e^2"}) {
        Ring r = Ring::parse(text);
        for (int trial = 0; trial < 20; ++trial) {
            Mat M = random_mat(r, 3, 2, rng);
            std::vector<Elem> coeff{Elem::from_int(r, 3), Elem::from_int(r, -2)};
            std::vector<Elem> b(3, Elem::zero(r));
            for (int i = 0; i < 3; ++i) b[i] = M.at(i, 0) * coeff[0] + M.at(i, 1) * coeff[1];
            auto x = solve_in_span(M, b);
            REQUIRE(x.has_value());
            for (int i = 0; i < 3; ++i) {
                Elem acc = Elem::zero(r);
                for (int j = 0; j < 2; ++j) acc = acc + M.at(i, j) * (*x)[static_cast<size_t>(j)];
                CHECK(acc == b[static_cast<size_t>(i)]);
            }
        }
    }
    // negative case over Z: (1,1) not in span of (2,0),(0,2)
    Ring Z = Ring::integers();
    Mat M = mat_of(Z, 2, {{2, 0}, {0, 2}});
    CHECK_FALSE(solve_in_span(M, {Elem::one(Z), Elem::one(Z)}).has_value());
}

TEST_CASE("canonical_complement splits the ambient module") {
    std::mt19937_64 rng(31);
    Ring Z = Ring::integers();

    // the classic non-monomial case: span{(2,1)} needs complement (1,0)-like
    Mat M = mat_of(Z, 2, {{2, 1}});
    Mat C = canonical_complement(M);
    REQUIRE(C.cols() == 1);
    Mat full = M.hstack(C);
    CokerResult co = coker_structure(full, 2);
    CHECK(co.free_rank == 0);
    CHECK(co.is_flat);
    CHECK(echelon(full).kernel.cols() == 0);

    // complement of span{(5,2)}: no monomial works; unimodularity required
    Mat M2 = mat_of(Z, 2, {{5, 2}});
    Mat C2 = canonical_complement(M2);
    CHECK(det(M2.hstack(C2)).intval() * det(M2.hstack(C2)).intval() == 1);

    for (const char* text : {"Q", "F5", "Z/8", "F3[e]/e^2"}) {
        Ring r = Ring::parse(text);
        for (int trial = 0; trial < 15; ++trial) {
            Mat A = random_mat(r, 3, 2, rng);
            EchelonResult e = echelon(A);
            if (!e.complete || e.rank() != 2 || e.kernel.cols() != 0) continue;
            Mat comp = canonical_complement(e.basis);
            Mat whole = e.basis.hstack(comp);
            CokerResult cw = coker_structure(whole, 3);
            CHECK(cw.free_rank == 0);
            CHECK(cw.is_flat);
            CHECK(echelon(whole).kernel.cols() == 0);
        }
    }
}

TEST_CASE("canonical basis spans the original columns") {
    std::mt19937_64 rng(37);
    for (const char* text : {"Q", "Z", "F5", "Z/8", "F3[e]/e^2"}) {
        Ring r = Ring::parse(text);
        for (int trial = 0; trial < 15; ++trial) {
            Mat M = random_mat(r, 3, 3, rng);
            EchelonResult e = echelon(M, false);
            CHECK(same_span(M, e.basis));
        }
    }
}
