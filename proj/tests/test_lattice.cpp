#include "doctest.h"

#include "satgr/lattice.hpp"
#include "generators.hpp"

#include <random>

using namespace satgr;

namespace {

Lattice gen_lattice(const char* ring, const char* gen_text, long tail) {
    Ring r = Ring::parse(ring);
    return Lattice::from_generators(r, {LaurentPoly::parse(r, gen_text)}, tail);
}

}  // namespace

TEST_CASE("lattice_validate: spec examples") {
    Ring Z = Ring::integers();
    CHECK(lattice_validate(Lattice::std_lattice(Z, 2)).ok);

    // 2Z + t Z[[t]] has Z/2 torsion in the window
    Mat two(Z, 1, 1);
    two.at(0, 0) = Elem::from_int(Z, 2);
    Lattice bad = Lattice::make(Z, 0, 1, two);
    LatticeReport rep = lattice_validate(bad);
    CHECK_FALSE(rep.ok);
    REQUIRE(rep.invariants.size() == 1);
    CHECK(rep.invariants[0] == Elem::from_int(Z, 2));

    CHECK(lattice_validate(gen_lattice("Q", "1+t", 2)).ok);
}

TEST_CASE("lattice normal form absorbs tail monomials") {
    Ring Q = Ring::rationals();
    // <1, t> + t^2 V+ is exactly V+
    Lattice L = Lattice::from_generators(
        Q, {LaurentPoly::parse(Q, "1"), LaurentPoly::parse(Q, "t")}, 2);
    CHECK(L == Lattice::std_lattice(Q, 0));
    // <t> + t^2 V+ is Std(1)
    Lattice L2 = Lattice::from_generators(Q, {LaurentPoly::parse(Q, "t")}, 2);
    CHECK(L2 == Lattice::std_lattice(Q, 1));
}

TEST_CASE("commensurable: spec examples") {
    Ring Q = Ring::rationals();
    Lattice std0 = Lattice::std_lattice(Q, 0), std2 = Lattice::std_lattice(Q, 2);
    auto r1 = commensurable(std0, std2);
    CHECK(r1.ok);
    CHECK(r1.rank == 2);

    Lattice B = gen_lattice("Q", "1+t", 2);
    auto r2 = commensurable(std0, B);
    CHECK(r2.ok);
    CHECK(r2.rank == 1);

    auto r3 = commensurable(std0, std0);
    CHECK(r3.ok);
    CHECK(r3.rank == 0);
}

TEST_CASE("sum and intersection: spec examples") {
    Ring Q = Ring::rationals();
    Lattice std0 = Lattice::std_lattice(Q, 0);
    CHECK(lattice_sum(std0, Lattice::std_lattice(Q, 2)) == std0);
    CHECK(lattice_intersect(std0, Lattice::std_lattice(Q, -1)) == std0);
    Lattice B = gen_lattice("Q", "1+t", 2);
    CHECK(lattice_intersect(B, std0) == B);
}

TEST_CASE("incommensurable in the flat sense over Z") {
    // A = <2+t>, B = <2-t>: the sum has Z/4 torsion in the window
    Ring Z = Ring::integers();
    Lattice A = gen_lattice("Z", "2+t", 2), B = gen_lattice("Z", "2-t", 2);
    CHECK(lattice_validate(A).ok);
    CHECK(lattice_validate(B).ok);
    CHECK_FALSE(commensurable(A, B).ok);
    CHECK_THROWS_AS(lattice_sum(A, B), DomainError);
}

TEST_CASE("quotient_basis: spec examples") {
    Ring Q = Ring::rationals();
    auto b1 = quotient_basis(Lattice::std_lattice(Q, 0), Lattice::std_lattice(Q, 2));
    REQUIRE(b1.size() == 2);
    CHECK(b1[0] == LaurentPoly::parse(Q, "1"));
    CHECK(b1[1] == LaurentPoly::parse(Q, "t"));

    auto b2 = quotient_basis(Lattice::std_lattice(Q, -1), Lattice::std_lattice(Q, 1));
    REQUIRE(b2.size() == 2);
    CHECK(b2[0] == LaurentPoly::parse(Q, "t^-1"));
    CHECK(b2[1] == LaurentPoly::parse(Q, "1"));

    auto b3 = quotient_basis(gen_lattice("Q", "1+t", 2), Lattice::std_lattice(Q, 2));
    REQUIRE(b3.size() == 1);
    CHECK(b3[0] == LaurentPoly::parse(Q, "1+t"));

    CHECK_THROWS_AS(quotient_basis(Lattice::std_lattice(Q, 2), Lattice::std_lattice(Q, 0)),
                    DomainError);
}

TEST_CASE("quotient over Z must be flat") {
    Ring Z = Ring::integers();
    // A = <1> + tV+, B = <2> + tV+ would have A/B = Z/2; B is not a valid
    // lattice, so build the analogous containment with 2+t instead.
    Lattice A = Lattice::std_lattice(Z, 0);
    Lattice B = Lattice::from_generators(
        Z, {LaurentPoly::parse(Z, "2"), LaurentPoly::parse(Z, "t")}, 2);
    // B's window cokernel is Z/2: invalid input is rejected up front
    CHECK_THROWS_AS(quotient_basis(A, B), DomainError);
}

TEST_CASE("base change: spec examples") {
    Ring Z = Ring::integers();
    Ring F5 = Ring::parse("F5"), F2 = Ring::parse("F2");
    RingHom to5 = RingHom::reduce(Z, F5), to2 = RingHom::reduce(Z, F2);

    CHECK(base_change_lattice(Lattice::std_lattice(Z, 1), to5) == Lattice::std_lattice(F5, 1));

    Lattice B = gen_lattice("Z", "1+t", 2);
    Lattice B2 = base_change_lattice(B, to2);
    CHECK(lattice_validate(B2).ok);
    CHECK(B2 == gen_lattice("F2", "1+t", 2));

    Lattice C = gen_lattice("Z", "2+t", 2);
    Lattice C2 = base_change_lattice(C, to2);
    CHECK(C2 == Lattice::std_lattice(F2, 1));  // <t> + t^2 V+ collapses to Std(1)
}

TEST_CASE("equivalence relation on generated lattices") {
    std::mt19937_64 rng(41);
    for (const char* text : {"Q", "F5", "Z", "Z/8", "F3[e]/e^2"}) {
        Ring r = Ring::parse(text);
        std::vector<Lattice> family;
        while (family.size() < 6) {
            Lattice L = testgen::random_lattice(r, rng);
            if (lattice_validate(L).ok) family.push_back(L);
        }
        for (const auto& A : family) {
            auto ra = commensurable(A, A);
            CHECK(ra.ok);
            CHECK(ra.rank == 0);  // reflexivity
        }
        for (const auto& A : family)
            for (const auto& B : family) {
                auto rab = commensurable(A, B);
                auto rba = commensurable(B, A);
                CHECK(rab.ok == rba.ok);  // symmetry
                if (rab.ok) CHECK(rab.rank == rba.rank);
            }
        // transitivity (all pairs commensurable over these generators)
        for (const auto& A : family)
            for (const auto& B : family)
                for (const auto& C : family) {
                    if (commensurable(A, B).ok && commensurable(B, C).ok)
                        CHECK(commensurable(A, C).ok);
                }
    }
}

TEST_CASE("modularity of quotient ranks") {
    std::mt19937_64 rng(43);
    for (const char* text : {"Q", "F5", "Z", "Z/8", "F3[e]/e^2"}) {
        Ring r = Ring::parse(text);
        int done = 0;
        for (int trial = 0; trial < 60 && done < 15; ++trial) {
            Lattice A = testgen::random_lattice(r, rng), B = testgen::random_lattice(r, rng);
            auto com = commensurable(A, B);
            if (!com.ok) continue;
            Lattice S = lattice_sum(A, B);
            ++done;
            int ra = static_cast<int>(quotient_basis(S, A).size());
            int rb = static_cast<int>(quotient_basis(S, B).size());
            CHECK(ra + rb == com.rank);
        }
        CHECK(done >= 10);
    }
}

TEST_CASE("padding invariance") {
    std::mt19937_64 rng(47);
    for (const char* text : {"Q", "Z", "Z/8"}) {
        Ring r = Ring::parse(text);
        for (int trial = 0; trial < 10; ++trial) {
            Lattice A = testgen::random_lattice(r, rng), B = testgen::random_lattice(r, rng);
            if (!lattice_validate(A).ok || !lattice_validate(B).ok) continue;
            for (long delta = 1; delta <= 5; ++delta) {
                Lattice Ap = lattice_padded(A, delta);
                CHECK(Ap == A);  // normal form is window independent
                if (commensurable(A, B).ok) {
                    CHECK(lattice_sum(Ap, B) == lattice_sum(A, B));
                    CHECK(lattice_intersect(Ap, B) == lattice_intersect(A, B));
                }
            }
        }
    }
}

TEST_CASE("base change commutes with sum and intersection") {
    std::mt19937_64 rng(53);
    Ring Z = Ring::integers();
    Ring F5 = Ring::parse("F5");
    RingHom h = RingHom::reduce(Z, F5);
    int done = 0;
    for (int trial = 0; trial < 80 && done < 20; ++trial) {
        Lattice A = testgen::random_lattice(Z, rng), B = testgen::random_lattice(Z, rng);
        if (!commensurable(A, B).ok) continue;
        Lattice S = lattice_sum(A, B), I = lattice_intersect(A, B);
        Lattice hA = base_change_lattice(A, h), hB = base_change_lattice(B, h);
        if (!commensurable(hA, hB).ok) continue;
        ++done;
        CHECK(lattice_sum(hA, hB) == base_change_lattice(S, h));
        CHECK(lattice_intersect(hA, hB) == base_change_lattice(I, h));
    }
    CHECK(done >= 10);
}

TEST_CASE("membership") {
    Ring Q = Ring::rationals();
    Lattice B = gen_lattice("Q", "1+t", 2);
    CHECK(lattice_member(LaurentPoly::parse(Q, "1+t"), B));
    CHECK(lattice_member(LaurentPoly::parse(Q, "t^2+t^5"), B));
    CHECK(lattice_member(LaurentPoly::parse(Q, "1+t+t^3"), B));
    CHECK_FALSE(lattice_member(LaurentPoly::parse(Q, "1"), B));
    CHECK_FALSE(lattice_member(LaurentPoly::parse(Q, "t^-1"), B));
}
