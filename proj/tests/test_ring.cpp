#include "doctest.h"

#include "satgr/ring.hpp"

#include <random>

using namespace satgr;

namespace {

Elem random_elem(const Ring& r, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> small(-9, 9);
    switch (r.kind()) {
        case RingKind::Rationals: {
            int d = 0;
            while (d == 0) d = small(rng);
            return Elem::from_rat(r, Rat(small(rng), d < 0 ? -d : d));
        }
        case RingKind::Integers:
        case RingKind::PrimeField:
        case RingKind::ResidueRing:
            return Elem::from_int(r, small(rng));
        case RingKind::NilpotentExt: {
            std::vector<Elem> coeffs;
            for (int i = 0; i < r.eps_order(); ++i) coeffs.push_back(random_elem(r.base(), rng));
            return Elem::from_coeffs(r, std::move(coeffs));
        }
    }
    return Elem::zero(r);
}

}  // namespace

TEST_CASE("ring descriptor parse and print round trip") {
    for (const char* text : {"Q", "Z", "F5", "Z/8", "F3[e]/e^2", "Q[e]/e^3"}) {
        Ring r = Ring::parse(text);
        CHECK(r.to_string() == text);
        CHECK(Ring::parse(r.to_string()) == r);
    }
    CHECK_THROWS_AS(Ring::parse("F4"), DomainError);     // not prime
    CHECK_THROWS_AS(Ring::parse("Z/1"), DomainError);
    CHECK_THROWS_AS(Ring::parse("nope"), ParseError);
}

TEST_CASE("basic arithmetic examples") {
    Ring Z = Ring::integers();
    CHECK(Elem::from_int(Z, 2) * Elem::from_int(Z, 3) == Elem::from_int(Z, 6));

    Ring Qe = Ring::parse("Q[e]/e^2");
    Elem eps = Elem::parse(Qe, "e");
    CHECK((eps * eps).is_zero());

    Ring F5 = Ring::parse("F5");
    CHECK(Elem::from_int(F5, 3) + Elem::from_int(F5, 4) == Elem::from_int(F5, 2));
}

TEST_CASE("element parsing") {
    Ring Q = Ring::rationals();
    CHECK(Elem::parse(Q, "-3/4") == Elem::from_rat(Q, Rat(-3, 4)));
    Ring Qe = Ring::parse("Q[e]/e^2");
    CHECK(Elem::parse(Qe, "1+2*e") == Elem::parse(Qe, "2*e+1"));
    CHECK(Elem::parse(Qe, "1-e").to_string() == "1-e");
    Ring F3e = Ring::parse("F3[e]/e^2");
    CHECK(Elem::parse(F3e, "4+5*e") == Elem::parse(F3e, "1+2*e"));
}

TEST_CASE("unit_info examples") {
    Ring Z = Ring::integers();
    auto two = unit_info(Elem::from_int(Z, 2));
    CHECK_FALSE(two.is_unit);
    CHECK_FALSE(two.nilpotency_index.has_value());

    Ring Qe = Ring::parse("Q[e]/e^2");
    auto u = unit_info(Elem::parse(Qe, "1+2*e"));
    CHECK(u.is_unit);
    CHECK(*u.inverse == Elem::parse(Qe, "1-2*e"));

    Ring Z8 = Ring::parse("Z/8");
    auto n = unit_info(Elem::from_int(Z8, 2));
    CHECK_FALSE(n.is_unit);
    REQUIRE(n.nilpotency_index.has_value());
    CHECK(*n.nilpotency_index == 3);

    auto five = unit_info(Elem::from_int(Z8, 5));
    CHECK(five.is_unit);
    CHECK(*five.inverse * Elem::from_int(Z8, 5) == Elem::one(Z8));
}

TEST_CASE("nilpotent units in mixed extensions") {
    Ring Z8e = Ring::nilpotent_ext(Ring::parse("Z/8"), 2);
    Elem a = Elem::parse(Z8e, "2+e");  // constant term nilpotent
    auto info = unit_info(a);
    CHECK_FALSE(info.is_unit);
    REQUIRE(info.nilpotency_index.has_value());
    CHECK(a.pow(static_cast<unsigned long>(*info.nilpotency_index)).is_zero());
    CHECK_FALSE(a.pow(static_cast<unsigned long>(*info.nilpotency_index - 1)).is_zero());

    Elem b = Elem::parse(Z8e, "3+5*e");
    auto bi = unit_info(b);
    REQUIRE(bi.is_unit);
    CHECK(b * *bi.inverse == Elem::one(Z8e));
}

TEST_CASE("ring axioms on random elements") {
    std::mt19937_64 rng(7);
    for (const char* text : {"Q", "Z", "F5", "Z/8", "F3[e]/e^2", "Q[e]/e^3"}) {
        Ring r = Ring::parse(text);
        for (int trial = 0; trial < 60; ++trial) {
            Elem a = random_elem(r, rng), b = random_elem(r, rng), c = random_elem(r, rng);
            CHECK((a + b) + c == a + (b + c));
            CHECK((a * b) * c == a * (b * c));
            CHECK(a * (b + c) == a * b + a * c);
            CHECK(a + b == b + a);
            CHECK(a * b == b * a);
            CHECK(a * Elem::one(r) == a);
            CHECK((a + Elem::zero(r)) == a);
            CHECK((a - a).is_zero());
            auto info = unit_info(a);
            if (info.is_unit) CHECK(a * *info.inverse == Elem::one(r));
            if (info.nilpotency_index)
                CHECK(a.pow(static_cast<unsigned long>(*info.nilpotency_index)).is_zero());
        }
    }
}

TEST_CASE("homomorphisms") {
    Ring Z = Ring::integers();
    Ring F5 = Ring::parse("F5");
    RingHom h = RingHom::reduce(Z, F5);
    CHECK(h.apply(Elem::from_int(Z, 12)) == Elem::from_int(F5, 2));

    Ring Qe = Ring::parse("Q[e]/e^2");
    RingHom inc = RingHom::include_nilpotent(Qe);
    RingHom aug = RingHom::augmentation(Qe);
    Elem half = Elem::parse(Ring::rationals(), "1/2");
    CHECK(aug.apply(inc.apply(half)) == half);
    CHECK(aug.apply(Elem::parse(Qe, "1/2+7*e")) == half);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        Elem a = random_elem(Z, rng), b = random_elem(Z, rng);
        CHECK(h.apply(a * b) == h.apply(a) * h.apply(b));
        CHECK(h.apply(a + b) == h.apply(a) + h.apply(b));
    }
}
