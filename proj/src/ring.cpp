#include "satgr/ring.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace satgr {

namespace {

bool is_prime(const Int& p) {
    if (p < 2) return false;
    for (Int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

Int mod_reduce(const Int& a, const Int& n) {
    Int r = a % n;
    if (r < 0) r += n;
    return r;
}

// g = gcd(a,n), returns x with a*x = g (mod n).
Int ext_gcd_inverse(const Int& a, const Int& n, Int& g) {
    Int r0 = a, r1 = n, s0 = 1, s1 = 0;
    while (r1 != 0) {
        Int q = r0 / r1;
        Int r2 = r0 - q * r1;
        Int s2 = s0 - q * s1;
        r0 = r1; r1 = r2;
        s0 = s1; s1 = s2;
    }
    if (r0 < 0) { r0 = -r0; s0 = -s0; }
    g = r0;
    return mod_reduce(s0, n);
}

}  // namespace

Ring Ring::rationals() {
    Ring r;
    r.kind_ = RingKind::Rationals;
    return r;
}

Ring Ring::integers() {
    Ring r;
    r.kind_ = RingKind::Integers;
    return r;
}

Ring Ring::prime_field(const Int& p) {
    if (!is_prime(p)) throw DomainError("prime_field: " + p.str() + " is not prime");
    Ring r;
    r.kind_ = RingKind::PrimeField;
    r.modulus_ = p;
    return r;
}

Ring Ring::residue_ring(const Int& n) {
    if (n < 2) throw DomainError("residue_ring: modulus must be >= 2");
    Ring r;
    r.kind_ = RingKind::ResidueRing;
    r.modulus_ = n;
    return r;
}

Ring Ring::nilpotent_ext(const Ring& base, int k) {
    if (k < 2) throw DomainError("nilpotent_ext: order must be >= 2");
    int depth = 1;
    const Ring* b = &base;
    while (b->kind_ == RingKind::NilpotentExt) {
        ++depth;
        b = b->base_.get();
    }
    if (depth > 2) throw DomainError("nilpotent_ext: nesting bound exceeded");
    Ring r;
    r.kind_ = RingKind::NilpotentExt;
    r.base_ = std::make_shared<Ring>(base);
    r.eps_order_ = k;
    return r;
}

const Ring& Ring::base() const {
    if (kind_ != RingKind::NilpotentExt) throw DomainError("base(): not a nilpotent extension");
    return *base_;
}

bool Ring::is_field() const {
    return kind_ == RingKind::Rationals || kind_ == RingKind::PrimeField;
}

bool Ring::is_nilpotent_ext_of_field() const {
    return kind_ == RingKind::NilpotentExt && base_->is_field();
}

bool Ring::supports_linear_algebra() const {
    switch (kind_) {
        case RingKind::Rationals:
        case RingKind::PrimeField:
        case RingKind::Integers:
        case RingKind::ResidueRing:
            return true;
        case RingKind::NilpotentExt:
            return base_->is_field();
    }
    return false;
}

bool Ring::operator==(const Ring& o) const {
    if (kind_ != o.kind_) return false;
    switch (kind_) {
        case RingKind::Rationals:
        case RingKind::Integers:
            return true;
        case RingKind::PrimeField:
        case RingKind::ResidueRing:
            return modulus_ == o.modulus_;
        case RingKind::NilpotentExt:
            return eps_order_ == o.eps_order_ && *base_ == *o.base_;
    }
    return false;
}

std::string Ring::to_string() const {
    switch (kind_) {
        case RingKind::Rationals: return "Q";
        case RingKind::Integers: return "Z";
        case RingKind::PrimeField: return "F" + modulus_.str();
        case RingKind::ResidueRing: return "Z/" + modulus_.str();
        case RingKind::NilpotentExt:
            return base_->to_string() + "[e]/e^" + std::to_string(eps_order_);
    }
    return "?";
}

Ring Ring::parse(std::string_view text) {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s.empty()) throw ParseError("empty ring descriptor");

    // Split off a trailing [e]/e^k extension.
    auto bracket = s.find("[e]/e^");
    if (bracket != std::string::npos) {
        std::string base_text = s.substr(0, bracket);
        std::string order_text = s.substr(bracket + 6);
        if (order_text.empty()) throw ParseError("missing extension order in " + s);
        int k = 0;
        try {
            k = std::stoi(order_text);
        } catch (...) {
            throw ParseError("bad extension order in " + s);
        }
        return nilpotent_ext(parse(base_text), k);
    }
    if (s == "Q") return rationals();
    if (s == "Z") return integers();
    if (s[0] == 'F') {
        try {
            return prime_field(Int(s.substr(1)));
        } catch (const DomainError&) {
            throw;
        } catch (...) {
            throw ParseError("bad prime field descriptor " + s);
        }
    }
    if (s.rfind("Z/", 0) == 0) {
        try {
            return residue_ring(Int(s.substr(2)));
        } catch (const DomainError&) {
            throw;
        } catch (...) {
            throw ParseError("bad residue ring descriptor " + s);
        }
    }
    throw ParseError("unknown ring descriptor " + s);
}

// ---------------------------------------------------------------------------
// Elem

Elem Elem::zero(const Ring& r) {
    Elem e;
    e.ring_ = r;
    if (r.kind() == RingKind::NilpotentExt)
        e.coeffs_.assign(static_cast<size_t>(r.eps_order()), Elem::zero(r.base()));
    return e;
}

Elem Elem::one(const Ring& r) { return from_int(r, 1); }

Elem Elem::from_int(const Ring& r, const Int& v) {
    Elem e;
    e.ring_ = r;
    switch (r.kind()) {
        case RingKind::Rationals:
            e.rat_ = Rat(v);
            break;
        case RingKind::Integers:
            e.int_ = v;
            break;
        case RingKind::PrimeField:
        case RingKind::ResidueRing:
            e.int_ = mod_reduce(v, r.modulus());
            break;
        case RingKind::NilpotentExt:
            e.coeffs_.assign(static_cast<size_t>(r.eps_order()), Elem::zero(r.base()));
            e.coeffs_[0] = Elem::from_int(r.base(), v);
            break;
    }
    return e;
}

Elem Elem::from_rat(const Ring& r, const Rat& v) {
    if (r.kind() == RingKind::Rationals) {
        Elem e;
        e.ring_ = r;
        e.rat_ = v;
        return e;
    }
    if (denominator(v) == 1) return from_int(r, numerator(v));
    if (r.kind() == RingKind::NilpotentExt) {
        Elem e = Elem::zero(r);
        e.coeffs_[0] = Elem::from_rat(r.base(), v);
        return e;
    }
    // Reduce a/b with b invertible mod n.
    if (r.kind() == RingKind::PrimeField || r.kind() == RingKind::ResidueRing) {
        Elem num = from_int(r, numerator(v));
        Elem den = from_int(r, denominator(v));
        return num * inverse(den);
    }
    throw DomainError("non-integral rational in " + r.to_string());
}

Elem Elem::from_coeffs(const Ring& r, std::vector<Elem> coeffs) {
    if (r.kind() != RingKind::NilpotentExt) throw DomainError("from_coeffs: not a nilpotent extension");
    Elem e = Elem::zero(r);
    for (size_t i = 0; i < coeffs.size(); ++i) {
        if (static_cast<int>(i) >= r.eps_order()) break;  // e^i = 0
        if (coeffs[i].ring() != r.base()) throw DomainError("from_coeffs: coefficient ring mismatch");
        e.coeffs_[i] = std::move(coeffs[i]);
    }
    return e;
}

bool Elem::is_zero() const {
    switch (ring_.kind()) {
        case RingKind::Rationals: return rat_ == 0;
        case RingKind::Integers:
        case RingKind::PrimeField:
        case RingKind::ResidueRing: return int_ == 0;
        case RingKind::NilpotentExt:
            for (const auto& c : coeffs_)
                if (!c.is_zero()) return false;
            return true;
    }
    return false;
}

bool Elem::is_one() const { return *this == Elem::one(ring_); }

Elem Elem::operator+(const Elem& o) const {
    if (ring_ != o.ring_) throw DomainError("ring mismatch in +");
    Elem e = *this;
    switch (ring_.kind()) {
        case RingKind::Rationals: e.rat_ += o.rat_; break;
        case RingKind::Integers: e.int_ += o.int_; break;
        case RingKind::PrimeField:
        case RingKind::ResidueRing: e.int_ = mod_reduce(int_ + o.int_, ring_.modulus()); break;
        case RingKind::NilpotentExt:
            for (size_t i = 0; i < e.coeffs_.size(); ++i) e.coeffs_[i] = e.coeffs_[i] + o.coeffs_[i];
            break;
    }
    return e;
}

Elem Elem::operator-(const Elem& o) const { return *this + (-o); }

Elem Elem::operator-() const {
    Elem e = *this;
    switch (ring_.kind()) {
        case RingKind::Rationals: e.rat_ = -rat_; break;
        case RingKind::Integers: e.int_ = -int_; break;
        case RingKind::PrimeField:
        case RingKind::ResidueRing: e.int_ = mod_reduce(-int_, ring_.modulus()); break;
        case RingKind::NilpotentExt:
            for (auto& c : e.coeffs_) c = -c;
            break;
    }
    return e;
}

Elem Elem::operator*(const Elem& o) const {
    if (ring_ != o.ring_) throw DomainError("ring mismatch in *");
    switch (ring_.kind()) {
        case RingKind::Rationals: {
            Elem e = *this;
            e.rat_ *= o.rat_;
            return e;
        }
        case RingKind::Integers: {
            Elem e = *this;
            e.int_ *= o.int_;
            return e;
        }
        case RingKind::PrimeField:
        case RingKind::ResidueRing: {
            Elem e = *this;
            e.int_ = mod_reduce(int_ * o.int_, ring_.modulus());
            return e;
        }
        case RingKind::NilpotentExt: {
            Elem e = Elem::zero(ring_);
            int k = ring_.eps_order();
            for (int i = 0; i < k; ++i) {
                if (coeffs_[i].is_zero()) continue;
                for (int j = 0; i + j < k; ++j)
                    e.coeffs_[i + j] = e.coeffs_[i + j] + coeffs_[i] * o.coeffs_[j];
            }
            return e;
        }
    }
    throw DomainError("unreachable");
}

bool Elem::operator==(const Elem& o) const {
    if (ring_ != o.ring_) return false;
    switch (ring_.kind()) {
        case RingKind::Rationals: return rat_ == o.rat_;
        case RingKind::Integers:
        case RingKind::PrimeField:
        case RingKind::ResidueRing: return int_ == o.int_;
        case RingKind::NilpotentExt: return coeffs_ == o.coeffs_;
    }
    return false;
}

Elem Elem::pow(unsigned long e) const {
    Elem acc = Elem::one(ring_);
    Elem b = *this;
    while (e) {
        if (e & 1) acc = acc * b;
        b = b * b;
        e >>= 1;
    }
    return acc;
}

Elem Elem::coeff(int i) const {
    if (ring_.kind() != RingKind::NilpotentExt) throw DomainError("coeff(): not a nilpotent extension");
    if (i < 0 || i >= static_cast<int>(coeffs_.size())) return Elem::zero(ring_.base());
    return coeffs_[static_cast<size_t>(i)];
}

int Elem::cmp(const Elem& a, const Elem& b) {
    if (a.ring_ != b.ring_) throw DomainError("cmp: ring mismatch");
    switch (a.ring_.kind()) {
        case RingKind::Rationals:
            return a.rat_ < b.rat_ ? -1 : (a.rat_ == b.rat_ ? 0 : 1);
        case RingKind::Integers:
        case RingKind::PrimeField:
        case RingKind::ResidueRing:
            return a.int_ < b.int_ ? -1 : (a.int_ == b.int_ ? 0 : 1);
        case RingKind::NilpotentExt:
            for (size_t i = 0; i < a.coeffs_.size(); ++i) {
                int c = cmp(a.coeffs_[i], b.coeffs_[i]);
                if (c != 0) return c;
            }
            return 0;
    }
    return 0;
}

std::string Elem::to_string() const {
    switch (ring_.kind()) {
        case RingKind::Rationals: {
            std::ostringstream os;
            os << rat_;
            return os.str();
        }
        case RingKind::Integers:
        case RingKind::PrimeField:
        case RingKind::ResidueRing:
            return int_.str();
        case RingKind::NilpotentExt: {
            std::string out;
            for (size_t i = 0; i < coeffs_.size(); ++i) {
                if (coeffs_[i].is_zero()) continue;
                std::string c = coeffs_[i].to_string();
                std::string term;
                if (i == 0) {
                    term = c;
                } else {
                    std::string epow = (i == 1) ? "e" : "e^" + std::to_string(i);
                    term = (c == "1") ? epow : (c == "-1" ? "-" + epow : c + "*" + epow);
                }
                if (out.empty()) {
                    out = term;
                } else if (!term.empty() && term[0] == '-') {
                    out += term;
                } else {
                    out += "+" + term;
                }
            }
            return out.empty() ? "0" : out;
        }
    }
    return "?";
}

// --- element parsing -------------------------------------------------------

namespace {

// One term of the grammar: [sign] [coef] [* e [^k]] with rational coef.
struct Term {
    Rat coef;
    int eps_pow;
};

Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator");
        if (den < 0) { den = -den; num = -num; }
        return Rat(num, den);
    } catch (const ParseError&) {
        throw;
    } catch (...) {
        throw ParseError("bad number " + s);
    }
}

std::vector<Term> parse_terms(std::string_view text) {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s.empty()) throw ParseError("empty element");
    std::vector<Term> terms;
    size_t i = 0;
    while (i < s.size()) {
        int sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            if (s[i] == '-') sign = -1;
            ++i;
        }
        size_t j = i;
        while (j < s.size() && s[j] != '+' && s[j] != '-') ++j;
        std::string body = s.substr(i, j - i);
        if (body.empty()) throw ParseError("dangling sign in element");
        Term t{Rat(1), 0};
        auto epos = body.find('e');
        if (epos == std::string::npos) {
            t.coef = parse_rat(body);
        } else {
            std::string coef_part = body.substr(0, epos);
            if (!coef_part.empty() && coef_part.back() == '*') coef_part.pop_back();
            t.coef = coef_part.empty() ? Rat(1) : parse_rat(coef_part);
            std::string pow_part = body.substr(epos + 1);
            if (pow_part.empty()) {
                t.eps_pow = 1;
            } else {
                if (pow_part[0] != '^') throw ParseError("bad eps power in " + body);
                t.eps_pow = std::stoi(pow_part.substr(1));
                if (t.eps_pow < 1) throw ParseError("bad eps power in " + body);
            }
        }
        if (sign < 0) t.coef = -t.coef;
        terms.push_back(t);
        i = j;
    }
    return terms;
}

}  // namespace

Elem Elem::parse(const Ring& r, std::string_view text) {
    auto terms = parse_terms(text);
    Elem acc = Elem::zero(r);
    for (const auto& t : terms) {
        Elem v;
        if (t.eps_pow == 0) {
            v = Elem::from_rat(r, t.coef);
        } else {
            if (r.kind() != RingKind::NilpotentExt)
                throw ParseError("eps term in non-extension ring " + r.to_string());
            if (t.eps_pow >= r.eps_order()) continue;  // e^k = 0
            std::vector<Elem> coeffs(static_cast<size_t>(r.eps_order()), Elem::zero(r.base()));
            coeffs[static_cast<size_t>(t.eps_pow)] = Elem::from_rat(r.base(), t.coef);
            v = Elem::from_coeffs(r, std::move(coeffs));
        }
        acc = acc + v;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Units and nilpotents

UnitInfo unit_info(const Elem& a) {
    const Ring& r = a.ring();
    UnitInfo info;
    switch (r.kind()) {
        case RingKind::Rationals: {
            if (!a.is_zero()) {
                info.is_unit = true;
                info.inverse = Elem::from_rat(r, Rat(1) / a.rat());
            } else {
                info.nilpotency_index = 1;
            }
            return info;
        }
        case RingKind::Integers: {
            if (a.intval() == 1 || a.intval() == -1) {
                info.is_unit = true;
                info.inverse = a;
            } else if (a.is_zero()) {
                info.nilpotency_index = 1;
            }
            return info;
        }
        case RingKind::PrimeField:
        case RingKind::ResidueRing: {
            if (a.is_zero()) {
                info.nilpotency_index = 1;
                return info;
            }
            Int g;
            Int inv = ext_gcd_inverse(a.intval(), r.modulus(), g);
            if (g == 1) {
                info.is_unit = true;
                info.inverse = Elem::from_int(r, inv);
                return info;
            }
            // Nilpotent iff a^m = 0 for m <= bit length of n.
            Elem p = a;
            int bound = static_cast<int>(boost::multiprecision::msb(r.modulus())) + 2;
            for (int m = 1; m <= bound; ++m) {
                if (p.is_zero()) {
                    info.nilpotency_index = m;
                    return info;
                }
                p = p * a;
            }
            return info;
        }
        case RingKind::NilpotentExt: {
            UnitInfo base_info = unit_info(a.coeff(0));
            int k = r.eps_order();
            if (base_info.is_unit) {
                // a = a0 (1 + a0^-1 m) with m the eps part; geometric series
                // truncates at e^k.
                Elem a0inv = Elem::from_coeffs(r, {*base_info.inverse});
                Elem m = a - Elem::from_coeffs(r, {a.coeff(0)});
                Elem x = a0inv * m;  // nilpotent: eps valuation >= 1
                Elem series = Elem::one(r);
                Elem p = Elem::one(r);
                for (int i = 1; i < k; ++i) {
                    p = p * x;
                    series = (i % 2 == 1) ? series - p : series + p;
                }
                info.is_unit = true;
                info.inverse = series * a0inv;
                return info;
            }
            if (base_info.nilpotency_index.has_value()) {
                // Constant term nilpotent makes the whole element nilpotent.
                Elem p = a;
                int bound = (*base_info.nilpotency_index + 1) * k + 2;
                for (int m = 1; m <= bound; ++m) {
                    if (p.is_zero()) {
                        info.nilpotency_index = m;
                        return info;
                    }
                    p = p * a;
                }
                throw DomainError("nilpotency bound exceeded");
            }
            return info;
        }
    }
    return info;
}

Elem inverse(const Elem& a) {
    UnitInfo info = unit_info(a);
    if (!info.is_unit) throw DomainError("inverse of non-unit " + a.to_string());
    return *info.inverse;
}

Elem div_exact(const Elem& a, const Elem& b) {
    UnitInfo info = unit_info(b);
    if (info.is_unit) return a * (*info.inverse);
    if (b.ring().kind() == RingKind::Integers) {
        if (b.is_zero() || a.intval() % b.intval() != 0)
            throw DomainError("inexact integer division");
        return Elem::from_int(a.ring(), a.intval() / b.intval());
    }
    throw DomainError("division by non-unit " + b.to_string());
}

// ---------------------------------------------------------------------------
// Homomorphisms

RingHom::RingHom(HomRule rule, Ring source, Ring target)
    : rule_(rule), source_(std::move(source)), target_(std::move(target)) {
    switch (rule_) {
        case HomRule::Identity:
            if (source_ != target_) throw DomainError("identity hom: source != target");
            break;
        case HomRule::ReduceIntToPrime:
            if (source_.kind() != RingKind::Integers || target_.kind() != RingKind::PrimeField)
                throw DomainError("bad reduction hom");
            break;
        case HomRule::ReduceIntToResidue:
            if (source_.kind() != RingKind::Integers || target_.kind() != RingKind::ResidueRing)
                throw DomainError("bad reduction hom");
            break;
        case HomRule::IncludeNilpotent:
            if (target_.kind() != RingKind::NilpotentExt || target_.base() != source_)
                throw DomainError("bad inclusion hom");
            break;
        case HomRule::Augmentation:
            if (source_.kind() != RingKind::NilpotentExt || source_.base() != target_)
                throw DomainError("bad augmentation hom");
            break;
    }
}

RingHom RingHom::identity(const Ring& r) { return RingHom(HomRule::Identity, r, r); }

RingHom RingHom::reduce(const Ring& source, const Ring& target) {
    if (target.kind() == RingKind::PrimeField)
        return RingHom(HomRule::ReduceIntToPrime, source, target);
    return RingHom(HomRule::ReduceIntToResidue, source, target);
}

RingHom RingHom::include_nilpotent(const Ring& target) {
    return RingHom(HomRule::IncludeNilpotent, target.base(), target);
}

RingHom RingHom::augmentation(const Ring& source) {
    return RingHom(HomRule::Augmentation, source, source.base());
}

Elem RingHom::apply(const Elem& a) const {
    if (a.ring() != source_) throw DomainError("hom applied to wrong ring");
    switch (rule_) {
        case HomRule::Identity:
            return a;
        case HomRule::ReduceIntToPrime:
        case HomRule::ReduceIntToResidue:
            return Elem::from_int(target_, a.intval());
        case HomRule::IncludeNilpotent: {
            std::vector<Elem> coeffs{a};
            return Elem::from_coeffs(target_, std::move(coeffs));
        }
        case HomRule::Augmentation:
            return a.coeff(0);
    }
    throw DomainError("unreachable");
}

}  // namespace satgr
