#include "satgr/laurent.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace satgr {

LaurentPoly LaurentPoly::monomial(const Ring& r, long exp, const Elem& coeff) {
    LaurentPoly p(r);
    if (!coeff.is_zero()) p.terms_[exp] = coeff;
    return p;
}

long LaurentPoly::lo() const {
    if (terms_.empty()) throw DomainError("lo() of zero polynomial");
    return terms_.begin()->first;
}

long LaurentPoly::hi() const {
    if (terms_.empty()) throw DomainError("hi() of zero polynomial");
    return terms_.rbegin()->first;
}

Elem LaurentPoly::coeff(long e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Elem::zero(ring_) : it->second;
}

void LaurentPoly::set_coeff(long e, const Elem& c) {
    if (c.is_zero())
        terms_.erase(e);
    else
        terms_[e] = c;
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& o) const {
    if (ring_ != o.ring_) throw DomainError("ring mismatch in Laurent +");
    LaurentPoly out = *this;
    for (const auto& [e, c] : o.terms_) out.set_coeff(e, out.coeff(e) + c);
    return out;
}

LaurentPoly LaurentPoly::operator-(const LaurentPoly& o) const { return *this + (-o); }

LaurentPoly LaurentPoly::operator-() const {
    LaurentPoly out(ring_);
    for (const auto& [e, c] : terms_) out.terms_[e] = -c;
    return out;
}

LaurentPoly LaurentPoly::operator*(const LaurentPoly& o) const {
    if (ring_ != o.ring_) throw DomainError("ring mismatch in Laurent *");
    LaurentPoly out(ring_);
    for (const auto& [e1, c1] : terms_)
        for (const auto& [e2, c2] : o.terms_) out.set_coeff(e1 + e2, out.coeff(e1 + e2) + c1 * c2);
    return out;
}

LaurentPoly LaurentPoly::scaled(const Elem& c) const {
    LaurentPoly out(ring_);
    for (const auto& [e, v] : terms_) out.set_coeff(e, v * c);
    return out;
}

LaurentPoly LaurentPoly::shifted(long d) const {
    LaurentPoly out(ring_);
    for (const auto& [e, v] : terms_) out.terms_[e + d] = v;
    return out;
}

bool LaurentPoly::operator==(const LaurentPoly& o) const {
    return ring_ == o.ring_ && terms_ == o.terms_;
}

std::string LaurentPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [e, c] : terms_) {
        std::string cs = c.to_string();
        bool needs_parens = cs.find_first_of("+-", 1) != std::string::npos;
        std::string term;
        if (e == 0) {
            term = needs_parens ? "(" + cs + ")" : cs;
        } else {
            std::string tp = e == 1 ? "t" : "t^" + std::to_string(e);
            if (cs == "1")
                term = tp;
            else if (cs == "-1")
                term = "-" + tp;
            else
                term = (needs_parens ? "(" + cs + ")" : cs) + "*" + tp;
        }
        if (out.empty())
            out = term;
        else if (term[0] == '-')
            out += " - " + term.substr(1);
        else
            out += " + " + term;
    }
    return out;
}

LaurentPoly LaurentPoly::parse(const Ring& r, std::string_view text) {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s.empty()) throw ParseError("empty laurent polynomial");
    LaurentPoly out(r);
    size_t i = 0;
    while (i < s.size()) {
        size_t j = i;
        if (s[j] == '+' || s[j] == '-') ++j;
        // split at top-level +/- (not following '^' or '*' or '(')
        int depth = 0;
        while (j < s.size()) {
            char c = s[j];
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if ((c == '+' || c == '-') && depth == 0) {
                char prev = s[j - 1];
                if (prev != '^' && prev != '*' && prev != '(') break;
            }
            ++j;
        }
        std::string term = s.substr(i, j - i);
        i = j;
        if (term == "+" || term == "-" || term.empty()) throw ParseError("dangling sign");
        int sign = 1;
        if (term[0] == '+') term = term.substr(1);
        else if (term[0] == '-') { sign = -1; term = term.substr(1); }

        long exp = 0;
        std::string coeff_text;
        auto tpos = term.rfind('t');
        if (tpos == std::string::npos) {
            coeff_text = term;
        } else {
            coeff_text = term.substr(0, tpos);
            if (!coeff_text.empty() && coeff_text.back() == '*') coeff_text.pop_back();
            std::string rest = term.substr(tpos + 1);
            if (rest.empty()) {
                exp = 1;
            } else {
                if (rest[0] != '^') throw ParseError("bad exponent in " + term);
                try {
                    exp = std::stol(rest.substr(1));
                } catch (...) {
                    throw ParseError("bad exponent in " + term);
                }
            }
        }
        if (!coeff_text.empty() && coeff_text.front() == '(' && coeff_text.back() == ')')
            coeff_text = coeff_text.substr(1, coeff_text.size() - 2);
        Elem c = coeff_text.empty() ? Elem::one(r) : Elem::parse(r, coeff_text);
        if (sign < 0) c = -c;
        out.set_coeff(exp, out.coeff(exp) + c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Multiplier normal form

namespace {

using Poly = std::vector<Elem>;  // dense, index = degree

void poly_trim(Poly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

Poly poly_mul(const Ring& R, const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly out(a.size() + b.size() - 1, Elem::zero(R));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < b.size(); ++j) out[i + j] = out[i + j] + a[i] * b[j];
    }
    poly_trim(out);
    return out;
}

Poly poly_add(const Ring& R, const Poly& a, const Poly& b) {
    Poly out(std::max(a.size(), b.size()), Elem::zero(R));
    for (size_t i = 0; i < a.size(); ++i) out[i] = out[i] + a[i];
    for (size_t i = 0; i < b.size(); ++i) out[i] = out[i] + b[i];
    poly_trim(out);
    return out;
}

Poly poly_sub(const Ring& R, const Poly& a, const Poly& b) {
    Poly nb = b;
    for (auto& c : nb) c = -c;
    return poly_add(R, a, nb);
}

// division by a monic polynomial: a = q*m + r with deg r < deg m
void poly_divmod_monic(const Ring& R, Poly a, const Poly& m, Poly& q, Poly& r) {
    size_t dm = m.size() - 1;  // m monic of this degree
    q.assign(a.size() > dm ? a.size() - dm : 0, Elem::zero(R));
    while (a.size() > dm) {
        size_t da = a.size() - 1;
        Elem c = a.back();
        if (!c.is_zero()) {
            q[da - dm] = c;
            for (size_t i = 0; i <= dm; ++i)
                a[da - dm + i] = a[da - dm + i] - c * m[i];
        }
        a.pop_back();
    }
    poly_trim(q);
    r = a;
    poly_trim(r);
}

}  // namespace

LaurentPoly Multiplier::reconstruct() const {
    const Ring& R = u0.ring();
    LaurentPoly one = LaurentPoly::one(R);
    LaurentPoly prod = (one + plus) * (one + minus);
    return prod.scaled(u0).shifted(n);
}

Multiplier multiplier_normalize(const LaurentPoly& u) {
    const Ring& R = u.ring();
    if (u.is_zero()) throw DomainError("not invertible in R((t)): zero");

    long pivot = 0;
    bool found = false;
    for (const auto& [e, c] : u.terms()) {
        if (is_unit(c)) { pivot = e; found = true; break; }
        if (!is_nilpotent(c))
            throw DomainError("not invertible in R((t)): coefficient " + c.to_string() +
                              " at t^" + std::to_string(e) + " is neither unit nor nilpotent");
    }
    if (!found) throw DomainError("not invertible in R((t)): no unit coefficient");

    Multiplier m;
    m.u = u;
    m.n = pivot;

    LaurentPoly w = u.shifted(-pivot);  // unit coefficient at 0
    long d = -w.lo();                   // number of sub-pivot coefficients
    if (d <= 0) {
        m.u0 = w.coeff(0);
        m.minus = LaurentPoly::zero(R);
        Elem inv0 = inverse(m.u0);
        m.plus = w.scaled(inv0) - LaurentPoly::one(R);
        return m;
    }

    // W(t) := w * t^d viewed as a polynomial; factor W = A * B with A monic of
    // degree d congruent to t^d modulo the nilpotent ideal and B with unit
    // constant term. One Hensel step per power of the ideal.
    long D = w.hi() + d;
    Poly W(static_cast<size_t>(D) + 1, Elem::zero(R));
    for (const auto& [e, c] : w.terms()) W[static_cast<size_t>(e + d)] = c;

    Poly A(static_cast<size_t>(d) + 1, Elem::zero(R));
    A[static_cast<size_t>(d)] = Elem::one(R);
    Poly B(W.begin() + d, W.end());

    // Exact Bezout pair for (A0, B0): V = power series inverse of B mod t^d,
    // U = -(B*V - 1)/t^d, so U*A0 + V*B0 = 1 identically.
    Elem b0inv = inverse(B[0]);
    Poly V(static_cast<size_t>(d), Elem::zero(R));
    V[0] = b0inv;
    for (long i = 1; i < d; ++i) {
        Elem acc = Elem::zero(R);
        for (long j = 1; j <= i; ++j)
            if (static_cast<size_t>(j) < B.size())
                acc = acc + B[static_cast<size_t>(j)] * V[static_cast<size_t>(i - j)];
        V[static_cast<size_t>(i)] = -(acc * b0inv);
    }
    poly_trim(V);
    Poly BV = poly_mul(R, B, V);
    Poly U;  // -(BV - 1) / t^d
    if (BV.size() > static_cast<size_t>(d)) {
        U.assign(BV.begin() + d, BV.end());
        for (auto& c : U) c = -c;
    }

    // nilpotency bound for the sub-pivot ideal
    long cap = 2;
    for (const auto& [e, c] : w.terms()) {
        if (e >= 0) continue;
        auto info = unit_info(c);
        cap += info.nilpotency_index ? *info.nilpotency_index : 2;
    }

    for (long iter = 0;; ++iter) {
        Poly E = poly_sub(R, W, poly_mul(R, A, B));
        if (E.empty()) break;
        if (iter > cap + 5) throw DomainError("multiplier_normalize: lifting did not terminate");
        Poly VE = poly_mul(R, V, E);
        Poly qA, dA;
        poly_divmod_monic(R, VE, A, qA, dA);
        Poly dB = poly_add(R, poly_mul(R, U, E), poly_mul(R, B, qA));
        A = poly_add(R, A, dA);  // dA has degree < d, A stays monic
        B = poly_add(R, B, dB);
    }

    m.u0 = B[0];
    if (!is_unit(m.u0)) throw DomainError("multiplier_normalize: internal pivot failure");
    Elem inv0 = inverse(m.u0);
    LaurentPoly Bl(R), Al(R);
    for (size_t i = 0; i < B.size(); ++i) Bl.set_coeff(static_cast<long>(i), B[i]);
    for (size_t i = 0; i < A.size(); ++i) Al.set_coeff(static_cast<long>(i) - d, A[i]);
    m.plus = Bl.scaled(inv0) - LaurentPoly::one(R);
    m.minus = Al - LaurentPoly::one(R);
    for (const auto& [e, c] : m.minus.terms()) {
        (void)e;
        if (!is_nilpotent(c)) throw DomainError("multiplier_normalize: minus part not nilpotent");
    }
    if (m.reconstruct() != u) throw DomainError("multiplier_normalize: reconstruction failed");
    return m;
}

Multiplier multiplier_mul(const Multiplier& a, const Multiplier& b) {
    return multiplier_normalize(a.u * b.u);
}

Elem tame_symbol_oracle(const Multiplier& u, const Multiplier& v) {
    const Ring& R = u.u.ring();
    if (!R.is_field()) throw DomainError("tame symbol oracle requires a field");
    if (v.u.ring() != R) throw DomainError("tame symbol: ring mismatch");
    // over a field the minus part vanishes and the pivot coefficient is the
    // lowest coefficient
    long m = u.n, n = v.n;
    Elem a = u.u0, b = v.u0;
    Elem out = Elem::one(R);
    if (n >= 0)
        out = out * a.pow(static_cast<unsigned long>(n));
    else
        out = out * inverse(a).pow(static_cast<unsigned long>(-n));
    if (m >= 0)
        out = out * inverse(b).pow(static_cast<unsigned long>(m));
    else
        out = out * b.pow(static_cast<unsigned long>(-m));
    if ((m % 2 != 0) && (n % 2 != 0)) out = -out;
    return out;
}

}  // namespace satgr
