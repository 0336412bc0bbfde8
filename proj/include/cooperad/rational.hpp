#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace cooperad {

// Exact scalar type. mpq_class keeps values canonical (lowest terms,
// positive denominator) as long as they are produced by arithmetic or
// canonicalize(); parseRational enforces this for external input.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Accepts "p", "p/q", optional leading minus on p. Rejects q <= 0 inputs
// after canonicalization would hide them, so check explicitly.
inline Rational parseRational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            mpz_class p(s);
            return Rational(p);
        }
        mpz_class p(s.substr(0, slash));
        mpz_class q(s.substr(slash + 1));
        if (q == 0) throw std::invalid_argument("zero denominator");
        Rational r(p, q);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("bad rational literal: '" + s + "'");
    }
}

// Canonical form "p/q", q >= 1, lowest terms. Used by the JSON writer so
// emitted files are byte-stable.
inline std::string formatRational(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

} // namespace cooperad
