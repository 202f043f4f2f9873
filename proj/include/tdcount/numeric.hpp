#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace tdcount {

using Integer  = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const Integer& x) { return x.str(); }

//! Renders n/d in lowest terms, or just n when the denominator is one.
inline std::string to_string(const Rational& x) {
    const auto num = boost::multiprecision::numerator(x);
    const auto den = boost::multiprecision::denominator(x);
    if (den == 1) {
        return num.str();
    }
    return num.str() + "/" + den.str();
}

} // namespace tdcount
