#include "prfront/rational.hpp"

#include <algorithm>

#include <cctype>
#include <stdexcept>

namespace prfront {

namespace {

BigInt pow10(unsigned exponent) {
    BigInt result = 1;
    for (unsigned i = 0; i < exponent; ++i) result *= 10;
    return result;
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

Rational parse_decimal(std::string_view text) {
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }

    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_text = text.substr(e + 1);
        bool exp_negative = false;
        if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
            exp_negative = exp_text.front() == '-';
            exp_text.remove_prefix(1);
        }
        if (!all_digits(exp_text) || exp_text.size() > 4) {
            throw std::invalid_argument("bad exponent");
        }
        exponent = std::stol(std::string(exp_text));
        if (exp_negative) exponent = -exponent;
        text = text.substr(0, e);
    }

    std::string_view int_part = text;
    std::string_view frac_part;
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        int_part = text.substr(0, dot);
        frac_part = text.substr(dot + 1);
        if (!frac_part.empty() && !all_digits(frac_part)) throw std::invalid_argument("bad fraction");
    }
    if (int_part.empty() && frac_part.empty()) throw std::invalid_argument("empty number");
    if (!int_part.empty() && !all_digits(int_part)) throw std::invalid_argument("bad digits");

    // cpp_int reads a leading 0 as an octal prefix
    std::string digits = std::string(int_part) + std::string(frac_part);
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size()));
    BigInt numerator(digits.empty() ? std::string("0") : digits);
    exponent -= static_cast<long>(frac_part.size());

    Rational value(numerator);
    if (exponent > 0) value *= Rational(pow10(static_cast<unsigned>(exponent)));
    if (exponent < 0) value /= Rational(pow10(static_cast<unsigned>(-exponent)));
    return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw std::invalid_argument("empty number");

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_decimal(text.substr(0, slash));
        Rational den = parse_decimal(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return num / den;
    }
    return parse_decimal(text);
}

bool is_integer(const Rational& value) {
    return boost::multiprecision::denominator(value) == 1;
}

std::string to_fixed(const Rational& value, int places) {
    const BigInt scale = pow10(static_cast<unsigned>(places));
    const Rational scaled = boost::multiprecision::abs(value) * Rational(scale);
    const BigInt num = boost::multiprecision::numerator(scaled);
    const BigInt den = boost::multiprecision::denominator(scaled);
    BigInt q = num / den;
    if ((num % den) * 2 >= den) q += 1;

    std::string digits = q.str();
    if (places > 0) {
        if (digits.size() <= static_cast<std::size_t>(places)) {
            digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
        }
        digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
    }
    if (value < 0 && q != 0) digits.insert(0, "-");
    return digits;
}

std::string to_exact(const Rational& value) {
    BigInt den = boost::multiprecision::denominator(value);
    int twos = 0;
    int fives = 0;
    while (den % 2 == 0) { den /= 2; ++twos; }
    while (den % 5 == 0) { den /= 5; ++fives; }
    if (den != 1) {
        return boost::multiprecision::numerator(value).str() + "/" +
               boost::multiprecision::denominator(value).str();
    }
    std::string text = to_fixed(value, std::max(twos, fives));
    if (text.find('.') != std::string::npos) {
        while (text.back() == '0') text.pop_back();
        if (text.back() == '.') text.pop_back();
    }
    return text;
}

double to_double(const Rational& value) {
    return value.convert_to<double>();
}

Rational rational_min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational rational_max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace prfront
