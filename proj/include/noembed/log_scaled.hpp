#pragma once
#include <cmath>
#include <limits>
#include <string>

namespace noembed {

// Real number stored as sign * exp(logmag). Zero is sign 0, logmag -inf.
class LogScaledReal {
public:
    LogScaledReal() = default;
    LogScaledReal(int sign, double logmag);

    static LogScaledReal from_double(double v);
    static LogScaledReal zero() { return {}; }
    /// sign * exp(a) without forming exp(a).
    static LogScaledReal exp_signed(int sign, double a) { return {sign, a}; }

    int sign() const { return sign_; }
    double logmag() const { return logmag_; }
    bool is_zero() const { return sign_ == 0; }
    /// Overflows to +-inf and underflows to 0 like std::exp.
    double to_double() const;
    bool fits_double() const { return sign_ == 0 || logmag_ < 709.0; }

    LogScaledReal operator-() const { return {-sign_, logmag_}; }
    LogScaledReal operator+(const LogScaledReal& o) const;
    LogScaledReal operator-(const LogScaledReal& o) const { return *this + (-o); }
    LogScaledReal operator*(const LogScaledReal& o) const;
    LogScaledReal operator/(const LogScaledReal& o) const;
    LogScaledReal operator*(double s) const { return *this * from_double(s); }
    LogScaledReal& operator+=(const LogScaledReal& o) { return *this = *this + o; }
    LogScaledReal abs() const { return {sign_ == 0 ? 0 : 1, logmag_}; }

    bool operator<(const LogScaledReal& o) const;
    /// Relative difference |a-b|/max(|a|,|b|), computed without overflow.
    static double relative_difference(const LogScaledReal& a, const LogScaledReal& b);

    std::string str() const;

private:
    int sign_{0};
    double logmag_{-std::numeric_limits<double>::infinity()};
};

} // namespace noembed
