#include "noembed/log_scaled.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace noembed {

LogScaledReal::LogScaledReal(int sign, double logmag) : sign_(sign), logmag_(logmag)
{
    if (sign_ > 1 || sign_ < -1)
        throw std::invalid_argument("LogScaledReal: sign must be -1, 0 or +1");
    if (std::isnan(logmag_))
        throw std::invalid_argument("LogScaledReal: NaN log-magnitude");
    if (sign_ == 0 || logmag_ == -std::numeric_limits<double>::infinity()) {
        sign_ = 0;
        logmag_ = -std::numeric_limits<double>::infinity();
    }
}

LogScaledReal LogScaledReal::from_double(double v)
{
    if (std::isnan(v)) throw std::invalid_argument("LogScaledReal: NaN");
    if (v == 0.0) return {};
    return {v > 0 ? 1 : -1, std::log(std::fabs(v))};
}

double LogScaledReal::to_double() const
{
    if (sign_ == 0) return 0.0;
    return sign_ * std::exp(logmag_);
}

LogScaledReal LogScaledReal::operator+(const LogScaledReal& o) const
{
    if (sign_ == 0) return o;
    if (o.sign_ == 0) return *this;
    const LogScaledReal& big = logmag_ >= o.logmag_ ? *this : o;
    const LogScaledReal& small = logmag_ >= o.logmag_ ? o : *this;
    const double d = small.logmag_ - big.logmag_; // <= 0
    if (big.sign_ == small.sign_)
        return {big.sign_, big.logmag_ + std::log1p(std::exp(d))};
    if (d == 0.0) return {};
    // |big| - |small| = |big| (1 - e^d)
    return {big.sign_, big.logmag_ + std::log(-std::expm1(d))};
}

LogScaledReal LogScaledReal::operator*(const LogScaledReal& o) const
{
    if (sign_ == 0 || o.sign_ == 0) return {};
    return {sign_ * o.sign_, logmag_ + o.logmag_};
}

LogScaledReal LogScaledReal::operator/(const LogScaledReal& o) const
{
    if (o.sign_ == 0) throw std::domain_error("LogScaledReal: division by zero");
    if (sign_ == 0) return {};
    return {sign_ * o.sign_, logmag_ - o.logmag_};
}

bool LogScaledReal::operator<(const LogScaledReal& o) const
{
    if (sign_ != o.sign_) return sign_ < o.sign_;
    if (sign_ == 0) return false;
    return sign_ > 0 ? logmag_ < o.logmag_ : logmag_ > o.logmag_;
}

double LogScaledReal::relative_difference(const LogScaledReal& a, const LogScaledReal& b)
{
    if (a.is_zero() && b.is_zero()) return 0.0;
    const double ref = std::max(a.logmag_, b.logmag_);
    const LogScaledReal d = a - b;
    if (d.is_zero()) return 0.0;
    return std::exp(d.logmag_ - ref);
}

std::string LogScaledReal::str() const
{
    char buf[64];
    if (fits_double() && logmag_ > -700.0)
        std::snprintf(buf, sizeof buf, "%.17g", to_double());
    else
        std::snprintf(buf, sizeof buf, "%s1*exp(%.17g)", sign_ < 0 ? "-" : "", logmag_);
    return buf;
}

} // namespace noembed
