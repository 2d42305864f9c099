#ifndef PC_DYADIC_HPP
#define PC_DYADIC_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

namespace pc {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational with a power-of-two denominator: mant * 2^exp with mant odd
// (or zero).  This is all the arithmetic the evaluation of a circuit needs,
// as long as no node has a fractional logarithm.
class Dyadic {
public:
    Dyadic() = default;
    Dyadic(BigInt mant, std::int64_t exp = 0) : mant_(std::move(mant)), exp_(exp) { normalize(); }
    static Dyadic pow2(std::int64_t e) { return Dyadic(1, e); }

    const BigInt& mant() const { return mant_; }
    std::int64_t exp() const { return exp_; }

    bool is_zero() const { return mant_ == 0; }
    bool is_integer() const { return mant_ == 0 || exp_ >= 0; }
    int sgn() const { return mant_ == 0 ? 0 : (mant_ < 0 ? -1 : 1); }

    // Conservative size: numerator bits plus denominator/shift bits.
    std::uint64_t bit_size() const {
        if (mant_ == 0) return 0;
        std::uint64_t b = boost::multiprecision::msb(boost::multiprecision::abs(mant_)) + 1;
        return b + static_cast<std::uint64_t>(exp_ < 0 ? -exp_ : exp_);
    }

    BigInt to_integer() const {
        if (!is_integer()) throw std::logic_error("Dyadic::to_integer on a fraction");
        return mant_ << exp_;
    }

    Dyadic operator-() const {
        Dyadic d;
        d.mant_ = -mant_;
        d.exp_ = exp_;
        return d;
    }

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
        if (a.mant_ == 0) return b;
        if (b.mant_ == 0) return a;
        std::int64_t e = a.exp_ < b.exp_ ? a.exp_ : b.exp_;
        return Dyadic((a.mant_ << (a.exp_ - e)) + (b.mant_ << (b.exp_ - e)), e);
    }
    friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

    Dyadic times_pow2(std::int64_t k) const {
        if (mant_ == 0) return Dyadic();
        return Dyadic(mant_, exp_ + k);
    }

    friend bool operator==(const Dyadic& a, const Dyadic& b) {
        return a.mant_ == b.mant_ && (a.mant_ == 0 || a.exp_ == b.exp_);
    }
    friend bool operator!=(const Dyadic& a, const Dyadic& b) { return !(a == b); }
    friend bool operator<(const Dyadic& a, const Dyadic& b) { return (a - b).sgn() < 0; }

    std::string str() const {
        if (exp_ >= 0) return to_integer().str();
        return mant_.str() + "/2^" + std::to_string(-exp_);
    }

private:
    void normalize() {
        if (mant_ == 0) {
            exp_ = 0;
            return;
        }
        std::uint64_t tz = boost::multiprecision::lsb(boost::multiprecision::abs(mant_));
        if (tz > 0) {
            mant_ >>= tz;
            exp_ += static_cast<std::int64_t>(tz);
        }
    }

    BigInt mant_ = 0;
    std::int64_t exp_ = 0;
};

} // namespace pc

#endif
