#include "bifree/scalar.hpp"

#include <limits>
#include <stdexcept>

namespace bifree {

namespace {

using i128 = __int128;
using u128 = unsigned __int128;

constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

u128 abs128(i128 v) { return v < 0 ? static_cast<u128>(-v) : static_cast<u128>(v); }

u128 gcd128(u128 a, u128 b) {
    while (b != 0) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::uint64_t gcd64(std::uint64_t a, std::uint64_t b) {
    while (b != 0) {
        std::uint64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool fits(i128 v) { return v <= kMax && v >= -kMax; }

mpz_class to_mpz(std::int64_t v) {
    mpz_class z;
    mpz_set_si(z.get_mpz_t(), v);
    return z;
}

}  // namespace

Rational::Rational(long long num, long long den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (num == std::numeric_limits<long long>::min() || den == std::numeric_limits<long long>::min()) {
        assign(mpq_class(to_mpz(num), to_mpz(den)));
        return;
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    auto g = static_cast<std::int64_t>(gcd64(static_cast<std::uint64_t>(num < 0 ? -num : num),
                                             static_cast<std::uint64_t>(den)));
    if (g == 0) g = 1;
    num_ = num / g;
    den_ = den / g;
}

Rational::Rational(const mpq_class& q) { assign(q); }

void Rational::assign(const mpq_class& q) {
    mpq_class c(q);
    c.canonicalize();
    const mpz_class& n = c.get_num();
    const mpz_class& d = c.get_den();
    if (mpz_fits_slong_p(n.get_mpz_t()) && mpz_fits_slong_p(d.get_mpz_t())) {
        long nv = mpz_get_si(n.get_mpz_t());
        long dv = mpz_get_si(d.get_mpz_t());
        if (nv != std::numeric_limits<long>::min()) {
            num_ = nv;
            den_ = dv;
            big_.reset();
            return;
        }
    }
    num_ = 0;
    den_ = 1;
    big_ = std::make_shared<const mpq_class>(std::move(c));
}

Rational Rational::parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(mpq_class(mpz_class(text, 10)));
        mpz_class n(text.substr(0, slash), 10);
        mpz_class d(text.substr(slash + 1), 10);
        if (d == 0) throw std::domain_error("rational with zero denominator");
        return Rational(mpq_class(n, d));
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("malformed rational literal '" + text + "'");
    }
}

mpq_class Rational::to_mpq() const {
    if (big_) return *big_;
    return mpq_class(to_mpz(num_), to_mpz(den_));
}

int Rational::sign() const {
    if (big_) return sgn(*big_);
    return (num_ > 0) - (num_ < 0);
}

bool Rational::is_integer() const {
    if (big_) return big_->get_den() == 1;
    return den_ == 1;
}

std::string Rational::numerator_string() const {
    if (big_) return big_->get_num().get_str();
    return std::to_string(num_);
}

std::string Rational::denominator_string() const {
    if (big_) return big_->get_den().get_str();
    return std::to_string(den_);
}

std::string Rational::to_string() const {
    if (big_) return big_->get_str();
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

double Rational::to_double() const {
    if (big_) return big_->get_d();
    return static_cast<double>(num_) / static_cast<double>(den_);
}

Rational Rational::operator-() const {
    Rational r;
    if (big_) {
        r.assign(-*big_);
    } else {
        r.num_ = -num_;
        r.den_ = den_;
    }
    return r;
}

Rational& Rational::operator+=(const Rational& rhs) {
    if (rhs.is_zero()) return *this;
    if (is_zero()) return *this = rhs;
    if (!big_ && !rhs.big_) {
        i128 num;
        i128 den;
        if (den_ == rhs.den_) {
            num = static_cast<i128>(num_) + rhs.num_;
            den = den_;
        } else {
            auto g = static_cast<std::int64_t>(gcd64(static_cast<std::uint64_t>(den_),
                                                     static_cast<std::uint64_t>(rhs.den_)));
            num = static_cast<i128>(num_) * (rhs.den_ / g) + static_cast<i128>(rhs.num_) * (den_ / g);
            den = static_cast<i128>(den_) * (rhs.den_ / g);
        }
        if (num == 0) {
            num_ = 0;
            den_ = 1;
            return *this;
        }
        u128 g = gcd128(abs128(num), static_cast<u128>(den));
        num /= static_cast<i128>(g);
        den /= static_cast<i128>(g);
        if (fits(num) && fits(den)) {
            num_ = static_cast<std::int64_t>(num);
            den_ = static_cast<std::int64_t>(den);
            return *this;
        }
    }
    assign(to_mpq() + rhs.to_mpq());
    return *this;
}

Rational& Rational::operator-=(const Rational& rhs) { return *this += -rhs; }

Rational& Rational::operator*=(const Rational& rhs) {
    if (is_zero() || rhs.is_one()) return *this;
    if (rhs.is_zero()) return *this = Rational();
    if (is_one()) return *this = rhs;
    if (!big_ && !rhs.big_) {
        auto g1 = static_cast<std::int64_t>(gcd64(static_cast<std::uint64_t>(num_ < 0 ? -num_ : num_),
                                                  static_cast<std::uint64_t>(rhs.den_)));
        auto g2 = static_cast<std::int64_t>(gcd64(static_cast<std::uint64_t>(rhs.num_ < 0 ? -rhs.num_ : rhs.num_),
                                                  static_cast<std::uint64_t>(den_)));
        i128 num = static_cast<i128>(num_ / g1) * (rhs.num_ / g2);
        i128 den = static_cast<i128>(den_ / g2) * (rhs.den_ / g1);
        if (fits(num) && fits(den)) {
            num_ = static_cast<std::int64_t>(num);
            den_ = static_cast<std::int64_t>(den);
            return *this;
        }
    }
    assign(to_mpq() * rhs.to_mpq());
    return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
    if (rhs.is_zero()) throw std::domain_error("division by zero");
    if (!rhs.big_) {
        Rational inv;
        inv.num_ = rhs.num_ < 0 ? -rhs.den_ : rhs.den_;
        inv.den_ = rhs.num_ < 0 ? -rhs.num_ : rhs.num_;
        return *this *= inv;
    }
    assign(to_mpq() / rhs.to_mpq());
    return *this;
}

bool operator==(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
    if (a.big_ && b.big_) return *a.big_ == *b.big_;
    // Canonical forms never mix representations for equal values.
    return false;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) {
        i128 lhs = static_cast<i128>(a.num_) * b.den_;
        i128 rhs = static_cast<i128>(b.num_) * a.den_;
        return lhs <=> rhs;
    }
    int c = cmp(a.to_mpq(), b.to_mpq());
    return c <=> 0;
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& rhs) {
    re_ += rhs.re_;
    if (!rhs.im_.is_zero()) im_ += rhs.im_;
    return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& rhs) {
    re_ -= rhs.re_;
    if (!rhs.im_.is_zero()) im_ -= rhs.im_;
    return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& rhs) {
    if (im_.is_zero() && rhs.im_.is_zero()) {
        re_ *= rhs.re_;
        return *this;
    }
    Rational re = re_ * rhs.re_ - im_ * rhs.im_;
    Rational im = re_ * rhs.im_ + im_ * rhs.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& rhs) {
    if (rhs.is_zero()) throw std::domain_error("division by zero");
    if (rhs.im_.is_zero()) {
        re_ /= rhs.re_;
        if (!im_.is_zero()) im_ /= rhs.re_;
        return *this;
    }
    Rational n = rhs.norm();
    *this *= rhs.conj();
    re_ /= n;
    im_ /= n;
    return *this;
}

std::string GaussianRational::to_string() const {
    if (im_.is_zero()) return re_.to_string();
    std::string im;
    if (im_.is_one()) {
        im = "i";
    } else if (im_ == Rational(-1)) {
        im = "-i";
    } else if (im_.is_integer()) {
        im = im_.to_string() + "i";
    } else {
        // "3/2" -> "3i/2"
        im = im_.numerator_string() + "i/" + im_.denominator_string();
    }
    if (re_.is_zero()) return im;
    if (im.front() == '-') return re_.to_string() + im;
    return re_.to_string() + "+" + im;
}

}  // namespace bifree
