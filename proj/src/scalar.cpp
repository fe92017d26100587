// Copyright 2026 The zhff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zhff/scalar.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "zhff/errors.hpp"

namespace zhff {

namespace {

BigInt big_pow(std::uint64_t base, std::uint32_t e) {
    BigInt r = 1;
    for (std::uint32_t i = 0; i < e; ++i) r *= base;
    return r;
}

}  // namespace

// ---------------------------------------------------------------- CycloInt

CycloInt CycloInt::integer(std::uint32_t p, const BigInt& n) {
    CycloInt x(p);
    x.c_[0] = n;
    return x;
}

CycloInt CycloInt::omega_pow(std::uint32_t p, std::uint64_t e) {
    CycloInt x(p);
    const auto r = static_cast<std::uint32_t>(e % p);
    if (r + 1 < p) {
        x.c_[r] = 1;
    } else {
        for (auto& c : x.c_) c = -1;
    }
    return x;
}

CycloInt CycloInt::from_coords(std::uint32_t p, std::vector<BigInt> coords) {
    if (coords.size() != p - 1) throw ContextMismatch("cyclotomic integer needs p - 1 coordinates");
    CycloInt x;
    x.p_ = p;
    x.c_ = std::move(coords);
    return x;
}

bool CycloInt::is_zero() const {
    for (const auto& c : c_) {
        if (!c.is_zero()) return false;
    }
    return true;
}

CycloInt& CycloInt::operator+=(const CycloInt& other) {
    if (p_ != other.p_) throw ContextMismatch("cyclotomic integers over different p");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += other.c_[i];
    return *this;
}

CycloInt& CycloInt::operator-=(const CycloInt& other) {
    if (p_ != other.p_) throw ContextMismatch("cyclotomic integers over different p");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= other.c_[i];
    return *this;
}

CycloInt& CycloInt::operator*=(const BigInt& n) {
    for (auto& c : c_) c *= n;
    return *this;
}

CycloInt CycloInt::operator-() const {
    CycloInt r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
}

// powers[e] is the coefficient of w^e for e in [0, p); w^(p-1) = -(1 + ... + w^(p-2)).
CycloInt CycloInt::reduce(std::uint32_t p, std::vector<BigInt>& powers) {
    CycloInt r(p);
    const BigInt& top = powers[p - 1];
    for (std::uint32_t e = 0; e + 1 < p; ++e) r.c_[e] = powers[e] - top;
    return r;
}

CycloInt operator*(const CycloInt& a, const CycloInt& b) {
    if (a.p_ != b.p_) throw ContextMismatch("cyclotomic integers over different p");
    const std::uint32_t p = a.p_;
    if (p == 2) return CycloInt::integer(2, a.c_[0] * b.c_[0]);
    std::vector<BigInt> powers(p);
    for (std::uint32_t i = 0; i + 1 < p; ++i) {
        if (a.c_[i].is_zero()) continue;
        for (std::uint32_t j = 0; j + 1 < p; ++j) {
            if (b.c_[j].is_zero()) continue;
            const std::uint32_t e = (i + j) % p;
            powers[e] += a.c_[i] * b.c_[j];
        }
    }
    return CycloInt::reduce(p, powers);
}

CycloInt CycloInt::conj() const {
    if (p_ == 2) return *this;
    std::vector<BigInt> powers(p_);
    for (std::uint32_t e = 0; e + 1 < p_; ++e) powers[(p_ - e) % p_] = c_[e];
    return reduce(p_, powers);
}

bool CycloInt::divisible_by(const BigInt& d) const {
    for (const auto& c : c_) {
        if (!BigInt(c % d).is_zero()) return false;
    }
    return true;
}

CycloInt CycloInt::divided_exact(const BigInt& d) const {
    CycloInt r = *this;
    for (auto& c : r.c_) c /= d;
    return r;
}

std::complex<double> CycloInt::to_complex() const {
    std::complex<double> sum = 0.0;
    for (std::uint32_t e = 0; e < c_.size(); ++e) {
        if (c_[e].is_zero()) continue;
        const double angle = 2.0 * std::numbers::pi * e / p_;
        sum += c_[e].convert_to<double>() * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    return sum;
}

// ------------------------------------------------------------------ Scalar

Scalar::Scalar(const RingContext& ctx) : ctx_(ctx), a_(ctx.p), b_(ctx.p) {}

Scalar::Scalar(const RingContext& ctx, CycloInt a, CycloInt b, std::uint32_t k)
    : ctx_(ctx), a_(std::move(a)), b_(std::move(b)), k_(k) {
    if (a_.p() != ctx.p || b_.p() != ctx.p) throw ContextMismatch("coordinates do not match ring context");
    canonicalize();
}

Scalar Scalar::integer(const RingContext& ctx, const BigInt& n) {
    Scalar x(ctx);
    x.a_ = CycloInt::integer(ctx.p, n);
    return x;
}

Scalar Scalar::omega_pow(const RingContext& ctx, std::int64_t e) {
    const auto p = static_cast<std::int64_t>(ctx.p);
    Scalar x(ctx);
    x.a_ = CycloInt::omega_pow(ctx.p, static_cast<std::uint64_t>(((e % p) + p) % p));
    return x;
}

Scalar Scalar::sqrtq_pow(const RingContext& ctx, std::int64_t n) {
    Scalar x(ctx);
    const std::uint64_t m = static_cast<std::uint64_t>(n >= 0 ? n : -n);
    if (n >= 0) {
        if (m % 2 == 0) {
            x.a_ = CycloInt::integer(ctx.p, big_pow(ctx.q, static_cast<std::uint32_t>(m / 2)));
        } else {
            x.b_ = CycloInt::integer(ctx.p, big_pow(ctx.q, static_cast<std::uint32_t>(m / 2)));
        }
    } else if (m % 2 == 0) {
        x.a_ = CycloInt::integer(ctx.p, 1);
        x.k_ = static_cast<std::uint32_t>(m / 2);
    } else {
        // q^(-m/2) = sqrt(q) / q^((m+1)/2)
        x.b_ = CycloInt::integer(ctx.p, 1);
        x.k_ = static_cast<std::uint32_t>((m + 1) / 2);
    }
    return x;
}

bool Scalar::is_one() const {
    if (k_ != 0 || !b_.is_zero()) return false;
    const auto& c = a_.coords();
    if (c[0] != 1) return false;
    for (std::size_t i = 1; i < c.size(); ++i) {
        if (!c[i].is_zero()) return false;
    }
    return true;
}

void Scalar::check_context(const Scalar& other) const {
    if (!(ctx_ == other.ctx_)) throw ContextMismatch("scalars over different rings");
}

void Scalar::canonicalize() {
    if (a_.is_zero() && b_.is_zero()) {
        k_ = 0;
        return;
    }
    const BigInt q = ctx_.q;
    while (k_ > 0 && a_.divisible_by(q) && b_.divisible_by(q)) {
        a_ = a_.divided_exact(q);
        b_ = b_.divided_exact(q);
        --k_;
    }
}

Scalar& Scalar::operator+=(const Scalar& other) {
    check_context(other);
    if (other.is_zero()) return *this;
    if (is_zero()) return *this = other;
    if (k_ == other.k_) {
        a_ += other.a_;
        b_ += other.b_;
    } else if (k_ > other.k_) {
        const BigInt scale = big_pow(ctx_.q, k_ - other.k_);
        a_ += other.a_ * scale;
        b_ += other.b_ * scale;
    } else {
        const BigInt scale = big_pow(ctx_.q, other.k_ - k_);
        a_ *= scale;
        b_ *= scale;
        a_ += other.a_;
        b_ += other.b_;
        k_ = other.k_;
    }
    canonicalize();
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& other) { return *this += -other; }

Scalar& Scalar::operator*=(const Scalar& other) {
    check_context(other);
    if (is_zero()) return *this;
    if (other.is_zero()) return *this = Scalar(ctx_);
    const bool b_zero = b_.is_zero();
    const bool ob_zero = other.b_.is_zero();
    if (b_zero && ob_zero) {
        a_ = a_ * other.a_;
    } else if (ob_zero) {
        a_ = a_ * other.a_;
        b_ = b_ * other.a_;
    } else if (b_zero) {
        b_ = a_ * other.b_;
        a_ = a_ * other.a_;
    } else {
        CycloInt na = a_ * other.a_ + (b_ * other.b_) * BigInt(ctx_.q);
        CycloInt nb = a_ * other.b_ + b_ * other.a_;
        a_ = std::move(na);
        b_ = std::move(nb);
    }
    k_ += other.k_;
    canonicalize();
    return *this;
}

Scalar Scalar::operator-() const {
    Scalar r = *this;
    r.a_ = -r.a_;
    r.b_ = -r.b_;
    return r;
}

Scalar Scalar::conj() const {
    Scalar r = *this;
    r.a_ = a_.conj();
    r.b_ = b_.conj();
    return r;
}

Scalar Scalar::pow(std::uint64_t e) const {
    Scalar result = one(ctx_);
    Scalar base = *this;
    while (e > 0) {
        if (e & 1) result *= base;
        e >>= 1;
        if (e > 0) base *= base;
    }
    return result;
}

std::complex<double> Scalar::to_complex() const {
    const double sq = std::sqrt(static_cast<double>(ctx_.q));
    const std::complex<double> num = a_.to_complex() + sq * b_.to_complex();
    return num / std::pow(static_cast<double>(ctx_.q), static_cast<double>(k_));
}

Scalar omega_pow(const RingContext& ctx, std::int64_t e) { return Scalar::omega_pow(ctx, e); }
Scalar sqrtq_pow(const RingContext& ctx, std::int64_t n) { return Scalar::sqrtq_pow(ctx, n); }
Scalar conj(const Scalar& x) { return x.conj(); }
bool is_zero(const Scalar& x) { return x.is_zero(); }
std::complex<double> to_complex(const Scalar& x) { return x.to_complex(); }

bool equal(const Scalar& x, const Scalar& y) {
    if (!(x.context() == y.context())) throw ContextMismatch("scalars over different rings");
    const auto& ctx = x.context();
    const std::uint32_t kk = std::max(x.k(), y.k());
    const BigInt sx = big_pow(ctx.q, kk - x.k());
    const BigInt sy = big_pow(ctx.q, kk - y.k());
    // x - y = (u - v sqrt(q)) / q^kk
    const CycloInt u = x.a() * sx - y.a() * sy;
    const CycloInt v = y.b() * sy - x.b() * sx;
    const bool u_zero = u.is_zero();
    const bool v_zero = v.is_zero();
    if (u_zero && v_zero) return true;
    if (u_zero || v_zero) return false;
    if (!(u * u == (v * v) * BigInt(ctx.q))) return false;
    const std::complex<double> fu = u.to_complex();
    const std::complex<double> fv = v.to_complex() * std::sqrt(static_cast<double>(ctx.q));
    return std::abs(fu - fv) <= kSignTolerance * (std::abs(fu) + std::abs(fv));
}

std::optional<CycloInt> sqrtq_in_ring(const RingContext& ctx) {
    if (ctx.t % 2 == 0) return CycloInt::integer(ctx.p, big_pow(ctx.p, ctx.t / 2));
    if (ctx.p % 4 != 1) return std::nullopt;
    // Quadratic Gauss sum: equals +sqrt(p) when p = 1 mod 4.
    CycloInt gauss(ctx.p);
    for (std::uint64_t k = 0; k < ctx.p; ++k) gauss += CycloInt::omega_pow(ctx.p, (k * k) % ctx.p);
    return gauss * big_pow(ctx.p, (ctx.t - 1) / 2);
}

std::optional<Rational> to_rational(const Scalar& x) {
    CycloInt a = x.a();
    if (!x.b().is_zero()) {
        auto root = sqrtq_in_ring(x.context());
        if (!root) return std::nullopt;
        a += x.b() * *root;
    }
    const auto& c = a.coords();
    for (std::size_t i = 1; i < c.size(); ++i) {
        if (!c[i].is_zero()) return std::nullopt;
    }
    return Rational(c[0], big_pow(x.context().q, x.k()));
}

std::optional<std::int64_t> sqrtq_exponent(const Scalar& x) {
    if (x.is_zero()) return std::nullopt;
    const double mag = std::abs(x.to_complex());
    if (!(mag > 0.0) || !std::isfinite(mag)) return std::nullopt;
    const auto n = static_cast<std::int64_t>(std::llround(2.0 * std::log(mag) / std::log(double(x.context().q))));
    if (equal(x, Scalar::sqrtq_pow(x.context(), n))) return n;
    return std::nullopt;
}

std::ostream& operator<<(std::ostream& out, const Scalar& x) {
    auto write = [&](const CycloInt& c) {
        out << "[";
        for (std::size_t i = 0; i < c.coords().size(); ++i) out << (i ? "," : "") << c.coords()[i];
        out << "]";
    };
    out << "(";
    write(x.a());
    out << " + ";
    write(x.b());
    out << " sqrt" << x.context().q << ")/" << x.context().q << "^" << x.k();
    return out;
}

nlohmann::json bigint_to_json(const BigInt& n) {
    if (n >= std::numeric_limits<std::int64_t>::min() && n <= std::numeric_limits<std::int64_t>::max()) {
        return n.convert_to<std::int64_t>();
    }
    return n.str();
}

BigInt bigint_from_json(const nlohmann::json& j) {
    if (j.is_string()) return BigInt(j.get<std::string>());
    if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
    throw ParseError("expected an integer");
}

void to_json(nlohmann::json& j, const Scalar& x) {
    auto coords = [](const CycloInt& c) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& v : c.coords()) arr.push_back(bigint_to_json(v));
        return arr;
    };
    j = nlohmann::json{{"a", coords(x.a())}, {"b", coords(x.b())}, {"k", x.k()}};
}

Scalar scalar_from_json(const nlohmann::json& j, const RingContext& ctx) {
    auto coords = [&](const nlohmann::json& arr) {
        if (!arr.is_array() || arr.size() != ctx.p - 1) {
            throw ParseError("scalar coordinate array must have length p - 1");
        }
        std::vector<BigInt> c;
        for (const auto& v : arr) c.push_back(bigint_from_json(v));
        return CycloInt::from_coords(ctx.p, std::move(c));
    };
    try {
        return Scalar(ctx, coords(j.at("a")), coords(j.at("b")), j.at("k").get<std::uint32_t>());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed scalar: ") + e.what());
    }
}

}  // namespace zhff
