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

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "zhff/field.hpp"

namespace zhff {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Identifies the ring Z[w, 1/sqrt(q)] with w a primitive p-th root of unity.
struct RingContext {
    std::uint32_t p = 2;
    std::uint32_t t = 1;
    std::uint64_t q = 2;

    static RingContext of(const Field& field) { return {field.p(), field.t(), field.q()}; }
    bool operator==(const RingContext& other) const = default;
};

/// Element of Z[w] in coordinates over the basis {1, w, ..., w^(p-2)}.
///
/// The basis is a Z-basis of Z[w] (the minimal polynomial of w is
/// 1 + x + ... + x^(p-1)), so equality is coordinatewise.
class CycloInt {
   public:
    CycloInt() = default;
    explicit CycloInt(std::uint32_t p) : p_(p), c_(p - 1) {}

    static CycloInt integer(std::uint32_t p, const BigInt& n);
    static CycloInt omega_pow(std::uint32_t p, std::uint64_t e);
    static CycloInt from_coords(std::uint32_t p, std::vector<BigInt> coords);

    std::uint32_t p() const { return p_; }
    const std::vector<BigInt>& coords() const { return c_; }
    bool is_zero() const;

    CycloInt& operator+=(const CycloInt& other);
    CycloInt& operator-=(const CycloInt& other);
    CycloInt& operator*=(const BigInt& n);
    friend CycloInt operator+(CycloInt a, const CycloInt& b) { return a += b; }
    friend CycloInt operator-(CycloInt a, const CycloInt& b) { return a -= b; }
    friend CycloInt operator*(const CycloInt& a, const CycloInt& b);
    friend CycloInt operator*(CycloInt a, const BigInt& n) { return a *= n; }
    CycloInt operator-() const;
    bool operator==(const CycloInt& other) const { return p_ == other.p_ && c_ == other.c_; }

    /// Image under w -> w^-1.
    CycloInt conj() const;
    bool divisible_by(const BigInt& d) const;
    CycloInt divided_exact(const BigInt& d) const;
    std::complex<double> to_complex() const;

   private:
    static CycloInt reduce(std::uint32_t p, std::vector<BigInt>& powers);

    std::uint32_t p_ = 0;
    std::vector<BigInt> c_;
};

/// Exact element (a + b sqrt(q)) / q^k of Z[w, 1/sqrt(q)], with a, b in Z[w].
///
/// Canonical form: k == 0, or a and b are not both divisible by q. The
/// representation is not unique when sqrt(q) already lies in Z[w] (t even,
/// or p = 1 mod 4); `equal` decides equality of the complex values.
class Scalar {
   public:
    Scalar() = default;
    explicit Scalar(const RingContext& ctx);
    Scalar(const RingContext& ctx, CycloInt a, CycloInt b, std::uint32_t k);

    static Scalar zero(const RingContext& ctx) { return Scalar(ctx); }
    static Scalar one(const RingContext& ctx) { return integer(ctx, 1); }
    static Scalar integer(const RingContext& ctx, const BigInt& n);
    static Scalar omega_pow(const RingContext& ctx, std::int64_t e);
    /// q^(n/2).
    static Scalar sqrtq_pow(const RingContext& ctx, std::int64_t n);

    const RingContext& context() const { return ctx_; }
    const CycloInt& a() const { return a_; }
    const CycloInt& b() const { return b_; }
    std::uint32_t k() const { return k_; }
    bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
    bool is_one() const;

    Scalar& operator+=(const Scalar& other);
    Scalar& operator-=(const Scalar& other);
    Scalar& operator*=(const Scalar& other);
    friend Scalar operator+(Scalar x, const Scalar& y) { return x += y; }
    friend Scalar operator-(Scalar x, const Scalar& y) { return x -= y; }
    friend Scalar operator*(Scalar x, const Scalar& y) { return x *= y; }
    Scalar operator-() const;

    Scalar conj() const;
    Scalar pow(std::uint64_t e) const;
    std::complex<double> to_complex() const;

    /// Structural identity of the stored representation.
    bool same_representation(const Scalar& other) const {
        return ctx_ == other.ctx_ && k_ == other.k_ && a_ == other.a_ && b_ == other.b_;
    }

   private:
    void check_context(const Scalar& other) const;
    void canonicalize();

    RingContext ctx_;
    CycloInt a_, b_;
    std::uint32_t k_ = 0;
};

Scalar omega_pow(const RingContext& ctx, std::int64_t e);
Scalar sqrtq_pow(const RingContext& ctx, std::int64_t n);
Scalar conj(const Scalar& x);
bool is_zero(const Scalar& x);
/// Equality of complex values. Exact squaring decides up to sign, and the
/// sign is resolved by comparing floating-point evaluations.
bool equal(const Scalar& x, const Scalar& y);
std::complex<double> to_complex(const Scalar& x);

/// Relative tolerance of the sign-resolution step inside `equal`.
inline constexpr double kSignTolerance = 1e-6;

/// sqrt(q) as an element of Z[w], when it lies there.
std::optional<CycloInt> sqrtq_in_ring(const RingContext& ctx);
/// The value as an exact rational, if it is rational.
std::optional<Rational> to_rational(const Scalar& x);
/// n with x == q^(n/2), if such an n exists.
std::optional<std::int64_t> sqrtq_exponent(const Scalar& x);

std::ostream& operator<<(std::ostream& out, const Scalar& x);

void to_json(nlohmann::json& j, const Scalar& x);
Scalar scalar_from_json(const nlohmann::json& j, const RingContext& ctx);
nlohmann::json bigint_to_json(const BigInt& n);
BigInt bigint_from_json(const nlohmann::json& j);

}  // namespace zhff
