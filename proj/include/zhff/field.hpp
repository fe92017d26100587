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

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace zhff {

/// Description of a simply presented field GF(p^t) = F_p[x] / (modulus).
///
/// `modulus` is monic of degree t, coefficients listed low-to-high. The
/// named element kappa is the residue class of x.
struct FieldSpec {
    std::uint32_t p = 2;
    std::uint32_t t = 1;
    std::uint32_t q = 2;
    std::vector<std::uint32_t> modulus;

    bool operator==(const FieldSpec& other) const = default;
};

void to_json(nlohmann::json& j, const FieldSpec& spec);
void from_json(const nlohmann::json& j, FieldSpec& spec);

/// t x t matrix over F_p, row-major.
struct FpMatrix {
    std::uint32_t p = 2;
    std::uint32_t n = 0;
    std::vector<std::uint32_t> entries;

    std::uint32_t operator()(std::uint32_t row, std::uint32_t col) const { return entries[row * n + col]; }
    bool operator==(const FpMatrix& other) const = default;
};

class Field;
class FieldElement;
using FieldPtr = std::shared_ptr<const Field>;

/// Arithmetic in a simply presented finite field.
///
/// Elements are addressed by their index in the canonical order: the element
/// j_0 + j_1 k + ... + j_{t-1} k^{t-1} has index j_0 + j_1 p + ... +
/// j_{t-1} p^{t-1}, which is lexicographic on (j_{t-1}, ..., j_0) and puts 0
/// at index 0 and 1 at index 1. Addition, multiplication and the bilinear
/// form are tabulated at construction, so a Field is immutable and cheap to
/// query from many threads.
class Field : public std::enable_shared_from_this<Field> {
   public:
    /// Largest supported field order; the tables are q x q.
    static constexpr std::uint32_t kMaxOrder = 1024;

    static FieldPtr make(std::uint32_t p, std::uint32_t t,
                         std::optional<std::vector<std::uint32_t>> modulus = std::nullopt);
    static FieldPtr make(const FieldSpec& spec) { return make(spec.p, spec.t, spec.modulus); }

    const FieldSpec& spec() const { return spec_; }
    std::uint32_t p() const { return spec_.p; }
    std::uint32_t t() const { return spec_.t; }
    std::uint32_t q() const { return spec_.q; }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const { return add_[a * spec_.q + b]; }
    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return add(a, neg_[b]); }
    std::uint32_t neg(std::uint32_t a) const { return neg_[a]; }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const { return mul_[a * spec_.q + b]; }
    std::uint32_t inv(std::uint32_t a) const;
    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;
    /// (a|b): dot product of coefficient vectors, a residue mod p.
    std::uint32_t bilinear(std::uint32_t a, std::uint32_t b) const { return form_[a * spec_.q + b]; }
    /// M_j^T x, the transpose of multiplication by j with respect to (-|-).
    std::uint32_t transpose_mult(std::uint32_t j, std::uint32_t x) const { return tmul_[j * spec_.q + x]; }
    FpMatrix mult_matrix(std::uint32_t j) const;

    std::uint32_t kappa() const { return kappa_; }
    /// Smallest element of multiplicative order q - 1.
    std::uint32_t generator() const { return generator_; }
    std::uint32_t multiplicative_order(std::uint32_t a) const;

    std::vector<std::uint32_t> coeffs(std::uint32_t index) const;
    std::uint32_t index_of(std::span<const std::uint32_t> coeffs) const;
    /// Embeds the residue n mod p as an element of the prime subfield.
    std::uint32_t from_int(std::int64_t n) const;

    FieldElement element(std::uint32_t index) const;
    FieldElement element(std::span<const std::uint32_t> coeffs) const;
    std::vector<FieldElement> enumerate() const;

    std::string format(std::uint32_t index) const;

    /// Same presentation (identical p, t and modulus).
    bool same_as(const Field& other) const { return this == &other || spec_ == other.spec_; }

   private:
    struct Token {};

   public:
    Field(Token, FieldSpec spec);

   private:
    FieldSpec spec_;
    std::vector<std::uint32_t> add_, mul_, form_, tmul_, neg_;
    std::uint32_t kappa_ = 0;
    std::uint32_t generator_ = 1;
};

/// A value of GF(q) tied to its field presentation.
class FieldElement {
   public:
    FieldElement(FieldPtr field, std::uint32_t index);

    const FieldPtr& field() const { return field_; }
    std::uint32_t index() const { return index_; }
    std::vector<std::uint32_t> coeffs() const { return field_->coeffs(index_); }
    bool is_zero() const { return index_ == 0; }

    bool operator==(const FieldElement& other) const;

   private:
    FieldPtr field_;
    std::uint32_t index_;
};

void to_json(nlohmann::json& j, const FieldElement& e);

FieldPtr make_field(std::uint32_t p, std::uint32_t t,
                    std::optional<std::vector<std::uint32_t>> modulus = std::nullopt);

FieldElement add(const FieldElement& a, const FieldElement& b);
FieldElement sub(const FieldElement& a, const FieldElement& b);
FieldElement neg(const FieldElement& a);
FieldElement mul(const FieldElement& a, const FieldElement& b);
FieldElement inv(const FieldElement& a);
FieldElement pow(const FieldElement& a, std::uint64_t e);
std::uint32_t bilinear_form(const FieldElement& i, const FieldElement& j);
FpMatrix mult_matrix(const FieldElement& j);
FieldElement transpose_mult(const FieldElement& j, const FieldElement& x);
FieldElement find_generator(const FieldPtr& field);
std::vector<FieldElement> enumerate(const FieldPtr& field);

inline FieldElement operator+(const FieldElement& a, const FieldElement& b) { return add(a, b); }
inline FieldElement operator-(const FieldElement& a, const FieldElement& b) { return sub(a, b); }
inline FieldElement operator-(const FieldElement& a) { return neg(a); }
inline FieldElement operator*(const FieldElement& a, const FieldElement& b) { return mul(a, b); }

bool is_prime(std::uint64_t n);
/// Splits q = p^t; returns nullopt when q is not a prime power.
std::optional<std::pair<std::uint32_t, std::uint32_t>> prime_power(std::uint64_t q);
/// Irreducibility of a monic polynomial over F_p by exhaustive trial division.
bool is_irreducible(std::span<const std::uint32_t> poly, std::uint32_t p);

}  // namespace zhff
