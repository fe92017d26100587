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

#include "zhff/field.hpp"

#include <sstream>

#include "zhff/errors.hpp"

namespace zhff {

namespace {

using Poly = std::vector<std::uint32_t>;

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo the monic polynomial m over F_p.
Poly poly_mod(Poly a, const Poly& m, std::uint32_t p) {
    trim(a);
    const std::size_t dm = m.size() - 1;
    while (a.size() > dm) {
        const std::uint32_t lead = a.back();
        const std::size_t shift = a.size() - 1 - dm;
        for (std::size_t i = 0; i <= dm; ++i) {
            a[shift + i] = (a[shift + i] + (p - lead) * m[i]) % p;
        }
        trim(a);
    }
    return a;
}

// Monic polynomial of degree d whose lower coefficients are the base-p digits of code.
Poly monic_from_code(std::uint64_t code, std::uint32_t d, std::uint32_t p) {
    Poly f(d + 1, 0);
    for (std::uint32_t i = 0; i < d; ++i) {
        f[i] = static_cast<std::uint32_t>(code % p);
        code /= p;
    }
    f[d] = 1;
    return f;
}

std::uint64_t ipow(std::uint64_t b, std::uint32_t e) {
    std::uint64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

}  // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

std::optional<std::pair<std::uint32_t, std::uint32_t>> prime_power(std::uint64_t q) {
    if (q < 2) return std::nullopt;
    std::uint64_t p = 2;
    while (q % p != 0) ++p;
    std::uint32_t t = 0;
    while (q % p == 0) {
        q /= p;
        ++t;
    }
    if (q != 1) return std::nullopt;
    return std::make_pair(static_cast<std::uint32_t>(p), t);
}

bool is_irreducible(std::span<const std::uint32_t> poly, std::uint32_t p) {
    Poly f(poly.begin(), poly.end());
    trim(f);
    if (f.size() < 2) return false;
    const auto deg = static_cast<std::uint32_t>(f.size() - 1);
    for (std::uint32_t d = 1; 2 * d <= deg; ++d) {
        const std::uint64_t count = ipow(p, d);
        for (std::uint64_t code = 0; code < count; ++code) {
            if (poly_mod(f, monic_from_code(code, d, p), p).empty()) return false;
        }
    }
    return true;
}

Field::Field(Token, FieldSpec spec) : spec_(std::move(spec)) {
    const std::uint32_t q = spec_.q;
    const std::uint32_t p = spec_.p;
    const std::uint32_t t = spec_.t;
    add_.resize(q * q);
    mul_.resize(q * q);
    form_.resize(q * q);
    tmul_.resize(q * q);
    neg_.resize(q);

    std::vector<Poly> digits(q);
    for (std::uint32_t i = 0; i < q; ++i) digits[i] = coeffs(i);

    for (std::uint32_t a = 0; a < q; ++a) {
        Poly n(t);
        for (std::uint32_t k = 0; k < t; ++k) n[k] = (p - digits[a][k]) % p;
        neg_[a] = index_of(n);
        for (std::uint32_t b = 0; b < q; ++b) {
            Poly s(t);
            std::uint32_t dot = 0;
            for (std::uint32_t k = 0; k < t; ++k) {
                s[k] = (digits[a][k] + digits[b][k]) % p;
                dot = (dot + digits[a][k] * digits[b][k]) % p;
            }
            add_[a * q + b] = index_of(s);
            form_[a * q + b] = dot;
            Poly prod(2 * t - 1, 0);
            for (std::uint32_t i = 0; i < t; ++i) {
                for (std::uint32_t k = 0; k < t; ++k) {
                    prod[i + k] = (prod[i + k] + digits[a][i] * digits[b][k]) % p;
                }
            }
            Poly r = poly_mod(prod, spec_.modulus, p);
            r.resize(t, 0);
            mul_[a * q + b] = index_of(r);
        }
    }

    // (M_j^T x)_tau = (j kappa^tau | x); the basis vector kappa^tau has index p^tau.
    for (std::uint32_t j = 0; j < q; ++j) {
        for (std::uint32_t x = 0; x < q; ++x) {
            Poly c(t);
            std::uint32_t basis = 1;
            for (std::uint32_t tau = 0; tau < t; ++tau, basis *= p) {
                c[tau] = form_[mul_[j * q + basis] * q + x];
            }
            tmul_[j * q + x] = index_of(c);
        }
    }

    kappa_ = t >= 2 ? p : (p - spec_.modulus[0] % p) % p;

    for (std::uint32_t a = 1; a < q; ++a) {
        if (multiplicative_order(a) == q - 1) {
            generator_ = a;
            break;
        }
    }
}

FieldPtr Field::make(std::uint32_t p, std::uint32_t t, std::optional<std::vector<std::uint32_t>> modulus) {
    if (!is_prime(p)) throw NotPrime("characteristic " + std::to_string(p) + " is not prime");
    if (t < 1) throw BadParams("extension degree must be positive");
    const std::uint64_t q = ipow(p, t);
    if (q > kMaxOrder) throw BadParams("field order " + std::to_string(q) + " exceeds supported maximum");

    FieldSpec spec;
    spec.p = p;
    spec.t = t;
    spec.q = static_cast<std::uint32_t>(q);
    if (modulus) {
        Poly m = *modulus;
        if (m.size() != t + 1 || m.back() != 1) {
            throw BadParams("modulus must be monic of degree " + std::to_string(t));
        }
        for (auto c : m) {
            if (c >= p) throw BadParams("modulus coefficient out of range");
        }
        if (!is_irreducible(m, p)) throw ReducibleModulus("modulus has a factor over F_" + std::to_string(p));
        spec.modulus = std::move(m);
    } else {
        const std::uint64_t count = ipow(p, t);
        for (std::uint64_t code = 0; code < count; ++code) {
            Poly f = monic_from_code(code, t, p);
            if (is_irreducible(f, p)) {
                spec.modulus = std::move(f);
                break;
            }
        }
    }
    return std::make_shared<const Field>(Token{}, std::move(spec));
}

std::uint32_t Field::inv(std::uint32_t a) const {
    if (a == 0) throw DivisionByZero("inverse of zero");
    return pow(a, spec_.q - 2);
}

std::uint32_t Field::pow(std::uint32_t a, std::uint64_t e) const {
    std::uint32_t result = 1;
    std::uint32_t base = a;
    while (e > 0) {
        if (e & 1) result = mul(result, base);
        base = mul(base, base);
        e >>= 1;
    }
    return result;
}

std::uint32_t Field::multiplicative_order(std::uint32_t a) const {
    if (a == 0) return 0;
    std::uint32_t x = a;
    std::uint32_t order = 1;
    while (x != 1) {
        x = mul(x, a);
        ++order;
    }
    return order;
}

FpMatrix Field::mult_matrix(std::uint32_t j) const {
    FpMatrix m;
    m.p = spec_.p;
    m.n = spec_.t;
    m.entries.assign(spec_.t * spec_.t, 0);
    std::uint32_t basis = 1;
    for (std::uint32_t col = 0; col < spec_.t; ++col, basis *= spec_.p) {
        const auto image = coeffs(mul(j, basis));
        for (std::uint32_t row = 0; row < spec_.t; ++row) m.entries[row * spec_.t + col] = image[row];
    }
    return m;
}

std::vector<std::uint32_t> Field::coeffs(std::uint32_t index) const {
    std::vector<std::uint32_t> c(spec_.t);
    for (std::uint32_t k = 0; k < spec_.t; ++k) {
        c[k] = index % spec_.p;
        index /= spec_.p;
    }
    return c;
}

std::uint32_t Field::index_of(std::span<const std::uint32_t> coeffs) const {
    if (coeffs.size() != spec_.t) throw FieldMismatch("coefficient vector has wrong length");
    std::uint32_t index = 0;
    for (std::size_t k = coeffs.size(); k-- > 0;) {
        if (coeffs[k] >= spec_.p) throw FieldMismatch("coefficient out of range");
        index = index * spec_.p + coeffs[k];
    }
    return index;
}

std::uint32_t Field::from_int(std::int64_t n) const {
    const auto p = static_cast<std::int64_t>(spec_.p);
    return static_cast<std::uint32_t>(((n % p) + p) % p);
}

FieldElement Field::element(std::uint32_t index) const {
    if (index >= spec_.q) throw FieldMismatch("element index out of range");
    return FieldElement(shared_from_this(), index);
}

FieldElement Field::element(std::span<const std::uint32_t> c) const { return element(index_of(c)); }

std::vector<FieldElement> Field::enumerate() const {
    std::vector<FieldElement> out;
    out.reserve(spec_.q);
    for (std::uint32_t i = 0; i < spec_.q; ++i) out.emplace_back(shared_from_this(), i);
    return out;
}

std::string Field::format(std::uint32_t index) const {
    if (spec_.t == 1) return std::to_string(index);
    const auto c = coeffs(index);
    std::ostringstream out;
    bool first = true;
    for (std::uint32_t k = 0; k < spec_.t; ++k) {
        if (c[k] == 0) continue;
        if (!first) out << "+";
        first = false;
        if (k == 0 || c[k] != 1) out << c[k];
        if (k >= 1) out << "k";
        if (k >= 2) out << "^" << k;
    }
    return first ? "0" : out.str();
}

FieldElement::FieldElement(FieldPtr field, std::uint32_t index) : field_(std::move(field)), index_(index) {
    if (!field_) throw FieldMismatch("element without a field");
    if (index_ >= field_->q()) throw FieldMismatch("element index out of range");
}

bool FieldElement::operator==(const FieldElement& other) const {
    return index_ == other.index_ && field_->same_as(*other.field_);
}

void to_json(nlohmann::json& j, const FieldSpec& spec) {
    j = nlohmann::json{{"p", spec.p}, {"t", spec.t}, {"modulus", spec.modulus}};
}

void from_json(const nlohmann::json& j, FieldSpec& spec) {
    spec.p = j.at("p").get<std::uint32_t>();
    spec.t = j.at("t").get<std::uint32_t>();
    spec.modulus = j.at("modulus").get<std::vector<std::uint32_t>>();
    spec.q = static_cast<std::uint32_t>(ipow(spec.p, spec.t));
}

void to_json(nlohmann::json& j, const FieldElement& e) { j = e.coeffs(); }

namespace {

const Field& common_field(const FieldElement& a, const FieldElement& b) {
    if (!a.field()->same_as(*b.field())) throw FieldMismatch("elements belong to different fields");
    return *a.field();
}

}  // namespace

FieldPtr make_field(std::uint32_t p, std::uint32_t t, std::optional<std::vector<std::uint32_t>> modulus) {
    return Field::make(p, t, std::move(modulus));
}

FieldElement add(const FieldElement& a, const FieldElement& b) {
    return {a.field(), common_field(a, b).add(a.index(), b.index())};
}

FieldElement sub(const FieldElement& a, const FieldElement& b) {
    return {a.field(), common_field(a, b).sub(a.index(), b.index())};
}

FieldElement neg(const FieldElement& a) { return {a.field(), a.field()->neg(a.index())}; }

FieldElement mul(const FieldElement& a, const FieldElement& b) {
    return {a.field(), common_field(a, b).mul(a.index(), b.index())};
}

FieldElement inv(const FieldElement& a) { return {a.field(), a.field()->inv(a.index())}; }

FieldElement pow(const FieldElement& a, std::uint64_t e) { return {a.field(), a.field()->pow(a.index(), e)}; }

std::uint32_t bilinear_form(const FieldElement& i, const FieldElement& j) {
    return common_field(i, j).bilinear(i.index(), j.index());
}

FpMatrix mult_matrix(const FieldElement& j) { return j.field()->mult_matrix(j.index()); }

FieldElement transpose_mult(const FieldElement& j, const FieldElement& x) {
    return {j.field(), common_field(j, x).transpose_mult(j.index(), x.index())};
}

FieldElement find_generator(const FieldPtr& field) { return field->element(field->generator()); }

std::vector<FieldElement> enumerate(const FieldPtr& field) { return field->enumerate(); }

}  // namespace zhff
