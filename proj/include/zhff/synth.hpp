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
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "zhff/diagram.hpp"
#include "zhff/evaluator.hpp"

namespace zhff {

/// Polynomial over F_q in `nvars` variables, reduced modulo x^q - x in each
/// variable. Coefficients are element indices; zero terms are never stored.
class MultiPoly {
   public:
    using Exponents = std::vector<std::uint32_t>;

    MultiPoly() = default;
    MultiPoly(FieldPtr field, std::uint32_t nvars);

    static MultiPoly constant(FieldPtr field, std::uint32_t nvars, std::uint32_t c);
    static MultiPoly variable(FieldPtr field, std::uint32_t nvars, std::uint32_t index);

    const FieldPtr& field() const { return field_; }
    std::uint32_t nvars() const { return nvars_; }
    const std::map<Exponents, std::uint32_t>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    /// Highest exponent of one variable.
    std::uint32_t degree_in(std::uint32_t var) const;

    /// Adds c * x^e, reducing e first.
    void add_term(Exponents e, std::uint32_t c);
    std::uint32_t evaluate(std::span<const std::uint32_t> point) const;

    MultiPoly operator+(const MultiPoly& o) const;
    MultiPoly operator-(const MultiPoly& o) const;
    MultiPoly operator*(const MultiPoly& o) const;
    MultiPoly pow(std::uint64_t e) const;
    bool operator==(const MultiPoly& o) const { return terms_ == o.terms_ && nvars_ == o.nvars_; }

    std::string to_string() const;

   private:
    void check_compatible(const MultiPoly& o) const;

    FieldPtr field_;
    std::uint32_t nvars_ = 0;
    std::map<Exponents, std::uint32_t> terms_;
};

/// Propositional formula over (F_q, +, -, *, =) built from atoms, negation
/// and disjunction.
struct Formula {
    enum class Kind { Atom, Not, Or };
    Kind kind = Kind::Atom;
    MultiPoly lhs, rhs;             // for atoms: lhs = rhs
    std::vector<Formula> children;  // one for Not, two or more for Or

    static Formula atom(MultiPoly lhs, MultiPoly rhs);
    static Formula negation(Formula f);
    /// The empty disjunction is the false atom 1 = 0.
    static Formula disjunction(std::vector<Formula> parts, const FieldPtr& field, std::uint32_t nvars);
    /// Conjunction by De Morgan.
    static Formula conjunction(std::vector<Formula> parts, const FieldPtr& field, std::uint32_t nvars);

    std::uint32_t nvars() const { return lhs.nvars(); }
    bool evaluate(std::span<const std::uint32_t> point) const;
};

/// Matrix whose entries are 1 except on `support`, where they equal r.
/// Index tuples list the input values, then the output values.
struct PseudoBinary {
    FieldPtr field;
    std::uint32_t n_in = 0;
    std::uint32_t n_out = 0;
    Scalar r;
    std::set<std::vector<std::uint32_t>> support;
};

/// Writes M as the entrywise product of pseudo-binary factors, one per
/// distinct entry value other than 1.
std::vector<PseudoBinary> schur_decompose(const ExactTensor& m);
/// Tensor of one factor, for checking decompositions.
ExactTensor to_tensor(const PseudoBinary& p);

/// True exactly where the factor's entry is 1.
Formula position_formula(const PseudoBinary& p);
/// Polynomial vanishing exactly where the formula holds.
MultiPoly formula_to_poly(const Formula& f);

/// n-input 1-output diagram sending |x> to |f(x)>.
Diagram poly_to_diagram(const MultiPoly& f);
/// Follows `d` by |j> -> |j^(q-1)>.
Diagram indicator(const Diagram& d);
/// One-input effect <0| + r<1| on the image of an indicator.
Diagram phased_postselect(const FieldPtr& field, const Scalar& r);
/// Effect on all index wires whose value is the factor's entry.
Diagram pseudo_binary_to_diagram(const PseudoBinary& p);

/// Diagram whose contraction equals `m` exactly.
Diagram synthesize(const ExactTensor& m);

}  // namespace zhff
