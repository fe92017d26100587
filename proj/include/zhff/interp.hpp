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
#include <functional>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include <json.hpp>

#include "zhff/diagram.hpp"
#include "zhff/evaluator.hpp"

namespace zhff {

/// Coefficients over F_q, constant term first, no trailing zeros.
using UniPoly = std::vector<std::uint32_t>;

UniPoly poly_trim(UniPoly p);
std::uint32_t poly_eval(const Field& f, const UniPoly& p, std::uint32_t x);
UniPoly poly_add(const Field& f, const UniPoly& a, const UniPoly& b);
UniPoly poly_sub(const Field& f, const UniPoly& a, const UniPoly& b);
UniPoly poly_mul(const Field& f, const UniPoly& a, const UniPoly& b);
/// Quotient and remainder; throws DivisionByZero for the zero divisor.
std::pair<UniPoly, UniPoly> poly_divmod(const Field& f, const UniPoly& a, const UniPoly& b);
/// Lowest-degree polynomial through the given points (distinct x).
UniPoly lagrange(const Field& f, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& points);
/// Degree of a trimmed polynomial; -1 for zero.
int poly_degree(const UniPoly& p);

/// Classical black box for a polynomial of claimed degree.
class OracleBox {
   public:
    using Fn = std::function<std::uint32_t(std::uint32_t)>;

    OracleBox(FieldPtr field, Fn fn, std::uint32_t degree);
    /// Box around a known polynomial; the degree is read off the coefficients.
    static OracleBox of(FieldPtr field, UniPoly coefficients);

    std::uint32_t query(std::uint32_t x);
    std::uint64_t query_count() const { return *count_; }
    std::uint32_t degree() const { return degree_; }
    const FieldPtr& field() const { return field_; }

   private:
    FieldPtr field_;
    Fn fn_;
    std::uint32_t degree_;
    std::shared_ptr<std::uint64_t> count_;
};

struct LinearPoly {
    std::uint32_t a = 1;  // nonzero
    std::uint32_t b = 0;

    /// Throws BadParams when a = 0 or an index is outside the field.
    static LinearPoly make(const Field& f, std::uint32_t a, std::uint32_t b);
    std::uint32_t operator()(const Field& f, std::uint32_t x) const { return f.add(f.mul(a, x), b); }
};

/// Outcome of the classical degree reduction: g = h * N + r.
struct Reduction {
    std::vector<std::uint32_t> points;  // the queried x_i
    UniPoly node_poly;                  // N(x) = prod (x - x_i)
    UniPoly remainder;                  // r, degree <= d - 2
    /// h(x) = (g(x) - r(x)) / N(x); each call queries g once. Throws
    /// UndefinedAt on the queried points.
    OracleBox quotient;
};

/// Queries g at the d-1 nonzero elements enumerate()[1..d-1].
/// Throws NotEnoughPoints unless q > d - 1.
Reduction classical_reduce(OracleBox& g);
/// g from a decoded linear quotient.
UniPoly reconstruct(const Field& f, const Reduction& red, const LinearPoly& h);

/// |x, y> -> |x, y + f(x)>, as a permutation tensor with two inputs and outputs.
ExactTensor oracle_unitary(const FieldPtr& field, const LinearPoly& f);
/// The same map assembled from copy, multiply and add gadgets.
Diagram oracle_diagram(const FieldPtr& field, const LinearPoly& f);

/// Block acting on the first register when the second holds y != 0:
/// |x> -> q^(-1/2) sum_l w^-(y|lx) |l>.
Diagram u_block(const FieldPtr& field, std::uint32_t y);
/// Controlled unitary: identity when y = 0, u_block(y) otherwise.
ExactTensor build_U(const FieldPtr& field);

/// State after the oracle, the Fourier box on the second register and U.
ExactTensor psi2(const FieldPtr& field, const LinearPoly& f);

struct OutcomeDistribution {
    Rational p_abort;
    /// Conditional on not aborting: (first, second) register outcomes.
    std::map<std::pair<std::uint32_t, std::uint32_t>, Rational> joint;
    std::uint64_t quantum_queries = 0;

    Rational first_marginal(std::uint32_t a) const;
    Rational second_marginal(std::uint32_t b) const;
};

/// Exact output statistics of one run on the oracle for f.
OutcomeDistribution run_interpolation(const FieldPtr& field, const LinearPoly& f);

struct SampleCounts {
    std::uint64_t runs = 0;
    std::uint64_t aborted = 0;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> outcomes;
};

/// Draws runs from the exact distribution; deterministic for a fixed seed.
SampleCounts sample_runs(const OutcomeDistribution& dist, std::uint64_t n_runs, std::uint64_t seed);

struct PipelineResult {
    Reduction reduction;
    LinearPoly quotient;  // the hidden linear problem
    OutcomeDistribution distribution;
    std::uint64_t classical_queries = 0;
    std::uint64_t quantum_queries = 0;
    /// One sampled run: nullopt if it aborted.
    std::optional<std::pair<std::uint32_t, std::uint32_t>> outcome;
    std::optional<UniPoly> recovered;
};

/// Whole algorithm on a hidden polynomial of degree d >= 1: d-1 classical
/// queries, one quantum query, one sampled measurement.
PipelineResult interpolate(const FieldPtr& field, const UniPoly& hidden, std::uint64_t seed);

nlohmann::json to_json(const OutcomeDistribution& d, const Field& f);
nlohmann::json to_json(const SampleCounts& c, const Field& f);

}  // namespace zhff
