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

#include "zhff/interp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "zhff/errors.hpp"

using namespace zhff;
using namespace zhff::testing;

namespace {

const std::vector<FieldCase> kInterpFields = {{2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2}};

// Brute force: g(x) for every x from a coefficient list, no Horner.
std::vector<std::uint32_t> values_of(const Field& f, const UniPoly& g) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t x = 0; x < f.q(); ++x) {
        std::uint32_t s = 0;
        for (std::size_t i = 0; i < g.size(); ++i) s = f.add(s, f.mul(g[i], f.pow(x, i)));
        out.push_back(s);
    }
    return out;
}

UniPoly random_poly(std::mt19937_64& rng, const Field& f, std::uint32_t degree) {
    std::uniform_int_distribution<std::uint32_t> c(0, f.q() - 1), nz(1, f.q() - 1);
    UniPoly g;
    for (std::uint32_t i = 0; i < degree; ++i) g.push_back(c(rng));
    g.push_back(nz(rng));
    return g;
}

bool within_3_sigma(std::uint64_t hits, std::uint64_t n, double p) {
    const double sigma = std::sqrt(n * p * (1 - p));
    return std::abs(double(hits) - n * p) <= 3 * sigma + 1e-9;
}

ExactTensor dense_psi2(const FieldPtr& f, const LinearPoly& lin) {
    const std::uint32_t q = f->q();
    ExactTensor psi0(f, 0, 2);
    for (std::uint32_t x = 0; x < q; ++x) psi0[x * q] = sqrtq_pow(RingContext::of(*f), -1);
    const ExactTensor fourier = contract(tensor_product(identity(f), h_box(f, 1, 1)));
    return matmul(build_U(f), matmul(fourier, matmul(oracle_unitary(f, lin), psi0)));
}

}  // namespace

TEST(interp, polynomial_helpers) {
    std::mt19937_64 rng(5);
    for (auto [p, t] : kSmallFields) {
        auto f = make_field(p, t);
        for (int trial = 0; trial < 30; ++trial) {
            const UniPoly a = random_poly(rng, *f, 4), b = random_poly(rng, *f, rng() % 3);
            const auto [quot, rem] = poly_divmod(*f, a, b);
            EXPECT_LT(poly_degree(rem), poly_degree(b));
            EXPECT_EQ(poly_add(*f, poly_mul(*f, quot, b), rem), poly_trim(a));
            EXPECT_EQ(values_of(*f, poly_sub(*f, a, a)), values_of(*f, {}));
            for (std::uint32_t x = 0; x < f->q(); ++x) EXPECT_EQ(poly_eval(*f, a, x), values_of(*f, a)[x]);
        }
        EXPECT_THROW(poly_divmod(*f, {1, 1}, {0}), DivisionByZero);
    }
    auto f5 = make_field(5, 1);
    const UniPoly r = lagrange(*f5, {{1, 3}, {2, 0}, {4, 4}});
    EXPECT_LE(poly_degree(r), 2);
    EXPECT_EQ(poly_eval(*f5, r, 1), 3u);
    EXPECT_EQ(poly_eval(*f5, r, 2), 0u);
    EXPECT_EQ(poly_eval(*f5, r, 4), 4u);
}

TEST(interp, oracle_box_counts) {
    auto f = make_field(3, 1);
    OracleBox g = OracleBox::of(f, {1, 2, 1, 0});
    EXPECT_EQ(g.degree(), 2u);
    EXPECT_EQ(g.query_count(), 0u);
    EXPECT_EQ(g.query(2), 0u);  // 1 + 4 + 4 = 9
    g.query(0);
    EXPECT_EQ(g.query_count(), 2u);
    EXPECT_THROW(g.query(3), BadParams);
    EXPECT_THROW(LinearPoly::make(*f, 0, 1), BadParams);
}

TEST(interp, reduction_examples) {
    // d = 1: nothing to query and h is g itself.
    auto f5 = make_field(5, 1);
    OracleBox lin = OracleBox::of(f5, {3, 2});
    Reduction trivial = classical_reduce(lin);
    EXPECT_EQ(lin.query_count(), 0u);
    EXPECT_EQ(trivial.node_poly, UniPoly{1});
    EXPECT_TRUE(trivial.remainder.empty());
    for (std::uint32_t x = 0; x < 5; ++x) EXPECT_EQ(trivial.quotient.query(x), f5->add(3, f5->mul(2, x)));

    // 2x^2 + x + 3 over F_5 = (2x + 3)(x - 1) + 1; g(1) = 6 = 1.
    OracleBox g = OracleBox::of(f5, {3, 1, 2});
    Reduction red = classical_reduce(g);
    EXPECT_EQ(g.query_count(), 1u);
    EXPECT_EQ(red.points, std::vector<std::uint32_t>{1});
    EXPECT_EQ(red.node_poly, (UniPoly{4, 1}));
    EXPECT_EQ(red.remainder, UniPoly{1});
    for (std::uint32_t x = 2; x < 5; ++x) EXPECT_EQ(red.quotient.query(x), f5->add(3, f5->mul(2, x)));
    EXPECT_EQ(g.query_count(), 4u);  // the quotient box consumes g queries
    EXPECT_THROW(red.quotient.query(1), UndefinedAt);
    EXPECT_EQ(reconstruct(*f5, red, {2, 3}), (UniPoly{3, 1, 2}));

    // x^3 over F_4: two queries, and g = h N + r on all of F_4.
    auto f4 = make_field(2, 2);
    OracleBox cube = OracleBox::of(f4, {0, 0, 0, 1});
    Reduction red4 = classical_reduce(cube);
    EXPECT_EQ(cube.query_count(), 2u);
    EXPECT_EQ(red4.points, (std::vector<std::uint32_t>{1, 2}));
    const auto [h, rem] = poly_divmod(*f4, poly_sub(*f4, {0, 0, 0, 1}, red4.remainder), red4.node_poly);
    EXPECT_TRUE(rem.empty());
    ASSERT_EQ(h.size(), 2u);
    EXPECT_EQ(values_of(*f4, reconstruct(*f4, red4, {h[1], h[0]})), values_of(*f4, {0, 0, 0, 1}));
    EXPECT_EQ(red4.quotient.query(3), f4->add(f4->mul(h[1], 3), h[0]));
}

TEST(interp, reduction_errors) {
    auto f2 = make_field(2, 1);
    OracleBox g = OracleBox::of(f2, {0, 0, 0, 1});
    EXPECT_THROW(classical_reduce(g), NotEnoughPoints);
    OracleBox c = OracleBox::of(f2, {1});
    EXPECT_THROW(classical_reduce(c), BadParams);
}

TEST(interp, random_reductions) {
    std::mt19937_64 rng(17);
    for (auto [p, t] : std::vector<FieldCase>{{5, 1}, {7, 1}, {2, 3}, {3, 2}}) {
        auto f = make_field(p, t);
        for (std::uint32_t d = 1; d <= 4; ++d) {
            const UniPoly hidden = random_poly(rng, *f, d);
            OracleBox g = OracleBox::of(f, hidden);
            Reduction red = classical_reduce(g);
            EXPECT_EQ(g.query_count(), d - 1);
            EXPECT_LE(poly_degree(red.remainder), int(d) - 2);
            for (std::uint32_t x : red.points) EXPECT_EQ(poly_eval(*f, red.node_poly, x), 0u);
            for (std::uint32_t x = 0; x < f->q(); ++x) {
                if (poly_eval(*f, red.node_poly, x) == 0) continue;
                const std::uint32_t hx = red.quotient.query(x);
                const std::uint32_t gx = values_of(*f, hidden)[x];
                EXPECT_EQ(gx, f->add(f->mul(hx, poly_eval(*f, red.node_poly, x)), poly_eval(*f, red.remainder, x)));
            }
        }
    }
}

TEST(interp, oracle_permutations) {
    auto f2 = make_field(2, 1);
    const ExactTensor id_x = oracle_unitary(f2, {1, 0});
    for (std::uint32_t x = 0; x < 2; ++x) {
        for (std::uint32_t y = 0; y < 2; ++y) EXPECT_TRUE(id_x.at(x * 2 + (x ^ y), x * 2 + y).is_one());
    }
    auto f4 = make_field(2, 2);
    // (1, 0) -> (1, k + 1)
    EXPECT_TRUE(oracle_unitary(f4, {f4->kappa(), 1}).at(1 * 4 + 3, 1 * 4 + 0).is_one());

    for (auto [p, t] : kSmallFields) {
        auto f = make_field(p, t);
        const std::uint32_t q = f->q();
        for (std::uint32_t a = 1; a < q; ++a) {
            for (std::uint32_t b = 0; b < q; ++b) {
                const ExactTensor o = oracle_unitary(f, {a, b});
                std::size_t ones = 0;
                for (std::size_t r = 0; r < o.rows(); ++r) {
                    for (std::size_t c = 0; c < o.cols(); ++c) ones += o.at(r, c).is_one();
                }
                EXPECT_EQ(ones, std::size_t(q) * q);
                EXPECT_TRUE(is_unitary(o));
                const ExactTensor back = oracle_unitary(f, {f->neg(a), f->neg(b)});
                EXPECT_TRUE(equal_tensors(matmul(back, o), contract(identity(f, 2))));
                EXPECT_TRUE(equal_tensors(contract(oracle_diagram(f, {a, b})), o)) << field_name(f);
            }
        }
    }
}

TEST(interp, controlled_unitary) {
    for (auto [p, t] : kInterpFields) {
        auto f = make_field(p, t);
        const std::uint32_t q = f->q();
        const RingContext ctx = RingContext::of(*f);
        const ExactTensor u = build_U(f);
        EXPECT_TRUE(is_unitary(u)) << field_name(f);
        for (std::uint32_t x = 0; x < q; ++x) {
            for (std::uint32_t l = 0; l < q; ++l) EXPECT_EQ(u.at(l * q, x * q).is_one(), l == x);
        }
        for (std::uint32_t y = 1; y < q; ++y) {
            const ExactTensor block = contract(u_block(f, y));
            EXPECT_TRUE(is_unitary(block));
            for (std::uint32_t l = 0; l < q; ++l) {
                for (std::uint32_t x = 0; x < q; ++x) {
                    const Scalar want = omega_pow(ctx, -std::int64_t(f->bilinear(y, f->mul(l, x)))) * sqrtq_pow(ctx, -1);
                    EXPECT_TRUE(equal(block.at(l, x), want));
                }
            }
        }
        EXPECT_THROW(u_block(f, 0), BadParams);
    }
    for (auto [p, t] : std::vector<FieldCase>{{2, 1}, {3, 1}, {2, 2}, {5, 1}}) {
        auto f = make_field(p, t);
        const ExactTensor u = build_U(f);
        EXPECT_TRUE(equal_tensors(matmul(adjoint(u), u), contract(identity(f, 2))));
    }
}

TEST(interp, psi2_closed_form) {
    // The y != 0 part is q^(-1/2) w^(b|y) |a>|y>; the y = 0 part is q^-1 sum_x |x>|0>.
    for (auto [p, t] : std::vector<FieldCase>{{2, 1}, {3, 1}, {2, 2}, {5, 1}}) {
        auto f = make_field(p, t);
        const std::uint32_t q = f->q();
        const RingContext ctx = RingContext::of(*f);
        for (std::uint32_t a = 1; a < q; ++a) {
            for (std::uint32_t b = 0; b < q; ++b) {
                const ExactTensor psi = psi2(f, {a, b});
                EXPECT_TRUE(equal_tensors(psi, dense_psi2(f, {a, b})));
                ExactTensor want(f, 0, 2);
                for (std::uint32_t x = 0; x < q; ++x) want[x * q] = sqrtq_pow(ctx, -2);
                for (std::uint32_t y = 1; y < q; ++y) {
                    want[a * q + y] = omega_pow(ctx, f->bilinear(b, y)) * sqrtq_pow(ctx, -1);
                }
                EXPECT_TRUE(equal_tensors(psi, want)) << field_name(f) << " a=" << a << " b=" << b;
            }
        }
    }
}

TEST(interp, exact_probabilities) {
    for (auto [p, t] : kInterpFields) {
        auto f = make_field(p, t);
        const std::uint32_t q = f->q();
        for (std::uint32_t a = 1; a < q; ++a) {
            for (std::uint32_t b = 0; b < q; ++b) {
                const OutcomeDistribution d = run_interpolation(f, {a, b});
                EXPECT_EQ(d.p_abort, Rational(1, q));
                EXPECT_EQ(d.first_marginal(a), Rational(1));
                EXPECT_EQ(d.second_marginal(b), Rational(q - 1, q));
                Rational total = 0;
                for (const auto& [k, pr] : d.joint) total += pr;
                EXPECT_EQ(total, Rational(1));
                EXPECT_EQ(d.quantum_queries, 1u);
            }
        }
    }
}

TEST(interp, sampling) {
    auto f4 = make_field(2, 2);
    const OutcomeDistribution d4 = run_interpolation(f4, {f4->kappa(), 1});
    const SampleCounts c4 = sample_runs(d4, 10000, 7);
    EXPECT_EQ(c4.runs, 10000u);
    EXPECT_TRUE(within_3_sigma(c4.aborted, 10000, 0.25)) << c4.aborted;
    for (const auto& [k, n] : c4.outcomes) EXPECT_EQ(k.first, f4->kappa());
    const SampleCounts again = sample_runs(d4, 10000, 7);
    EXPECT_EQ(again.aborted, c4.aborted);
    EXPECT_EQ(again.outcomes, c4.outcomes);

    auto f5 = make_field(5, 1);
    const OutcomeDistribution d5 = run_interpolation(f5, {3, 2});
    const SampleCounts c5 = sample_runs(d5, 10000, 11);
    std::uint64_t hits = 0, kept = 0;
    for (const auto& [k, n] : c5.outcomes) {
        kept += n;
        if (k.second == 2) hits += n;
    }
    EXPECT_TRUE(within_3_sigma(hits, kept, 0.8)) << hits << "/" << kept;
    EXPECT_THROW(sample_runs(d5, 0, 1), BadParams);
}

TEST(interp, pipeline_accounting) {
    std::mt19937_64 rng(2026);
    for (auto [p, t] : std::vector<FieldCase>{{5, 1}, {7, 1}, {2, 3}, {3, 2}}) {
        auto f = make_field(p, t);
        for (std::uint32_t d = 1; d <= 3; ++d) {
            const UniPoly hidden = random_poly(rng, *f, d);
            const PipelineResult res = interpolate(f, hidden, rng());
            EXPECT_EQ(res.classical_queries, d - 1);
            EXPECT_EQ(res.quantum_queries, 1u);
            EXPECT_EQ(reconstruct(*f, res.reduction, res.quotient), hidden);
            if (res.outcome && res.outcome->second == res.quotient.b) {
                ASSERT_TRUE(res.recovered);
                EXPECT_EQ(*res.recovered, hidden);
            }
        }
    }
}

TEST(interp, json_output) {
    auto f = make_field(2, 2);
    const OutcomeDistribution d = run_interpolation(f, {2, 1});
    const auto j = to_json(d, *f);
    EXPECT_EQ(j["p_abort"], "1/4");
    EXPECT_EQ(j["quantum_queries"], 1);
    EXPECT_FALSE(j["joint"].empty());
    const auto c = to_json(sample_runs(d, 100, 3), *f);
    EXPECT_EQ(c["runs"], 100);
}
