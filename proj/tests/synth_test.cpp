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

#include "zhff/synth.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "zhff/errors.hpp"

using namespace zhff;
using namespace zhff::testing;

namespace {

MultiPoly var(const FieldPtr& f, std::uint32_t n, std::uint32_t i) { return MultiPoly::variable(f, n, i); }
MultiPoly cst(const FieldPtr& f, std::uint32_t n, std::uint32_t c) { return MultiPoly::constant(f, n, c); }

// All points of F_q^n in lexicographic order.
std::vector<std::vector<std::uint32_t>> points(const FieldPtr& f, std::uint32_t n) {
    std::vector<std::vector<std::uint32_t>> out(1);
    for (std::uint32_t v = 0; v < n; ++v) {
        std::vector<std::vector<std::uint32_t>> next;
        for (const auto& p : out) {
            for (std::uint32_t x = 0; x < f->q(); ++x) {
                auto e = p;
                e.push_back(x);
                next.push_back(std::move(e));
            }
        }
        out = std::move(next);
    }
    return out;
}

// Independent evaluation: Horner-free sum of monomials with repeated multiplication.
std::uint32_t eval_oracle(const MultiPoly& p, const std::vector<std::uint32_t>& x) {
    const FieldPtr& f = p.field();
    std::uint32_t s = 0;
    for (const auto& [e, c] : p.terms()) {
        std::uint32_t t = c;
        for (std::size_t v = 0; v < x.size(); ++v) {
            for (std::uint32_t k = 0; k < e[v]; ++k) t = f->mul(t, x[v]);
        }
        s = f->add(s, t);
    }
    return s;
}

// A diagram sending |x> to |g(x)> on every basis input.
void expect_basis_map(const Diagram& d, std::uint32_t n,
                      const std::function<std::uint32_t(const std::vector<std::uint32_t>&)>& g) {
    EXPECT_TRUE(equal_tensors(contract(d), basis_map(d.field(), n, g))) << field_name(d.field());
}

MultiPoly random_poly(std::mt19937_64& rng, const FieldPtr& f, std::uint32_t n, int terms) {
    MultiPoly p(f, n);
    std::uniform_int_distribution<std::uint32_t> exp(0, f->q() - 1), coef(0, f->q() - 1);
    for (int k = 0; k < terms; ++k) {
        MultiPoly::Exponents e(n);
        for (auto& x : e) x = exp(rng);
        p.add_term(e, coef(rng));
    }
    return p;
}

std::vector<Scalar> entry_values(const RingContext& ctx) {
    return {Scalar::zero(ctx),     Scalar::one(ctx),       -Scalar::one(ctx),
            omega_pow(ctx, 1), omega_pow(ctx, -1), Scalar::one(ctx) + omega_pow(ctx, 1)};
}

ExactTensor random_tensor(std::mt19937_64& rng, const FieldPtr& f, std::uint32_t n_in, std::uint32_t n_out,
                          const std::vector<Scalar>& values) {
    ExactTensor t(f, n_in, n_out);
    std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = values[pick(rng)];
    return t;
}

}  // namespace

TEST(synth, poly_arithmetic_and_reduction) {
    auto f = make_field(2, 2);
    const MultiPoly x = var(f, 1, 0);
    EXPECT_EQ(x.pow(4), x);
    EXPECT_EQ(x.pow(5), x.pow(2));
    EXPECT_EQ(x.pow(3).degree_in(0), 3u);
    EXPECT_TRUE((x - x).is_zero());
    EXPECT_EQ((x + x), MultiPoly(f, 1));
    const MultiPoly y = var(f, 2, 1);
    EXPECT_THROW(x + y, ArityMismatch);
    EXPECT_THROW(var(f, 1, 1), BadParams);
    EXPECT_THROW(x + var(make_field(3, 1), 1, 0), FieldMismatch);
}

TEST(synth, degree_stays_below_q) {
    std::mt19937_64 rng(5);
    for (auto [p, t] : kSmallFields) {
        auto f = make_field(p, t);
        for (int trial = 0; trial < 50; ++trial) {
            const MultiPoly a = random_poly(rng, f, 2, 4), b = random_poly(rng, f, 2, 4);
            for (const MultiPoly& r : {a * b, (a * b).pow(f->q() - 1), a.pow(7) - b}) {
                for (std::uint32_t v = 0; v < 2; ++v) EXPECT_LT(r.degree_in(v), f->q());
            }
            // Reduction modulo x^q - x never changes a value.
            for (const auto& x : points(f, 2)) {
                EXPECT_EQ(eval_oracle(a * b, x), f->mul(eval_oracle(a, x), eval_oracle(b, x)));
            }
        }
    }
}

TEST(synth, schur_decomposition) {
    auto f = make_field(2, 1);
    const RingContext ctx = RingContext::of(*f);
    ExactTensor ones(f, 1, 1);
    for (std::size_t k = 0; k < 4; ++k) ones[k] = Scalar::one(ctx);
    EXPECT_TRUE(schur_decompose(ones).empty());

    ExactTensor single = ones;
    single.at(0, 0) = sqrtq_pow(ctx, 1);
    const auto one_factor = schur_decompose(single);
    ASSERT_EQ(one_factor.size(), 1u);
    EXPECT_EQ(one_factor[0].support, (std::set<std::vector<std::uint32_t>>{{0, 0}}));

    std::mt19937_64 rng(8);
    const std::vector<Scalar> values = {Scalar::one(ctx), omega_pow(ctx, 1), -Scalar::one(ctx), Scalar::zero(ctx)};
    for (int trial = 0; trial < 20; ++trial) {
        const ExactTensor m = random_tensor(rng, f, 2, 2, values);
        ExactTensor prod(f, 2, 2);
        for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = Scalar::one(ctx);
        for (const auto& factor : schur_decompose(m)) {
            const ExactTensor t = to_tensor(factor);
            for (std::size_t k = 0; k < prod.size(); ++k) prod[k] *= t[k];
        }
        EXPECT_TRUE(equal_tensors(prod, m));
    }
}

TEST(synth, position_formulas) {
    auto f4 = make_field(2, 2);
    const RingContext ctx = RingContext::of(*f4);
    PseudoBinary none{f4, 1, 0, omega_pow(ctx, 1), {}};
    const Formula all = position_formula(none);
    for (std::uint32_t x = 0; x < 4; ++x) EXPECT_TRUE(all.evaluate(std::vector<std::uint32_t>{x}));
    ASSERT_EQ(all.kind, Formula::Kind::Not);
    EXPECT_EQ(all.children[0].kind, Formula::Kind::Atom);

    PseudoBinary zero{f4, 1, 0, omega_pow(ctx, 1), {{0}}};
    const Formula not_zero = position_formula(zero);
    ASSERT_EQ(not_zero.kind, Formula::Kind::Not);
    ASSERT_EQ(not_zero.children[0].kind, Formula::Kind::Atom);
    EXPECT_EQ(not_zero.children[0].lhs, var(f4, 1, 0));
    EXPECT_EQ(not_zero.children[0].rhs, cst(f4, 1, 0));

    PseudoBinary two{f4, 1, 0, omega_pow(ctx, 1), {{0}, {1}}};
    const Formula phi = position_formula(two);
    for (std::uint32_t x = 0; x < 4; ++x) EXPECT_EQ(phi.evaluate(std::vector<std::uint32_t>{x}), x >= 2);
}

TEST(synth, formula_polynomials) {
    auto f2 = make_field(2, 1);
    EXPECT_TRUE(formula_to_poly(Formula::atom(var(f2, 1, 0), var(f2, 1, 0))).is_zero());
    const MultiPoly g = formula_to_poly(Formula::negation(Formula::atom(var(f2, 1, 0), cst(f2, 1, 0))));
    EXPECT_EQ(g, cst(f2, 1, 1) + var(f2, 1, 0));

    auto f4 = make_field(2, 2);
    const Formula either = Formula::disjunction(
        {Formula::atom(var(f4, 1, 0), cst(f4, 1, 0)), Formula::atom(var(f4, 1, 0), cst(f4, 1, 1))}, f4, 1);
    const MultiPoly h = formula_to_poly(either);
    EXPECT_EQ(h, var(f4, 1, 0) * (var(f4, 1, 0) - cst(f4, 1, 1)));
    for (std::uint32_t x = 0; x < 4; ++x) EXPECT_EQ(h.evaluate(std::vector<std::uint32_t>{x}) == 0, x < 2);
}

TEST(synth, formula_poly_matches_truth_table) {
    std::mt19937_64 rng(31);
    for (auto [p, t] : kSmallFields) {
        auto f = make_field(p, t);
        const RingContext ctx = RingContext::of(*f);
        for (std::uint32_t n = 1; n <= 3; ++n) {
            const auto pts = points(f, n);
            for (int trial = 0; trial < 10; ++trial) {
                PseudoBinary pb{f, n, 0, Scalar::zero(ctx), {}};
                for (const auto& x : pts) {
                    if (rng() % 3 == 0) pb.support.insert(x);
                }
                const Formula phi = position_formula(pb);
                const MultiPoly g = formula_to_poly(phi);
                for (const auto& x : pts) {
                    EXPECT_EQ(phi.evaluate(x), !pb.support.count(x));
                    EXPECT_EQ(eval_oracle(g, x) == 0, phi.evaluate(x));
                }
            }
        }
    }
}

TEST(synth, polynomial_diagrams) {
    auto f4 = make_field(2, 2);
    expect_basis_map(poly_to_diagram(MultiPoly(f4, 2)), 2, [](const auto&) { return 0u; });
    expect_basis_map(poly_to_diagram(var(f4, 1, 0)), 1, [](const auto& x) { return x[0]; });
    const std::uint32_t k = f4->kappa();
    const MultiPoly xy = var(f4, 2, 0) * var(f4, 2, 1) + cst(f4, 2, k);
    expect_basis_map(poly_to_diagram(xy), 2, [&](const auto& x) { return f4->add(f4->mul(x[0], x[1]), k); });

    std::mt19937_64 rng(77);
    for (auto [p, t] : kSmallFields) {
        auto f = make_field(p, t);
        for (std::uint32_t n = 0; n <= 2; ++n) {
            for (int trial = 0; trial < 10; ++trial) {
                const MultiPoly g = random_poly(rng, f, n, 5);
                expect_basis_map(poly_to_diagram(g), n, [&](const auto& x) { return eval_oracle(g, x); });
            }
        }
    }
}

TEST(synth, indicators) {
    auto f4 = make_field(2, 2);
    expect_basis_map(indicator(poly_to_diagram(var(f4, 1, 0))), 1, [](const auto& x) { return x[0] ? 1u : 0u; });
    auto f2 = make_field(2, 1);
    EXPECT_TRUE(equal_diagrams(indicator(identity(f2)), identity(f2)));
    auto f5 = make_field(5, 1);
    const MultiPoly shifted = var(f5, 1, 0) - cst(f5, 1, 2);
    expect_basis_map(indicator(poly_to_diagram(shifted)), 1, [](const auto& x) { return x[0] == 2 ? 0u : 1u; });
}

TEST(synth, postselection) {
    for (auto [p, t] : kSmallFields) {
        auto f = make_field(p, t);
        const RingContext ctx = RingContext::of(*f);
        const Scalar r = Scalar::one(ctx) + omega_pow(ctx, 1);
        const ExactTensor e = contract(phased_postselect(f, r));
        EXPECT_TRUE(equal(e[0], Scalar::one(ctx)));
        EXPECT_TRUE(equal(e[1], r));
        const ExactTensor flat = contract(phased_postselect(f, Scalar::one(ctx)));
        for (std::uint32_t x = 0; x < f->q(); ++x) EXPECT_TRUE(equal(flat[x], Scalar::one(ctx)));
    }
    auto f2 = make_field(2, 1);
    const RingContext c2 = RingContext::of(*f2);
    const Scalar r = sqrtq_pow(c2, -1);
    const ExactTensor d2 = contract(pseudo_binary_to_diagram({f2, 1, 0, r, {{1}}}));
    EXPECT_TRUE(equal(d2[0], Scalar::one(c2)));
    EXPECT_TRUE(equal(d2[1], r));
    auto f4 = make_field(2, 2);
    const RingContext c4 = RingContext::of(*f4);
    const ExactTensor d4 = contract(pseudo_binary_to_diagram({f4, 1, 0, omega_pow(c4, 1), {{f4->kappa()}}}));
    for (std::uint32_t x = 0; x < 4; ++x) {
        EXPECT_TRUE(equal(d4[x], x == f4->kappa() ? omega_pow(c4, 1) : Scalar::one(c4)));
    }
}

TEST(synth, examples_round_trip) {
    auto f2 = make_field(2, 1);
    EXPECT_TRUE(equal_tensors(contract(synthesize(contract(identity(f2)))), contract(identity(f2))));
    auto f3 = make_field(3, 1);
    const ExactTensor h = contract(h_box(f3, 1, 1));
    EXPECT_TRUE(equal_tensors(contract(synthesize(h)), h));
    std::mt19937_64 rng(4);
    const RingContext c2 = RingContext::of(*f2);
    const std::vector<Scalar> vals = {Scalar::zero(c2), Scalar::one(c2), omega_pow(c2, 1),
                                      Scalar::one(c2) + omega_pow(c2, 1)};
    for (int trial = 0; trial < 5; ++trial) {
        const ExactTensor m = random_tensor(rng, f2, 2, 2, vals);
        EXPECT_TRUE(equal_tensors(contract(synthesize(m)), m));
    }
    // Irrational entries: 1/sqrt(q) and sqrt(q).
    ExactTensor irr(f3, 1, 0);
    irr[0] = sqrtq_pow(irr.ring(), -1);
    irr[1] = sqrtq_pow(irr.ring(), 1);
    irr[2] = omega_pow(irr.ring(), 2);
    EXPECT_TRUE(equal_tensors(contract(synthesize(irr)), irr));
}

TEST(synth, random_round_trips) {
    std::mt19937_64 rng(2718);
    for (auto [p, t] : kSmallFields) {
        auto f = make_field(p, t);
        const auto values = entry_values(RingContext::of(*f));
        for (auto [n, m] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{{1, 0}, {1, 1}, {2, 1}}) {
            for (int trial = 0; trial < 25; ++trial) {
                const ExactTensor target = random_tensor(rng, f, n, m, values);
                const Diagram d = synthesize(target);
                EXPECT_EQ(d.n_inputs(), n);
                EXPECT_EQ(d.n_outputs(), m);
                EXPECT_TRUE(equal_tensors(contract(d), target)) << field_name(f) << " shape " << n << "," << m;
            }
        }
    }
}
