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

#include <algorithm>
#include <random>
#include <string>

#include "zhff/errors.hpp"

namespace zhff {

// ------------------------------------------------------------ polynomials

UniPoly poly_trim(UniPoly p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
    return p;
}

int poly_degree(const UniPoly& p) { return static_cast<int>(poly_trim(p).size()) - 1; }

std::uint32_t poly_eval(const Field& f, const UniPoly& p, std::uint32_t x) {
    std::uint32_t acc = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = f.add(f.mul(acc, x), *it);
    return acc;
}

UniPoly poly_add(const Field& f, const UniPoly& a, const UniPoly& b) {
    UniPoly out(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = f.add(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
    }
    return poly_trim(std::move(out));
}

UniPoly poly_sub(const Field& f, const UniPoly& a, const UniPoly& b) {
    UniPoly nb(b.size());
    std::transform(b.begin(), b.end(), nb.begin(), [&](std::uint32_t c) { return f.neg(c); });
    return poly_add(f, a, nb);
}

UniPoly poly_mul(const Field& f, const UniPoly& a, const UniPoly& b) {
    if (a.empty() || b.empty()) return {};
    UniPoly out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = f.add(out[i + j], f.mul(a[i], b[j]));
    }
    return poly_trim(std::move(out));
}

std::pair<UniPoly, UniPoly> poly_divmod(const Field& f, const UniPoly& a, const UniPoly& b) {
    const UniPoly d = poly_trim(b);
    if (d.empty()) throw DivisionByZero("polynomial division by zero");
    UniPoly rem = poly_trim(a);
    if (rem.size() < d.size()) return {{}, rem};
    UniPoly quot(rem.size() - d.size() + 1, 0);
    const std::uint32_t lead_inv = f.inv(d.back());
    for (std::size_t k = quot.size(); k-- > 0;) {
        const std::uint32_t c = f.mul(rem[k + d.size() - 1], lead_inv);
        quot[k] = c;
        for (std::size_t i = 0; i < d.size(); ++i) rem[k + i] = f.sub(rem[k + i], f.mul(c, d[i]));
    }
    return {poly_trim(std::move(quot)), poly_trim(std::move(rem))};
}

UniPoly lagrange(const Field& f, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& points) {
    UniPoly out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        UniPoly basis = {1};
        std::uint32_t denom = 1;
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (j == i) continue;
            if (points[i].first == points[j].first) throw BadParams("interpolation points repeat");
            basis = poly_mul(f, basis, {f.neg(points[j].first), 1});
            denom = f.mul(denom, f.sub(points[i].first, points[j].first));
        }
        const std::uint32_t scale = f.mul(points[i].second, f.inv(denom));
        for (auto& c : basis) c = f.mul(c, scale);
        out = poly_add(f, out, basis);
    }
    return out;
}

// ------------------------------------------------------------------ boxes

OracleBox::OracleBox(FieldPtr field, Fn fn, std::uint32_t degree)
    : field_(std::move(field)), fn_(std::move(fn)), degree_(degree), count_(std::make_shared<std::uint64_t>(0)) {}

OracleBox OracleBox::of(FieldPtr field, UniPoly coefficients) {
    UniPoly c = poly_trim(std::move(coefficients));
    for (std::uint32_t v : c) {
        if (v >= field->q()) throw BadParams("coefficient outside the field");
    }
    const auto degree = static_cast<std::uint32_t>(std::max(0, poly_degree(c)));
    const Field* f = field.get();
    return OracleBox(std::move(field), [f, c](std::uint32_t x) { return poly_eval(*f, c, x); }, degree);
}

std::uint32_t OracleBox::query(std::uint32_t x) {
    if (x >= field_->q()) throw BadParams("query point outside the field");
    ++*count_;
    return fn_(x);
}

LinearPoly LinearPoly::make(const Field& f, std::uint32_t a, std::uint32_t b) {
    if (a >= f.q() || b >= f.q()) throw BadParams("coefficient outside the field");
    if (a == 0) throw BadParams("leading coefficient must be nonzero");
    return {a, b};
}

Reduction classical_reduce(OracleBox& g) {
    const FieldPtr field = g.field();
    const Field& f = *field;
    const std::uint32_t d = g.degree();
    if (d < 1) throw BadParams("degree must be at least 1");
    if (f.q() <= d - 1) throw NotEnoughPoints("field has fewer than d - 1 nonzero points");

    std::vector<std::pair<std::uint32_t, std::uint32_t>> values;
    Reduction red{{}, {1}, {}, OracleBox(field, {}, 1)};
    for (std::uint32_t x = 1; x < d; ++x) {
        values.emplace_back(x, g.query(x));
        red.points.push_back(x);
        red.node_poly = poly_mul(f, red.node_poly, {f.neg(x), 1});
    }
    red.remainder = lagrange(f, values);

    const UniPoly n = red.node_poly, r = red.remainder;
    const std::vector<std::uint32_t> pts = red.points;
    OracleBox inner = g;  // shares the query counter
    const Field* fp = field.get();
    red.quotient = OracleBox(
        field,
        [fp, n, r, pts, inner](std::uint32_t x) mutable {
            if (std::find(pts.begin(), pts.end(), x) != pts.end()) {
                throw UndefinedAt("quotient undefined at queried point " + fp->format(x));
            }
            const std::uint32_t gx = inner.query(x);
            return fp->mul(fp->sub(gx, poly_eval(*fp, r, x)), fp->inv(poly_eval(*fp, n, x)));
        },
        1);
    return red;
}

UniPoly reconstruct(const Field& f, const Reduction& red, const LinearPoly& h) {
    return poly_add(f, poly_mul(f, {h.b, h.a}, red.node_poly), red.remainder);
}

// ---------------------------------------------------------------- quantum

namespace {

Scalar inv_sqrtq(const FieldPtr& f) { return sqrtq_pow(RingContext::of(*f), -1); }

Rational probability(const Scalar& amp) {
    auto r = to_rational(amp * amp.conj());
    if (!r) throw Error("squared amplitude is not rational");
    return *r;
}

using State = std::vector<Scalar>;

// gate[y'][y] acting on the second register of a q x q state.
State apply_second(const ExactTensor& gate, const State& psi, std::uint32_t q) {
    State out(psi.size(), Scalar::zero(gate.ring()));
    for (std::uint32_t x = 0; x < q; ++x) {
        for (std::uint32_t y = 0; y < q; ++y) {
            const Scalar& v = psi[x * q + y];
            if (v.is_zero()) continue;
            for (std::uint32_t z = 0; z < q; ++z) out[x * q + z] += gate.at(z, y) * v;
        }
    }
    return out;
}

// First register transformed by blocks[y], controlled on the second.
State apply_controlled(const std::vector<ExactTensor>& blocks, const State& psi, std::uint32_t q) {
    State out = psi;
    for (std::uint32_t y = 1; y < q; ++y) {
        for (std::uint32_t l = 0; l < q; ++l) {
            Scalar acc = Scalar::zero(blocks[y].ring());
            for (std::uint32_t x = 0; x < q; ++x) {
                const Scalar& v = psi[x * q + y];
                if (!v.is_zero()) acc += blocks[y].at(l, x) * v;
            }
            out[l * q + y] = acc;
        }
    }
    return out;
}

}  // namespace

ExactTensor oracle_unitary(const FieldPtr& field, const LinearPoly& lin) {
    const Field& f = *field;
    const std::uint32_t q = f.q();
    ExactTensor t(field, 2, 2);
    const Scalar one = Scalar::one(t.ring());
    for (std::uint32_t x = 0; x < q; ++x) {
        for (std::uint32_t y = 0; y < q; ++y) t.at(x * q + f.add(y, lin(f, x)), x * q + y) = one;
    }
    return t;
}

Diagram oracle_diagram(const FieldPtr& field, const LinearPoly& lin) {
    DiagramBuilder b(field);
    const PortRef x = b.input();
    const PortRef y = b.input();
    const auto copies = b.embed(z_spider(field, 2, 1), std::vector<PortRef>{x});
    const PortRef ax = b.apply(mult_by(field, lin.a), copies[1]);
    const PortRef c = b.embed(z_lollipop(field, lin.b))[0];
    b.multiply_scalar(inv_sqrtq(field));
    const PortRef fx = b.embed(add2(field), std::vector<PortRef>{ax, c})[0];
    const PortRef sum = b.embed(add2(field), std::vector<PortRef>{y, fx})[0];
    b.output(copies[0]);
    b.output(sum);
    return std::move(b).build();
}

Diagram u_block(const FieldPtr& field, std::uint32_t y) {
    if (y == 0 || y >= field->q()) throw BadParams("block label must be a nonzero element");
    DiagramBuilder b(field);
    const PortRef x = b.input();
    const PortRef c = b.embed(z_lollipop(field, y))[0];
    b.multiply_scalar(inv_sqrtq(field));
    // Output leg pinned to y, the l leg bent round to the boundary.
    const std::uint32_t h = b.diagram().add_h(2, 1, omega_pow(b.diagram().ring(), -1));
    b.connect(c, PortRef::out(h, 0));
    b.connect(x, PortRef::in(h, 1));
    b.output(PortRef::in(h, 0));
    return std::move(b).build();
}

ExactTensor build_U(const FieldPtr& field) {
    const std::uint32_t q = field->q();
    ExactTensor u(field, 2, 2);
    const Scalar one = Scalar::one(u.ring());
    for (std::uint32_t x = 0; x < q; ++x) u.at(x * q, x * q) = one;
    for (std::uint32_t y = 1; y < q; ++y) {
        const ExactTensor block = contract(u_block(field, y));
        for (std::uint32_t l = 0; l < q; ++l) {
            for (std::uint32_t x = 0; x < q; ++x) u.at(l * q + y, x * q + y) = block.at(l, x);
        }
    }
    return u;
}

ExactTensor psi2(const FieldPtr& field, const LinearPoly& f) {
    const Field& fd = *field;
    const std::uint32_t q = fd.q();
    const RingContext ctx = RingContext::of(fd);
    State psi1(std::size_t(q) * q, Scalar::zero(ctx));
    for (std::uint32_t x = 0; x < q; ++x) psi1[x * q + f(fd, x)] = inv_sqrtq(field);

    std::vector<ExactTensor> blocks(q);
    for (std::uint32_t y = 1; y < q; ++y) blocks[y] = contract(u_block(field, y));
    const State psi = apply_controlled(blocks, apply_second(contract(h_box(field, 1, 1)), psi1, q), q);

    ExactTensor out(field, 0, 2);
    for (std::size_t i = 0; i < psi.size(); ++i) out[i] = psi[i];
    return out;
}

Rational OutcomeDistribution::first_marginal(std::uint32_t a) const {
    Rational s = 0;
    for (const auto& [k, p] : joint) {
        if (k.first == a) s += p;
    }
    return s;
}

Rational OutcomeDistribution::second_marginal(std::uint32_t b) const {
    Rational s = 0;
    for (const auto& [k, p] : joint) {
        if (k.second == b) s += p;
    }
    return s;
}

OutcomeDistribution run_interpolation(const FieldPtr& field, const LinearPoly& f) {
    LinearPoly::make(*field, f.a, f.b);
    const std::uint32_t q = field->q();
    OutcomeDistribution dist;
    ExactTensor psi = psi2(field, f);
    dist.quantum_queries = 1;

    dist.p_abort = 0;
    for (std::uint32_t x = 0; x < q; ++x) {
        dist.p_abort += probability(psi[x * q]);
        psi[x * q] = Scalar::zero(psi.ring());
    }
    const Rational keep = 1 - dist.p_abort;
    if (keep == 0) return dist;

    const State out = apply_second(contract(h_dagger(field, 1, 1)), psi.entries(), q);
    for (std::uint32_t u = 0; u < q; ++u) {
        for (std::uint32_t z = 0; z < q; ++z) {
            const Rational p = probability(out[u * q + z]);
            if (p != 0) dist.joint[{u, z}] = p / keep;
        }
    }
    return dist;
}

SampleCounts sample_runs(const OutcomeDistribution& dist, std::uint64_t n_runs, std::uint64_t seed) {
    if (n_runs < 1) throw BadParams("n_runs must be at least 1");
    std::mt19937_64 rng(seed);
    // 53 uniform bits, identical on every standard library.
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const double p_abort = dist.p_abort.convert_to<double>();
    std::vector<std::pair<std::pair<std::uint32_t, std::uint32_t>, double>> cumulative;
    double acc = 0.0;
    for (const auto& [k, p] : dist.joint) {
        acc += p.convert_to<double>();
        cumulative.emplace_back(k, acc);
    }

    SampleCounts counts;
    counts.runs = n_runs;
    for (std::uint64_t i = 0; i < n_runs; ++i) {
        if (uniform() < p_abort || cumulative.empty()) {
            ++counts.aborted;
            continue;
        }
        const double u = uniform() * acc;
        auto it = std::find_if(cumulative.begin(), cumulative.end(), [u](const auto& e) { return u < e.second; });
        if (it == cumulative.end()) --it;
        ++counts.outcomes[it->first];
    }
    return counts;
}

PipelineResult interpolate(const FieldPtr& field, const UniPoly& hidden, std::uint64_t seed) {
    const Field& f = *field;
    const UniPoly g = poly_trim(hidden);
    OracleBox box = OracleBox::of(field, g);
    if (box.degree() < 1) throw BadParams("hidden polynomial must have degree at least 1");

    PipelineResult res{classical_reduce(box), {}, {}, 0, 0, std::nullopt, std::nullopt};
    res.classical_queries = box.query_count();
    // The quantum oracle for h: g's oracle followed by reversible classical
    // post-processing, extended affinely over the queried points.
    const auto [h, rem] = poly_divmod(f, poly_sub(f, g, res.reduction.remainder), res.reduction.node_poly);
    if (!rem.empty() || h.size() != 2) throw Error("degree reduction did not leave a linear quotient");
    res.quotient = LinearPoly::make(f, h[1], h[0]);

    res.distribution = run_interpolation(field, res.quotient);
    res.quantum_queries = res.distribution.quantum_queries;
    const SampleCounts run = sample_runs(res.distribution, 1, seed);
    if (!run.outcomes.empty()) {
        res.outcome = run.outcomes.begin()->first;
        const auto [a, b] = *res.outcome;
        if (a != 0) res.recovered = reconstruct(f, res.reduction, {a, b});
    }
    return res;
}

// ------------------------------------------------------------------- json

namespace {

std::string rational_string(const Rational& r) {
    std::string s = boost::multiprecision::numerator(r).str();
    if (boost::multiprecision::denominator(r) != 1) s += "/" + boost::multiprecision::denominator(r).str();
    return s;
}

nlohmann::json coeffs_json(const Field& f, std::uint32_t v) { return f.coeffs(v); }

}  // namespace

nlohmann::json to_json(const OutcomeDistribution& d, const Field& f) {
    nlohmann::json joint = nlohmann::json::array();
    for (const auto& [k, p] : d.joint) {
        joint.push_back({{"first", coeffs_json(f, k.first)},
                         {"second", coeffs_json(f, k.second)},
                         {"p", rational_string(p)},
                         {"approx", p.convert_to<double>()}});
    }
    return {{"p_abort", rational_string(d.p_abort)},
            {"quantum_queries", d.quantum_queries},
            {"joint", joint}};
}

nlohmann::json to_json(const SampleCounts& c, const Field& f) {
    nlohmann::json outcomes = nlohmann::json::array();
    for (const auto& [k, n] : c.outcomes) {
        outcomes.push_back({{"first", coeffs_json(f, k.first)}, {"second", coeffs_json(f, k.second)}, {"count", n}});
    }
    return {{"runs", c.runs}, {"aborted", c.aborted}, {"outcomes", outcomes}};
}

}  // namespace zhff
