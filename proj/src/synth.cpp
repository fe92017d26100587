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

#include <sstream>

#include "zhff/errors.hpp"

namespace zhff {

// ---------------------------------------------------------------- MultiPoly

MultiPoly::MultiPoly(FieldPtr field, std::uint32_t nvars) : field_(std::move(field)), nvars_(nvars) {
    if (!field_) throw BadParams("polynomial needs a field");
}

MultiPoly MultiPoly::constant(FieldPtr field, std::uint32_t nvars, std::uint32_t c) {
    MultiPoly p(std::move(field), nvars);
    p.add_term(Exponents(nvars, 0), c);
    return p;
}

MultiPoly MultiPoly::variable(FieldPtr field, std::uint32_t nvars, std::uint32_t index) {
    if (index >= nvars) throw BadParams("variable index out of range");
    MultiPoly p(std::move(field), nvars);
    Exponents e(nvars, 0);
    e[index] = 1;
    p.add_term(std::move(e), 1);
    return p;
}

std::uint32_t MultiPoly::degree_in(std::uint32_t var) const {
    std::uint32_t d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e.at(var));
    return d;
}

void MultiPoly::add_term(Exponents e, std::uint32_t c) {
    if (e.size() != nvars_) throw BadParams("exponent tuple has the wrong length");
    if (c >= field_->q()) throw BadParams("coefficient outside the field");
    const std::uint32_t q = field_->q();
    // x^q = x on every point of F_q.
    for (auto& k : e) {
        if (k >= q) k = (k - 1) % (q - 1) + 1;
    }
    auto [it, inserted] = terms_.emplace(std::move(e), c);
    if (!inserted) it->second = field_->add(it->second, c);
    if (it->second == 0) terms_.erase(it);
}

std::uint32_t MultiPoly::evaluate(std::span<const std::uint32_t> point) const {
    if (point.size() != nvars_) throw ArityMismatch("evaluation point has the wrong length");
    std::uint32_t sum = 0;
    for (const auto& [e, c] : terms_) {
        std::uint32_t term = c;
        for (std::uint32_t v = 0; v < nvars_; ++v) term = field_->mul(term, field_->pow(point[v], e[v]));
        sum = field_->add(sum, term);
    }
    return sum;
}

void MultiPoly::check_compatible(const MultiPoly& o) const {
    if (!field_->same_as(*o.field_)) throw FieldMismatch("polynomials over different fields");
    if (nvars_ != o.nvars_) throw ArityMismatch("polynomials in different numbers of variables");
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
    check_compatible(o);
    MultiPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const {
    check_compatible(o);
    MultiPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, field_->neg(c));
    return r;
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
    check_compatible(o);
    MultiPoly r(field_, nvars_);
    for (const auto& [e1, c1] : terms_) {
        for (const auto& [e2, c2] : o.terms_) {
            Exponents e(nvars_);
            for (std::uint32_t v = 0; v < nvars_; ++v) e[v] = e1[v] + e2[v];
            r.add_term(std::move(e), field_->mul(c1, c2));
        }
    }
    return r;
}

MultiPoly MultiPoly::pow(std::uint64_t e) const {
    MultiPoly result = constant(field_, nvars_, 1);
    MultiPoly base = *this;
    while (e) {
        if (e & 1) result = result * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return result;
}

std::string MultiPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) out << " + ";
        first = false;
        out << field_->format(c);
        for (std::uint32_t v = 0; v < nvars_; ++v) {
            if (e[v] == 1) out << "*x" << v + 1;
            if (e[v] > 1) out << "*x" << v + 1 << "^" << e[v];
        }
    }
    return out.str();
}

// ------------------------------------------------------------------ Formula

Formula Formula::atom(MultiPoly lhs, MultiPoly rhs) {
    Formula f;
    f.kind = Kind::Atom;
    f.lhs = std::move(lhs);
    f.rhs = std::move(rhs);
    if (!f.lhs.field() || !f.rhs.field()) throw BadParams("atom needs polynomials");
    if (f.lhs.nvars() != f.rhs.nvars()) throw ArityMismatch("atom sides use different variables");
    return f;
}

Formula Formula::negation(Formula inner) {
    Formula f;
    f.kind = Kind::Not;
    f.lhs = MultiPoly(inner.lhs.field(), inner.nvars());
    f.children.push_back(std::move(inner));
    return f;
}

Formula Formula::disjunction(std::vector<Formula> parts, const FieldPtr& field, std::uint32_t nvars) {
    if (parts.empty()) {
        return atom(MultiPoly::constant(field, nvars, 1), MultiPoly(field, nvars));
    }
    if (parts.size() == 1) return std::move(parts[0]);
    Formula f;
    f.kind = Kind::Or;
    f.lhs = MultiPoly(field, nvars);
    f.children = std::move(parts);
    return f;
}

Formula Formula::conjunction(std::vector<Formula> parts, const FieldPtr& field, std::uint32_t nvars) {
    if (parts.size() == 1) return std::move(parts[0]);
    std::vector<Formula> negated;
    for (auto& p : parts) negated.push_back(negation(std::move(p)));
    return negation(disjunction(std::move(negated), field, nvars));
}

bool Formula::evaluate(std::span<const std::uint32_t> point) const {
    switch (kind) {
        case Kind::Atom:
            return lhs.evaluate(point) == rhs.evaluate(point);
        case Kind::Not:
            return !children.at(0).evaluate(point);
        case Kind::Or:
            for (const auto& c : children) {
                if (c.evaluate(point)) return true;
            }
            return false;
    }
    return false;
}

// ------------------------------------------------------------ decomposition

std::vector<PseudoBinary> schur_decompose(const ExactTensor& m) {
    std::vector<PseudoBinary> factors;
    for (std::size_t row = 0; row < m.rows(); ++row) {
        const auto outs = m.tuple_of(row, m.n_out());
        for (std::size_t col = 0; col < m.cols(); ++col) {
            const Scalar& v = m.at(row, col);
            if (equal(v, Scalar::one(m.ring()))) continue;
            auto tuple = m.tuple_of(col, m.n_in());
            tuple.insert(tuple.end(), outs.begin(), outs.end());
            auto it = std::find_if(factors.begin(), factors.end(), [&](const auto& f) { return equal(f.r, v); });
            if (it == factors.end()) {
                factors.push_back({m.field(), m.n_in(), m.n_out(), v, {}});
                it = factors.end() - 1;
            }
            it->support.insert(std::move(tuple));
        }
    }
    return factors;
}

ExactTensor to_tensor(const PseudoBinary& p) {
    ExactTensor t(p.field, p.n_in, p.n_out);
    for (std::size_t row = 0; row < t.rows(); ++row) {
        const auto outs = t.tuple_of(row, p.n_out);
        for (std::size_t col = 0; col < t.cols(); ++col) {
            auto tuple = t.tuple_of(col, p.n_in);
            tuple.insert(tuple.end(), outs.begin(), outs.end());
            t.at(row, col) = p.support.count(tuple) ? p.r : Scalar::one(t.ring());
        }
    }
    return t;
}

Formula position_formula(const PseudoBinary& p) {
    const std::uint32_t nvars = p.n_in + p.n_out;
    std::vector<Formula> cases;
    for (const auto& tuple : p.support) {
        if (tuple.size() != nvars) throw BadParams("support tuple has the wrong length");
        std::vector<Formula> coords;
        for (std::uint32_t v = 0; v < nvars; ++v) {
            coords.push_back(Formula::atom(MultiPoly::variable(p.field, nvars, v),
                                           MultiPoly::constant(p.field, nvars, tuple[v])));
        }
        cases.push_back(Formula::conjunction(std::move(coords), p.field, nvars));
    }
    return Formula::negation(Formula::disjunction(std::move(cases), p.field, nvars));
}

MultiPoly formula_to_poly(const Formula& f) {
    switch (f.kind) {
        case Formula::Kind::Atom:
            return f.lhs - f.rhs;
        case Formula::Kind::Not: {
            const MultiPoly inner = formula_to_poly(f.children.at(0));
            const FieldPtr& field = inner.field();
            return MultiPoly::constant(field, inner.nvars(), 1) - inner.pow(field->q() - 1);
        }
        case Formula::Kind::Or: {
            MultiPoly prod = formula_to_poly(f.children.at(0));
            for (std::size_t k = 1; k < f.children.size(); ++k) prod = prod * formula_to_poly(f.children[k]);
            return prod;
        }
    }
    throw BadParams("unknown formula kind");
}

// ----------------------------------------------------------------- diagrams

namespace {

Diagram multiply_n(const FieldPtr& f, std::uint32_t n) { return compose(h_dagger(f, 1, 1), h_box(f, 1, n)); }

Diagram constant_state(const FieldPtr& f, std::uint32_t c) {
    if (c == 0) return zero_state(f);
    if (c == 1) return one_state(f);
    Diagram d = z_lollipop(f, c);
    d.multiply_scalar(sqrtq_pow(RingContext::of(*f), -1));
    return d;
}

// Horner evaluation with one copy of variable v per use.
class PolyBuilder {
   public:
    PolyBuilder(DiagramBuilder& b, std::vector<std::vector<PortRef>>& copies) : b_(b), copies_(copies) {}

    // Ends counted by a dry run are handed out in order.
    PortRef copy_of(std::uint32_t v) {
        if (counting_) {
            ++needed_[v];
            return PortRef::input(0);
        }
        return copies_[v].at(next_[v]++);
    }

    void start_counting(std::uint32_t nvars) {
        counting_ = true;
        needed_.assign(nvars, 0);
    }
    void start_building(std::uint32_t nvars) {
        counting_ = false;
        next_.assign(nvars, 0);
    }
    const std::vector<std::uint32_t>& needed() const { return needed_; }

    // Value of f restricted to variables 0..upto-1 (the rest have exponent 0).
    PortRef emit(const MultiPoly& f, std::uint32_t upto) {
        const FieldPtr& field = f.field();
        if (upto == 0) {
            const std::uint32_t c = f.terms().empty() ? 0 : f.terms().begin()->second;
            return state(constant_state(field, c));
        }
        const std::uint32_t v = upto - 1;
        std::map<std::uint32_t, MultiPoly> by_power;
        for (const auto& [e, c] : f.terms()) {
            auto rest = e;
            rest[v] = 0;
            auto [it, _] = by_power.try_emplace(e[v], field, f.nvars());
            it->second.add_term(rest, c);
        }
        if (by_power.empty()) return state(zero_state(field));
        if (by_power.size() == 1 && by_power.begin()->first == 0) return emit(by_power.begin()->second, v);
        std::vector<PortRef> terms;
        for (const auto& [power, coeff] : by_power) {
            const bool unit = coeff.terms().size() == 1 && coeff.terms().begin()->first == MultiPoly::Exponents(f.nvars(), 0) &&
                              coeff.terms().begin()->second == 1;
            PortRef x_power{};
            if (power > 0) {
                std::vector<PortRef> xs;
                for (std::uint32_t k = 0; k < power; ++k) xs.push_back(copy_of(v));
                x_power = power == 1 ? xs[0] : gadget(multiply_n(field, power), xs);
            }
            if (power == 0) {
                terms.push_back(emit(coeff, v));
            } else if (unit) {
                terms.push_back(x_power);
            } else {
                const PortRef c = emit(coeff, v);
                terms.push_back(gadget(mult2(field), {c, x_power}));
            }
        }
        if (terms.size() == 1) return terms[0];
        // X(1,k) outputs minus the sum; X(1,1) negates it back.
        const Diagram sum = compose(x_spider(field, 1, 1), x_spider(field, 1, static_cast<std::uint32_t>(terms.size())));
        return gadget(sum, terms);
    }

   private:
    PortRef state(const Diagram& d) {
        if (counting_) return PortRef::input(0);
        return b_.embed(d)[0];
    }
    PortRef gadget(const Diagram& d, std::vector<PortRef> ins) {
        if (counting_) return PortRef::input(0);
        return b_.embed(d, ins)[0];
    }

    DiagramBuilder& b_;
    std::vector<std::vector<PortRef>>& copies_;
    bool counting_ = false;
    std::vector<std::uint32_t> needed_, next_;
};

}  // namespace

Diagram poly_to_diagram(const MultiPoly& f) {
    const FieldPtr& field = f.field();
    const std::uint32_t n = f.nvars();
    DiagramBuilder b(field);
    std::vector<std::vector<PortRef>> copies(n);
    PolyBuilder pb(b, copies);
    pb.start_counting(n);
    pb.emit(f, n);
    const auto needed = pb.needed();
    const auto ins = b.inputs(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        copies[v] = b.embed(z_spider(field, needed[v], 1), std::span<const PortRef>(&ins[v], 1));
    }
    pb.start_building(n);
    b.output(pb.emit(f, n));
    return std::move(b).build();
}

Diagram indicator(const Diagram& d) {
    const FieldPtr& f = d.field();
    const std::uint32_t q = f->q();
    return compose(compose(multiply_n(f, q - 1), z_spider(f, q - 1, 1)), d);
}

Diagram phased_postselect(const FieldPtr& field, const Scalar& r) {
    Diagram d = h_box(field, 0, 1, r);
    d.multiply_scalar(sqrtq_pow(RingContext::of(*field), 1));
    return d;
}

Diagram pseudo_binary_to_diagram(const PseudoBinary& p) {
    const MultiPoly f = formula_to_poly(position_formula(p));
    return compose(phased_postselect(p.field, p.r), indicator(poly_to_diagram(f)));
}

Diagram synthesize(const ExactTensor& m) {
    const FieldPtr& field = m.field();
    const std::uint32_t nvars = m.n_in() + m.n_out();
    const auto factors = schur_decompose(m);
    DiagramBuilder b(field);
    const auto ins = b.inputs(nvars);
    std::vector<std::vector<PortRef>> copies;
    for (std::uint32_t v = 0; v < nvars; ++v) {
        copies.push_back(b.embed(z_spider(field, static_cast<std::uint32_t>(factors.size()), 1),
                                 std::span<const PortRef>(&ins[v], 1)));
    }
    for (std::size_t k = 0; k < factors.size(); ++k) {
        std::vector<PortRef> ends;
        for (std::uint32_t v = 0; v < nvars; ++v) ends.push_back(copies[v][k]);
        b.embed(pseudo_binary_to_diagram(factors[k]), ends);
    }
    return bend_inputs_to_outputs(std::move(b).build(), m.n_out());
}

}  // namespace zhff
