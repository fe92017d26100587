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

#include "zhff/evaluator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>

#include "zhff/errors.hpp"

namespace zhff {

// ------------------------------------------------------------- ExactTensor

ExactTensor::ExactTensor(FieldPtr field, std::uint32_t n_in, std::uint32_t n_out)
    : field_(std::move(field)), n_in_(n_in), n_out_(n_out) {
    const std::size_t q = field_->q();
    for (std::uint32_t k = 0; k < n_out; ++k) rows_ *= q;
    for (std::uint32_t k = 0; k < n_in; ++k) cols_ *= q;
    entries_.assign(rows_ * cols_, Scalar::zero(ring()));
}

std::size_t ExactTensor::tuple_index(std::span<const std::uint32_t> values) const {
    std::size_t idx = 0;
    for (auto v : values) idx = idx * field_->q() + v;
    return idx;
}

std::vector<std::uint32_t> ExactTensor::tuple_of(std::size_t index, std::uint32_t wires) const {
    std::vector<std::uint32_t> out(wires);
    for (std::uint32_t k = wires; k-- > 0;) {
        out[k] = static_cast<std::uint32_t>(index % field_->q());
        index /= field_->q();
    }
    return out;
}

namespace {

// Raised by the machine-integer arithmetic; the caller retries exactly.
struct OverflowFallback {};

inline std::int64_t add_chk(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_add_overflow(x, y, &r)) throw OverflowFallback{};
    return r;
}

inline std::int64_t mul_chk(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_mul_overflow(x, y, &r)) throw OverflowFallback{};
    return r;
}

// (a + b sqrt(q)) with a, b in Z[w], stored in machine integers.
template <std::uint32_t P>
struct FastElem {
    std::array<std::int64_t, P - 1> a{};
    std::array<std::int64_t, P - 1> b{};
};

template <std::uint32_t P>
class FastArith {
   public:
    using E = FastElem<P>;
    static constexpr bool kExact = true;

    explicit FastArith(const RingContext& ctx) : ctx_(ctx), q_(static_cast<std::int64_t>(ctx.q)) {}

    E zero() const { return {}; }
    E one() const {
        E e;
        e.a[0] = 1;
        return e;
    }
    static bool is_zero(const E& x) {
        for (auto v : x.a) {
            if (v) return false;
        }
        for (auto v : x.b) {
            if (v) return false;
        }
        return true;
    }
    void add_to(E& acc, const E& x) const {
        for (std::uint32_t i = 0; i + 1 < P; ++i) {
            acc.a[i] = add_chk(acc.a[i], x.a[i]);
            acc.b[i] = add_chk(acc.b[i], x.b[i]);
        }
    }
    E mul(const E& x, const E& y) const {
        E r;
        const bool xb = any(x.b), yb = any(y.b);
        r.a = cyclo(x.a, y.a);
        if (xb && yb) {
            const auto bb = cyclo(x.b, y.b);
            for (std::uint32_t i = 0; i + 1 < P; ++i) r.a[i] = add_chk(r.a[i], mul_chk(q_, bb[i]));
        }
        if (yb) r.b = cyclo(x.a, y.b);
        if (xb) {
            const auto t = cyclo(x.b, y.a);
            for (std::uint32_t i = 0; i + 1 < P; ++i) r.b[i] = add_chk(r.b[i], t[i]);
        }
        return r;
    }
    bool divisible_q(const E& x) const {
        for (std::uint32_t i = 0; i + 1 < P; ++i) {
            if (x.a[i] % q_ || x.b[i] % q_) return false;
        }
        return true;
    }
    E div_q(const E& x) const {
        E r;
        for (std::uint32_t i = 0; i + 1 < P; ++i) {
            r.a[i] = x.a[i] / q_;
            r.b[i] = x.b[i] / q_;
        }
        return r;
    }
    E from(const CycloInt& a, const CycloInt& b) const {
        E r;
        for (std::uint32_t i = 0; i + 1 < P; ++i) {
            r.a[i] = narrow(a.coords()[i]);
            r.b[i] = narrow(b.coords()[i]);
        }
        return r;
    }
    Scalar to_scalar(const E& x) const {
        std::vector<BigInt> a(x.a.begin(), x.a.end()), b(x.b.begin(), x.b.end());
        return Scalar(ctx_, CycloInt::from_coords(P, std::move(a)), CycloInt::from_coords(P, std::move(b)), 0);
    }

   private:
    static bool any(const std::array<std::int64_t, P - 1>& v) {
        for (auto c : v) {
            if (c) return true;
        }
        return false;
    }
    static std::int64_t narrow(const BigInt& v) {
        if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
            throw OverflowFallback{};
        }
        return v.convert_to<std::int64_t>();
    }
    static std::array<std::int64_t, P - 1> cyclo(const std::array<std::int64_t, P - 1>& x,
                                                 const std::array<std::int64_t, P - 1>& y) {
        std::array<std::int64_t, P> pw{};
        for (std::uint32_t i = 0; i + 1 < P; ++i) {
            if (!x[i]) continue;
            for (std::uint32_t j = 0; j + 1 < P; ++j) {
                if (!y[j]) continue;
                const std::uint32_t e = (i + j) % P;
                pw[e] = add_chk(pw[e], mul_chk(x[i], y[j]));
            }
        }
        std::array<std::int64_t, P - 1> r{};
        for (std::uint32_t e = 0; e + 1 < P; ++e) r[e] = add_chk(pw[e], -pw[P - 1]);
        return r;
    }

    RingContext ctx_;
    std::int64_t q_;
};

struct BigElem {
    CycloInt a, b;
};

class BigArith {
   public:
    using E = BigElem;
    static constexpr bool kExact = true;

    explicit BigArith(const RingContext& ctx) : ctx_(ctx), q_(ctx.q) {}

    E zero() const { return {CycloInt(ctx_.p), CycloInt(ctx_.p)}; }
    E one() const { return {CycloInt::integer(ctx_.p, 1), CycloInt(ctx_.p)}; }
    static bool is_zero(const E& x) { return x.a.is_zero() && x.b.is_zero(); }
    void add_to(E& acc, const E& x) const {
        acc.a += x.a;
        acc.b += x.b;
    }
    E mul(const E& x, const E& y) const {
        const bool xb = !x.b.is_zero(), yb = !y.b.is_zero();
        E r{x.a * y.a, CycloInt(ctx_.p)};
        if (xb && yb) r.a += (x.b * y.b) * q_;
        if (yb) r.b += x.a * y.b;
        if (xb) r.b += x.b * y.a;
        return r;
    }
    bool divisible_q(const E& x) const { return x.a.divisible_by(q_) && x.b.divisible_by(q_); }
    E div_q(const E& x) const { return {x.a.divided_exact(q_), x.b.divided_exact(q_)}; }
    E from(const CycloInt& a, const CycloInt& b) const { return {a, b}; }
    Scalar to_scalar(const E& x) const { return Scalar(ctx_, x.a, x.b, 0); }

   private:
    RingContext ctx_;
    BigInt q_;
};

class ComplexArith {
   public:
    using E = std::complex<double>;
    static constexpr bool kExact = false;

    explicit ComplexArith(const RingContext& ctx) : sqrtq_(std::sqrt(static_cast<double>(ctx.q))) {}

    E zero() const { return 0.0; }
    E one() const { return 1.0; }
    static bool is_zero(const E& x) { return x == 0.0; }
    void add_to(E& acc, const E& x) const { acc += x; }
    E mul(const E& x, const E& y) const { return x * y; }
    bool divisible_q(const E&) const { return false; }
    E div_q(const E& x) const { return x; }
    E from(const CycloInt& a, const CycloInt& b) const { return a.to_complex() + sqrtq_ * b.to_complex(); }

   private:
    double sqrtq_;
};

template <class A>
struct Factor {
    std::vector<std::uint32_t> vars;  // sorted, distinct; vars[0] is most significant
    std::vector<typename A::E> table;
    std::int64_t exp = 0;              // multiplies the table by q^(exp/2)
};

// Variables of the factor graph and the factors before any arithmetic.
struct Skeleton {
    std::uint32_t n_vars = 0;
    std::vector<std::uint32_t> axis_var;  // outputs, then inputs
    std::vector<bool> open;
    std::vector<bool> has_ports;
    std::int64_t free_exp = 0;  // q per Z(0,0) node
    struct Item {
        std::uint32_t node;
        std::vector<std::uint32_t> in_vars, out_vars;
    };
    std::vector<Item> items;  // H and kappa nodes
};

Skeleton skeleton(const Diagram& d) {
    std::map<PortRef, std::uint32_t> index;
    auto id_of = [&](const PortRef& p) {
        auto [it, inserted] = index.emplace(p, static_cast<std::uint32_t>(index.size()));
        return it->second;
    };
    for (std::uint32_t k = 0; k < d.n_outputs(); ++k) id_of(PortRef::output(k));
    for (std::uint32_t k = 0; k < d.n_inputs(); ++k) id_of(PortRef::input(k));
    Skeleton s;
    for (const auto& [id, n] : d.nodes()) {
        if (n.kind == NodeKind::Z && n.degree() == 0) s.free_exp += 2;
        for (const auto& p : d.ports(id)) id_of(p);
    }
    std::vector<std::uint32_t> parent(index.size());
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](std::uint32_t x, std::uint32_t y) {
        x = find(x);
        y = find(y);
        if (x != y) parent[std::max(x, y)] = std::min(x, y);
    };
    for (const auto& [a, b] : d.edges()) unite(index.at(a), index.at(b));
    for (const auto& [id, n] : d.nodes()) {
        if (n.kind != NodeKind::Z || n.degree() < 2) continue;
        const auto ports = d.ports(id);
        for (std::size_t k = 1; k < ports.size(); ++k) unite(index.at(ports[0]), index.at(ports[k]));
    }
    std::map<std::uint32_t, std::uint32_t> var_of_root;
    std::vector<std::uint32_t> var(index.size());
    for (std::uint32_t i = 0; i < index.size(); ++i) {
        auto [it, inserted] = var_of_root.emplace(find(i), static_cast<std::uint32_t>(var_of_root.size()));
        var[i] = it->second;
    }
    s.n_vars = static_cast<std::uint32_t>(var_of_root.size());
    s.open.assign(s.n_vars, false);
    s.has_ports.assign(s.n_vars, true);
    for (std::uint32_t k = 0; k < d.n_outputs(); ++k) s.axis_var.push_back(var[index.at(PortRef::output(k))]);
    for (std::uint32_t k = 0; k < d.n_inputs(); ++k) s.axis_var.push_back(var[index.at(PortRef::input(k))]);
    for (auto v : s.axis_var) s.open[v] = true;
    for (const auto& [id, n] : d.nodes()) {
        if (n.kind == NodeKind::Z) continue;
        Skeleton::Item item{id, {}, {}};
        for (std::uint32_t k = 0; k < n.n_in; ++k) item.in_vars.push_back(var[index.at(PortRef::in(id, k))]);
        for (std::uint32_t k = 0; k < n.n_out; ++k) item.out_vars.push_back(var[index.at(PortRef::out(id, k))]);
        s.items.push_back(std::move(item));
    }
    return s;
}

std::size_t checked_volume(std::uint32_t q, std::size_t arity) {
    std::size_t v = 1;
    for (std::size_t k = 0; k < arity; ++k) {
        v *= q;
        if (v > (std::size_t{1} << 31)) throw BadParams("contraction intermediate exceeds 2^31 entries");
    }
    return v;
}

template <class A>
class Contractor {
   public:
    using E = typename A::E;

    Contractor(const Diagram& d, const A& arith) : d_(d), field_(*d.field()), q_(d.field()->q()), A_(arith) {}

    // The final factor over the open variables, plus the table of axis variables.
    Factor<A> run(const Skeleton& s, ContractionOrder order) {
        std::vector<Factor<A>> factors;
        for (const auto& item : s.items) factors.push_back(node_factor(item));

        std::vector<std::set<std::size_t>> var_factors(s.n_vars);
        std::vector<bool> alive(factors.size(), true);
        for (std::size_t f = 0; f < factors.size(); ++f) {
            for (auto v : factors[f].vars) var_factors[v].insert(f);
        }
        std::int64_t exp = s.free_exp;
        std::vector<bool> done(s.n_vars, false);
        for (std::uint32_t v = 0; v < s.n_vars; ++v) {
            if (!s.open[v] && var_factors[v].empty()) {
                exp += 2;
                done[v] = true;
            }
        }

        auto union_of = [&](std::uint32_t v) {
            std::vector<std::uint32_t> u;
            for (auto f : var_factors[v]) u.insert(u.end(), factors[f].vars.begin(), factors[f].vars.end());
            std::sort(u.begin(), u.end());
            u.erase(std::unique(u.begin(), u.end()), u.end());
            return u;
        };
        std::vector<std::size_t> cost(s.n_vars, 0);
        for (std::uint32_t v = 0; v < s.n_vars; ++v) {
            if (!done[v] && !s.open[v]) cost[v] = union_of(v).size();
        }

        for (;;) {
            std::optional<std::uint32_t> pick;
            for (std::uint32_t v = 0; v < s.n_vars; ++v) {
                if (done[v] || s.open[v]) continue;
                if (order == ContractionOrder::Sequential) {
                    pick = v;
                    break;
                }
                if (!pick || cost[v] < cost[*pick]) pick = v;
            }
            if (!pick) break;
            const std::uint32_t v = *pick;
            done[v] = true;
            std::vector<const Factor<A>*> group;
            const std::vector<std::size_t> members(var_factors[v].begin(), var_factors[v].end());
            for (auto f : members) group.push_back(&factors[f]);
            Factor<A> merged = product_sum(group, v);
            const auto touched = union_of(v);
            for (auto f : members) {
                alive[f] = false;
                for (auto u : factors[f].vars) var_factors[u].erase(f);
                factors[f].table.clear();
                factors[f].table.shrink_to_fit();
            }
            if (merged.vars.empty()) {
                exp += merged.exp;
                scalar_ = A_.mul(scalar_, merged.table[0]);
            } else {
                const std::size_t id = factors.size();
                for (auto u : merged.vars) var_factors[u].insert(id);
                factors.push_back(std::move(merged));
                alive.push_back(true);
            }
            if (order == ContractionOrder::Greedy) {
                for (auto u : touched) {
                    if (!done[u] && !s.open[u]) cost[u] = union_of(u).size();
                }
            }
        }

        std::vector<const Factor<A>*> rest;
        for (std::size_t f = 0; f < factors.size(); ++f) {
            if (alive[f]) rest.push_back(&factors[f]);
        }
        // Open variables touched by no factor still need an axis.
        Factor<A> unit;
        for (std::uint32_t v = 0; v < s.n_vars; ++v) {
            if (s.open[v] && var_factors[v].empty()) unit.vars.push_back(v);
        }
        if (!unit.vars.empty()) {
            unit.table.assign(checked_volume(q_, unit.vars.size()), A_.one());
            rest.push_back(&unit);
        }
        Factor<A> final = product_sum(rest, std::nullopt);
        final.exp += exp;
        for (auto& e : final.table) e = A_.mul(e, scalar_);
        return final;
    }

   private:
    Factor<A> node_factor(const Skeleton::Item& item) {
        const Node& n = d_.node(item.node);
        Factor<A> f;
        f.vars = item.in_vars;
        f.vars.insert(f.vars.end(), item.out_vars.begin(), item.out_vars.end());
        std::sort(f.vars.begin(), f.vars.end());
        f.vars.erase(std::unique(f.vars.begin(), f.vars.end()), f.vars.end());
        const std::size_t volume = checked_volume(q_, f.vars.size());
        f.table.assign(volume, A_.zero());
        if (n.kind == NodeKind::Kappa) {
            f.exp = 1;
            f.table[field_.kappa()] = A_.one();
            return f;
        }
        const RingContext ctx = d_.ring();
        const Scalar r = n.phase ? *n.phase : omega_pow(ctx, 1);
        std::vector<Scalar> powers;
        std::uint32_t kmax = 0;
        for (std::uint32_t e = 0; e < field_.p(); ++e) {
            powers.push_back(r.pow(e));
            kmax = std::max(kmax, powers.back().k());
        }
        std::vector<E> pw;
        for (auto& s : powers) {
            const Scalar num = s * sqrtq_pow(ctx, 2 * static_cast<std::int64_t>(kmax));
            pw.push_back(A_.from(num.a(), num.b()));
        }
        f.exp = -1 - 2 * static_cast<std::int64_t>(kmax);

        std::vector<std::size_t> in_pos, out_pos;
        for (auto v : item.in_vars) in_pos.push_back(std::lower_bound(f.vars.begin(), f.vars.end(), v) - f.vars.begin());
        for (auto v : item.out_vars) {
            out_pos.push_back(std::lower_bound(f.vars.begin(), f.vars.end(), v) - f.vars.begin());
        }
        std::vector<std::uint32_t> digits(f.vars.size(), 0);
        for (std::size_t idx = 0; idx < volume; ++idx) {
            std::size_t rem = idx;
            for (std::size_t k = f.vars.size(); k-- > 0;) {
                digits[k] = static_cast<std::uint32_t>(rem % q_);
                rem /= q_;
            }
            std::uint32_t pin = 1, pout = 1;
            for (auto k : in_pos) pin = field_.mul(pin, digits[k]);
            for (auto k : out_pos) pout = field_.mul(pout, digits[k]);
            f.table[idx] = pw[field_.bilinear(pout, pin)];
        }
        return f;
    }

    // Multiplies the factors and sums out `elim` when given.
    Factor<A> product_sum(const std::vector<const Factor<A>*>& group, std::optional<std::uint32_t> elim) {
        Factor<A> out;
        std::vector<std::uint32_t> uni;
        for (auto* f : group) {
            uni.insert(uni.end(), f->vars.begin(), f->vars.end());
            out.exp += f->exp;
        }
        std::sort(uni.begin(), uni.end());
        uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
        if (elim) std::erase(uni, *elim);
        out.vars = uni;
        // Loop order: result variables, then the eliminated one fastest.
        std::vector<std::uint32_t> loop = uni;
        if (elim) loop.push_back(*elim);
        const std::size_t nl = loop.size();
        const std::size_t volume = checked_volume(q_, nl);
        const std::size_t inner = elim ? q_ : 1;
        out.table.assign(volume / inner, A_.zero());

        const std::size_t nf = group.size();
        std::vector<std::vector<std::size_t>> stride(nf, std::vector<std::size_t>(nl, 0));
        for (std::size_t f = 0; f < nf; ++f) {
            const auto& vars = group[f]->vars;
            std::size_t s = 1;
            for (std::size_t k = vars.size(); k-- > 0;) {
                const auto pos = std::find(loop.begin(), loop.end(), vars[k]) - loop.begin();
                stride[f][pos] = s;
                s *= q_;
            }
        }
        std::vector<std::size_t> offset(nf, 0);
        std::vector<std::uint32_t> digit(nl, 0);
        for (std::size_t idx = 0; idx < volume; ++idx) {
            bool zero = false;
            E prod = A_.one();
            for (std::size_t f = 0; f < nf; ++f) {
                const E& x = group[f]->table[offset[f]];
                if (A::is_zero(x)) {
                    zero = true;
                    break;
                }
                prod = f == 0 ? x : A_.mul(prod, x);
            }
            if (!zero) A_.add_to(out.table[idx / inner], prod);
            for (std::size_t k = nl; k-- > 0;) {
                if (++digit[k] < q_) {
                    for (std::size_t f = 0; f < nf; ++f) offset[f] += stride[f][k];
                    break;
                }
                digit[k] = 0;
                for (std::size_t f = 0; f < nf; ++f) offset[f] -= stride[f][k] * (q_ - 1);
            }
        }
        if constexpr (A::kExact) normalize(out);
        return out;
    }

    void normalize(Factor<A>& f) const {
        bool all_zero = true;
        for (const auto& e : f.table) {
            if (!A::is_zero(e)) {
                all_zero = false;
                break;
            }
        }
        if (all_zero) {
            f.exp = 0;
            return;
        }
        for (;;) {
            for (const auto& e : f.table) {
                if (!A_.divisible_q(e)) return;
            }
            for (auto& e : f.table) e = A_.div_q(e);
            f.exp += 2;
        }
    }

    const Diagram& d_;
    const Field& field_;
    std::uint32_t q_;
    const A& A_;
    E scalar_ = A_.one();
};

// Applies `emit(flat, element)` to every nonzero entry of the result.
template <class A, class Emit>
std::int64_t contract_with(const Diagram& d, const A& arith, ContractionOrder order, Emit emit) {
    d.validate();
    const Skeleton s = skeleton(d);
    Contractor<A> c(d, arith);
    Factor<A> final = c.run(s, order);
    const std::uint32_t q = d.field()->q();
    const std::size_t axes = s.axis_var.size();
    const std::size_t volume = checked_volume(q, axes);
    std::vector<std::size_t> pos(axes);
    for (std::size_t k = 0; k < axes; ++k) {
        pos[k] = std::lower_bound(final.vars.begin(), final.vars.end(), s.axis_var[k]) - final.vars.begin();
    }
    std::vector<std::size_t> var_stride(final.vars.size(), 1);
    for (std::size_t k = final.vars.size(); k-- > 1;) var_stride[k - 1] = var_stride[k] * q;
    std::vector<std::int64_t> value(final.vars.size());
    for (std::size_t flat = 0; flat < volume; ++flat) {
        std::fill(value.begin(), value.end(), -1);
        std::size_t rem = flat;
        bool consistent = true;
        std::size_t off = 0;
        for (std::size_t k = axes; k-- > 0;) {
            const std::int64_t digit = static_cast<std::int64_t>(rem % q);
            rem /= q;
            std::int64_t& slot = value[pos[k]];
            if (slot < 0) {
                slot = digit;
                off += var_stride[pos[k]] * static_cast<std::size_t>(digit);
            } else if (slot != digit) {
                consistent = false;
                break;
            }
        }
        if (!consistent) continue;
        const auto& e = final.table[off];
        if (!A::is_zero(e)) emit(flat, e);
    }
    return final.exp;
}

template <std::uint32_t P>
bool try_fast(const Diagram& d, ContractionOrder order, ExactTensor& out) {
    const RingContext ctx = d.ring();
    FastArith<P> arith(ctx);
    std::vector<std::pair<std::size_t, FastElem<P>>> entries;
    std::int64_t exp = 0;
    try {
        exp = contract_with(d, arith, order, [&](std::size_t flat, const FastElem<P>& e) { entries.emplace_back(flat, e); });
    } catch (const OverflowFallback&) {
        return false;
    }
    const Scalar mult = sqrtq_pow(ctx, exp) * d.scalar();
    for (const auto& [flat, e] : entries) out[flat] = arith.to_scalar(e) * mult;
    return true;
}

}  // namespace

ExactTensor contract(const Diagram& d, ContractionOrder order) {
    ExactTensor out(d.field(), d.n_inputs(), d.n_outputs());
    const std::uint32_t p = d.field()->p();
    if (p == 2 && try_fast<2>(d, order, out)) return out;
    if (p == 3 && try_fast<3>(d, order, out)) return out;
    if (p == 5 && try_fast<5>(d, order, out)) return out;
    if (p == 7 && try_fast<7>(d, order, out)) return out;
    const RingContext ctx = d.ring();
    BigArith arith(ctx);
    std::vector<std::pair<std::size_t, BigElem>> entries;
    const std::int64_t exp =
        contract_with(d, arith, order, [&](std::size_t flat, const BigElem& e) { entries.emplace_back(flat, e); });
    const Scalar mult = sqrtq_pow(ctx, exp) * d.scalar();
    for (const auto& [flat, e] : entries) out[flat] = arith.to_scalar(e) * mult;
    return out;
}

NumericTensor contract_numeric(const Diagram& d, ContractionOrder order) {
    NumericTensor out{d.field()->q(), d.n_inputs(), d.n_outputs(), {}};
    out.entries.assign(checked_volume(out.q, out.n_in + out.n_out), 0.0);
    ComplexArith arith(d.ring());
    const std::int64_t exp = contract_with(d, arith, order, [&](std::size_t flat, const std::complex<double>& e) {
        out.entries[flat] = e;
    });
    const std::complex<double> mult =
        std::pow(std::sqrt(static_cast<double>(out.q)), static_cast<double>(exp)) * d.scalar().to_complex();
    for (auto& e : out.entries) e *= mult;
    return out;
}

NumericTensor to_numeric(const ExactTensor& t) {
    NumericTensor out{t.field()->q(), t.n_in(), t.n_out(), {}};
    out.entries.reserve(t.size());
    for (const auto& e : t.entries()) out.entries.push_back(e.to_complex());
    return out;
}

double max_abs_diff(const NumericTensor& a, const NumericTensor& b) {
    if (a.entries.size() != b.entries.size()) throw ArityMismatch("tensor shapes differ");
    double m = 0.0;
    for (std::size_t k = 0; k < a.entries.size(); ++k) m = std::max(m, std::abs(a.entries[k] - b.entries[k]));
    return m;
}

ExactTensor generator_tensor(const Node& node, const FieldPtr& field) {
    const RingContext ctx = RingContext::of(*field);
    ExactTensor t(field, node.n_in, node.n_out);
    const std::uint32_t q = field->q();
    switch (node.kind) {
        case NodeKind::Z:
            for (std::uint32_t i = 0; i < q; ++i) {
                std::vector<std::uint32_t> outs(node.n_out, i), ins(node.n_in, i);
                t.at(t.tuple_index(outs), t.tuple_index(ins)) = Scalar::one(ctx);
            }
            if (node.degree() == 0) t[0] = Scalar::integer(ctx, q);
            break;
        case NodeKind::Kappa:
            t[field->kappa()] = sqrtq_pow(ctx, 1);
            break;
        case NodeKind::H: {
            const Scalar r = node.phase ? *node.phase : omega_pow(ctx, 1);
            const Scalar norm = sqrtq_pow(ctx, -1);
            for (std::size_t row = 0; row < t.rows(); ++row) {
                std::uint32_t pout = 1;
                for (auto v : t.tuple_of(row, node.n_out)) pout = field->mul(pout, v);
                for (std::size_t col = 0; col < t.cols(); ++col) {
                    std::uint32_t pin = 1;
                    for (auto v : t.tuple_of(col, node.n_in)) pin = field->mul(pin, v);
                    t.at(row, col) = r.pow(field->bilinear(pout, pin)) * norm;
                }
            }
            break;
        }
    }
    return t;
}

bool equal_tensors(const ExactTensor& a, const ExactTensor& b) {
    if (!a.field()->same_as(*b.field())) throw FieldMismatch("tensors over different fields");
    if (a.n_in() != b.n_in() || a.n_out() != b.n_out()) throw ArityMismatch("tensor arities differ");
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!equal(a[k], b[k])) return false;
    }
    return true;
}

bool equal_diagrams(const Diagram& d1, const Diagram& d2) {
    if (d1.n_inputs() != d2.n_inputs() || d1.n_outputs() != d2.n_outputs()) {
        throw ArityMismatch("diagram arities differ");
    }
    return equal_tensors(contract(d1), contract(d2));
}

ExactTensor matmul(const ExactTensor& a, const ExactTensor& b) {
    if (!a.field()->same_as(*b.field())) throw FieldMismatch("tensors over different fields");
    if (a.n_in() != b.n_out()) throw ArityMismatch("matrix product shapes do not match");
    ExactTensor out(a.field(), b.n_in(), a.n_out());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Scalar& x = a.at(i, k);
            if (x.is_zero()) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                const Scalar& y = b.at(k, j);
                if (!y.is_zero()) out.at(i, j) += x * y;
            }
        }
    }
    return out;
}

ExactTensor adjoint(const ExactTensor& t) {
    ExactTensor out(t.field(), t.n_out(), t.n_in());
    for (std::size_t i = 0; i < t.rows(); ++i) {
        for (std::size_t j = 0; j < t.cols(); ++j) out.at(j, i) = conj(t.at(i, j));
    }
    return out;
}

bool is_unitary(const ExactTensor& t) {
    if (t.n_in() != t.n_out()) throw ArityMismatch("unitarity needs equal input and output counts");
    const ExactTensor g = matmul(adjoint(t), t);
    for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = 0; j < g.cols(); ++j) {
            const Scalar& e = g.at(i, j);
            if (i == j ? !equal(e, Scalar::one(g.ring())) : !e.is_zero()) return false;
        }
    }
    return true;
}

bool is_unitary(const Diagram& d) {
    if (d.n_inputs() != d.n_outputs()) throw ArityMismatch("unitarity needs equal input and output counts");
    return is_unitary(contract(d));
}

Scalar scalar_value(const Diagram& d) {
    if (d.n_inputs() != 0 || d.n_outputs() != 0) throw ArityMismatch("scalar_value needs a closed diagram");
    return contract(d)[0];
}

Diagram normalize_scalars(const Diagram& d) {
    Diagram out = d;
    std::set<std::uint32_t> seen;
    for (const auto& [start, unused] : d.nodes()) {
        if (seen.count(start)) continue;
        std::vector<std::uint32_t> component;
        bool open = false;
        std::deque<std::uint32_t> queue{start};
        seen.insert(start);
        while (!queue.empty()) {
            const std::uint32_t id = queue.front();
            queue.pop_front();
            component.push_back(id);
            for (const auto& port : d.ports(id)) {
                const auto other = d.partner(port);
                if (!other) continue;
                if (other->boundary) {
                    open = true;
                } else if (seen.insert(other->node).second) {
                    queue.push_back(other->node);
                }
            }
        }
        if (open) continue;
        Diagram closed(d.field());
        std::map<std::uint32_t, std::uint32_t> remap;
        for (auto id : component) remap[id] = closed.add_node(d.node(id));
        for (auto id : component) {
            for (const auto& port : d.ports(id)) {
                const PortRef other = *d.partner(port);
                if (port < other) {
                    PortRef a = port, b = other;
                    a.node = remap.at(a.node);
                    b.node = remap.at(b.node);
                    closed.connect(a, b);
                }
            }
        }
        out.multiply_scalar(scalar_value(closed));
        for (auto id : component) out.remove_node(id);
    }
    return out;
}

nlohmann::json to_json(const ExactTensor& t) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : t.entries()) entries.push_back(e);
    return {{"field", t.field()->spec()},
            {"inputs", t.n_in()},
            {"outputs", t.n_out()},
            {"shape", {t.rows(), t.cols()}},
            {"entries", entries}};
}

nlohmann::json to_json(const NumericTensor& t) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : t.entries) entries.push_back({e.real(), e.imag()});
    return {{"q", t.q}, {"inputs", t.n_in}, {"outputs", t.n_out}, {"entries", entries}};
}

ExactTensor tensor_from_json(const nlohmann::json& j, FieldPtr field) {
    try {
        if (j.contains("field")) {
            FieldPtr named = Field::make(j.at("field").get<FieldSpec>());
            if (field && !field->same_as(*named)) throw FieldMismatch("tensor names a different field");
            if (!field) field = named;
        }
        if (!field) throw ParseError("tensor document names no field");
        ExactTensor t(field, j.at("inputs").get<std::uint32_t>(), j.at("outputs").get<std::uint32_t>());
        const auto& entries = j.at("entries");
        if (!entries.is_array() || entries.size() != t.size()) {
            throw ParseError("expected " + std::to_string(t.size()) + " tensor entries");
        }
        for (std::size_t k = 0; k < t.size(); ++k) {
            const auto& e = entries[k];
            if (e.is_number_integer() || e.is_string()) {
                t[k] = Scalar::integer(t.ring(), bigint_from_json(e));
            } else {
                t[k] = scalar_from_json(e, t.ring());
            }
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed tensor: ") + e.what());
    }
}

}  // namespace zhff
