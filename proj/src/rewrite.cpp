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

#include "zhff/rewrite.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <thread>

#include "zhff/errors.hpp"
#include "zhff/evaluator.hpp"

namespace zhff {

namespace {

const std::vector<std::pair<RuleId, std::string>> kNames = {
    {RuleId::zs, "zs"},   {RuleId::id, "id"},   {RuleId::ch, "ch"},
    {RuleId::hs, "hs"},   {RuleId::spl, "spl"}, {RuleId::cp, "cp"},
    {RuleId::ba1, "ba1"}, {RuleId::ba2, "ba2"}, {RuleId::pm, "pm"},
    {RuleId::derived_neg, "derived_neg"}, {RuleId::derived_cpx, "derived_cpx"},
    {RuleId::derived_h4, "derived_h4"},
};

Diagram tensor_power(const FieldPtr& f, const Diagram& d, std::uint32_t count) {
    Diagram out = identity(f, 0);
    for (std::uint32_t k = 0; k < count; ++k) out = tensor_product(out, d);
    return out;
}

Diagram scaled(Diagram d, const Scalar& s) {
    d.multiply_scalar(s);
    return d;
}

// Fan-out of n inputs to m outputs: every input copied m ways by `copy`,
// then the r-th copies of all inputs combined by `combine`.
Diagram bipartite(const FieldPtr& f, std::uint32_t m, std::uint32_t n, const Diagram& copy, const Diagram& combine) {
    DiagramBuilder b(f);
    std::vector<std::vector<PortRef>> copies;
    for (const auto& in : b.inputs(n)) copies.push_back(b.embed(copy, std::span<const PortRef>(&in, 1)));
    for (std::uint32_t r = 0; r < m; ++r) {
        std::vector<PortRef> ends;
        for (std::uint32_t i = 0; i < n; ++i) ends.push_back(copies[i][r]);
        b.outputs(b.embed(combine, ends));
    }
    return std::move(b).build();
}

Diagram multiply_n(const FieldPtr& f, std::uint32_t n) { return compose(h_dagger(f, 1, 1), h_box(f, 1, n)); }

Scalar effective_phase(const Node& n, const RingContext& ctx) { return n.phase ? *n.phase : omega_pow(ctx, 1); }

bool same_generator(const Node& a, const Node& b, const RingContext& ctx) {
    if (a.kind != b.kind || a.n_in != b.n_in || a.n_out != b.n_out) return false;
    if (a.kind != NodeKind::H) return true;
    return equal(effective_phase(a, ctx), effective_phase(b, ctx));
}

// Number of wires between side `sa` of node a and side `sb` of node b.
using WireCounts = std::map<std::tuple<std::uint32_t, Side, std::uint32_t, Side>, std::uint32_t>;

WireCounts wire_counts(const Diagram& d) {
    WireCounts c;
    for (const auto& [x, y] : d.edges()) {
        if (x.boundary || y.boundary) continue;
        auto key = std::make_tuple(x.node, x.side, y.node, y.side);
        auto rev = std::make_tuple(y.node, y.side, x.node, x.side);
        ++c[key];
        if (rev != key) ++c[rev];
    }
    return c;
}

std::uint32_t count_of(const WireCounts& c, std::uint32_t a, Side sa, std::uint32_t b, Side sb) {
    auto it = c.find({a, sa, b, sb});
    return it == c.end() ? 0 : it->second;
}

class Matcher {
   public:
    Matcher(const Diagram& host, const Diagram& pattern)
        : host_(host), pat_(pattern), ctx_(host.ring()), hc_(wire_counts(host)), pc_(wire_counts(pattern)) {
        for (std::uint32_t k = 0; k < pattern.n_inputs(); ++k) check_boundary(PortRef::input(k));
        for (std::uint32_t k = 0; k < pattern.n_outputs(); ++k) check_boundary(PortRef::output(k));
        order_nodes();
    }

    std::vector<Embedding> run() {
        if (!order_.empty()) search(0);
        return std::move(found_);
    }

   private:
    void check_boundary(const PortRef& b) const {
        const auto p = pat_.partner(b);
        if (!p || p->boundary) throw BadParams("pattern boundary wires must end on nodes");
    }

    // Breadth-first over pattern wires so that most nodes have a placed neighbour.
    void order_nodes() {
        std::set<std::uint32_t> seen;
        for (const auto& [start, n] : pat_.nodes()) {
            if (seen.count(start)) continue;
            std::vector<std::uint32_t> queue{start};
            seen.insert(start);
            for (std::size_t k = 0; k < queue.size(); ++k) {
                const std::uint32_t u = queue[k];
                order_.push_back(u);
                for (const auto& port : pat_.ports(u)) {
                    const auto other = pat_.partner(port);
                    if (other && !other->boundary && !seen.count(other->node)) {
                        seen.insert(other->node);
                        queue.push_back(other->node);
                    }
                }
            }
        }
    }

    std::vector<std::uint32_t> candidates(std::uint32_t u) const {
        for (const auto& port : pat_.ports(u)) {
            const auto other = pat_.partner(port);
            if (!other || other->boundary) continue;
            auto it = map_.find(other->node);
            if (it == map_.end()) continue;
            std::set<std::uint32_t> out;
            for (const auto& hp : host_.ports(it->second)) {
                const auto hq = host_.partner(hp);
                if (hq && !hq->boundary) out.insert(hq->node);
            }
            return {out.begin(), out.end()};
        }
        std::vector<std::uint32_t> all;
        for (const auto& [id, n] : host_.nodes()) all.push_back(id);
        return all;
    }

    bool consistent(std::uint32_t u, std::uint32_t h) const {
        if (used_.count(h)) return false;
        if (!same_generator(pat_.node(u), host_.node(h), ctx_)) return false;
        for (const auto& [v, hv] : map_) {
            for (Side su : {Side::In, Side::Out}) {
                for (Side sv : {Side::In, Side::Out}) {
                    if (count_of(pc_, u, su, v, sv) != count_of(hc_, h, su, hv, sv)) return false;
                }
            }
        }
        for (Side su : {Side::In, Side::Out}) {
            for (Side sv : {Side::In, Side::Out}) {
                if (count_of(pc_, u, su, u, sv) != count_of(hc_, h, su, h, sv)) return false;
            }
        }
        return true;
    }

    void search(std::size_t depth) {
        if (depth == order_.size()) {
            found_.push_back(build_embedding());
            return;
        }
        const std::uint32_t u = order_[depth];
        for (auto h : candidates(u)) {
            if (!consistent(u, h)) continue;
            map_[u] = h;
            used_.insert(h);
            search(depth + 1);
            map_.erase(u);
            used_.erase(h);
        }
    }

    // The node map fixes wire counts between every pair of sides, so ports
    // can be paired off group by group.
    Embedding build_embedding() const {
        Embedding e;
        e.nodes = map_;
        std::set<PortRef> host_taken;
        auto take = [&](std::uint32_t h, Side side, auto&& accept) -> PortRef {
            for (const auto& hp : host_.ports(h)) {
                if (hp.side != side || host_taken.count(hp)) continue;
                if (!accept(hp)) continue;
                host_taken.insert(hp);
                return hp;
            }
            throw InvalidEmbedding("port pairing failed");
        };
        for (const auto& [a, b] : pat_.edges()) {
            if (a.boundary || b.boundary) continue;
            const std::uint32_t ha = map_.at(a.node), hb = map_.at(b.node);
            const PortRef x = take(ha, a.side, [&](const PortRef& hp) {
                const auto other = host_.partner(hp);
                return other && !other->boundary && other->node == hb && other->side == b.side &&
                       !host_taken.count(*other) && *other != hp;
            });
            const PortRef y = *host_.partner(x);
            host_taken.insert(y);
            e.ports[a] = x;
            e.ports[b] = y;
        }
        auto leads_out = [&](const PortRef& hp) {
            const auto other = host_.partner(hp);
            return other && (other->boundary || !used_.count(other->node));
        };
        for (std::uint32_t k = 0; k < pat_.n_inputs(); ++k) {
            const PortRef p = *pat_.partner(PortRef::input(k));
            const PortRef x = take(map_.at(p.node), p.side, leads_out);
            e.ports[p] = x;
            e.cut_inputs.push_back(*host_.partner(x));
        }
        for (std::uint32_t k = 0; k < pat_.n_outputs(); ++k) {
            const PortRef p = *pat_.partner(PortRef::output(k));
            const PortRef x = take(map_.at(p.node), p.side, leads_out);
            e.ports[p] = x;
            e.cut_outputs.push_back(*host_.partner(x));
        }
        return e;
    }

    const Diagram& host_;
    const Diagram& pat_;
    RingContext ctx_;
    WireCounts hc_, pc_;
    std::vector<std::uint32_t> order_;
    std::map<std::uint32_t, std::uint32_t> map_;
    std::set<std::uint32_t> used_;
    std::vector<Embedding> found_;
};

void check_embedding(const Diagram& host, const Diagram& pattern, const Embedding& e) {
    const RingContext ctx = host.ring();
    if (e.nodes.size() != pattern.nodes().size()) throw InvalidEmbedding("embedding does not cover the pattern");
    std::set<std::uint32_t> image;
    for (const auto& [u, h] : e.nodes) {
        if (!pattern.has_node(u) || !host.has_node(h)) throw InvalidEmbedding("embedding names a missing node");
        if (!same_generator(pattern.node(u), host.node(h), ctx)) throw InvalidEmbedding("node kinds differ");
        if (!image.insert(h).second) throw InvalidEmbedding("embedding is not injective");
    }
    auto mapped = [&](const PortRef& p) {
        auto it = e.ports.find(p);
        if (it == e.ports.end()) throw InvalidEmbedding("unmapped pattern port " + to_string(p));
        if (it->second.boundary || e.nodes.at(p.node) != it->second.node || it->second.side != p.side) {
            throw InvalidEmbedding("port " + to_string(p) + " mapped off its node");
        }
        return it->second;
    };
    for (const auto& [a, b] : pattern.edges()) {
        if (a.boundary || b.boundary) continue;
        if (host.partner(mapped(a)) != mapped(b)) throw InvalidEmbedding("pattern wire missing in host");
    }
    auto check_cut = [&](const PortRef& boundary, const std::vector<PortRef>& cuts) {
        if (boundary.slot >= cuts.size()) throw InvalidEmbedding("cut list too short");
        const PortRef p = *pattern.partner(boundary);
        const auto other = host.partner(mapped(p));
        if (!other || *other != cuts[boundary.slot]) throw InvalidEmbedding("cut port does not match host");
        if (!other->boundary && image.count(other->node)) throw InvalidEmbedding("boundary wire stays inside match");
    };
    if (e.cut_inputs.size() != pattern.n_inputs() || e.cut_outputs.size() != pattern.n_outputs()) {
        throw InvalidEmbedding("cut size differs from pattern boundary");
    }
    for (std::uint32_t k = 0; k < pattern.n_inputs(); ++k) check_cut(PortRef::input(k), e.cut_inputs);
    for (std::uint32_t k = 0; k < pattern.n_outputs(); ++k) check_cut(PortRef::output(k), e.cut_outputs);
    // Every host wire between matched nodes must come from the pattern.
    std::set<PortRef> covered;
    for (const auto& [p, h] : e.ports) covered.insert(h);
    for (auto h : image) {
        for (const auto& hp : host.ports(h)) {
            if (!covered.count(hp)) throw InvalidEmbedding("host port " + to_string(hp) + " not accounted for");
        }
    }
}

Diagram drop_stale_macros(Diagram d) {
    std::vector<MacroRecord> keep;
    for (const auto& m : d.macros()) {
        if (std::all_of(m.nodes.begin(), m.nodes.end(), [&](auto id) { return d.has_node(id); })) keep.push_back(m);
    }
    d.clear_macros();
    for (auto& m : keep) d.add_macro(std::move(m));
    return d;
}

}  // namespace

const std::vector<RuleId>& all_rules() {
    static const std::vector<RuleId> rules = [] {
        std::vector<RuleId> r;
        for (const auto& [id, name] : kNames) r.push_back(id);
        return r;
    }();
    return rules;
}

std::string rule_name(RuleId rule) {
    for (const auto& [id, name] : kNames) {
        if (id == rule) return name;
    }
    throw BadParams("unknown rule id");
}

RuleId rule_from_name(const std::string& name) {
    for (const auto& [id, n] : kNames) {
        if (n == name) return id;
    }
    throw ParseError("unknown rule '" + name + "'");
}

RuleInstance instantiate(RuleId rule, const RuleParams& params, const FieldPtr& f) {
    const RingContext ctx = RingContext::of(*f);
    const std::uint32_t m = params.m, n = params.n, q = f->q(), p = f->p();
    if (params.j >= q) throw BadParams("element index " + std::to_string(params.j) + " outside F_" + std::to_string(q));
    if (m > 16 || n > 16) throw BadParams("arity too large");
    RuleInstance inst{rule, params, Diagram(f), Diagram(f)};
    switch (rule) {
        case RuleId::zs:
            inst.lhs = compose(z_spider(f, m, 1), z_spider(f, 1, n));
            inst.rhs = z_spider(f, m, n);
            break;
        case RuleId::id:
            inst.lhs = compose(h_dagger(f, 1, 1), h_box(f, 1, 1));
            inst.rhs = identity(f);
            break;
        case RuleId::ch: {
            // p parallel Fourier wires between two spiders: the copies sum to p*j = 0.
            const Diagram middle = compose(z_spider(f, 1, p), compose(tensor_power(f, h_box(f, 1, 1), p), z_spider(f, p, 1)));
            inst.lhs = compose(h_box(f, 1, 1), middle);
            inst.rhs = scaled(tensor_product(zero_state(f), z_spider(f, 0, 1)), sqrtq_pow(ctx, 1 - static_cast<std::int64_t>(p)));
            break;
        }
        case RuleId::hs:
            inst.lhs = compose(h_box(f, m, 1), compose(h_dagger(f, 1, 1), h_box(f, 1, n)));
            inst.rhs = h_box(f, m, n);
            break;
        case RuleId::spl:
            inst.lhs = compose(multiply_n(f, q), z_spider(f, q, 1));
            inst.rhs = identity(f);
            break;
        case RuleId::cp:
            inst.lhs = compose(z_spider(f, m, 1), z_lollipop(f, params.j));
            inst.rhs = scaled(tensor_power(f, z_lollipop(f, params.j), m), sqrtq_pow(ctx, 1 - static_cast<std::int64_t>(m)));
            break;
        case RuleId::ba1:
            inst.lhs = compose(z_spider(f, m, 1), x_spider(f, 1, n));
            inst.rhs = bipartite(f, m, n, z_spider(f, m, 1), x_spider(f, 1, n));
            break;
        case RuleId::ba2:
            inst.lhs = compose(z_spider(f, m, 1), multiply_n(f, n));
            inst.rhs = bipartite(f, m, n, z_spider(f, m, 1), multiply_n(f, n));
            break;
        case RuleId::pm: {
            const Scalar r1 = params.r1 ? *params.r1 : omega_pow(ctx, 1);
            const Scalar r2 = params.r2 ? *params.r2 : omega_pow(ctx, 1);
            inst.lhs = compose(z_spider(f, 1, 2), tensor_product(h_box(f, 1, 0, params.r1), h_box(f, 1, 0, params.r2)));
            inst.rhs = scaled(h_box(f, 1, 0, r1 * r2), sqrtq_pow(ctx, -1));
            break;
        }
        case RuleId::derived_neg:
            inst.lhs = compose(z_spider(f, m, 1), neg(f));
            inst.rhs = compose(tensor_power(f, neg(f), m), z_spider(f, m, 1));
            break;
        case RuleId::derived_cpx:
            inst.lhs = compose(x_spider(f, m, 1), x_lollipop(f, params.j));
            inst.rhs = tensor_power(f, x_lollipop(f, f->neg(params.j)), m);
            break;
        case RuleId::derived_h4: {
            Diagram chain = identity(f);
            for (int k = 0; k < 4; ++k) chain = compose(h_box(f, 1, 1), chain);
            inst.lhs = chain;
            inst.rhs = identity(f);
            break;
        }
    }
    return inst;
}

bool check_soundness(const RuleInstance& instance) { return equal_diagrams(instance.lhs, instance.rhs); }

std::vector<Embedding> find_matches(const Diagram& host, const Diagram& pattern) {
    if (!host.field()->same_as(*pattern.field())) throw FieldMismatch("pattern and host over different fields");
    if (pattern.nodes().empty()) return {};
    return Matcher(host, pattern).run();
}

Diagram apply_at(const Diagram& host, const RuleInstance& instance, const Embedding& embedding) {
    check_embedding(host, instance.lhs, embedding);
    Diagram d = host;
    for (const auto& [u, h] : embedding.nodes) d.remove_node(h);
    const auto shift = sqrtq_exponent(instance.lhs.scalar());
    if (!shift) throw BadParams("left-hand scalar must be a power of sqrt(q)");
    DiagramBuilder b(std::move(d));
    const auto outs = b.embed(instance.rhs, embedding.cut_inputs);
    for (std::size_t k = 0; k < outs.size(); ++k) b.connect(outs[k], embedding.cut_outputs[k]);
    b.multiply_scalar(sqrtq_pow(host.ring(), -*shift));
    return drop_stale_macros(std::move(b).build());
}

Diagram simplify(const Diagram& input) {
    Diagram d = input;
    d.clear_macros();
    const RingContext ctx = d.ring();
    for (bool changed = true; changed;) {
        changed = false;
        // Fuse one pair of adjacent Z-spiders.
        for (const auto& [a, b] : d.edges()) {
            if (a.boundary || b.boundary || a.node == b.node) continue;
            if (d.node(a.node).kind != NodeKind::Z || d.node(b.node).kind != NodeKind::Z) continue;
            const std::uint32_t u = a.node, v = b.node;
            std::vector<PortRef> ins, outs;
            for (auto id : {u, v}) {
                for (const auto& port : d.ports(id)) {
                    const PortRef other = *d.partner(port);
                    if (!other.boundary && (other.node == u || other.node == v)) continue;
                    (port.side == Side::In ? ins : outs).push_back(other);
                }
            }
            d.remove_node(u);
            d.remove_node(v);
            const auto z = d.add_z(static_cast<std::uint32_t>(ins.size()), static_cast<std::uint32_t>(outs.size()));
            for (std::uint32_t k = 0; k < ins.size(); ++k) d.connect(PortRef::in(z, k), ins[k]);
            for (std::uint32_t k = 0; k < outs.size(); ++k) d.connect(PortRef::out(z, k), outs[k]);
            changed = true;
            break;
        }
        if (changed) continue;
        // Z(1,1) and self-looped Z-spiders.
        for (const auto& [id, n] : d.nodes()) {
            if (n.kind != NodeKind::Z) continue;
            bool loop = false;
            for (const auto& port : d.ports(id)) {
                const PortRef other = *d.partner(port);
                if (!other.boundary && other.node == id) loop = true;
            }
            if (loop) {
                std::vector<PortRef> ins, outs;
                for (const auto& port : d.ports(id)) {
                    const PortRef other = *d.partner(port);
                    if (!other.boundary && other.node == id) continue;
                    (port.side == Side::In ? ins : outs).push_back(other);
                }
                d.remove_node(id);
                if (ins.empty() && outs.empty()) {
                    d.multiply_scalar(sqrtq_pow(ctx, 2));
                } else {
                    const auto z = d.add_z(static_cast<std::uint32_t>(ins.size()), static_cast<std::uint32_t>(outs.size()));
                    for (std::uint32_t k = 0; k < ins.size(); ++k) d.connect(PortRef::in(z, k), ins[k]);
                    for (std::uint32_t k = 0; k < outs.size(); ++k) d.connect(PortRef::out(z, k), outs[k]);
                }
                changed = true;
                break;
            }
            if (n.degree() == 2) {
                const auto ps = d.ports(id);
                const PortRef x = *d.partner(ps[0]), y = *d.partner(ps[1]);
                d.remove_node(id);
                d.connect(x, y);
                changed = true;
                break;
            }
        }
        if (changed) continue;
        const RuleInstance h4 = instantiate(RuleId::derived_h4, {}, d.field());
        const auto matches = find_matches(d, h4.lhs);
        if (!matches.empty()) {
            d = apply_at(d, h4, matches.front());
            changed = true;
        }
    }
    return d;
}

std::vector<std::pair<RuleId, RuleParams>> rule_grid(const FieldPtr& f, std::uint32_t max_arity) {
    const RingContext ctx = RingContext::of(*f);
    const std::vector<Scalar> phases = {Scalar::one(ctx), omega_pow(ctx, 1), omega_pow(ctx, -1), sqrtq_pow(ctx, 1)};
    std::vector<std::pair<RuleId, RuleParams>> grid;
    for (RuleId rule : all_rules()) {
        switch (rule) {
            case RuleId::zs:
            case RuleId::hs:
            case RuleId::ba1:
            case RuleId::ba2:
                for (std::uint32_t m = 0; m <= max_arity; ++m) {
                    for (std::uint32_t n = 0; n <= max_arity; ++n) grid.push_back({rule, {m, n, 0, {}, {}}});
                }
                break;
            case RuleId::cp:
            case RuleId::derived_cpx:
                for (std::uint32_t m = 0; m <= max_arity; ++m) {
                    for (std::uint32_t j = 0; j < f->q(); ++j) grid.push_back({rule, {m, 1, j, {}, {}}});
                }
                break;
            case RuleId::derived_neg:
                for (std::uint32_t m = 0; m <= max_arity; ++m) grid.push_back({rule, {m, 1, 0, {}, {}}});
                break;
            case RuleId::pm:
                for (const auto& r1 : phases) {
                    for (const auto& r2 : phases) grid.push_back({rule, {1, 1, 0, r1, r2}});
                }
                break;
            default:
                grid.push_back({rule, {}});
        }
    }
    return grid;
}

std::vector<SweepEntry> soundness_sweep(const FieldPtr& f, std::uint32_t max_arity, unsigned jobs) {
    const auto grid = rule_grid(f, max_arity);
    std::vector<SweepEntry> out(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < grid.size();) {
            const auto& [rule, params] = grid[k];
            const RuleInstance inst = instantiate(rule, params, f);
            const double residual = max_abs_diff(contract_numeric(inst.lhs), contract_numeric(inst.rhs));
            out[k] = {rule, params, check_soundness(inst), residual};
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(grid.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

nlohmann::json to_json(const RuleParams& params, RuleId rule) {
    nlohmann::json j = nlohmann::json::object();
    switch (rule) {
        case RuleId::zs:
        case RuleId::hs:
        case RuleId::ba1:
        case RuleId::ba2:
            j["m"] = params.m;
            j["n"] = params.n;
            break;
        case RuleId::cp:
        case RuleId::derived_cpx:
            j["m"] = params.m;
            j["j"] = params.j;
            break;
        case RuleId::derived_neg:
            j["m"] = params.m;
            break;
        case RuleId::pm:
            j["r1"] = params.r1 ? nlohmann::json(*params.r1) : nlohmann::json("w");
            j["r2"] = params.r2 ? nlohmann::json(*params.r2) : nlohmann::json("w");
            break;
        default:
            break;
    }
    return j;
}

nlohmann::json to_json(const SweepEntry& entry) {
    return {{"rule", rule_name(entry.rule)}, {"params", to_json(entry.params, entry.rule)}, {"ok", entry.ok},
            {"residual", entry.residual}};
}

}  // namespace zhff
