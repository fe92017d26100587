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

#include "zhff/diagram.hpp"

#include <algorithm>

#include "zhff/errors.hpp"

namespace zhff {

std::string to_string(const PortRef& port) {
    const char* side = port.side == Side::In ? "in" : "out";
    if (port.boundary) return std::string("b:") + side + ":" + std::to_string(port.slot);
    return "n" + std::to_string(port.node) + ":" + side + ":" + std::to_string(port.slot);
}

// ----------------------------------------------------------------- Diagram

Diagram::Diagram(FieldPtr field, std::uint32_t n_inputs, std::uint32_t n_outputs)
    : field_(std::move(field)), n_inputs_(n_inputs), n_outputs_(n_outputs) {
    if (!field_) throw BadParams("diagram needs a field");
    scalar_ = Scalar::one(ring());
}

const Node& Diagram::node(std::uint32_t id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw MalformedDiagram("no node " + std::to_string(id));
    return it->second;
}

std::vector<std::pair<PortRef, PortRef>> Diagram::edges() const {
    std::vector<std::pair<PortRef, PortRef>> out;
    for (const auto& [a, b] : adj_) {
        if (a < b) out.emplace_back(a, b);
    }
    return out;
}

std::optional<PortRef> Diagram::partner(const PortRef& port) const {
    auto it = adj_.find(port);
    if (it == adj_.end()) return std::nullopt;
    return it->second;
}

std::vector<PortRef> Diagram::ports(std::uint32_t id) const {
    const Node& n = node(id);
    std::vector<PortRef> out;
    out.reserve(n.degree());
    for (std::uint32_t s = 0; s < n.n_in; ++s) out.push_back(PortRef::in(id, s));
    for (std::uint32_t s = 0; s < n.n_out; ++s) out.push_back(PortRef::out(id, s));
    return out;
}

std::uint32_t Diagram::add_node(Node node) {
    if (node.kind == NodeKind::Kappa && (node.n_in != 0 || node.n_out != 1)) {
        throw MalformedDiagram("kappa state has exactly one output port");
    }
    if (node.kind != NodeKind::H && node.phase) throw MalformedDiagram("only H-boxes carry a phase");
    if (node.phase && !(node.phase->context() == ring())) throw ContextMismatch("phase from a different ring");
    const std::uint32_t id = next_id_++;
    nodes_.emplace(id, std::move(node));
    return id;
}

std::uint32_t Diagram::add_z(std::uint32_t n_in, std::uint32_t n_out) {
    return add_node({NodeKind::Z, std::nullopt, n_in, n_out});
}

std::uint32_t Diagram::add_h(std::uint32_t n_in, std::uint32_t n_out, std::optional<Scalar> phase) {
    return add_node({NodeKind::H, std::move(phase), n_in, n_out});
}

std::uint32_t Diagram::add_kappa() { return add_node({NodeKind::Kappa, std::nullopt, 0, 1}); }

void Diagram::set_phase(std::uint32_t id, std::optional<Scalar> phase) {
    auto it = nodes_.find(id);
    if (it == nodes_.end() || it->second.kind != NodeKind::H) throw MalformedDiagram("phase on a non-H node");
    if (phase && !(phase->context() == ring())) throw ContextMismatch("phase from a different ring");
    it->second.phase = std::move(phase);
}

void Diagram::remove_node(std::uint32_t id) {
    for (const auto& port : ports(id)) {
        if (is_connected(port)) disconnect(port);
    }
    nodes_.erase(id);
    for (auto& m : macros_) std::erase(m.nodes, id);
    std::erase_if(macros_, [](const MacroRecord& m) { return m.nodes.empty(); });
}

bool Diagram::port_exists(const PortRef& port) const {
    if (port.boundary) return port.slot < (port.side == Side::In ? n_inputs_ : n_outputs_);
    auto it = nodes_.find(port.node);
    if (it == nodes_.end()) return false;
    return port.slot < (port.side == Side::In ? it->second.n_in : it->second.n_out);
}

void Diagram::connect(const PortRef& a, const PortRef& b) {
    if (!port_exists(a) || !port_exists(b)) {
        throw MalformedDiagram("wire to missing port " + to_string(port_exists(a) ? b : a));
    }
    if (a == b) throw MalformedDiagram("wire from a port to itself");
    if (is_connected(a) || is_connected(b)) {
        throw MalformedDiagram("port already wired: " + to_string(is_connected(a) ? a : b));
    }
    adj_.emplace(a, b);
    adj_.emplace(b, a);
}

void Diagram::disconnect(const PortRef& a) {
    auto it = adj_.find(a);
    if (it == adj_.end()) throw MalformedDiagram("port not wired: " + to_string(a));
    const PortRef b = it->second;
    adj_.erase(it);
    adj_.erase(b);
}

void Diagram::multiply_scalar(const Scalar& s) { scalar_ *= s; }

void Diagram::set_scalar(Scalar s) {
    if (!(s.context() == ring())) throw ContextMismatch("scalar from a different ring");
    scalar_ = std::move(s);
}

void Diagram::validate() const {
    for (std::uint32_t k = 0; k < n_inputs_; ++k) {
        if (!is_connected(PortRef::input(k))) throw MalformedDiagram("dangling input " + std::to_string(k));
    }
    for (std::uint32_t k = 0; k < n_outputs_; ++k) {
        if (!is_connected(PortRef::output(k))) throw MalformedDiagram("dangling output " + std::to_string(k));
    }
    std::size_t port_count = n_inputs_ + n_outputs_;
    for (const auto& [id, n] : nodes_) {
        port_count += n.degree();
        for (const auto& port : ports(id)) {
            if (!is_connected(port)) throw MalformedDiagram("dangling port " + to_string(port));
        }
    }
    if (port_count != adj_.size()) throw MalformedDiagram("wire to a port that does not exist");
}

bool Diagram::is_well_formed() const {
    try {
        validate();
        return true;
    } catch (const MalformedDiagram&) {
        return false;
    }
}

// ---------------------------------------------------------- DiagramBuilder

std::vector<PortRef> DiagramBuilder::inputs(std::uint32_t count) {
    std::vector<PortRef> out;
    for (std::uint32_t k = 0; k < count; ++k) out.push_back(input());
    return out;
}

void DiagramBuilder::output(const PortRef& end) { d_.connect(PortRef::output(d_.add_output()), end); }

void DiagramBuilder::outputs(std::span<const PortRef> ends) {
    for (const auto& e : ends) output(e);
}

std::vector<PortRef> DiagramBuilder::embed(const Diagram& sub, std::span<const PortRef> in_ends) {
    if (!sub.field()->same_as(*field())) throw FieldMismatch("embedding a diagram over another field");
    if (in_ends.size() != sub.n_inputs()) {
        throw ArityMismatch("sub-diagram has " + std::to_string(sub.n_inputs()) + " inputs, got " +
                            std::to_string(in_ends.size()));
    }
    std::map<std::uint32_t, std::uint32_t> remap;
    for (const auto& [id, n] : sub.nodes()) remap[id] = d_.add_node(n);
    auto mapped = [&](PortRef p) {
        p.node = remap.at(p.node);
        return p;
    };
    for (const auto& [a, b] : sub.edges()) {
        if (!a.boundary && !b.boundary) d_.connect(mapped(a), mapped(b));
    }

    std::vector<std::optional<PortRef>> out_ends(sub.n_outputs());
    for (std::uint32_t k = 0; k < sub.n_inputs(); ++k) {
        const auto p = sub.partner(PortRef::input(k));
        if (!p) throw MalformedDiagram("dangling input in embedded diagram");
        if (!p->boundary) {
            d_.connect(in_ends[k], mapped(*p));
        } else if (p->side == Side::Out) {
            out_ends[p->slot] = in_ends[k];
        } else if (p->slot > k) {
            d_.connect(in_ends[k], in_ends[p->slot]);
        }
    }
    for (std::uint32_t l = 0; l < sub.n_outputs(); ++l) {
        if (out_ends[l]) continue;
        const auto p = sub.partner(PortRef::output(l));
        if (!p) throw MalformedDiagram("dangling output in embedded diagram");
        if (!p->boundary) {
            out_ends[l] = mapped(*p);
        } else if (p->side == Side::Out) {
            const std::uint32_t cup = d_.add_z(0, 2);
            out_ends[l] = PortRef::out(cup, 0);
            out_ends[p->slot] = PortRef::out(cup, 1);
        }
    }
    d_.multiply_scalar(sub.scalar());
    for (const auto& m : sub.macros()) {
        MacroRecord r{m.name, {}};
        for (auto id : m.nodes) r.nodes.push_back(remap.at(id));
        d_.add_macro(std::move(r));
    }
    std::vector<PortRef> result;
    for (auto& e : out_ends) result.push_back(*e);
    return result;
}

PortRef DiagramBuilder::apply(const Diagram& sub, const PortRef& end) {
    if (sub.n_inputs() != 1 || sub.n_outputs() != 1) throw ArityMismatch("apply needs a one-wire map");
    return embed(sub, std::span<const PortRef>(&end, 1))[0];
}

void DiagramBuilder::record_macro(std::string name, std::uint32_t since_mark) {
    MacroRecord r{std::move(name), {}};
    for (const auto& [id, n] : d_.nodes()) {
        if (id >= since_mark) r.nodes.push_back(id);
    }
    d_.add_macro(std::move(r));
}

Diagram DiagramBuilder::build() && {
    d_.validate();
    return std::move(d_);
}

// -------------------------------------------------------------- generators

namespace {

Diagram single_node(const FieldPtr& field, Node n) {
    DiagramBuilder b(field);
    const auto ins = b.inputs(n.n_in);
    const std::uint32_t m = n.n_out;
    const std::uint32_t id = b.diagram().add_node(std::move(n));
    for (std::uint32_t k = 0; k < ins.size(); ++k) b.connect(ins[k], PortRef::in(id, k));
    for (std::uint32_t l = 0; l < m; ++l) b.output(PortRef::out(id, l));
    return std::move(b).build();
}

Diagram finish(DiagramBuilder& b, std::string name) {
    b.record_macro(std::move(name), 0);
    return std::move(b).build();
}

Scalar inv_sqrtq(const FieldPtr& field) { return sqrtq_pow(RingContext::of(*field), -1); }

}  // namespace

Diagram z_spider(const FieldPtr& field, std::uint32_t m, std::uint32_t n) {
    return single_node(field, {NodeKind::Z, std::nullopt, n, m});
}

Diagram h_box(const FieldPtr& field, std::uint32_t m, std::uint32_t n, std::optional<Scalar> phase) {
    return single_node(field, {NodeKind::H, std::move(phase), n, m});
}

Diagram kappa_state(const FieldPtr& field) { return single_node(field, {NodeKind::Kappa, std::nullopt, 0, 1}); }

Diagram identity(const FieldPtr& field, std::uint32_t wires) {
    DiagramBuilder b(field);
    const auto ins = b.inputs(wires);
    b.outputs(ins);
    return std::move(b).build();
}

Diagram scalar_diagram(const FieldPtr& field, const Scalar& s) {
    Diagram d(field);
    d.set_scalar(s);
    return d;
}

Diagram h_dagger(const FieldPtr& field, std::uint32_t m, std::uint32_t n) {
    return h_box(field, m, n, omega_pow(RingContext::of(*field), -1));
}

Diagram x_spider(const FieldPtr& field, std::uint32_t m, std::uint32_t n) {
    DiagramBuilder b(field);
    const Diagram h = h_box(field, 1, 1);
    const std::uint32_t z = b.diagram().add_z(n, m);
    for (std::uint32_t k = 0; k < n; ++k) b.connect(b.apply(h, b.input()), PortRef::in(z, k));
    for (std::uint32_t l = 0; l < m; ++l) b.output(b.apply(h, PortRef::out(z, l)));
    b.multiply_scalar(sqrtq_pow(RingContext::of(*field), static_cast<std::int64_t>(m + n) - 2));
    return finish(b, "x_spider");
}

Diagram neg(const FieldPtr& field) {
    DiagramBuilder b(field);
    const Diagram h = h_box(field, 1, 1);
    b.output(b.apply(h, b.apply(h, b.input())));
    return finish(b, "neg");
}

Diagram add2(const FieldPtr& field) {
    DiagramBuilder b(field);
    const auto ins = b.inputs(2);
    const auto sum = b.embed(x_spider(field, 1, 2), ins);
    b.output(b.apply(x_spider(field, 1, 1), sum[0]));
    return finish(b, "add2");
}

Diagram zero_state(const FieldPtr& field) {
    DiagramBuilder b(field);
    b.outputs(b.embed(x_spider(field, 1, 0)));
    return finish(b, "zero_state");
}

Diagram mult2(const FieldPtr& field) {
    DiagramBuilder b(field);
    const auto ins = b.inputs(2);
    const auto prod = b.embed(h_box(field, 1, 2), ins);
    b.output(b.apply(h_dagger(field, 1, 1), prod[0]));
    return finish(b, "mult2");
}

Diagram one_state(const FieldPtr& field) {
    DiagramBuilder b(field);
    const auto h = b.embed(h_box(field, 1, 0));
    b.output(b.apply(h_dagger(field, 1, 1), h[0]));
    return finish(b, "one_state");
}

Diagram trans_mult(const FieldPtr& field) {
    DiagramBuilder b(field);
    const PortRef x = b.input();
    const PortRef j = b.input();
    const std::uint32_t h = b.diagram().add_h(1, 2);
    b.connect(x, PortRef::in(h, 0));
    b.connect(j, PortRef::out(h, 1));
    b.output(b.apply(h_dagger(field, 1, 1), PortRef::out(h, 0)));
    return finish(b, "trans_mult");
}

Diagram pauli_x(const FieldPtr& field) {
    DiagramBuilder b(field);
    const PortRef x = b.input();
    const PortRef one = b.embed(one_state(field))[0];
    const std::vector<PortRef> ins = {x, one};
    b.outputs(b.embed(add2(field), ins));
    return finish(b, "pauli_x");
}

Diagram dualizer(const FieldPtr& field) {
    DiagramBuilder b(field);
    const PortRef one = b.embed(one_state(field))[0];
    const PortRef j = b.input();
    const std::vector<PortRef> ins = {one, j};
    b.outputs(b.embed(trans_mult(field), ins));
    return finish(b, "dualizer");
}

Diagram z_lollipop(const FieldPtr& field, std::uint32_t j) {
    if (j >= field->q()) throw BadParams("element index out of range");
    const auto c = field->coeffs(j);
    const RingContext ctx = RingContext::of(*field);
    DiagramBuilder b(field);
    const Diagram zero = zero_state(field);
    const Diagram px = pauli_x(field);
    const Diagram mult = mult2(field);
    std::vector<PortRef> terms;
    for (std::uint32_t tau = 0; tau < field->t(); ++tau) {
        if (c[tau] == 0) continue;
        std::optional<PortRef> digit;
        if (tau == 0 || c[tau] != 1) {
            digit = b.embed(zero)[0];
            for (std::uint32_t s = 0; s < c[tau]; ++s) digit = b.apply(px, *digit);
        }
        if (tau == 0) {
            terms.push_back(*digit);
            continue;
        }
        PortRef power = b.embed(kappa_state(field))[0];
        b.multiply_scalar(sqrtq_pow(ctx, -1));
        for (std::uint32_t s = 1; s < tau; ++s) {
            const std::vector<PortRef> pair = {power, b.embed(kappa_state(field))[0]};
            b.multiply_scalar(sqrtq_pow(ctx, -1));
            power = b.embed(mult, pair)[0];
        }
        if (digit) {
            const std::vector<PortRef> pair = {*digit, power};
            power = b.embed(mult, pair)[0];
        }
        terms.push_back(power);
    }
    if (terms.empty()) terms.push_back(b.embed(zero)[0]);
    PortRef acc = terms[0];
    const Diagram plus = add2(field);
    for (std::size_t k = 1; k < terms.size(); ++k) {
        const std::vector<PortRef> pair = {acc, terms[k]};
        acc = b.embed(plus, pair)[0];
    }
    b.multiply_scalar(sqrtq_pow(ctx, 1));
    b.output(acc);
    return finish(b, "z_lollipop(" + field->format(j) + ")");
}

Diagram z_lollipop(const FieldElement& j) { return z_lollipop(j.field(), j.index()); }

Diagram x_lollipop(const FieldPtr& field, std::uint32_t j) {
    DiagramBuilder b(field);
    const PortRef z = b.embed(z_lollipop(field, j))[0];
    b.output(b.apply(h_box(field, 1, 1), z));
    return finish(b, "x_lollipop(" + field->format(j) + ")");
}

Diagram x_lollipop(const FieldElement& j) { return x_lollipop(j.field(), j.index()); }

Diagram scalar_gadget(const FieldPtr& field, std::int64_t n) {
    DiagramBuilder b(field);
    Diagram& d = b.diagram();
    const std::int64_t count = n >= 0 ? n : -n;
    for (std::int64_t i = 0; i < count; ++i) {
        // Z(1,0) -> H(1,1) -> Z(0,1) evaluates to sqrt(q).
        const std::uint32_t z0 = d.add_z(0, 1);
        const std::uint32_t h = d.add_h(1, 1);
        const std::uint32_t z1 = d.add_z(1, 0);
        d.connect(PortRef::out(z0, 0), PortRef::in(h, 0));
        d.connect(PortRef::out(h, 0), PortRef::in(z1, 0));
        if (n < 0) {
            // H(0,0) H^dagger(0,0) = 1/q
            d.add_h(0, 0);
            d.add_h(0, 0, omega_pow(RingContext::of(*field), -1));
        }
    }
    return finish(b, "scalar_gadget(" + std::to_string(n) + ")");
}

Diagram mult_by(const FieldPtr& field, std::uint32_t j) {
    DiagramBuilder b(field);
    const PortRef x = b.input();
    const PortRef c = b.embed(z_lollipop(field, j))[0];
    b.multiply_scalar(inv_sqrtq(field));
    const std::vector<PortRef> ins = {c, x};
    b.outputs(b.embed(mult2(field), ins));
    return finish(b, "mult_by(" + field->format(j) + ")");
}

Diagram trans_mult_by(const FieldPtr& field, std::uint32_t j) {
    DiagramBuilder b(field);
    const PortRef x = b.input();
    const PortRef c = b.embed(z_lollipop(field, j))[0];
    b.multiply_scalar(inv_sqrtq(field));
    const std::vector<PortRef> ins = {x, c};
    b.outputs(b.embed(trans_mult(field), ins));
    return finish(b, "trans_mult_by(" + field->format(j) + ")");
}

Diagram h_in_lollipop(const FieldPtr& field, std::uint32_t j) {
    DiagramBuilder b(field);
    const PortRef x = b.input();
    const PortRef c = b.embed(z_lollipop(field, j))[0];
    b.multiply_scalar(inv_sqrtq(field));
    const std::uint32_t h = b.diagram().add_h(2, 1);
    b.connect(x, PortRef::in(h, 0));
    b.connect(c, PortRef::in(h, 1));
    b.output(PortRef::out(h, 0));
    return finish(b, "h_in_lollipop(" + field->format(j) + ")");
}

Diagram h_out_lollipop(const FieldPtr& field, std::uint32_t j) {
    DiagramBuilder b(field);
    const PortRef x = b.input();
    const PortRef c = b.embed(z_lollipop(field, j))[0];
    b.multiply_scalar(inv_sqrtq(field));
    const std::uint32_t h = b.diagram().add_h(1, 2);
    b.connect(x, PortRef::in(h, 0));
    b.connect(c, PortRef::out(h, 1));
    b.output(PortRef::out(h, 0));
    return finish(b, "h_out_lollipop(" + field->format(j) + ")");
}

// ----------------------------------------------------------- combinators

Diagram compose(const Diagram& d1, const Diagram& d2) {
    if (!d1.field()->same_as(*d2.field())) throw FieldMismatch("composing diagrams over different fields");
    if (d2.n_outputs() != d1.n_inputs()) {
        throw ArityMismatch("cannot feed " + std::to_string(d2.n_outputs()) + " outputs into " +
                            std::to_string(d1.n_inputs()) + " inputs");
    }
    DiagramBuilder b(d2.field());
    const auto ins = b.inputs(d2.n_inputs());
    const auto mid = b.embed(d2, ins);
    b.outputs(b.embed(d1, mid));
    return std::move(b).build();
}

Diagram tensor_product(const Diagram& d1, const Diagram& d2) {
    if (!d1.field()->same_as(*d2.field())) throw FieldMismatch("tensoring diagrams over different fields");
    DiagramBuilder b(d1.field());
    const auto in1 = b.inputs(d1.n_inputs());
    const auto in2 = b.inputs(d2.n_inputs());
    const auto out1 = b.embed(d1, in1);
    const auto out2 = b.embed(d2, in2);
    b.outputs(out1);
    b.outputs(out2);
    return std::move(b).build();
}

Diagram bend_outputs_to_inputs(const Diagram& d, std::uint32_t count) {
    if (count > d.n_outputs()) throw ArityMismatch("cannot bend more outputs than exist");
    DiagramBuilder b(d.field());
    const auto ins = b.inputs(d.n_inputs());
    const auto outs = b.embed(d, ins);
    const std::uint32_t keep = d.n_outputs() - count;
    b.outputs(std::span<const PortRef>(outs).first(keep));
    for (std::uint32_t k = keep; k < outs.size(); ++k) {
        const std::uint32_t cap = b.diagram().add_z(2, 0);
        b.connect(outs[k], PortRef::in(cap, 0));
        b.connect(b.input(), PortRef::in(cap, 1));
    }
    return std::move(b).build();
}

Diagram bend_inputs_to_outputs(const Diagram& d, std::uint32_t count) {
    if (count > d.n_inputs()) throw ArityMismatch("cannot bend more inputs than exist");
    DiagramBuilder b(d.field());
    auto ins = b.inputs(d.n_inputs() - count);
    std::vector<PortRef> extra;
    for (std::uint32_t k = 0; k < count; ++k) {
        const std::uint32_t cup = b.diagram().add_z(0, 2);
        ins.push_back(PortRef::out(cup, 0));
        extra.push_back(PortRef::out(cup, 1));
    }
    b.outputs(b.embed(d, ins));
    b.outputs(extra);
    return std::move(b).build();
}

Diagram conjugate_diagram(const Diagram& d) {
    Diagram r = d;
    const RingContext ctx = d.ring();
    const Scalar omega = omega_pow(ctx, 1);
    for (const auto& [id, n] : d.nodes()) {
        if (n.kind != NodeKind::H) continue;
        if (!n.phase) {
            r.set_phase(id, omega_pow(ctx, -1));
            continue;
        }
        Scalar c = conj(*n.phase);
        if (c.same_representation(omega)) {
            r.set_phase(id, std::nullopt);
        } else {
            r.set_phase(id, std::move(c));
        }
    }
    r.set_scalar(conj(d.scalar()));
    return r;
}

bool structurally_equal(const Diagram& a, const Diagram& b) {
    if (!a.field()->same_as(*b.field())) return false;
    if (a.n_inputs() != b.n_inputs() || a.n_outputs() != b.n_outputs()) return false;
    if (!a.scalar().same_representation(b.scalar())) return false;
    if (a.nodes().size() != b.nodes().size()) return false;
    for (const auto& [id, n] : a.nodes()) {
        if (!b.has_node(id)) return false;
        const Node& m = b.node(id);
        if (n.kind != m.kind || n.n_in != m.n_in || n.n_out != m.n_out) return false;
        if (n.phase.has_value() != m.phase.has_value()) return false;
        if (n.phase && !n.phase->same_representation(*m.phase)) return false;
    }
    return a.edges() == b.edges();
}

// -------------------------------------------------------------------- JSON

namespace {

nlohmann::json port_json(const PortRef& p) {
    const char* side = p.side == Side::In ? "in" : "out";
    if (p.boundary) return nlohmann::json::array({"b", side, p.slot});
    return nlohmann::json::array({"n", p.node, side, p.slot});
}

Side side_from(const nlohmann::json& j) {
    const auto s = j.get<std::string>();
    if (s == "in") return Side::In;
    if (s == "out") return Side::Out;
    throw ParseError("port side must be \"in\" or \"out\"");
}

PortRef port_from(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("port must be an array");
    const auto owner = j.at(0).get<std::string>();
    if (owner == "b" && j.size() == 3) return {true, 0, side_from(j.at(1)), j.at(2).get<std::uint32_t>()};
    if (owner == "b" && j.size() == 4) return {true, 0, side_from(j.at(2)), j.at(3).get<std::uint32_t>()};
    if (owner == "n" && j.size() == 4) {
        return {false, j.at(1).get<std::uint32_t>(), side_from(j.at(2)), j.at(3).get<std::uint32_t>()};
    }
    throw ParseError("malformed port " + j.dump());
}

const char* kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::Z:
            return "Z";
        case NodeKind::H:
            return "H";
        case NodeKind::Kappa:
            return "KAPPA";
    }
    return "?";
}

}  // namespace

nlohmann::json to_json(const Diagram& d) {
    nlohmann::json j;
    j["field"] = d.field()->spec();
    auto& nodes = j["nodes"] = nlohmann::json::array();
    for (const auto& [id, n] : d.nodes()) {
        nlohmann::json phase = nullptr;
        if (n.phase) phase = *n.phase;
        nodes.push_back({{"id", id}, {"kind", kind_name(n.kind)}, {"phase", phase}, {"in_ports", n.n_in},
                         {"out_ports", n.n_out}});
    }
    auto& edges = j["edges"] = nlohmann::json::array();
    for (const auto& [a, b] : d.edges()) edges.push_back({port_json(a), port_json(b)});
    auto& ins = j["inputs"] = nlohmann::json::array();
    for (std::uint32_t k = 0; k < d.n_inputs(); ++k) ins.push_back(port_json(PortRef::input(k)));
    auto& outs = j["outputs"] = nlohmann::json::array();
    for (std::uint32_t k = 0; k < d.n_outputs(); ++k) outs.push_back(port_json(PortRef::output(k)));
    j["scalar"] = d.scalar();
    if (!d.macros().empty()) {
        auto& macros = j["macros"] = nlohmann::json::array();
        for (const auto& m : d.macros()) macros.push_back({{"name", m.name}, {"nodes", m.nodes}});
    }
    return j;
}

Diagram diagram_from_json(const nlohmann::json& j) {
    try {
        const FieldPtr field = Field::make(j.at("field").get<FieldSpec>());
        const RingContext ctx = RingContext::of(*field);
        Diagram d(field, static_cast<std::uint32_t>(j.at("inputs").size()),
                  static_cast<std::uint32_t>(j.at("outputs").size()));
        std::vector<std::pair<std::uint32_t, Node>> nodes;
        for (const auto& n : j.at("nodes")) {
            Node node;
            const auto kind = n.at("kind").get<std::string>();
            if (kind == "Z") {
                node.kind = NodeKind::Z;
            } else if (kind == "H") {
                node.kind = NodeKind::H;
            } else if (kind == "KAPPA") {
                node.kind = NodeKind::Kappa;
            } else {
                throw ParseError("unknown node kind " + kind);
            }
            if (n.contains("phase") && !n.at("phase").is_null()) node.phase = scalar_from_json(n.at("phase"), ctx);
            node.n_in = n.at("in_ports").get<std::uint32_t>();
            node.n_out = n.at("out_ports").get<std::uint32_t>();
            nodes.emplace_back(n.at("id").get<std::uint32_t>(), std::move(node));
        }
        std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        // Ids are kept: fill gaps with placeholder nodes and drop them afterwards.
        std::vector<std::uint32_t> placeholders;
        for (auto& [id, node] : nodes) {
            if (id < d.next_id()) throw ParseError("duplicate node id " + std::to_string(id));
            while (d.next_id() < id) placeholders.push_back(d.add_z(0, 0));
            d.add_node(std::move(node));
        }
        for (auto id : placeholders) d.remove_node(id);
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw ParseError("edge must be a port pair");
            d.connect(port_from(e.at(0)), port_from(e.at(1)));
        }
        if (j.contains("scalar")) d.set_scalar(scalar_from_json(j.at("scalar"), ctx));
        if (j.contains("macros")) {
            for (const auto& m : j.at("macros")) {
                d.add_macro({m.at("name").get<std::string>(), m.at("nodes").get<std::vector<std::uint32_t>>()});
            }
        }
        d.validate();
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed diagram: ") + e.what());
    }
}

}  // namespace zhff
