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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "zhff/field.hpp"
#include "zhff/scalar.hpp"

namespace zhff {

enum class NodeKind : std::uint8_t { Z, H, Kappa };
enum class Side : std::uint8_t { In, Out };

/// One endpoint of a wire: either a slot on a node side, or a boundary slot.
///
/// For boundary ports `side` is In for diagram inputs and Out for outputs
/// and `node` is unused.
struct PortRef {
    bool boundary = false;
    std::uint32_t node = 0;
    Side side = Side::In;
    std::uint32_t slot = 0;

    static PortRef input(std::uint32_t slot) { return {true, 0, Side::In, slot}; }
    static PortRef output(std::uint32_t slot) { return {true, 0, Side::Out, slot}; }
    static PortRef in(std::uint32_t node, std::uint32_t slot) { return {false, node, Side::In, slot}; }
    static PortRef out(std::uint32_t node, std::uint32_t slot) { return {false, node, Side::Out, slot}; }

    auto operator<=>(const PortRef& other) const = default;
};

std::string to_string(const PortRef& port);

struct Node {
    NodeKind kind = NodeKind::Z;
    /// H-box label; nullopt is the default phase w.
    std::optional<Scalar> phase;
    std::uint32_t n_in = 0;
    std::uint32_t n_out = 0;

    std::uint32_t degree() const { return n_in + n_out; }
};

/// Records that a group of nodes was produced by expanding a named gadget.
struct MacroRecord {
    std::string name;
    std::vector<std::uint32_t> nodes;
};

/// An open graph of generators with ordered inputs and outputs.
///
/// Wires are unordered port pairs. A well-formed diagram uses every node port
/// and every boundary port exactly once. The tensor of a diagram with n
/// inputs and m outputs is a map (C^q)^n -> (C^q)^m, multiplied by
/// `scalar()`.
class Diagram {
   public:
    Diagram() = default;
    explicit Diagram(FieldPtr field, std::uint32_t n_inputs = 0, std::uint32_t n_outputs = 0);

    const FieldPtr& field() const { return field_; }
    RingContext ring() const { return RingContext::of(*field_); }
    const std::map<std::uint32_t, Node>& nodes() const { return nodes_; }
    const Node& node(std::uint32_t id) const;
    bool has_node(std::uint32_t id) const { return nodes_.count(id) != 0; }
    std::uint32_t n_inputs() const { return n_inputs_; }
    std::uint32_t n_outputs() const { return n_outputs_; }
    const Scalar& scalar() const { return scalar_; }
    const std::vector<MacroRecord>& macros() const { return macros_; }
    std::uint32_t next_id() const { return next_id_; }

    /// Each wire once, with the smaller endpoint first.
    std::vector<std::pair<PortRef, PortRef>> edges() const;
    /// The other end of the wire at `port`, if connected.
    std::optional<PortRef> partner(const PortRef& port) const;
    /// Every port of a node, in-side first.
    std::vector<PortRef> ports(std::uint32_t id) const;

    std::uint32_t add_node(Node node);
    std::uint32_t add_z(std::uint32_t n_in, std::uint32_t n_out);
    std::uint32_t add_h(std::uint32_t n_in, std::uint32_t n_out, std::optional<Scalar> phase = std::nullopt);
    std::uint32_t add_kappa();
    void set_phase(std::uint32_t id, std::optional<Scalar> phase);
    /// Removes a node and every wire touching it; the far ends become free.
    void remove_node(std::uint32_t id);
    std::uint32_t add_input() { return n_inputs_++; }
    std::uint32_t add_output() { return n_outputs_++; }

    void connect(const PortRef& a, const PortRef& b);
    void disconnect(const PortRef& a);
    bool is_connected(const PortRef& port) const { return adj_.count(port) != 0; }

    void multiply_scalar(const Scalar& s);
    void set_scalar(Scalar s);
    void add_macro(MacroRecord record) { macros_.push_back(std::move(record)); }
    void clear_macros() { macros_.clear(); }

    /// Throws MalformedDiagram unless every port is used exactly once.
    void validate() const;
    bool is_well_formed() const;

   private:
    bool port_exists(const PortRef& port) const;

    FieldPtr field_;
    std::map<std::uint32_t, Node> nodes_;
    std::map<PortRef, PortRef> adj_;
    std::uint32_t n_inputs_ = 0;
    std::uint32_t n_outputs_ = 0;
    std::uint32_t next_id_ = 0;
    Scalar scalar_;
    std::vector<MacroRecord> macros_;
};

/// Incremental construction in terms of free wire ends.
///
/// A free end is a port that is not yet wired. `embed` plugs a sub-diagram
/// onto a list of free ends and returns the free ends carrying its outputs.
class DiagramBuilder {
   public:
    explicit DiagramBuilder(FieldPtr field) : d_(std::move(field)) { d_.set_scalar(Scalar::one(d_.ring())); }
    explicit DiagramBuilder(Diagram base) : d_(std::move(base)) {}

    const FieldPtr& field() const { return d_.field(); }
    Diagram& diagram() { return d_; }

    PortRef input() { return PortRef::input(d_.add_input()); }
    std::vector<PortRef> inputs(std::uint32_t count);
    void output(const PortRef& end);
    void outputs(std::span<const PortRef> ends);

    void connect(const PortRef& a, const PortRef& b) { d_.connect(a, b); }
    std::vector<PortRef> embed(const Diagram& sub, std::span<const PortRef> in_ends);
    /// Embeds a state (no inputs) and returns its output ends.
    std::vector<PortRef> embed(const Diagram& sub) { return embed(sub, {}); }
    /// Plugs a 1-input 1-output diagram onto one end.
    PortRef apply(const Diagram& sub, const PortRef& end);

    void multiply_scalar(const Scalar& s) { d_.multiply_scalar(s); }
    std::uint32_t mark() const { return d_.next_id(); }
    void record_macro(std::string name, std::uint32_t since_mark);

    Diagram build() &&;

   private:
    Diagram d_;
};

// Generators. Arities are (m outputs, n inputs) throughout.
Diagram z_spider(const FieldPtr& field, std::uint32_t m, std::uint32_t n);
Diagram h_box(const FieldPtr& field, std::uint32_t m, std::uint32_t n, std::optional<Scalar> phase = std::nullopt);
Diagram kappa_state(const FieldPtr& field);
Diagram identity(const FieldPtr& field, std::uint32_t wires = 1);
/// Zero inputs and outputs; only the scalar factor.
Diagram scalar_diagram(const FieldPtr& field, const Scalar& s);

// Derived gadgets, built from the three generators.
Diagram h_dagger(const FieldPtr& field, std::uint32_t m, std::uint32_t n);
/// Tensor is 1 exactly when all legs sum to zero.
Diagram x_spider(const FieldPtr& field, std::uint32_t m, std::uint32_t n);
/// |x> -> |-x>
Diagram neg(const FieldPtr& field);
/// |x>|y> -> |x + y>
Diagram add2(const FieldPtr& field);
Diagram zero_state(const FieldPtr& field);
/// |x>|y> -> |x y>
Diagram mult2(const FieldPtr& field);
Diagram one_state(const FieldPtr& field);
/// |x>|j> -> |M_j^T x>
Diagram trans_mult(const FieldPtr& field);
/// |x> -> |x + 1>
Diagram pauli_x(const FieldPtr& field);
/// |j> -> |M_j^T 1>
Diagram dualizer(const FieldPtr& field);
/// sqrt(q) |j>
Diagram z_lollipop(const FieldPtr& field, std::uint32_t j);
Diagram z_lollipop(const FieldElement& j);
/// Sum_k w^(j|k) |k>
Diagram x_lollipop(const FieldPtr& field, std::uint32_t j);
Diagram x_lollipop(const FieldElement& j);
/// A closed diagram of scalar gadgets evaluating to q^(n/2).
Diagram scalar_gadget(const FieldPtr& field, std::int64_t n);

// One-wire maps that are unitary for j != 0.
/// |x> -> |j x>
Diagram mult_by(const FieldPtr& field, std::uint32_t j);
/// |x> -> |M_j^T x>
Diagram trans_mult_by(const FieldPtr& field, std::uint32_t j);
/// <l|U|x> = w^(l | j x) / sqrt(q): the j-lollipop joins the input side.
Diagram h_in_lollipop(const FieldPtr& field, std::uint32_t j);
/// <l|U|x> = w^(j l | x) / sqrt(q): the j-lollipop joins the output side.
Diagram h_out_lollipop(const FieldPtr& field, std::uint32_t j);

/// d1 after d2: the outputs of d2 feed the inputs of d1.
Diagram compose(const Diagram& d1, const Diagram& d2);
Diagram tensor_product(const Diagram& d1, const Diagram& d2);
/// Turns the last `count` outputs into trailing inputs with Z caps.
Diagram bend_outputs_to_inputs(const Diagram& d, std::uint32_t count);
/// Turns the last `count` inputs into trailing outputs with Z cups.
Diagram bend_inputs_to_outputs(const Diagram& d, std::uint32_t count);
Diagram conjugate_diagram(const Diagram& d);

/// Same nodes, same wires, same boundary and equal scalar.
bool structurally_equal(const Diagram& a, const Diagram& b);

nlohmann::json to_json(const Diagram& d);
Diagram diagram_from_json(const nlohmann::json& j);

}  // namespace zhff
