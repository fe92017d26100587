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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zhff/diagram.hpp"

namespace zhff {

enum class RuleId : std::uint8_t { zs, id, ch, hs, spl, cp, ba1, ba2, pm, derived_neg, derived_cpx, derived_h4 };

const std::vector<RuleId>& all_rules();
std::string rule_name(RuleId rule);
/// Throws ParseError for an unknown name.
RuleId rule_from_name(const std::string& name);

struct RuleParams {
    std::uint32_t m = 1;
    std::uint32_t n = 1;
    /// Element index, for cp and derived_cpx.
    std::uint32_t j = 0;
    /// Phases for pm; nullopt is w.
    std::optional<Scalar> r1, r2;
};

struct RuleInstance {
    RuleId rule;
    RuleParams params;
    Diagram lhs;
    Diagram rhs;
};

/// Builds both sides of a rule. Throws BadParams when the parameters do not
/// fit the rule.
RuleInstance instantiate(RuleId rule, const RuleParams& params, const FieldPtr& field);
/// Exact equality of the two sides.
bool check_soundness(const RuleInstance& instance);

/// Where a pattern sits inside a host.
struct Embedding {
    std::map<std::uint32_t, std::uint32_t> nodes;  // pattern node -> host node
    std::map<PortRef, PortRef> ports;              // pattern node port -> host node port
    /// Host ports outside the match that the pattern's boundary wires lead to.
    std::vector<PortRef> cut_inputs, cut_outputs;
};

/// All embeddings of `pattern` into `host`. The pattern's boundary wires
/// must all end on nodes; ports are matched up to reordering within a side.
std::vector<Embedding> find_matches(const Diagram& host, const Diagram& pattern);
/// Replaces the matched copy of `instance.lhs` by `instance.rhs`. Throws
/// InvalidEmbedding when `embedding` does not describe a match in `host`.
Diagram apply_at(const Diagram& host, const RuleInstance& instance, const Embedding& embedding);

/// Fuses connected Z-spiders, drops Z(1,1) nodes and removes runs of four
/// Fourier boxes until nothing changes.
Diagram simplify(const Diagram& d);

struct SweepEntry {
    RuleId rule;
    RuleParams params;
    bool ok = false;
    /// Largest entrywise gap between the floating-point contractions.
    double residual = 0.0;
};

/// Every rule over its parameter grid: arities up to `max_arity`, all
/// elements, and phases {1, w, w^-1, sqrt(q)}.
std::vector<std::pair<RuleId, RuleParams>> rule_grid(const FieldPtr& field, std::uint32_t max_arity);
/// Checks the whole grid on `jobs` threads; results follow the grid order.
std::vector<SweepEntry> soundness_sweep(const FieldPtr& field, std::uint32_t max_arity, unsigned jobs = 1);

nlohmann::json to_json(const RuleParams& params, RuleId rule);
nlohmann::json to_json(const SweepEntry& entry);

}  // namespace zhff
