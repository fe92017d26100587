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

#include "zhff/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "zhff/errors.hpp"
#include "zhff/evaluator.hpp"
#include "zhff/interp.hpp"
#include "zhff/rewrite.hpp"
#include "zhff/synth.hpp"

namespace zhff {
namespace {

using nlohmann::json;

struct FieldFlags {
    std::optional<std::uint32_t> q, p, t;
    std::optional<std::string> modulus;

    void attach(CLI::App* app) {
        app->add_option("--q", q, "field order p^t");
        app->add_option("--p", p, "characteristic");
        app->add_option("--t", t, "extension degree");
        app->add_option("--modulus", modulus, "monic modulus, low coefficient first, as a JSON list");
    }

    bool given() const { return q || p; }

    FieldPtr resolve() const {
        std::uint32_t pp = 0, tt = 1;
        if (q) {
            const auto pt = prime_power(*q);
            if (!pt) throw ParseError("--q " + std::to_string(*q) + " is not a prime power");
            std::tie(pp, tt) = *pt;
            if ((p && *p != pp) || (t && *t != tt)) throw ParseError("--q disagrees with --p/--t");
        } else if (p) {
            pp = *p;
            tt = t.value_or(1);
        } else {
            throw ParseError("a field is required: pass --q or --p [--t]");
        }
        std::optional<std::vector<std::uint32_t>> mod;
        if (modulus) {
            try {
                mod = json::parse(*modulus).get<std::vector<std::uint32_t>>();
            } catch (const json::exception&) {
                throw ParseError("--modulus must be a JSON list of integers");
            }
        }
        return make_field(pp, tt, mod);
    }
};

json read_json(const std::string& path) {
    try {
        if (path == "-") return json::parse(std::cin);
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open " + path);
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::uint32_t parse_element(const Field& f, const std::string& text, const std::string& flag) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception&) {
        throw ParseError(flag + " must be a coefficient list like [0,1] or an element index");
    }
    if (j.is_number_unsigned()) {
        const auto v = j.get<std::uint64_t>();
        if (v >= f.q()) throw ParseError(flag + " index outside the field");
        return static_cast<std::uint32_t>(v);
    }
    if (!j.is_array() || j.size() > f.t()) throw ParseError(flag + " needs at most t coefficients");
    std::vector<std::uint32_t> c(f.t(), 0);
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number_unsigned() || j[i].get<std::uint64_t>() >= f.p()) {
            throw ParseError(flag + " coefficients must lie in [0, p)");
        }
        c[i] = j[i].get<std::uint32_t>();
    }
    return f.index_of(c);
}

double precision() {
    if (const char* env = std::getenv("ZHFF_PRECISION")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v > 0)) throw ParseError("ZHFF_PRECISION must be a positive number");
        return v;
    }
    return 1e-9;
}

std::string rational_string(const Rational& r) {
    std::ostringstream s;
    s << r;
    return s.str();
}

json field_json(const Field& f) {
    json elements = json::array(), add = json::array(), mul = json::array(), form = json::array();
    for (std::uint32_t a = 0; a < f.q(); ++a) {
        elements.push_back(f.coeffs(a));
        json ra = json::array(), rm = json::array(), rf = json::array();
        for (std::uint32_t b = 0; b < f.q(); ++b) {
            ra.push_back(f.add(a, b));
            rm.push_back(f.mul(a, b));
            rf.push_back(f.bilinear(a, b));
        }
        add.push_back(ra);
        mul.push_back(rm);
        form.push_back(rf);
    }
    return {{"p", f.p()},
            {"t", f.t()},
            {"q", f.q()},
            {"modulus", f.spec().modulus},
            {"kappa", f.coeffs(f.kappa())},
            {"generator", f.coeffs(f.generator())},
            {"elements", elements},
            {"add", add},
            {"mul", mul},
            {"form", form}};
}

struct Output {
    std::ostream& out;
    std::ostream& err;
    bool pretty = false;

    void emit(const json& j, const std::string& summary) const {
        out << (pretty ? j.dump(2) : j.dump()) << "\n";
        if (pretty && !summary.empty()) err << summary << "\n";
    }
};

ContractionOrder parse_order(const std::string& s) {
    if (s == "greedy") return ContractionOrder::Greedy;
    if (s == "sequential") return ContractionOrder::Sequential;
    throw ParseError("--order must be greedy or sequential");
}

int cmd_eval(const Output& o, const std::string& path, bool numeric, const std::string& order_name) {
    const Diagram d = diagram_from_json(read_json(path));
    const ContractionOrder order = parse_order(order_name);
    const ExactTensor t = contract(d, order);
    json j = {{"tensor", to_json(t)}};
    bool ok = true;
    if (numeric) {
        const NumericTensor n = contract_numeric(d, order);
        const double residual = max_abs_diff(n, to_numeric(t));
        ok = residual < precision();
        j["numeric"] = to_json(n);
        j["residual"] = residual;
    }
    j["ok"] = ok;
    o.emit(j, std::to_string(t.rows()) + "x" + std::to_string(t.cols()) + " tensor over GF(" +
                  std::to_string(d.field()->q()) + ")" + (ok ? "" : ", float cross-check failed"));
    return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_equal(const Output& o, const std::string& lhs, const std::string& rhs) {
    const Diagram a = diagram_from_json(read_json(lhs));
    const Diagram b = diagram_from_json(read_json(rhs));
    const bool same = equal_diagrams(a, b);
    o.emit({{"equal", same}}, same ? "diagrams are equal" : "diagrams differ");
    return same ? kExitOk : kExitVerifyFailed;
}

int cmd_check_rules(const Output& o, const FieldPtr& f, std::uint32_t max_arity, unsigned jobs,
                    const std::vector<std::string>& only) {
    std::vector<SweepEntry> entries;
    if (only.empty()) {
        entries = soundness_sweep(f, max_arity, jobs);
    } else {
        std::vector<RuleId> wanted;
        for (const auto& name : only) wanted.push_back(rule_from_name(name));
        for (const auto& e : soundness_sweep(f, max_arity, jobs)) {
            if (std::find(wanted.begin(), wanted.end(), e.rule) != wanted.end()) entries.push_back(e);
        }
    }
    const double prec = precision();
    bool ok = true;
    std::size_t failed = 0;
    double worst = 0.0;
    json results = json::array();
    for (const auto& e : entries) {
        const bool good = e.ok && e.residual < prec;
        ok = ok && good;
        failed += !good;
        worst = std::max(worst, e.residual);
        results.push_back(to_json(e));
    }
    o.emit({{"ok", ok},
            {"q", f->q()},
            {"max_arity", max_arity},
            {"checked", entries.size()},
            {"failed", failed},
            {"max_residual", worst},
            {"results", results}},
           std::to_string(entries.size() - failed) + "/" + std::to_string(entries.size()) + " instances sound");
    return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_synth(const Output& o, const std::string& path, const FieldFlags& ff, const std::string& out_path) {
    const json doc = read_json(path);
    const ExactTensor m = tensor_from_json(doc, ff.given() ? ff.resolve() : nullptr);
    const Diagram d = synthesize(m);
    const bool ok = equal_tensors(contract(d), m);
    json j = {{"ok", ok}, {"nodes", d.nodes().size()}};
    if (out_path.empty()) {
        j["diagram"] = to_json(d);
    } else {
        std::ofstream file(out_path);
        if (!file) throw ParseError("cannot write " + out_path);
        file << to_json(d).dump() << "\n";
        j["output"] = out_path;
    }
    o.emit(j, std::to_string(d.nodes().size()) + " nodes" + (ok ? ", contraction matches" : ", MISMATCH"));
    return ok ? kExitOk : kExitVerifyFailed;
}

json element_json(const Field& f, std::uint32_t v) { return f.coeffs(v); }

int cmd_interpolate(const Output& o, const FieldPtr& f, const std::string& a_text, const std::string& b_text,
                    std::optional<std::uint64_t> runs, std::uint64_t seed) {
    const std::uint32_t a = parse_element(*f, a_text, "--a");
    const std::uint32_t b = parse_element(*f, b_text, "--b");
    if (a == 0) throw ParseError("--a must be nonzero");
    const OutcomeDistribution dist = run_interpolation(f, LinearPoly::make(*f, a, b));
    const std::uint32_t q = f->q();
    const bool ok = dist.p_abort == Rational(1, q) && dist.first_marginal(a) == 1 &&
                    dist.second_marginal(b) == Rational(q - 1, q);
    json j = {{"field", f->spec()},
              {"a", element_json(*f, a)},
              {"b", element_json(*f, b)},
              {"distribution", to_json(dist, *f)},
              {"p_first_correct", rational_string(dist.first_marginal(a))},
              {"p_second_correct", rational_string(dist.second_marginal(b))},
              {"ok", ok}};
    if (runs) {
        const SampleCounts c = sample_runs(dist, *runs, seed);
        j["samples"] = to_json(c, *f);
        j["seed"] = seed;
    }
    o.emit(j, "abort " + rational_string(dist.p_abort) + ", first correct " +
                  rational_string(dist.first_marginal(a)) + ", second correct " +
                  rational_string(dist.second_marginal(b)));
    return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_demo(const Output& o, std::uint64_t seed) {
    const FieldPtr f = make_field(2, 2);
    // x^3 + k x + 1
    const UniPoly hidden = {1, f->kappa(), 0, 1};
    const PipelineResult res = interpolate(f, hidden, seed);
    const Rational p_first = res.distribution.first_marginal(res.quotient.a);
    const Rational p_second = res.distribution.second_marginal(res.quotient.b);
    const bool exact = reconstruct(*f, res.reduction, res.quotient) == hidden;
    const bool ok = exact && res.distribution.p_abort == Rational(1, 4) && p_first == 1 && p_second == Rational(3, 4) &&
                    res.classical_queries == 2 && res.quantum_queries == 1;
    json points = json::array();
    for (std::uint32_t x : res.reduction.points) points.push_back(element_json(*f, x));
    json hidden_json = json::array();
    for (std::uint32_t c : hidden) hidden_json.push_back(element_json(*f, c));
    json j = {{"field", f->spec()},
              {"hidden", hidden_json},
              {"classical_points", points},
              {"classical_queries", res.classical_queries},
              {"quantum_queries", res.quantum_queries},
              {"quotient", {{"a", element_json(*f, res.quotient.a)}, {"b", element_json(*f, res.quotient.b)}}},
              {"p_abort", rational_string(res.distribution.p_abort)},
              {"p_first_correct", rational_string(p_first)},
              {"p_second_correct", rational_string(p_second)},
              {"seed", seed},
              {"ok", ok}};
    if (res.outcome) {
        j["outcome"] = {{"first", element_json(*f, res.outcome->first)},
                        {"second", element_json(*f, res.outcome->second)}};
        json rec = json::array();
        if (res.recovered) {
            for (std::uint32_t c : *res.recovered) rec.push_back(element_json(*f, c));
        }
        j["recovered"] = rec;
        j["recovered_exactly"] = res.recovered == hidden;
    } else {
        j["outcome"] = "abort";
    }
    o.emit(j, "GF(4) demo: abort " + rational_string(res.distribution.p_abort) + ", second register correct " +
                  rational_string(p_second));
    return ok ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact finite-field ZH calculus toolkit", "zhff"};
    app.require_subcommand(1, 1);
    bool pretty = false;
    app.add_flag("--pretty", pretty, "indent JSON and print a summary on stderr");

    FieldFlags field_ff;
    auto* field_cmd = app.add_subcommand("field", "field tables and presentation");
    field_ff.attach(field_cmd);

    std::string diagram_path, order = "greedy";
    bool numeric = false;
    auto* eval_cmd = app.add_subcommand("eval", "contract a diagram to its exact tensor");
    eval_cmd->add_option("--diagram", diagram_path, "diagram JSON file, or - for stdin")->required();
    eval_cmd->add_flag("--numeric", numeric, "also contract in floating point and cross-check");
    eval_cmd->add_option("--order", order, "greedy or sequential");

    std::string lhs, rhs;
    auto* equal_cmd = app.add_subcommand("equal", "exact semantic equality of two diagrams");
    equal_cmd->add_option("--lhs", lhs, "first diagram JSON")->required();
    equal_cmd->add_option("--rhs", rhs, "second diagram JSON")->required();

    FieldFlags rules_ff;
    std::uint32_t max_arity = 3;
    unsigned jobs = 1;
    std::vector<std::string> only;
    auto* rules_cmd = app.add_subcommand("check-rules", "soundness sweep over every rule instance");
    rules_ff.attach(rules_cmd);
    rules_cmd->add_option("--max-arity", max_arity, "largest spider arity")->check(CLI::Range(1u, 16u));
    rules_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1u, 256u));
    rules_cmd->add_option("--rule", only, "restrict to named rules");

    FieldFlags synth_ff;
    std::string matrix_path, synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "compile a matrix into a diagram");
    synth_cmd->add_option("--matrix", matrix_path, "tensor JSON file, or - for stdin")->required();
    synth_ff.attach(synth_cmd);
    synth_cmd->add_option("-o,--output", synth_out, "write the diagram here instead of stdout");

    FieldFlags interp_ff;
    std::string a_text, b_text = "0";
    std::optional<std::uint64_t> runs;
    std::uint64_t seed = 7;
    auto* interp_cmd = app.add_subcommand("interpolate", "exact statistics of the linear interpolation circuit");
    interp_ff.attach(interp_cmd);
    interp_cmd->add_option("--a", a_text, "slope, nonzero")->required();
    interp_cmd->add_option("--b", b_text, "intercept");
    interp_cmd->add_option("--runs", runs, "also sample this many runs")->check(CLI::PositiveNumber);
    interp_cmd->add_option("--seed", seed, "sampling seed");

    std::uint64_t demo_seed = 7;
    auto* demo_cmd = app.add_subcommand("demo", "degree-3 interpolation over GF(4)");
    demo_cmd->add_option("--seed", demo_seed, "sampling seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "zhff: " << e.what() << "\n";
        return kExitUsage;
    }

    const Output o{out, err, pretty};
    try {
        if (*field_cmd) {
            const FieldPtr f = field_ff.resolve();
            o.emit(field_json(*f), "GF(" + std::to_string(f->q()) + ")");
            return kExitOk;
        }
        if (*eval_cmd) return cmd_eval(o, diagram_path, numeric, order);
        if (*equal_cmd) return cmd_equal(o, lhs, rhs);
        if (*rules_cmd) return cmd_check_rules(o, rules_ff.resolve(), max_arity, jobs, only);
        if (*synth_cmd) return cmd_synth(o, matrix_path, synth_ff, synth_out);
        if (*interp_cmd) return cmd_interpolate(o, interp_ff.resolve(), a_text, b_text, runs, seed);
        if (*demo_cmd) return cmd_demo(o, demo_seed);
    } catch (const Error& e) {
        err << "zhff: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace zhff
