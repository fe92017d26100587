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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zhff/evaluator.hpp"
#include "zhff/synth.hpp"

using namespace zhff;
using nlohmann::json;

namespace {

struct CliRun {
    int code;
    std::string out, err;
    json doc() const { return json::parse(out); }
};

CliRun run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class CliFiles : public ::testing::Test {
   protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("zhff_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::string write(const std::string& name, const json& j) {
        const auto path = (dir_ / name).string();
        std::ofstream(path) << j.dump();
        return path;
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::filesystem::path dir_;
};

}  // namespace

TEST(cli, field_tables) {
    const CliRun r = run({"field", "--p", "2", "--t", "2"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const json j = r.doc();
    EXPECT_EQ(j["modulus"], json::array({1, 1, 1}));
    EXPECT_EQ(j["q"], 4);
    EXPECT_EQ(j["kappa"], json::array({0, 1}));
    // k * k = k + 1
    EXPECT_EQ(j["mul"][2][2], 3);
    EXPECT_EQ(j["add"][3][1], 2);
    EXPECT_EQ(run({"field", "--q", "9"}).doc()["t"], 2);
}

TEST(cli, usage_errors) {
    EXPECT_EQ(run({}).code, kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(run({"field", "--q", "6"}).code, kExitUsage);
    EXPECT_EQ(run({"field"}).code, kExitUsage);
    const CliRun missing = run({"interpolate", "--q", "4"});
    EXPECT_EQ(missing.code, kExitUsage);
    EXPECT_NE(missing.err.find("--a"), std::string::npos);
    const CliRun zero = run({"interpolate", "--q", "4", "--a", "[0,0]"});
    EXPECT_EQ(zero.code, kExitUsage);
    EXPECT_NE(zero.err.find("--a"), std::string::npos);
    EXPECT_EQ(run({"eval", "--diagram", "/nonexistent/d.json"}).code, kExitUsage);
    EXPECT_EQ(run({"check-rules", "--q", "4", "--rule", "zx"}).code, kExitUsage);
    EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST(cli, check_rules) {
    const CliRun r = run({"check-rules", "--q", "9", "--max-arity", "2", "--jobs", "2"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const json j = r.doc();
    EXPECT_TRUE(j["ok"].get<bool>());
    EXPECT_EQ(j["failed"], 0);
    EXPECT_GT(j["results"].size(), 0u);
    EXPECT_LT(j["max_residual"].get<double>(), 1e-9);
    const json only = run({"check-rules", "--q", "3", "--max-arity", "1", "--rule", "cp"}).doc();
    for (const auto& e : only["results"]) EXPECT_EQ(e["rule"], "cp");
}

TEST_F(CliFiles, eval_and_equal) {
    auto f = make_field(3, 1);
    const std::string h = write("h.json", to_json(h_box(f, 1, 1)));
    const std::string hh = write("hh.json", to_json(compose(h_box(f, 1, 1), h_box(f, 1, 1))));
    const std::string x = write("x.json", to_json(x_spider(f, 1, 1)));

    const CliRun e = run({"eval", "--diagram", h, "--numeric"});
    ASSERT_EQ(e.code, kExitOk) << e.err;
    const json j = e.doc();
    EXPECT_TRUE(equal_tensors(tensor_from_json(j["tensor"]), contract(h_box(f, 1, 1))));
    EXPECT_LT(j["residual"].get<double>(), 1e-9);
    EXPECT_EQ(j["numeric"]["entries"].size(), 9u);

    EXPECT_EQ(run({"equal", "--lhs", hh, "--rhs", x}).code, kExitOk);
    const CliRun diff = run({"equal", "--lhs", h, "--rhs", x});
    EXPECT_EQ(diff.code, kExitVerifyFailed);
    EXPECT_FALSE(diff.doc()["equal"].get<bool>());
}

TEST_F(CliFiles, precision_override) {
    auto f = make_field(2, 1);
    const std::string h = write("h.json", to_json(h_box(f, 1, 1)));
    ::setenv("ZHFF_PRECISION", "not-a-number", 1);
    EXPECT_EQ(run({"eval", "--diagram", h, "--numeric"}).code, kExitUsage);
    ::setenv("ZHFF_PRECISION", "1e-30", 1);
    const CliRun tight = run({"eval", "--diagram", h, "--numeric"});
    ::unsetenv("ZHFF_PRECISION");
    // 1/sqrt(2) is not exact in binary, so either verdict is consistent as
    // long as it follows the residual.
    const json j = tight.doc();
    EXPECT_EQ(j["ok"].get<bool>(), j["residual"].get<double>() < 1e-30);
    EXPECT_EQ(tight.code, j["ok"].get<bool>() ? kExitOk : kExitVerifyFailed);
}

TEST_F(CliFiles, synth_round_trip) {
    auto f = make_field(2, 1);
    const RingContext ctx = RingContext::of(*f);
    ExactTensor m(f, 1, 1);
    m[0] = Scalar::integer(ctx, 2);
    m[1] = Scalar::zero(ctx);
    m[2] = -Scalar::one(ctx);
    m[3] = Scalar::integer(ctx, 1) + sqrtq_pow(ctx, 1);
    const std::string in = write("m.json", to_json(m));
    const std::string out = path("d.json");
    const CliRun r = run({"synth", "--matrix", in, "-o", out});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(r.doc()["ok"].get<bool>());
    std::ifstream file(out);
    const Diagram d = diagram_from_json(json::parse(file));
    EXPECT_TRUE(equal_tensors(contract(d), m));

    // Integer entries with the field supplied by flag.
    const std::string bare = write("bare.json", json{{"inputs", 1}, {"outputs", 0}, {"entries", {3, -1, 0}}});
    const CliRun r3 = run({"synth", "--matrix", bare, "--q", "3"});
    ASSERT_EQ(r3.code, kExitOk) << r3.err;
    EXPECT_TRUE(r3.doc()["ok"].get<bool>());
    EXPECT_EQ(run({"synth", "--matrix", bare}).code, kExitUsage);
}

TEST(cli, interpolate) {
    const CliRun r = run({"interpolate", "--q", "4", "--a", "[0,1]", "--b", "[1,0]"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const json j = r.doc();
    EXPECT_EQ(j["distribution"]["p_abort"], "1/4");
    EXPECT_EQ(j["p_first_correct"], "1");
    EXPECT_EQ(j["p_second_correct"], "3/4");
    EXPECT_FALSE(j.contains("samples"));

    const std::vector<std::string> sampled = {"interpolate", "--q", "5", "--a", "2", "--b", "3",
                                              "--runs", "10000", "--seed", "7"};
    const CliRun s1 = run(sampled), s2 = run(sampled);
    ASSERT_EQ(s1.code, kExitOk) << s1.err;
    EXPECT_EQ(s1.out, s2.out);
    EXPECT_EQ(s1.doc()["samples"]["runs"], 10000);
}

TEST(cli, demo) {
    const CliRun r = run({"--pretty", "demo"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const json j = r.doc();
    EXPECT_EQ(j["p_abort"], "1/4");
    EXPECT_EQ(j["p_second_correct"], "3/4");
    EXPECT_EQ(j["classical_queries"], 2);
    EXPECT_EQ(j["quantum_queries"], 1);
    EXPECT_TRUE(j["ok"].get<bool>());
    EXPECT_FALSE(r.err.empty());
    EXPECT_EQ(run({"demo"}).out, run({"demo"}).out);
}
