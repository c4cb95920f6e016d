// SPDX-License-Identifier: Apache-2.0
//
// usbf: joint user scheduling and beamforming for multiuser MISO downlink
// Copyright (C) 2026 The usbf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "helpers.hpp"
#include "usbf/cli.hpp"
#include "usbf/harness.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

using namespace usbf;
using namespace testing;

namespace {

std::filesystem::path scratch(const std::string &name)
{
    const auto dir = std::filesystem::temp_directory_path() / "usbf_test_harness";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path &p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int cli(std::vector<std::string> args, std::string *out = nullptr, std::string *err = nullptr)
{
    args.insert(args.begin(), "usbf");
    std::vector<const char *> argv;
    for (const auto &a : args)
        argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
    if (out)
        *out = o.str();
    if (err)
        *err = e.str();
    return rc;
}

std::vector<std::string> split(const std::string &line)
{
    std::vector<std::string> v;
    std::stringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ','))
        v.push_back(cell);
    return v;
}

// Closed forms evaluated with plain loops, independently of the library.
std::uint64_t hand_greedy(std::uint64_t K, std::uint64_t N, std::uint64_t I1)
{
    std::uint64_t s = 0;
    for (std::uint64_t k = 2; k <= K; ++k)
        s += 4 * (K - k + 1) * (I1 * (k * k * k * N + 5 * k * k * N) + k * k);
    return s;
}

std::uint64_t hand_sca(std::uint64_t K, std::uint64_t N, std::uint64_t I2, std::uint64_t I3)
{
    return 4 * I3 * (I2 * (7 * K * K * N + 4 * K * N + 14 * K * K) + K * (N * N * N + 2 * N * N + 2 * N));
}

std::uint64_t hand_jusbf(std::uint64_t K, std::uint64_t N, const std::vector<std::vector<int>> &H)
{
    std::uint64_t inner = 0;
    for (const auto &h : H)
        for (std::size_t i = 1; i < h.size(); ++i)
            inner += (2 + static_cast<std::uint64_t>(h[i - 1])) * static_cast<std::uint64_t>(h[i]);
    return 2 * (2 * K * K * N + 2 * K * N * N + K * inner);
}

} // namespace

TEST_CASE("flop counts at the documented points")
{
    FlopParams p;
    p.K = 2;
    p.N = 1;
    p.I1 = 1;
    CHECK(flop_model(FlopAlgorithm::greedy, p) == 128);
    p.K = 1;
    p.I2 = p.I3 = 1;
    CHECK(flop_model(FlopAlgorithm::sca, p) == 120);
}

TEST_CASE("flop counts agree with hand evaluation")
{
    const std::vector<std::vector<int>> chains{{4, 8, 2}, {7, 3}};
    for (std::uint64_t K : {1, 3, 10, 37})
        for (std::uint64_t N : {1, 4, 32})
        {
            FlopParams p{K, N, 3, 5, 7, chains};
            CHECK(flop_model(FlopAlgorithm::greedy, p) == hand_greedy(K, N, 3));
            CHECK(flop_model(FlopAlgorithm::sca, p) == hand_sca(K, N, 5, 7));
            CHECK(flop_model(FlopAlgorithm::jusbf, p) == hand_jusbf(K, N, chains));
        }
}

TEST_CASE("flop ordering and purity")
{
    CHECK(default_jeepon_chains().size() == 4);
    for (std::uint64_t K : {20, 50})
    {
        const FlopParams p{K, 32, 20, 20, 20, {}};
        const auto g = flop_model(FlopAlgorithm::greedy, p), s = flop_model(FlopAlgorithm::sca, p),
                   j = flop_model(FlopAlgorithm::jusbf, p);
        CHECK(j < s);
        CHECK(s < g);
        CHECK(flop_model(FlopAlgorithm::greedy, p) == g);
    }
    CHECK_THROWS_AS(flop_algorithm_from_string("cnn"), std::invalid_argument);
    CHECK(flop_algorithm_from_string("sca") == FlopAlgorithm::sca);
    CHECK_THROWS_AS(flop_model(FlopAlgorithm::greedy, FlopParams{0, 4, 20, 20, 20, {}}), std::invalid_argument);
    CHECK_THROWS_AS(flop_model(FlopAlgorithm::sca, FlopParams{4, 4, 1, 0, 1, {}}), std::invalid_argument);
    CHECK_THROWS_AS(flop_model(FlopAlgorithm::greedy, FlopParams{1u << 20, 1u << 20, 1u << 20, 1, 1, {}}),
                    std::overflow_error);
}

TEST_CASE("ratios of identical algorithms are one")
{
    const SystemConfig cfg = small_config(5, 4, 3);
    const auto data = generate_dataset(cfg, 4);
    Algorithm twin = greedy_algorithm(cfg);
    twin.id = "sca";
    const RunReport r = compare(data, {greedy_algorithm(cfg), twin}, cfg);
    REQUIRE(r.ratios.size() == 1);
    CHECK(r.ratios[0].first == "R1");
    REQUIRE(r.ratios[0].second.has_value());
    CHECK(*r.ratios[0].second == 1.0);
    CHECK(r.records.size() == 8);
    CHECK(r.records[1].sample_id == 0);
    CHECK(r.records[1].algorithm == "sca");
}

TEST_CASE("ratios with an empty denominator are undefined")
{
    SystemConfig cfg = small_config(3, 2, 4);
    cfg.snr_db = -40.0;
    const auto data = generate_dataset(cfg, 3);
    const RunReport r = compare(data, {greedy_algorithm(cfg), sca_algorithm(cfg)}, cfg);
    CHECK(r.mean_cardinality.at("greedy") == 0.0);
    REQUIRE(r.ratios.size() == 1);
    CHECK_FALSE(r.ratios[0].second.has_value());
    CHECK(report_summary_csv(r).find("R1,,NA") != std::string::npos);
    CHECK(nlohmann::json::parse(report_json(r))["aggregate"]["ratios"]["R1"].is_null());
}

TEST_CASE("a single algorithm gives no ratios")
{
    const SystemConfig cfg = small_config(4, 3, 5);
    const RunReport r = compare(generate_dataset(cfg, 2), {greedy_algorithm(cfg)}, cfg);
    CHECK(r.ratios.empty());
    CHECK(nlohmann::json::parse(report_json(r))["aggregate"]["ratios"].empty());
}

TEST_CASE("infeasible output is a hard failure")
{
    const SystemConfig cfg = small_config(4, 3, 6);
    const auto data = generate_dataset(cfg, 2);
    Algorithm bad{"greedy", [&](const ChannelSample &s) {
                      Schedule sch = gusbf(s, cfg);
                      sch.S = {0, 1, 2, 3};
                      sch.alloc.p = RealVector::Constant(4, 0.01);
                      return sch;
                  }};
    CHECK_THROWS_AS(compare(data, {bad}, cfg), HardFailure);
    CHECK_THROWS_AS(compare(data, {greedy_algorithm(cfg), greedy_algorithm(cfg)}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(compare(data, {greedy_algorithm(cfg)}, small_config(5, 3)), std::invalid_argument);
}

TEST_CASE("CSV and JSON carry the same numbers")
{
    const SystemConfig cfg = small_config(6, 4, 7);
    const RunReport r = compare(generate_dataset(cfg, 5), {greedy_algorithm(cfg), sca_algorithm(cfg)}, cfg, true);
    const auto j = nlohmann::json::parse(report_json(r));
    std::stringstream csv(report_csv(r));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "sample_id,algorithm,cardinality,total_power,runtime_ms,feasible");
    std::size_t i = 0;
    while (std::getline(csv, line))
    {
        const auto cells = split(line);
        REQUIRE(cells.size() == 6);
        const auto &rec = j["records"][i++];
        CHECK(std::stoul(cells[0]) == rec["sample_id"].get<std::size_t>());
        CHECK(cells[1] == rec["algorithm"].get<std::string>());
        CHECK(std::stoul(cells[2]) == rec["cardinality"].get<std::size_t>());
        CHECK(parse_double(cells[3]) == rec["total_power"].get<double>());
        CHECK(parse_double(cells[4]) == rec["runtime_ms"].get<double>());
        CHECK(cells[5] == (rec["feasible"].get<bool>() ? "true" : "false"));
    }
    CHECK(i == r.records.size());

    std::stringstream summary(report_summary_csv(r));
    std::getline(summary, line);
    while (std::getline(summary, line))
    {
        const auto cells = split(line);
        if (cells[0] == "mean_cardinality")
            CHECK(parse_double(cells[2]) == j["aggregate"]["mean_cardinality"][cells[1]].get<double>());
        else if (cells[0] == "mean_total_power")
            CHECK(parse_double(cells[2]) == j["aggregate"]["mean_total_power"][cells[1]].get<double>());
        else
            CHECK(parse_double(cells[2]) == j["aggregate"]["ratios"][cells[0]].get<double>());
    }
}

TEST_CASE("experiment config keys")
{
    ExperimentConfig ec;
    apply_experiment_config(ec, parse_key_values("K = 6\nepochs = 7\nlearning_rate = 1e-4\nmu0 = 2\n"
                                                 "strict = false\ninference_statistics = running\n"
                                                 "model_seed = 9\nclaim_threshold = 0.25\n"));
    CHECK(ec.system.K == 6);
    CHECK(ec.hyper.epochs == 7);
    CHECK(ec.hyper.adam.learning_rate == 1e-4);
    CHECK(ec.hyper.lag.mu == 2.0);
    CHECK_FALSE(ec.jeepon.strict);
    CHECK(ec.jeepon.inference == nn::Mode::running);
    CHECK(ec.cnn.inference == nn::Mode::running);
    CHECK(ec.model_seed == 9);
    CHECK(ec.claim_threshold == 0.25);

    ExperimentConfig bad;
    CHECK_THROWS_AS(apply_experiment_config(bad, parse_key_values("bogus = 1\n")), std::invalid_argument);
    CHECK_THROWS_AS(apply_experiment_config(bad, parse_key_values("epochs = 0\n")), std::invalid_argument);
    CHECK_THROWS_AS(apply_experiment_config(bad, parse_key_values("strict = maybe\n")), std::invalid_argument);
    CHECK_THROWS_AS(apply_experiment_config(bad, parse_key_values("validation_split = 1\n")),
                    std::invalid_argument);
}

TEST_CASE("cli: generate, train, evaluate twice with identical reports")
{
    const auto cfg = scratch("cfg.txt");
    std::ofstream(cfg) << "K = 5\nN = 4\nepochs = 2\nmessage_width = 4\n";
    const auto data = scratch("data.bin"), ckpt = scratch("model.ckpt");
    REQUIRE(cli({"--config", cfg.string(), "--seed", "3", "--out", data.string(), "gen-data", "--count", "8"}) == 0);
    REQUIRE(cli({"--config", cfg.string(), "--out", ckpt.string(), "train", "--data", data.string()}) == 0);
    CHECK(std::filesystem::exists(scratch("model_history.csv")));

    std::string a, b;
    REQUIRE(cli({"--format", "json", "eval", "--data", data.string(), "--model", ckpt.string()}, &a) == 0);
    REQUIRE(cli({"eval", "--data", data.string(), "--model", ckpt.string(), "--format", "json"}, &b) == 0);
    CHECK(a == b);
    CHECK(nlohmann::json::parse(a)["algorithms"][0] == "jusbf");

    const auto data2 = scratch("data2.bin");
    REQUIRE(cli({"--config", cfg.string(), "--seed", "3", "--out", data2.string(), "gen-data", "--count", "8"}) == 0);
    CHECK(slurp(data) == slurp(data2));
}

TEST_CASE("cli: compare writes both tables")
{
    const auto cfg = scratch("cmp.txt");
    std::ofstream(cfg) << "K = 4\nN = 3\n";
    const auto data = scratch("cmp.bin"), out = scratch("report.csv");
    REQUIRE(cli({"--config", cfg.string(), "--out", data.string(), "gen-data", "--count", "3"}) == 0);
    REQUIRE(cli({"--out", out.string(), "compare", "--data", data.string(), "--algorithms", "greedy,oracle"}) == 0);
    CHECK(slurp(out).rfind("sample_id,algorithm,cardinality,total_power,runtime_ms,feasible\n", 0) == 0);
    CHECK(slurp(scratch("report_summary.csv")).find("mean_cardinality,oracle,") != std::string::npos);

    std::string text;
    REQUIRE(cli({"compare", "--data", data.string(), "--algorithms", "greedy", "--format", "json"}, &text) == 0);
    CHECK(nlohmann::json::parse(text)["aggregate"]["ratios"].empty());
}

TEST_CASE("cli: flops table")
{
    std::string text;
    REQUIRE(cli({"flops", "--K", "2", "--N", "1", "--I1", "1", "--algorithms", "greedy"}, &text) == 0);
    CHECK(text == "K,N,I1,I2,I3,algorithm,flops\n2,1,1,20,20,greedy,128\n");
}

TEST_CASE("cli: failures give nonzero status")
{
    const auto cfg = scratch("bad.txt");
    std::ofstream(cfg) << "K = 4\nN = 3\nnot_a_key = 1\n";
    std::string err;
    CHECK(cli({"--config", cfg.string(), "--out", scratch("x.bin").string(), "gen-data"}, nullptr, &err) != 0);
    CHECK(err.find("not_a_key") != std::string::npos);
    CHECK(cli({}) != 0);
    CHECK(cli({"greedy"}) != 0);
    CHECK(cli({"greedy", "--data", scratch("missing.bin").string()}) != 0);
    CHECK(cli({"--format", "xml", "flops"}) != 0);
    CHECK(cli({"flops", "--algorithms", "cnn"}) != 0);

    const auto small = scratch("shape.txt"), other = scratch("shape2.txt"), data = scratch("shape.bin");
    std::ofstream(small) << "K = 4\nN = 3\n";
    std::ofstream(other) << "K = 5\nN = 3\n";
    REQUIRE(cli({"--config", small.string(), "--out", data.string(), "gen-data", "--count", "2"}) == 0);
    CHECK(cli({"--config", other.string(), "greedy", "--data", data.string()}) != 0);
    CHECK(cli({"compare", "--data", data.string(), "--algorithms", "jusbf"}) != 0);
    CHECK(cli({"--config", small.string(), "oracle", "--data", data.string()}) == 0);
}
