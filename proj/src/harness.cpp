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

#include "usbf/harness.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <limits>
#include <sstream>

namespace usbf {

namespace {

using ojson = nlohmann::ordered_json;

constexpr const char *hyper_keys[] = {"epochs",         "learning_rate", "beta1",         "beta2",
                                      "adam_eps",       "mu0",           "nu0",           "eps_mu",
                                      "eps_nu",         "validation_split", "shuffle_seed", "model_seed",
                                      "message_width",  "layers",        "strict",        "inference_statistics",
                                      "claim_threshold"};

long long parse_int(const std::string &key, const std::string &value)
{
    std::size_t used = 0;
    long long v = 0;
    try
    {
        v = std::stoll(value, &used);
    }
    catch (const std::exception &)
    {
        used = 0;
    }
    if (used == 0 || used != value.size())
        throw std::invalid_argument("config key '" + key + "' expects an integer, got '" + value + "'");
    return v;
}

std::uint64_t parse_seed(const std::string &key, const std::string &value)
{
    const long long v = parse_int(key, value);
    if (v < 0)
        throw std::invalid_argument("config key '" + key + "' must be nonnegative");
    return static_cast<std::uint64_t>(v);
}

bool parse_bool(const std::string &key, const std::string &value)
{
    if (value == "true" || value == "1")
        return true;
    if (value == "false" || value == "0")
        return false;
    throw std::invalid_argument("config key '" + key + "' expects true or false, got '" + value + "'");
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw std::overflow_error("flop_model: count exceeds 64 bits");
    return r;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw std::overflow_error("flop_model: count exceeds 64 bits");
    return r;
}

template <class... T> std::uint64_t mul(std::uint64_t a, T... rest)
{
    ((a = checked_mul(a, static_cast<std::uint64_t>(rest))), ...);
    return a;
}

ojson ratio_json(const std::optional<double> &r)
{
    return r ? ojson(*r) : ojson(nullptr);
}

} // namespace

// --- configuration --------------------------------------------------------

bool is_hyper_key(const std::string &key)
{
    for (const char *k : hyper_keys)
        if (key == k)
            return true;
    return false;
}

void apply_experiment_config(ExperimentConfig &ec, const std::map<std::string, std::string> &kv)
{
    for (const auto &[key, value] : kv)
        if (!is_config_key(key) && !is_hyper_key(key))
            throw std::invalid_argument("unknown config key '" + key + "'");
    apply_config(ec.system, kv);

    for (const auto &[key, value] : kv)
    {
        if (key == "epochs")
        {
            const long long e = parse_int(key, value);
            if (e < 1 || e > std::numeric_limits<int>::max())
                throw std::invalid_argument("epochs must be a positive integer");
            ec.hyper.epochs = static_cast<int>(e);
        }
        else if (key == "learning_rate")
            ec.hyper.adam.learning_rate = parse_double(value);
        else if (key == "beta1")
            ec.hyper.adam.beta1 = parse_double(value);
        else if (key == "beta2")
            ec.hyper.adam.beta2 = parse_double(value);
        else if (key == "adam_eps")
            ec.hyper.adam.eps = parse_double(value);
        else if (key == "mu0")
            ec.hyper.lag.mu = parse_double(value);
        else if (key == "nu0")
            ec.hyper.lag.nu = parse_double(value);
        else if (key == "eps_mu")
            ec.hyper.lag.eps_mu = parse_double(value);
        else if (key == "eps_nu")
            ec.hyper.lag.eps_nu = parse_double(value);
        else if (key == "validation_split")
            ec.hyper.validation_split = parse_double(value);
        else if (key == "shuffle_seed")
            ec.hyper.shuffle_seed = parse_seed(key, value);
        else if (key == "model_seed")
            ec.model_seed = parse_seed(key, value);
        else if (key == "message_width")
            ec.jeepon.message_width = static_cast<int>(parse_int(key, value));
        else if (key == "layers")
            ec.jeepon.layers = static_cast<int>(parse_int(key, value));
        else if (key == "strict")
            ec.jeepon.strict = parse_bool(key, value);
        else if (key == "inference_statistics")
        {
            ec.jeepon.inference = nn::mode_from_string(value);
            ec.cnn.inference = ec.jeepon.inference;
        }
        else if (key == "claim_threshold")
            ec.claim_threshold = parse_double(value);
    }

    const auto &a = ec.hyper.adam;
    if (!(a.learning_rate > 0.0) || !(a.beta1 >= 0.0 && a.beta1 < 1.0) || !(a.beta2 >= 0.0 && a.beta2 < 1.0) ||
        !(a.eps > 0.0))
        throw std::invalid_argument("optimizer hyperparameters out of range");
    const auto &l = ec.hyper.lag;
    if (!(l.mu >= 0.0) || !(l.nu >= 0.0) || !(l.eps_mu >= 0.0) || !(l.eps_nu >= 0.0))
        throw std::invalid_argument("multipliers and their steps must be nonnegative");
    training_count(0, ec.hyper.validation_split); // range check
    if (ec.jeepon.message_width <= 0 || ec.jeepon.layers <= 0)
        throw std::invalid_argument("message_width and layers must be positive");
    if (!(ec.claim_threshold >= 0.0 && ec.claim_threshold < 1.0))
        throw std::invalid_argument("claim_threshold must lie in [0, 1)");
}

ExperimentConfig read_experiment_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    ExperimentConfig ec;
    apply_experiment_config(ec, parse_key_values(buf.str()));
    ec.system.validate();
    return ec;
}

// --- algorithms -----------------------------------------------------------

Algorithm greedy_algorithm(const SystemConfig &cfg)
{
    return {"greedy", [cfg](const ChannelSample &s) -> Schedule { return gusbf(s, cfg); }};
}

Algorithm sca_algorithm(const SystemConfig &cfg)
{
    return {"sca", [cfg](const ChannelSample &s) -> Schedule { return sca_usbf(s, cfg); }};
}

Algorithm oracle_algorithm(const SystemConfig &cfg)
{
    return {"oracle", [cfg](const ChannelSample &s) { return exhaustive_oracle(s, cfg); }};
}

Algorithm learned_algorithm(const std::string &id, std::shared_ptr<const Checkpoint> ckpt, const SystemConfig &cfg,
                            double claim_threshold)
{
    if (!ckpt)
        throw std::invalid_argument("learned_algorithm: no checkpoint");
    return {id, [ckpt, cfg, claim_threshold](const ChannelSample &s) {
                return std::visit([&](const auto &m) { return learned_infer(m, s, cfg, claim_threshold); },
                                  ckpt->model);
            }};
}

// --- comparison -----------------------------------------------------------

double ratio_of_means(double numerator, double denominator, bool &defined)
{
    defined = denominator > 0.0;
    return defined ? numerator / denominator : 0.0;
}

RunReport compare(const std::vector<ChannelSample> &samples, const std::vector<Algorithm> &algorithms,
                  const SystemConfig &cfg, bool timing)
{
    cfg.validate();
    for (std::size_t i = 0; i < algorithms.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (algorithms[i].id == algorithms[j].id)
                throw std::invalid_argument("compare: algorithm '" + algorithms[i].id + "' listed twice");
    for (const ChannelSample &s : samples)
        if (s.users() != cfg.K || s.antennas() != cfg.N)
            throw std::invalid_argument("compare: sample shape does not match the configuration");

    RunReport rep;
    rep.samples = samples.size();
    for (const Algorithm &a : algorithms)
    {
        rep.algorithms.push_back(a.id);
        rep.mean_cardinality[a.id] = 0.0;
        rep.mean_power[a.id] = 0.0;
    }

    for (std::size_t i = 0; i < samples.size(); ++i)
        for (const Algorithm &a : algorithms)
        {
            const auto t0 = std::chrono::steady_clock::now();
            const Schedule sch = a.run(samples[i]);
            const auto t1 = std::chrono::steady_clock::now();
            const FeasibilityCheck chk = check_downlink_schedule(samples[i], cfg, sch.S, sch.alloc.p, sch.alloc.W);
            if (!chk.ok)
                throw HardFailure("compare: " + a.id + " produced an infeasible schedule on sample " +
                                  std::to_string(i) + ": " + chk.reason);
            SampleRecord r;
            r.sample_id = i;
            r.algorithm = a.id;
            r.cardinality = sch.S.size();
            r.total_power = chk.total_power;
            r.runtime_ms = timing ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
            r.feasible = true;
            rep.mean_cardinality[a.id] += static_cast<double>(r.cardinality);
            rep.mean_power[a.id] += r.total_power;
            rep.records.push_back(std::move(r));
        }

    if (!samples.empty())
        for (const std::string &id : rep.algorithms)
        {
            rep.mean_cardinality[id] /= static_cast<double>(samples.size());
            rep.mean_power[id] /= static_cast<double>(samples.size());
        }

    for (const RatioDefinition &d : ratio_definitions)
    {
        if (!rep.mean_cardinality.contains(d.numerator) || !rep.mean_cardinality.contains(d.denominator))
            continue;
        bool defined = false;
        const double v = ratio_of_means(rep.mean_cardinality[d.numerator], rep.mean_cardinality[d.denominator],
                                        defined);
        rep.ratios.emplace_back(d.name, defined ? std::optional<double>(v) : std::nullopt);
    }
    return rep;
}

// --- serialization --------------------------------------------------------

std::string report_csv(const RunReport &r)
{
    std::string out = "sample_id,algorithm,cardinality,total_power,runtime_ms,feasible\n";
    for (const SampleRecord &s : r.records)
        out += std::to_string(s.sample_id) + ',' + s.algorithm + ',' + std::to_string(s.cardinality) + ',' +
               format_double(s.total_power) + ',' + format_double(s.runtime_ms) + ',' +
               (s.feasible ? "true" : "false") + '\n';
    return out;
}

std::string report_summary_csv(const RunReport &r)
{
    std::string out = "metric,algorithm,value\n";
    for (const std::string &id : r.algorithms)
        out += "mean_cardinality," + id + ',' + format_double(r.mean_cardinality.at(id)) + '\n';
    for (const std::string &id : r.algorithms)
        out += "mean_total_power," + id + ',' + format_double(r.mean_power.at(id)) + '\n';
    for (const auto &[name, v] : r.ratios)
        out += name + ",," + (v ? format_double(*v) : std::string("NA")) + '\n';
    return out;
}

std::string report_json(const RunReport &r)
{
    ojson j;
    j["samples"] = r.samples;
    j["algorithms"] = r.algorithms;
    ojson recs = ojson::array();
    for (const SampleRecord &s : r.records)
        recs.push_back({{"sample_id", s.sample_id},
                        {"algorithm", s.algorithm},
                        {"cardinality", s.cardinality},
                        {"total_power", s.total_power},
                        {"runtime_ms", s.runtime_ms},
                        {"feasible", s.feasible}});
    j["records"] = std::move(recs);
    ojson agg;
    ojson card = ojson::object(), power = ojson::object(), ratios = ojson::object();
    for (const std::string &id : r.algorithms)
    {
        card[id] = r.mean_cardinality.at(id);
        power[id] = r.mean_power.at(id);
    }
    for (const auto &[name, v] : r.ratios)
        ratios[name] = ratio_json(v);
    agg["mean_cardinality"] = std::move(card);
    agg["mean_total_power"] = std::move(power);
    agg["ratios"] = std::move(ratios);
    j["aggregate"] = std::move(agg);
    return j.dump(2) + '\n';
}

std::string history_json(const TrainResult &r, const std::string &kind)
{
    ojson j;
    j["model"] = kind;
    j["steps"] = r.steps;
    j["train_samples"] = r.train_samples;
    j["validation_samples"] = r.validation_samples;
    ojson epochs = ojson::array();
    for (const EpochRecord &e : r.history)
        epochs.push_back({{"epoch", e.epoch},
                          {"train_loss", e.train_loss},
                          {"val_loss", e.val_loss},
                          {"binary_violation", e.binary_violation},
                          {"sinr_violation", e.sinr_violation},
                          {"mu", e.mu},
                          {"nu", e.nu},
                          {"wall_seconds", e.wall_seconds}});
    j["epochs"] = std::move(epochs);
    return j.dump(2) + '\n';
}

std::string history_csv(const TrainResult &r)
{
    std::string out = "epoch,train_loss,val_loss,binary_violation,sinr_violation,mu,nu,wall_seconds\n";
    for (const EpochRecord &e : r.history)
        out += std::to_string(e.epoch) + ',' + format_double(e.train_loss) + ',' + format_double(e.val_loss) +
               ',' + format_double(e.binary_violation) + ',' + format_double(e.sinr_violation) + ',' +
               format_double(e.mu) + ',' + format_double(e.nu) + ',' + format_double(e.wall_seconds) + '\n';
    return out;
}

// --- flop counts ----------------------------------------------------------

FlopAlgorithm flop_algorithm_from_string(const std::string &s)
{
    if (s == "greedy")
        return FlopAlgorithm::greedy;
    if (s == "sca")
        return FlopAlgorithm::sca;
    if (s == "jusbf")
        return FlopAlgorithm::jusbf;
    throw std::invalid_argument("flop_model: unknown algorithm '" + s + "'");
}

std::vector<std::vector<int>> default_jeepon_chains()
{
    const JeeponConfig c;
    std::vector<std::vector<int>> h;
    for (int l = 0; l < c.layers; ++l)
    {
        h.push_back(c.message_chain());
        h.push_back(c.update_chain());
    }
    return h;
}

std::uint64_t flop_model(FlopAlgorithm alg, const FlopParams &p)
{
    const std::uint64_t K = p.K, N = p.N;
    if (K == 0 || N == 0)
        throw std::invalid_argument("flop_model: K and N must be positive");
    switch (alg)
    {
    case FlopAlgorithm::greedy: {
        if (p.I1 == 0)
            throw std::invalid_argument("flop_model: I1 must be positive");
        std::uint64_t total = 0;
        for (std::uint64_t k = 2; k <= K; ++k)
        {
            const std::uint64_t inner =
                checked_add(checked_mul(p.I1, checked_add(mul(k, k, k, N), mul(5, k, k, N))), k * k);
            total = checked_add(total, mul(4, K - k + 1, inner));
        }
        return total;
    }
    case FlopAlgorithm::sca: {
        if (p.I2 == 0 || p.I3 == 0)
            throw std::invalid_argument("flop_model: I2 and I3 must be positive");
        const std::uint64_t per_inner = checked_add(checked_add(mul(7, K, K, N), mul(4, K, N)), mul(14, K, K));
        const std::uint64_t per_outer = mul(K, checked_add(checked_add(mul(N, N, N), mul(2, N, N)), 2 * N));
        return mul(4, p.I3, checked_add(checked_mul(p.I2, per_inner), per_outer));
    }
    case FlopAlgorithm::jusbf: {
        const auto chains = p.chains.empty() ? default_jeepon_chains() : p.chains;
        std::uint64_t layers = 0;
        for (const auto &h : chains)
        {
            if (h.size() < 2)
                throw std::invalid_argument("flop_model: a chain needs at least two sizes");
            for (int w : h)
                if (w <= 0)
                    throw std::invalid_argument("flop_model: chain widths must be positive");
            for (std::size_t i = 1; i < h.size(); ++i)
                layers = checked_add(layers, mul(2 + static_cast<std::uint64_t>(h[i - 1]), h[i]));
        }
        const std::uint64_t body = checked_add(checked_add(mul(2, K, K, N), mul(2, K, N, N)), checked_mul(K, layers));
        return checked_mul(2, body);
    }
    }
    throw std::invalid_argument("flop_model: unknown algorithm");
}

} // namespace usbf
