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

#ifndef USBF_HARNESS_HPP
#define USBF_HARNESS_HPP

#include "usbf/checkpoint.hpp"
#include "usbf/sca.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace usbf {

// An algorithm produced an output the independent checker rejects.
class HardFailure : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Everything a config file may set: the system keys plus training hyperparameters.
struct ExperimentConfig
{
    SystemConfig system;
    TrainHyper hyper;
    JeeponConfig jeepon;
    CnnConfig cnn;
    std::uint64_t model_seed = 1;
    double claim_threshold = 0.0;
};

bool is_hyper_key(const std::string &key);
void apply_experiment_config(ExperimentConfig &ec, const std::map<std::string, std::string> &kv);
ExperimentConfig read_experiment_config(const std::filesystem::path &path);

struct Algorithm
{
    std::string id;
    std::function<Schedule(const ChannelSample &)> run;
};

Algorithm greedy_algorithm(const SystemConfig &cfg);
Algorithm sca_algorithm(const SystemConfig &cfg);
Algorithm oracle_algorithm(const SystemConfig &cfg);
// Learned model under the given id ("jusbf", "cnn", "jusbf_transfer", ...).
Algorithm learned_algorithm(const std::string &id, std::shared_ptr<const Checkpoint> ckpt, const SystemConfig &cfg,
                            double claim_threshold = 0.0);

struct SampleRecord
{
    std::size_t sample_id = 0;
    std::string algorithm;
    std::size_t cardinality = 0;
    double total_power = 0.0;
    double runtime_ms = 0.0;
    bool feasible = false;
};

struct RatioDefinition
{
    const char *name;
    const char *numerator;
    const char *denominator;
};

// R1 = SCA / G, R2 = J / G, R3 = CNN / J, R4 = transferred J / G, on mean cardinality.
inline constexpr RatioDefinition ratio_definitions[] = {{"R1", "sca", "greedy"},
                                                        {"R2", "jusbf", "greedy"},
                                                        {"R3", "cnn", "jusbf"},
                                                        {"R4", "jusbf_transfer", "greedy"}};

struct RunReport
{
    std::vector<std::string> algorithms;
    std::size_t samples = 0;
    std::vector<SampleRecord> records; // sample-major, algorithms in the given order
    std::map<std::string, double> mean_cardinality;
    std::map<std::string, double> mean_power;
    // Only ratios whose two algorithms both ran; nullopt when the denominator mean is 0.
    std::vector<std::pair<std::string, std::optional<double>>> ratios;
};

double ratio_of_means(double numerator, double denominator, bool &defined);

// Runs every algorithm on every sample and checks each schedule against the raw
// channels. Any rejected schedule throws HardFailure. runtime_ms is measured only
// when timing is set, so reports stay byte-reproducible by default.
RunReport compare(const std::vector<ChannelSample> &samples, const std::vector<Algorithm> &algorithms,
                  const SystemConfig &cfg, bool timing = false);

std::string report_csv(const RunReport &r);
std::string report_summary_csv(const RunReport &r);
std::string report_json(const RunReport &r);
std::string history_json(const TrainResult &r, const std::string &kind);
std::string history_csv(const TrainResult &r);

// Closed-form floating-point operation counts.
enum class FlopAlgorithm
{
    greedy,
    sca,
    jusbf
};

FlopAlgorithm flop_algorithm_from_string(const std::string &s);

struct FlopParams
{
    std::uint64_t K = 0;
    std::uint64_t N = 0;
    std::uint64_t I1 = 20; // greedy power-control iterations
    std::uint64_t I2 = 20; // SCA inner iterations
    std::uint64_t I3 = 20; // SCA outer iterations
    std::vector<std::vector<int>> chains; // learned model MLP chains; empty = default JEEPON
};

std::vector<std::vector<int>> default_jeepon_chains();
std::uint64_t flop_model(FlopAlgorithm alg, const FlopParams &p);

} // namespace usbf

#endif
