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

#ifndef USBF_SYSTEM_HPP
#define USBF_SYSTEM_HPP

#include "usbf/numerics.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace usbf {

enum class RateMode
{
    finite_blocklength,
    shannon
};

std::string to_string(RateMode mode);
RateMode rate_mode_from_string(const std::string &text);

// Scenario parameters. Field names match the keys of the flat config format.
struct SystemConfig
{
    int N = 32;              // BS antennas
    int K = 30;              // candidate users
    double snr_db = 10.0;    // 10 log10(P / sigma2)
    double sigma2 = 1.0;     // noise variance, identical for every user
    double d_l = 50.0;       // inner ring radius [m]
    double d_r = 100.0;      // outer ring radius [m]
    double d_min = 50.0;     // reference distance [m]
    double d_max = 200.0;    // cell radius [m]
    double varrho = 3.0;     // path-loss exponent
    int D = 256;             // data bits per packet
    int n_bl = 128;          // blocklength
    double eps = 1e-6;       // decoding error probability
    double delta = 1e-5;     // convergence tolerance
    double lambda = 1e-2;    // SCA penalty weight
    RateMode rate_mode = RateMode::finite_blocklength;
    std::uint64_t rng_seed = 1;

    // Total transmit power budget P.
    double power() const { return std::pow(10.0, snr_db / 10.0) * sigma2; }

    // Throws std::invalid_argument naming the first violated invariant.
    void validate() const;

    bool operator==(const SystemConfig &) const = default;
};

// One channel realization. Row k of H holds the entries of h_k.
struct ChannelSample
{
    ComplexMatrix H;        // K x N
    RealVector sigma2;      // per-user noise variances
    RealVector distances_m; // per-user distance from the BS

    Eigen::Index users() const { return H.rows(); }
    Eigen::Index antennas() const { return H.cols(); }

    // N x K matrix whose column k is h_k / sigma_k.
    ComplexColumns normalized_channels() const;

    bool operator==(const ChannelSample &o) const
    {
        return H == o.H && sigma2 == o.sigma2 && distances_m == o.distances_m;
    }
};

// Long-term path loss 1 / (1 + (d / d_min)^varrho).
double path_loss(double distance_m, double d_min, double varrho);

// Random engine used for channel generation; the name is recorded in dataset headers.
using Rng = std::mt19937_64;
inline constexpr const char *rng_algorithm = "mt19937_64/splitmix64-substreams";

// Seed of the independent substream for sample `index` under `seed`.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

ChannelSample generate_sample(const SystemConfig &cfg, Rng &rng);

// Sample i is drawn from substream_seed(cfg.rng_seed, i), so the result does not
// depend on how the work is split.
std::vector<ChannelSample> generate_dataset(const SystemConfig &cfg, std::size_t count);

// Flat "key = value" text, one entry per line, '#' starts a comment.
std::map<std::string, std::string> parse_key_values(const std::string &text);
std::string format_config(const SystemConfig &cfg);
// Applies every SystemConfig key present in `kv`; unknown keys are left for the caller.
void apply_config(SystemConfig &cfg, const std::map<std::string, std::string> &kv);
bool is_config_key(const std::string &key);
SystemConfig read_config_file(const std::filesystem::path &path);

// Shortest text form of a double that parses back to the same bits.
std::string format_double(double value);
double parse_double(const std::string &text);

class DatasetError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct Dataset
{
    SystemConfig cfg;
    std::vector<ChannelSample> samples;
};

inline constexpr int dataset_format_version = 1;

void write_dataset(const std::filesystem::path &path, const std::vector<ChannelSample> &samples,
                   const SystemConfig &cfg);
Dataset read_dataset(const std::filesystem::path &path);

// Little-endian float64 helpers shared by the binary file formats.
void put_f64(std::string &out, double value);
double get_f64(const char *bytes);

} // namespace usbf

#endif
