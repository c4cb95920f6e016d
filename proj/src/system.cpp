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

#include "usbf/system.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace usbf {

std::string to_string(RateMode mode)
{
    return mode == RateMode::shannon ? "shannon" : "finite_blocklength";
}

RateMode rate_mode_from_string(const std::string &text)
{
    if (text == "finite_blocklength" || text == "fbl")
        return RateMode::finite_blocklength;
    if (text == "shannon")
        return RateMode::shannon;
    throw std::invalid_argument("unknown rate_mode '" + text + "'");
}

void SystemConfig::validate() const
{
    if (N < 1)
        throw std::invalid_argument("SystemConfig: N must be >= 1");
    if (K < 1)
        throw std::invalid_argument("SystemConfig: K must be >= 1");
    if (!(d_min <= d_l && d_l < d_r && d_r <= d_max))
        throw std::invalid_argument("SystemConfig: ring must satisfy d_min <= d_l < d_r <= d_max");
    if (!(eps > 0.0 && eps < 0.5))
        throw std::invalid_argument("SystemConfig: eps must lie in (0, 0.5)");
    if (n_bl < 1 || D < 1)
        throw std::invalid_argument("SystemConfig: n_bl and D must be >= 1");
    if (!(delta > 0.0) || !(lambda > 0.0))
        throw std::invalid_argument("SystemConfig: delta and lambda must be positive");
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("SystemConfig: sigma2 must be positive");
    if (!(varrho > 0.0))
        throw std::invalid_argument("SystemConfig: varrho must be positive");
}

ComplexColumns ChannelSample::normalized_channels() const
{
    ComplexColumns hbar = H.transpose();
    for (Eigen::Index k = 0; k < hbar.cols(); ++k)
        hbar.col(k) /= std::sqrt(sigma2(k));
    return hbar;
}

double path_loss(double distance_m, double d_min, double varrho)
{
    return 1.0 / (1.0 + std::pow(distance_m / d_min, varrho));
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index)
{
    // splitmix64 finalizer over (seed, index).
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

ChannelSample generate_sample(const SystemConfig &cfg, Rng &rng)
{
    if (!(cfg.d_l < cfg.d_r) || cfg.d_l <= 0.0)
        throw std::invalid_argument("generate_sample: invalid ring bounds");

    std::uniform_real_distribution<double> ring(cfg.d_l, cfg.d_r);
    // CN(0, 1): real and imaginary parts each N(0, 1/2).
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));

    ChannelSample s;
    s.H.resize(cfg.K, cfg.N);
    s.sigma2 = RealVector::Constant(cfg.K, cfg.sigma2);
    s.distances_m.resize(cfg.K);
    for (int k = 0; k < cfg.K; ++k)
    {
        const double d = ring(rng);
        s.distances_m(k) = d;
        const double amp = std::sqrt(path_loss(d, cfg.d_min, cfg.varrho));
        for (int n = 0; n < cfg.N; ++n)
        {
            const double re = gauss(rng);
            const double im = gauss(rng);
            s.H(k, n) = amp * std::complex<double>(re, im);
        }
    }
    return s;
}

std::vector<ChannelSample> generate_dataset(const SystemConfig &cfg, std::size_t count)
{
    cfg.validate();
    std::vector<ChannelSample> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        Rng rng(substream_seed(cfg.rng_seed, i));
        out.push_back(generate_sample(cfg, rng));
    }
    return out;
}

// --- key/value config ------------------------------------------------------

std::string format_double(double value)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string &text)
{
    double v = 0.0;
    const char *first = text.data();
    const char *last = text.data() + text.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw std::invalid_argument("not a number: '" + text + "'");
    return v;
}

namespace {

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

long long parse_integer(const std::string &key, const std::string &text)
{
    long long v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::invalid_argument("config key '" + key + "' expects an integer, got '" + text + "'");
    return v;
}

const char *const config_keys[] = {"N",     "K",      "snr_db", "sigma2", "d_l",   "d_r",    "d_min",     "d_max",
                                   "varrho", "D",     "n_bl",   "eps",    "delta", "lambda", "rate_mode", "rng_seed"};

} // namespace

std::map<std::string, std::string> parse_key_values(const std::string &text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 'key = value'");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

bool is_config_key(const std::string &key)
{
    for (const char *k : config_keys)
        if (key == k)
            return true;
    return false;
}

void apply_config(SystemConfig &cfg, const std::map<std::string, std::string> &kv)
{
    for (const auto &[key, value] : kv)
    {
        if (key == "N")
            cfg.N = static_cast<int>(parse_integer(key, value));
        else if (key == "K")
            cfg.K = static_cast<int>(parse_integer(key, value));
        else if (key == "snr_db")
            cfg.snr_db = parse_double(value);
        else if (key == "sigma2")
            cfg.sigma2 = parse_double(value);
        else if (key == "d_l")
            cfg.d_l = parse_double(value);
        else if (key == "d_r")
            cfg.d_r = parse_double(value);
        else if (key == "d_min")
            cfg.d_min = parse_double(value);
        else if (key == "d_max")
            cfg.d_max = parse_double(value);
        else if (key == "varrho")
            cfg.varrho = parse_double(value);
        else if (key == "D")
            cfg.D = static_cast<int>(parse_integer(key, value));
        else if (key == "n_bl")
            cfg.n_bl = static_cast<int>(parse_integer(key, value));
        else if (key == "eps")
            cfg.eps = parse_double(value);
        else if (key == "delta")
            cfg.delta = parse_double(value);
        else if (key == "lambda")
            cfg.lambda = parse_double(value);
        else if (key == "rate_mode")
            cfg.rate_mode = rate_mode_from_string(value);
        else if (key == "rng_seed")
            cfg.rng_seed = static_cast<std::uint64_t>(parse_integer(key, value));
    }
}

std::string format_config(const SystemConfig &cfg)
{
    std::ostringstream os;
    os << "N = " << cfg.N << "\n"
       << "K = " << cfg.K << "\n"
       << "snr_db = " << format_double(cfg.snr_db) << "\n"
       << "sigma2 = " << format_double(cfg.sigma2) << "\n"
       << "d_l = " << format_double(cfg.d_l) << "\n"
       << "d_r = " << format_double(cfg.d_r) << "\n"
       << "d_min = " << format_double(cfg.d_min) << "\n"
       << "d_max = " << format_double(cfg.d_max) << "\n"
       << "varrho = " << format_double(cfg.varrho) << "\n"
       << "D = " << cfg.D << "\n"
       << "n_bl = " << cfg.n_bl << "\n"
       << "eps = " << format_double(cfg.eps) << "\n"
       << "delta = " << format_double(cfg.delta) << "\n"
       << "lambda = " << format_double(cfg.lambda) << "\n"
       << "rate_mode = " << to_string(cfg.rate_mode) << "\n"
       << "rng_seed = " << cfg.rng_seed << "\n";
    return os.str();
}

SystemConfig read_config_file(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    SystemConfig cfg;
    apply_config(cfg, parse_key_values(buf.str()));
    cfg.validate();
    return cfg;
}

// --- binary helpers -------------------------------------------------------

void put_f64(std::string &out, double value)
{
    const auto bits = std::bit_cast<std::uint64_t>(value);
    for (int b = 0; b < 8; ++b)
        out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

double get_f64(const char *bytes)
{
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[b])) << (8 * b);
    return std::bit_cast<double>(bits);
}

// --- dataset file -----------------------------------------------------------
//
// Text header:
//   usbf-dataset <version>
//   rng = <algorithm>
//   count = <samples>
//   <SystemConfig keys>
//   end
// followed by, per sample, K distances then K*N (re, im) pairs row-major by
// user, all little-endian float64.

void write_dataset(const std::filesystem::path &path, const std::vector<ChannelSample> &samples,
                   const SystemConfig &cfg)
{
    for (const auto &s : samples)
        if (s.users() != cfg.K || s.antennas() != cfg.N)
            throw DatasetError("write_dataset: sample shape does not match config (N, K)");

    std::string out = "usbf-dataset " + std::to_string(dataset_format_version) + "\n";
    out += "rng = " + std::string(rng_algorithm) + "\n";
    out += "count = " + std::to_string(samples.size()) + "\n";
    out += format_config(cfg);
    out += "end\n";
    out.reserve(out.size() + samples.size() * static_cast<std::size_t>(cfg.K) * (1 + 2 * cfg.N) * 8);
    for (const auto &s : samples)
    {
        for (int k = 0; k < cfg.K; ++k)
            put_f64(out, s.distances_m(k));
        for (int k = 0; k < cfg.K; ++k)
            for (int n = 0; n < cfg.N; ++n)
            {
                put_f64(out, s.H(k, n).real());
                put_f64(out, s.H(k, n).imag());
            }
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw DatasetError("write_dataset: cannot open " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f)
        throw DatasetError("write_dataset: write failed for " + path.string());
}

Dataset read_dataset(const std::filesystem::path &path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw DatasetError("read_dataset: cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    const std::string magic = "usbf-dataset ";
    if (bytes.compare(0, magic.size(), magic) != 0)
        throw DatasetError("read_dataset: not a usbf dataset file");
    const auto first_nl = bytes.find('\n');
    const std::string version = bytes.substr(magic.size(), first_nl - magic.size());
    if (version != std::to_string(dataset_format_version))
        throw DatasetError("read_dataset: unsupported format version " + version);
    const auto end_pos = bytes.find("\nend\n");
    if (end_pos == std::string::npos)
        throw DatasetError("read_dataset: header terminator missing");

    auto kv = parse_key_values(bytes.substr(first_nl + 1, end_pos - first_nl));
    if (!kv.count("count") || !kv.count("N") || !kv.count("K"))
        throw DatasetError("read_dataset: header lacks count/N/K");
    if (kv.count("rng") && kv["rng"] != rng_algorithm)
        throw DatasetError("read_dataset: dataset generated with unknown rng '" + kv["rng"] + "'");

    Dataset ds;
    apply_config(ds.cfg, kv);
    const auto count = static_cast<std::size_t>(std::stoull(kv["count"]));

    const std::size_t payload_begin = end_pos + 5;
    const std::size_t per_sample = static_cast<std::size_t>(ds.cfg.K) * (1 + 2 * ds.cfg.N) * 8;
    const std::size_t expected = count * per_sample;
    const std::size_t available = bytes.size() - payload_begin;
    if (available < expected)
        throw DatasetError("read_dataset: truncated payload (" + std::to_string(available) + " of " +
                           std::to_string(expected) + " bytes)");
    if (available > expected)
        throw DatasetError("read_dataset: trailing bytes after payload");

    const char *p = bytes.data() + payload_begin;
    ds.samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        ChannelSample s;
        s.H.resize(ds.cfg.K, ds.cfg.N);
        s.distances_m.resize(ds.cfg.K);
        s.sigma2 = RealVector::Constant(ds.cfg.K, ds.cfg.sigma2);
        for (int k = 0; k < ds.cfg.K; ++k, p += 8)
            s.distances_m(k) = get_f64(p);
        for (int k = 0; k < ds.cfg.K; ++k)
            for (int n = 0; n < ds.cfg.N; ++n, p += 16)
                s.H(k, n) = {get_f64(p), get_f64(p + 8)};
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

} // namespace usbf
