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

#include "usbf/checkpoint.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace usbf {

namespace {

std::string join(const std::vector<int> &v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? " " : "") + std::to_string(v[i]);
    return s;
}

std::vector<int> split_ints(const std::string &s)
{
    std::istringstream in(s);
    std::vector<int> v;
    int x;
    while (in >> x)
        v.push_back(x);
    if (!in.eof())
        throw CheckpointError("checkpoint: malformed integer list '" + s + "'");
    return v;
}

std::vector<int> hidden_of(const std::vector<int> &chain)
{
    if (chain.size() < 2)
        throw CheckpointError("checkpoint: chain too short");
    return {chain.begin() + 1, chain.end() - 1};
}

const std::string &need(const std::map<std::string, std::string> &kv, const std::string &key)
{
    auto it = kv.find(key);
    if (it == kv.end())
        throw CheckpointError("checkpoint: header lacks '" + key + "'");
    return it->second;
}

int need_int(const std::map<std::string, std::string> &kv, const std::string &key)
{
    try
    {
        return std::stoi(need(kv, key));
    }
    catch (const std::logic_error &)
    {
        throw CheckpointError("checkpoint: '" + key + "' is not an integer");
    }
}

double need_double(const std::map<std::string, std::string> &kv, const std::string &key)
{
    try
    {
        return parse_double(need(kv, key));
    }
    catch (const std::exception &)
    {
        throw CheckpointError("checkpoint: '" + key + "' is not a number");
    }
}

std::vector<std::span<double>> tensors(AnyModel &m)
{
    return std::visit([](auto &model) { return model.all_tensors(); }, m);
}

} // namespace

std::string Checkpoint::kind() const
{
    return std::visit([](const auto &m) { return std::string(std::decay_t<decltype(m)>::kind); }, model);
}

std::string serialize_checkpoint(const Checkpoint &ckpt)
{
    std::string out = "usbf-model " + std::to_string(checkpoint_format_version) + "\n";
    auto put = [&](const std::string &k, const std::string &v) { out += k + " = " + v + "\n"; };
    put("kind", ckpt.kind());
    if (const auto *j = std::get_if<JeeponModel>(&ckpt.model))
    {
        put("message_width", std::to_string(j->config.message_width));
        put("layers", std::to_string(j->config.layers));
        put("strict", j->config.strict ? "1" : "0");
        put("message_chain", join(j->config.message_chain()));
        put("update_chain", join(j->config.update_chain()));
        put("inference_statistics", nn::to_string(j->config.inference));
    }
    else
    {
        const auto &c = std::get<CnnModel>(ckpt.model);
        put("chain", join(c.config.chain));
        put("conv_layers", std::to_string(c.config.conv_layers));
        put("kernel_size", std::to_string(c.config.kernel_size));
        put("inference_statistics", nn::to_string(c.config.inference));
    }
    put("steps", std::to_string(ckpt.meta.steps));
    put("mu", format_double(ckpt.meta.lag.mu));
    put("nu", format_double(ckpt.meta.lag.nu));
    put("eps_mu", format_double(ckpt.meta.lag.eps_mu));
    put("eps_nu", format_double(ckpt.meta.lag.eps_nu));
    put("optimizer", "adam");
    put("learning_rate", format_double(ckpt.meta.adam.learning_rate));
    put("beta1", format_double(ckpt.meta.adam.beta1));
    put("beta2", format_double(ckpt.meta.adam.beta2));
    put("adam_eps", format_double(ckpt.meta.adam.eps));

    AnyModel copy = ckpt.model;
    const auto ts = tensors(copy);
    std::size_t count = 0;
    for (const auto &t : ts)
        count += t.size();
    put("values", std::to_string(count));
    out += "end\n";
    out.reserve(out.size() + 8 * count);
    for (const auto &t : ts)
        for (double v : t)
        {
            if (!std::isfinite(v))
                throw CheckpointError("checkpoint: refusing to save a non-finite parameter");
            put_f64(out, v);
        }
    return out;
}

Checkpoint deserialize_checkpoint(const std::string &bytes)
{
    const std::string magic = "usbf-model ";
    if (bytes.compare(0, magic.size(), magic) != 0)
        throw CheckpointError("checkpoint: not a usbf model file");
    const auto first_nl = bytes.find('\n');
    if (first_nl == std::string::npos)
        throw CheckpointError("checkpoint: header truncated");
    const std::string version = bytes.substr(magic.size(), first_nl - magic.size());
    if (version != std::to_string(checkpoint_format_version))
        throw CheckpointError("checkpoint: unsupported format version " + version);
    const auto end_pos = bytes.find("\nend\n");
    if (end_pos == std::string::npos)
        throw CheckpointError("checkpoint: header terminator missing");
    const auto kv = parse_key_values(bytes.substr(first_nl + 1, end_pos - first_nl));

    const std::string kind = need(kv, "kind");
    const nn::Mode inference = nn::mode_from_string(need(kv, "inference_statistics"));
    Checkpoint ck{JeeponModel{}, {}};
    if (kind == JeeponModel::kind)
    {
        JeeponConfig c;
        c.message_width = need_int(kv, "message_width");
        c.layers = need_int(kv, "layers");
        c.strict = need_int(kv, "strict") != 0;
        c.message_hidden = hidden_of(split_ints(need(kv, "message_chain")));
        c.update_hidden = hidden_of(split_ints(need(kv, "update_chain")));
        c.inference = inference;
        if (c.message_chain() != split_ints(need(kv, "message_chain")) ||
            c.update_chain() != split_ints(need(kv, "update_chain")))
            throw CheckpointError("checkpoint: chains inconsistent with width/strict settings");
        ck.model = JeeponModel::make(c, 0);
    }
    else if (kind == CnnModel::kind)
    {
        CnnConfig c;
        c.chain = split_ints(need(kv, "chain"));
        c.conv_layers = need_int(kv, "conv_layers");
        c.kernel_size = need_int(kv, "kernel_size");
        c.inference = inference;
        try
        {
            ck.model = CnnModel::make(c, 0);
        }
        catch (const std::invalid_argument &e)
        {
            throw CheckpointError(std::string("checkpoint: ") + e.what());
        }
    }
    else
        throw CheckpointError("checkpoint: unknown model kind '" + kind + "'");

    if (need(kv, "optimizer") != "adam")
        throw CheckpointError("checkpoint: unknown optimizer '" + need(kv, "optimizer") + "'");
    ck.meta.steps = need_int(kv, "steps");
    ck.meta.lag = {need_double(kv, "mu"), need_double(kv, "nu"), need_double(kv, "eps_mu"),
                   need_double(kv, "eps_nu")};
    ck.meta.adam = {need_double(kv, "learning_rate"), need_double(kv, "beta1"), need_double(kv, "beta2"),
                    need_double(kv, "adam_eps")};

    const auto ts = tensors(ck.model);
    std::size_t count = 0;
    for (const auto &t : ts)
        count += t.size();
    if (std::to_string(count) != need(kv, "values"))
        throw CheckpointError("checkpoint: header declares " + need(kv, "values") + " values, architecture needs " +
                              std::to_string(count));
    const std::size_t begin = end_pos + 5;
    if (bytes.size() - begin != 8 * count)
        throw CheckpointError("checkpoint: payload is " + std::to_string(bytes.size() - begin) + " bytes, expected " +
                              std::to_string(8 * count));
    const char *p = bytes.data() + begin;
    for (const auto &t : ts)
        for (double &v : t)
        {
            v = get_f64(p);
            p += 8;
            if (!std::isfinite(v))
                throw CheckpointError("checkpoint: non-finite parameter in payload");
        }
    return ck;
}

void save_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt)
{
    const std::string bytes = serialize_checkpoint(ckpt);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw CheckpointError("checkpoint: cannot open " + path.string());
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f)
        throw CheckpointError("checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path &path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw CheckpointError("checkpoint: cannot open " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return deserialize_checkpoint(bytes);
}

} // namespace usbf
