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

#include "usbf/cli.hpp"
#include "usbf/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <sstream>

namespace usbf {

namespace {

struct Common
{
    std::optional<std::uint64_t> seed;
    std::string config;
    std::string out;
    std::string format = "csv";
};

std::map<std::string, std::string> read_kv(const std::string &path)
{
    if (path.empty())
        return {};
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str());
}

ExperimentConfig experiment(const std::map<std::string, std::string> &kv)
{
    ExperimentConfig ec;
    apply_experiment_config(ec, kv);
    ec.system.validate();
    return ec;
}

// The dataset header fixes the system; an explicit config may only repeat it.
void check_against_dataset(const SystemConfig &data_cfg, const std::map<std::string, std::string> &kv)
{
    SystemConfig c = data_cfg;
    apply_config(c, kv);
    c.rng_seed = data_cfg.rng_seed;
    if (!(c == data_cfg))
        throw std::invalid_argument("config file does not match the dataset's system parameters");
}

void emit(const std::string &path, const std::string &text, std::ostream &out)
{
    if (path.empty())
    {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open output file " + path);
    f << text;
    if (!f)
        throw std::runtime_error("failed writing " + path);
}

std::string sibling(const std::string &path, const std::string &suffix)
{
    std::filesystem::path p(path);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

void emit_report(const Common &c, const RunReport &r, std::ostream &out)
{
    if (c.format == "json")
    {
        emit(c.out, report_json(r), out);
        return;
    }
    if (c.out.empty())
    {
        out << report_csv(r) << '\n' << report_summary_csv(r);
        return;
    }
    emit(c.out, report_csv(r), out);
    emit(sibling(c.out, "_summary.csv"), report_summary_csv(r), out);
}

std::shared_ptr<const Checkpoint> load_shared(const std::string &path)
{
    return std::make_shared<const Checkpoint>(load_checkpoint(path));
}

std::vector<std::string> split_list(const std::string &s)
{
    std::vector<std::string> v;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty())
            v.push_back(item);
    return v;
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"User scheduling and beamforming: greedy, SCA and learned schedulers"};
    app.require_subcommand(1);
    app.fallthrough();

    Common c;
    app.add_option("--seed", c.seed, "Seed overriding the config (data seed for gen-data, model seed for train)");
    app.add_option("--config", c.config, "Flat key = value config file")->check(CLI::ExistingFile);
    app.add_option("--out", c.out, "Output path (stdout when omitted)");
    app.add_option("--format", c.format, "Table format")->check(CLI::IsMember({"csv", "json"}));

    std::size_t count = 100;
    auto *gen = app.add_subcommand("gen-data", "Generate a channel dataset");
    gen->add_option("--count", count, "Number of samples")->check(CLI::PositiveNumber);

    std::string data, model_kind = "jeepon", history, ckpt_path, id;
    bool timing = false, verbose = false;
    auto *trn = app.add_subcommand("train", "Train a learned scheduler");
    trn->add_option("--data", data, "Dataset file")->required()->check(CLI::ExistingFile);
    trn->add_option("--model", model_kind, "Model kind")->check(CLI::IsMember({"jeepon", "cnn"}));
    trn->add_option("--history", history, "Training history path (default: next to the checkpoint)");
    trn->add_flag("--timing", timing, "Record wall time per epoch");
    trn->add_flag("--verbose", verbose, "Print one line per epoch on stderr");

    auto *ev = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
    ev->add_option("--data", data, "Dataset file")->required()->check(CLI::ExistingFile);
    ev->add_option("--model", ckpt_path, "Checkpoint file")->required()->check(CLI::ExistingFile);
    ev->add_option("--id", id, "Algorithm id in the report (default: jusbf or cnn by model kind)");
    ev->add_flag("--timing", timing, "Measure runtime per sample");

    std::vector<CLI::App *> single;
    for (const char *name : {"greedy", "sca", "oracle"})
    {
        auto *s = app.add_subcommand(name, std::string("Run the ") + name + " scheduler on a dataset");
        s->add_option("--data", data, "Dataset file")->required()->check(CLI::ExistingFile);
        s->add_flag("--timing", timing, "Measure runtime per sample");
        single.push_back(s);
    }

    std::string algorithms = "greedy,sca", jusbf_ckpt, cnn_ckpt, transfer_ckpt;
    auto *cmp = app.add_subcommand("compare", "Run several schedulers and report ratios");
    cmp->add_option("--data", data, "Dataset file")->required()->check(CLI::ExistingFile);
    cmp->add_option("--algorithms", algorithms,
                    "Comma-separated ids: greedy, sca, jusbf, cnn, jusbf_transfer, oracle");
    cmp->add_option("--jusbf", jusbf_ckpt, "JEEPON checkpoint for jusbf")->check(CLI::ExistingFile);
    cmp->add_option("--cnn", cnn_ckpt, "CNN checkpoint for cnn")->check(CLI::ExistingFile);
    cmp->add_option("--transfer", transfer_ckpt, "Checkpoint for jusbf_transfer")->check(CLI::ExistingFile);
    cmp->add_flag("--timing", timing, "Measure runtime per sample");

    std::vector<std::uint64_t> flop_k{10, 20, 30, 40, 50};
    std::uint64_t flop_n = 32;
    FlopParams fp;
    std::string flop_algs = "greedy,sca,jusbf";
    auto *fl = app.add_subcommand("flops", "Tabulate floating-point operation counts");
    fl->add_option("--K", flop_k, "User counts")->delimiter(',');
    fl->add_option("--N", flop_n, "Antenna count");
    fl->add_option("--I1", fp.I1, "Greedy power-control iterations");
    fl->add_option("--I2", fp.I2, "SCA inner iterations");
    fl->add_option("--I3", fp.I3, "SCA outer iterations");
    fl->add_option("--algorithms", flop_algs, "Comma-separated ids: greedy, sca, jusbf");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        return app.exit(e, out, err);
    }

    try
    {
        const auto kv = read_kv(c.config);
        ExperimentConfig ec = experiment(kv);

        if (gen->parsed())
        {
            if (c.out.empty())
                throw std::invalid_argument("gen-data needs --out");
            if (c.seed)
                ec.system.rng_seed = *c.seed;
            write_dataset(c.out, generate_dataset(ec.system, count), ec.system);
            return 0;
        }

        if (fl->parsed())
        {
            fp.N = flop_n;
            const auto ids = split_list(flop_algs);
            nlohmann::ordered_json rows = nlohmann::ordered_json::array();
            std::string csv = "K,N,I1,I2,I3,algorithm,flops\n";
            for (std::uint64_t K : flop_k)
                for (const std::string &a : ids)
                {
                    fp.K = K;
                    const std::uint64_t n = flop_model(flop_algorithm_from_string(a), fp);
                    csv += std::to_string(K) + ',' + std::to_string(flop_n) + ',' + std::to_string(fp.I1) + ',' +
                           std::to_string(fp.I2) + ',' + std::to_string(fp.I3) + ',' + a + ',' +
                           std::to_string(n) + '\n';
                    rows.push_back({{"K", K}, {"N", flop_n}, {"I1", fp.I1}, {"I2", fp.I2}, {"I3", fp.I3},
                                    {"algorithm", a}, {"flops", n}});
                }
            emit(c.out, c.format == "json" ? rows.dump(2) + '\n' : csv, out);
            return 0;
        }

        const Dataset ds = read_dataset(data);
        check_against_dataset(ds.cfg, kv);
        const SystemConfig &cfg = ds.cfg;

        if (trn->parsed())
        {
            if (c.out.empty())
                throw std::invalid_argument("train needs --out for the checkpoint");
            if (c.seed)
                ec.model_seed = *c.seed;
            TrainHyper hyper = ec.hyper;
            hyper.timing = timing;
            SampleObserver none;
            Checkpoint ck;
            TrainResult res;
            auto run = [&](auto model) {
                res = train(model, ds.samples, cfg, hyper, none);
                ck.model = std::move(model);
            };
            if (model_kind == "jeepon")
                run(JeeponModel::make(ec.jeepon, ec.model_seed));
            else
                run(CnnModel::make(ec.cnn, ec.model_seed));
            ck.meta.steps = res.steps;
            ck.meta.lag = res.lag;
            ck.meta.adam = hyper.adam;
            save_checkpoint(c.out, ck);
            if (verbose)
                for (const EpochRecord &e : res.history)
                    err << "epoch " << e.epoch << " train " << format_double(e.train_loss) << " val "
                        << format_double(e.val_loss) << " mu " << format_double(e.mu) << " nu "
                        << format_double(e.nu) << '\n';
            const std::string hpath =
                history.empty() ? sibling(c.out, c.format == "json" ? "_history.json" : "_history.csv") : history;
            emit(hpath, c.format == "json" ? history_json(res, ck.kind()) : history_csv(res), out);
            return 0;
        }

        std::vector<Algorithm> algs;
        if (ev->parsed())
        {
            auto ck = load_shared(ckpt_path);
            algs.push_back(learned_algorithm(id.empty() ? (ck->kind() == "cnn" ? "cnn" : "jusbf") : id, ck, cfg,
                                             ec.claim_threshold));
        }
        else if (cmp->parsed())
        {
            for (const std::string &a : split_list(algorithms))
            {
                auto need = [&](const std::string &path, const char *flag) {
                    if (path.empty())
                        throw std::invalid_argument("algorithm '" + a + "' needs " + flag);
                    return load_shared(path);
                };
                if (a == "greedy")
                    algs.push_back(greedy_algorithm(cfg));
                else if (a == "sca")
                    algs.push_back(sca_algorithm(cfg));
                else if (a == "oracle")
                    algs.push_back(oracle_algorithm(cfg));
                else if (a == "jusbf")
                    algs.push_back(learned_algorithm(a, need(jusbf_ckpt, "--jusbf"), cfg, ec.claim_threshold));
                else if (a == "cnn")
                    algs.push_back(learned_algorithm(a, need(cnn_ckpt, "--cnn"), cfg, ec.claim_threshold));
                else if (a == "jusbf_transfer")
                    algs.push_back(
                        learned_algorithm(a, need(transfer_ckpt, "--transfer"), cfg, ec.claim_threshold));
                else
                    throw std::invalid_argument("unknown algorithm '" + a + "'");
            }
            if (algs.empty())
                throw std::invalid_argument("compare needs at least one algorithm");
        }
        else if (single[0]->parsed())
            algs.push_back(greedy_algorithm(cfg));
        else if (single[1]->parsed())
            algs.push_back(sca_algorithm(cfg));
        else
            algs.push_back(oracle_algorithm(cfg));

        emit_report(c, compare(ds.samples, algs, cfg, timing), out);
        return 0;
    }
    catch (const std::exception &e)
    {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace usbf
