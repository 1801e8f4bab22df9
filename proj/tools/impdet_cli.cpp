// impdet: dataset generation, detector training, evaluation and BER sweeps.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "impdet/config.hpp"
#include "impdet/dataset.hpp"
#include "impdet/dnn.hpp"
#include "impdet/sweep.hpp"

namespace fs = std::filesystem;
using namespace impdet;

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> sets;
    std::string seed, noise, epsilon, sir, ebn0, model, epochs, symbols, threads;
    bool perfect_csi = false;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config_path, "key = value config file");
    app->add_option("--set", c.sets, "override, key=value (repeatable)");
    app->add_option("--seed", c.seed, "master seed");
    app->add_option("--noise", c.noise, "awgn|bg|mca|sas|bursty");
    app->add_option("--epsilon", c.epsilon, "impulse probability");
    app->add_option("--sir", c.sir, "SIR in dB");
    app->add_option("--ebn0", c.ebn0, "Eb/N0 grid in dB (list or start:step:stop)");
    app->add_option("--model", c.model, "model file");
    app->add_option("--epochs", c.epochs, "training epochs");
    app->add_option("--symbols", c.symbols, "OFDM symbols for dataset/evaluation");
    app->add_option("--threads", c.threads, "worker threads (0 = all cores)");
    app->add_flag("--perfect-csi", c.perfect_csi, "equalize with the true channel");
}

ExperimentConfig build_config(const Common& c) {
    ExperimentConfig cfg;
    if (!c.config_path.empty()) cfg = load_config(c.config_path);
    for (const auto& kv : c.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError(kv, "expected key=value");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    auto apply = [&](const char* key, const std::string& v) {
        if (!v.empty()) cfg.set(key, v);
    };
    apply("seed", c.seed);
    apply("noise", c.noise);
    apply("epsilon", c.epsilon);
    apply("sir_db", c.sir);
    apply("ebn0_db", c.ebn0);
    apply("model_path", c.model);
    apply("epochs", c.epochs);
    apply("threads", c.threads);
    if (c.perfect_csi) cfg.perfect_csi = true;
    cfg.validate();
    return cfg;
}

void ensure_parent(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

int cmd_gen_dataset(const Common& c, const std::string& out) {
    ExperimentConfig cfg = build_config(c);
    if (!c.symbols.empty()) cfg.set("dataset_symbols", c.symbols);
    const LabeledDataset ds = generate_dataset(cfg);
    ensure_parent(out);
    write_dataset_csv(out, ds);
    std::printf("wrote %zu rows to %s (impulse rate %.4f)\n", ds.labels.size(), out.c_str(), ds.base_rate());
    return 0;
}

int cmd_train(const Common& c, const std::string& dataset, const std::string& out, std::string loss_path) {
    ExperimentConfig cfg = build_config(c);
    const LabeledDataset ds = read_dataset_csv(dataset);
    TrainConfig tc = cfg.train;
    tc.seed = cfg.seed;
    const TrainResult r = train(ds.features, ds.labels, tc);
    ensure_parent(out);
    save_model(out, r.params,
               {"dataset_config_hash=" + ds.config_hash, "dataset_seed=" + std::to_string(ds.seed),
                "train_config_hash=" + cfg.hash()});
    if (loss_path.empty()) loss_path = out + ".loss.csv";
    std::ofstream ls(loss_path);
    if (!ls) throw std::runtime_error("cannot open " + loss_path + " for writing");
    ls << "# config_hash=" << cfg.hash() << "\n# seed=" << cfg.seed << "\nepoch,loss\n";
    for (std::size_t e = 0; e < r.loss_trace.size(); ++e) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", e, r.loss_trace[e]);
        ls << buf;
    }
    std::printf("trained on %zu rows, final loss %.6g; model %s\n", ds.labels.size(), r.loss_trace.back(),
                out.c_str());
    return 0;
}

int cmd_evaluate(const Common& c, const std::string& out) {
    ExperimentConfig cfg = build_config(c);
    const std::size_t symbols = c.symbols.empty() ? 200 : std::stoul(c.symbols);
    const LinkSimulator link(cfg);
    const OperatingPoint op = link.operating_point(cfg.ebn0_db.front());

    std::vector<std::pair<std::string, Detector>> detectors;
    detectors.emplace_back("threshold", ThresholdDetector{std::nullopt, cfg.p_fa});
    if (!cfg.model_path.empty()) {
        auto model = std::make_shared<const MlpParams>(load_model(cfg.model_path));
        detectors.emplace_back("dnn", DnnDetector{model, cfg.half_window, cfg.decision});
    }

    std::ostringstream report;
    report << "# config_hash=" << cfg.hash() << "\n# seed=" << cfg.seed << "\n";
    report << "detector,noise,ebn0_db,epsilon,sir_db,samples,detection,false_alarm,missed_detection,accuracy,"
              "all_clean_accuracy\n";
    for (const auto& [name, det] : detectors) {
        const DetectionStats s = evaluate_detector(cfg, det, op, symbols, derive_seed(cfg.seed, {0xE7A1}));
        char buf[512];
        std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g,%llu,%.17g,%.17g,%.17g,%.17g,%.17g\n", name.c_str(),
                      to_string(op.noise).c_str(), op.ebn0_db, op.epsilon, op.sir_db,
                      static_cast<unsigned long long>(s.total()), s.detection_rate(), s.false_alarm_rate(),
                      s.missed_rate(), s.accuracy(), s.all_clean_accuracy());
        report << buf;
        std::printf("%-9s detection %.4f  false-alarm %.4f  missed-detection %.4f  accuracy %.4f\n", name.c_str(),
                    s.detection_rate(), s.false_alarm_rate(), s.missed_rate(), s.accuracy());
    }
    if (!out.empty()) {
        ensure_parent(out);
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot open " + out + " for writing");
        os << report.str();
    }
    return 0;
}

int cmd_ber_sweep(const Common& c, const std::string& out) {
    const ExperimentConfig cfg = build_config(c);
    const auto policies = policies_from_config(cfg);
    const auto curves = ber_sweep(cfg, policies);
    fs::create_directories(out);
    for (const auto& curve : curves) {
        const fs::path path = fs::path(out) / (curve.detector + ".csv");
        write_curve_csv(path.string(), curve);
        std::printf("%s:", curve.detector.c_str());
        for (const auto& p : curve.points) std::printf(" %g:%.3e%s", p.ebn0_db, p.ber(), p.budget_exhausted ? "*" : "");
        std::printf("\n");
    }
    return 0;
}

int cmd_plot_data(const std::vector<std::string>& inputs, const std::string& out) {
    std::vector<std::string> files;
    for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
            std::vector<std::string> found;
            for (const auto& e : fs::directory_iterator(in))
                if (e.path().extension() == ".csv") found.push_back(e.path().string());
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(in);
        }
    }
    if (files.empty()) throw std::runtime_error("plot-data: no curve files");
    std::vector<BerCurve> curves;
    for (const auto& f : files) curves.push_back(read_curve_csv(f));
    if (out.empty() || out == "-") {
        write_plot_table(std::cout, curves);
    } else {
        ensure_parent(out);
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot open " + out + " for writing");
        write_plot_table(os, curves);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Impulsive-noise detection and mitigation for coded OFDM"};
    app.require_subcommand(1);

    Common common;
    std::string out, dataset, loss_path;
    std::vector<std::string> inputs;

    auto* gen = app.add_subcommand("gen-dataset", "generate a labeled feature dataset");
    add_common(gen, common);
    gen->add_option("--out", out, "dataset CSV")->required();

    auto* tr = app.add_subcommand("train", "train the detector network");
    add_common(tr, common);
    tr->add_option("--dataset", dataset, "dataset CSV")->required();
    tr->add_option("--out", out, "model file")->required();
    tr->add_option("--loss-out", loss_path, "epoch,loss CSV (default <out>.loss.csv)");

    auto* ev = app.add_subcommand("evaluate", "detection / false-alarm / missed-detection rates");
    add_common(ev, common);
    ev->add_option("--out", out, "optional CSV report");

    auto* sw = app.add_subcommand("ber-sweep", "Monte Carlo BER curves, one CSV per policy");
    add_common(sw, common);
    sw->add_option("--out", out, "output directory")->required();

    auto* pd = app.add_subcommand("plot-data", "merge stored curves into one plot-ready table");
    pd->add_option("inputs", inputs, "curve CSV files or directories")->required();
    pd->add_option("--out", out, "output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*gen) return cmd_gen_dataset(common, out);
        if (*tr) return cmd_train(common, dataset, out, loss_path);
        if (*ev) return cmd_evaluate(common, out);
        if (*sw) return cmd_ber_sweep(common, out);
        if (*pd) return cmd_plot_data(inputs, out);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "impdet: invalid configuration: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "impdet: %s\n", e.what());
        return 1;
    }
    return 1;
}
