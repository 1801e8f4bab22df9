#include "impdet/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "impdet/parallel.hpp"

namespace impdet {

double LabeledDataset::base_rate() const {
    if (labels.empty()) return 0.0;
    return static_cast<double>(std::accumulate(labels.begin(), labels.end(), std::uint64_t{0})) /
           static_cast<double>(labels.size());
}

LabeledDataset generate_dataset(const ExperimentConfig& cfg) {
    const LinkSimulator link(cfg);
    const std::size_t N = link.ofdm().fft_size;
    const std::size_t cp = link.ofdm().cp_len;
    const std::size_t symbols = cfg.dataset_symbols;

    LabeledDataset ds;
    ds.seed = cfg.seed;
    ds.config_hash = cfg.hash();
    ds.features.resize(symbols * N);
    ds.labels.resize(symbols * N);

    parallel_for(symbols, cfg.threads, [&](std::size_t s) {
        Rng pick(derive_seed(cfg.seed, {0xDA7A, s}));
        OperatingPoint op;
        op.noise = cfg.train_noise;
        op.ebn0_db = cfg.train_ebn0_db[pick() % cfg.train_ebn0_db.size()];
        op.sir_db = cfg.train_sir_db[pick() % cfg.train_sir_db.size()];
        op.epsilon = cfg.train_epsilon[pick() % cfg.train_epsilon.size()];
        const ReceivedBlock block = link.transmit(op, derive_seed(cfg.seed, {0x5EED, s}));
        const auto fv = extract_features(block.rx, cfg.half_window);
        for (std::size_t k = 0; k < N; ++k) {
            ds.features[s * N + k] = fv[cp + k];
            ds.labels[s * N + k] = block.labels[cp + k];
        }
    });

    // Shuffle rows to remove the per-symbol operating-point ordering.
    std::vector<std::size_t> order(ds.features.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffler(derive_seed(cfg.seed, {0x5487}));
    std::shuffle(order.begin(), order.end(), shuffler);
    std::vector<FeatureVector> f(order.size());
    Mask y(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        f[i] = ds.features[order[i]];
        y[i] = ds.labels[order[i]];
    }
    ds.features = std::move(f);
    ds.labels = std::move(y);
    return ds;
}

void write_dataset_csv(std::ostream& os, const LabeledDataset& ds) {
    os << "# impdet feature dataset\n";
    os << "# config_hash=" << ds.config_hash << '\n';
    os << "# seed=" << ds.seed << '\n';
    os << "x1,x2,x3,label\n";
    char buf[128];
    for (std::size_t i = 0; i < ds.features.size(); ++i) {
        const auto& f = ds.features[i];
        const int n = std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", f.magnitude, f.road, f.median_dev,
                                    static_cast<int>(ds.labels[i]));
        os.write(buf, n);
    }
}

LabeledDataset read_dataset_csv(std::istream& is) {
    LabeledDataset ds;
    bool header = false;
    std::size_t lineno = 0;
    for (std::string line; std::getline(is, line);) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# seed=", 0) == 0) ds.seed = std::strtoull(line.c_str() + 7, nullptr, 10);
            if (line.rfind("# config_hash=", 0) == 0) ds.config_hash = line.substr(14);
            continue;
        }
        if (!header) {
            if (line != "x1,x2,x3,label") throw std::runtime_error("dataset: expected header x1,x2,x3,label");
            header = true;
            continue;
        }
        const char* p = line.c_str();
        char* end = nullptr;
        FeatureVector f;
        double* dst[3] = {&f.magnitude, &f.road, &f.median_dev};
        for (double* d : dst) {
            *d = std::strtod(p, &end);
            if (end == p || *end != ',') throw std::runtime_error("dataset: malformed row " + std::to_string(lineno));
            p = end + 1;
        }
        const long label = std::strtol(p, &end, 10);
        if (end == p || (label != 0 && label != 1))
            throw std::runtime_error("dataset: bad label on row " + std::to_string(lineno));
        ds.features.push_back(f);
        ds.labels.push_back(static_cast<std::uint8_t>(label));
    }
    if (!header) throw std::runtime_error("dataset: missing header");
    return ds;
}

void write_dataset_csv(const std::string& path, const LabeledDataset& ds) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_dataset_csv(os, ds);
}

LabeledDataset read_dataset_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_dataset_csv(is);
}

namespace {
double ratio(std::uint64_t a, std::uint64_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; }
}  // namespace

double DetectionStats::detection_rate() const { return ratio(true_pos, true_pos + false_neg); }
double DetectionStats::false_alarm_rate() const { return ratio(false_pos, false_pos + true_neg); }
double DetectionStats::missed_rate() const { return ratio(false_neg, true_pos + false_neg); }
double DetectionStats::accuracy() const { return ratio(true_pos + true_neg, total()); }
double DetectionStats::all_clean_accuracy() const { return ratio(false_pos + true_neg, total()); }

DetectionStats& DetectionStats::operator+=(const DetectionStats& o) {
    true_pos += o.true_pos;
    false_pos += o.false_pos;
    true_neg += o.true_neg;
    false_neg += o.false_neg;
    return *this;
}

DetectionStats score_mask(const Mask& predicted, const Mask& truth) {
    if (predicted.size() != truth.size()) throw std::invalid_argument("score_mask: length mismatch");
    DetectionStats s;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i])
            (predicted[i] ? s.true_pos : s.false_neg)++;
        else
            (predicted[i] ? s.false_pos : s.true_neg)++;
    }
    return s;
}

DetectionStats evaluate_detector(const ExperimentConfig& cfg, const Detector& detector, const OperatingPoint& op,
                                 std::size_t symbols, std::uint64_t seed) {
    const LinkSimulator link(cfg);
    const std::size_t cp = link.ofdm().cp_len;
    std::vector<DetectionStats> per(symbols);
    parallel_for(symbols, cfg.threads, [&](std::size_t s) {
        const ReceivedBlock block = link.transmit(op, derive_seed(seed, {0xE7A1, s}));
        if (block.labels.empty()) throw std::invalid_argument("evaluate: noise model has no ground-truth labels");
        const Mask mask = detect(block.rx, detector);
        per[s] = score_mask(Mask(mask.begin() + static_cast<std::ptrdiff_t>(cp), mask.end()),
                            Mask(block.labels.begin() + static_cast<std::ptrdiff_t>(cp), block.labels.end()));
    });
    DetectionStats total;
    for (const auto& s : per) total += s;
    return total;
}

}  // namespace impdet
