#include "impdet/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "impdet/parallel.hpp"

namespace impdet {

std::vector<BerCurve> ber_sweep(const ExperimentConfig& cfg, const std::vector<MitigationPolicy>& policies) {
    if (policies.empty()) throw std::invalid_argument("ber_sweep: no policies");
    for (const auto& p : policies) p.validate();
    const LinkSimulator link(cfg);
    const std::size_t P = policies.size();
    const std::uint64_t bits_per_trial = link.info_bits();

    std::vector<double> grid = cfg.ebn0_db;
    std::sort(grid.begin(), grid.end());

    std::vector<BerCurve> curves(P);
    for (std::size_t p = 0; p < P; ++p) {
        curves[p].detector = policies[p].name;
        curves[p].config_hash = cfg.hash();
        curves[p].seed = cfg.seed;
        curves[p].noise = to_string(cfg.noise);
    }

    for (const double ebn0 : grid) {
        const OperatingPoint op = link.operating_point(ebn0);
        std::vector<std::uint64_t> errors(P, 0);
        std::vector<double> sum_sq(P, 0.0);
        std::uint64_t bits = 0;
        std::uint64_t trial = 0;
        auto done = [&] {
            if (bits >= cfg.max_bits) return true;
            return std::all_of(errors.begin(), errors.end(), [&](auto e) { return e >= cfg.min_errors; });
        };
        while (!done()) {
            const std::size_t batch = cfg.batch_trials;
            std::vector<std::uint64_t> batch_errors(batch * P, 0);
            parallel_for(batch, cfg.threads, [&](std::size_t i) {
                const ReceivedBlock block = link.transmit(op, derive_seed(cfg.seed, {trial + i}));
                for (std::size_t p = 0; p < P; ++p)
                    batch_errors[i * P + p] = count_bit_errors(block.tx_bits, link.receive(block, policies[p]));
            });
            for (std::size_t i = 0; i < batch; ++i)
                for (std::size_t p = 0; p < P; ++p) {
                    const auto e = batch_errors[i * P + p];
                    errors[p] += e;
                    sum_sq[p] += static_cast<double>(e) * static_cast<double>(e);
                }
            bits += batch * bits_per_trial;
            trial += batch;
        }
        for (std::size_t p = 0; p < P; ++p) {
            BerPoint pt;
            pt.ebn0_db = ebn0;
            pt.bits = bits;
            pt.errors = errors[p];
            pt.budget_exhausted = errors[p] < cfg.min_errors;
            pt.trials = trial;
            pt.sum_sq_errors = sum_sq[p];
            curves[p].points.push_back(pt);
        }
    }
    return curves;
}

double BerPoint::ber_se() const {
    if (trials < 2) return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(trials);
    const double mean = static_cast<double>(errors) / n;
    const double var = std::max(0.0, (sum_sq_errors - n * mean * mean) / (n - 1.0));
    return std::sqrt(var / n) / (static_cast<double>(bits) / n);
}

std::vector<MitigationPolicy> policies_from_config(const ExperimentConfig& cfg) {
    std::shared_ptr<const MlpParams> model;
    const bool needs_model = std::any_of(cfg.policies.begin(), cfg.policies.end(),
                                         [](const std::string& n) { return n.rfind("dnn", 0) == 0; });
    if (needs_model) {
        if (cfg.model_path.empty()) throw ConfigError("model_path", "required by a dnn policy");
        model = std::make_shared<const MlpParams>(load_model(cfg.model_path));
    }
    std::vector<MitigationPolicy> out;
    for (const auto& name : cfg.policies) {
        MitigationPolicy p;
        try {
            p = make_policy(name, model, cfg.p_fa);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("policies", e.what());
        }
        if (auto* d = std::get_if<DnnDetector>(&p.detector)) {
            d->half_window = cfg.half_window;
            d->decision = cfg.decision;
        }
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

void write_curve_csv(std::ostream& os, const BerCurve& curve) {
    os << "# impdet ber curve\n";
    os << "# config_hash=" << curve.config_hash << '\n';
    os << "# seed=" << curve.seed << '\n';
    os << "# noise=" << curve.noise << '\n';
    for (const auto& p : curve.points)
        if (p.budget_exhausted) os << "# budget_exhausted ebn0_db=" << fmt_double(p.ebn0_db) << '\n';
    os << "ebn0_db,detector,ber,bits,errors\n";
    for (const auto& p : curve.points)
        os << fmt_double(p.ebn0_db) << ',' << curve.detector << ',' << fmt_double(p.ber()) << ',' << p.bits << ','
           << p.errors << '\n';
}

void write_curve_csv(const std::string& path, const BerCurve& curve) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_curve_csv(os, curve);
}

BerCurve read_curve_csv(std::istream& is) {
    BerCurve c;
    bool header = false;
    std::vector<double> exhausted;
    for (std::string line; std::getline(is, line);) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# config_hash=", 0) == 0) c.config_hash = line.substr(14);
            else if (line.rfind("# seed=", 0) == 0) c.seed = std::stoull(line.substr(7));
            else if (line.rfind("# noise=", 0) == 0) c.noise = line.substr(8);
            else if (line.rfind("# budget_exhausted ebn0_db=", 0) == 0) exhausted.push_back(std::stod(line.substr(27)));
            continue;
        }
        if (!header) {
            if (line != "ebn0_db,detector,ber,bits,errors")
                throw std::runtime_error("curve: expected header ebn0_db,detector,ber,bits,errors");
            header = true;
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 5) throw std::runtime_error("curve: malformed row '" + line + "'");
        BerPoint p;
        p.ebn0_db = std::stod(f[0]);
        c.detector = f[1];
        p.bits = std::stoull(f[3]);
        p.errors = std::stoull(f[4]);
        p.budget_exhausted = std::find(exhausted.begin(), exhausted.end(), p.ebn0_db) != exhausted.end();
        c.points.push_back(p);
    }
    if (!header) throw std::runtime_error("curve: missing header");
    return c;
}

BerCurve read_curve_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_curve_csv(is);
}

void write_plot_table(std::ostream& os, const std::vector<BerCurve>& curves) {
    std::map<double, std::vector<std::string>> rows;
    for (std::size_t c = 0; c < curves.size(); ++c)
        for (const auto& p : curves[c].points) {
            auto& row = rows[p.ebn0_db];
            row.resize(curves.size());
            row[c] = fmt_double(p.ber());
        }
    for (const auto& c : curves) {
        os << "# " << c.detector << " config_hash=" << c.config_hash << " seed=" << c.seed << " noise=" << c.noise
           << '\n';
    }
    os << "ebn0_db";
    for (const auto& c : curves) os << ',' << c.detector;
    os << '\n';
    for (auto& [x, row] : rows) {
        row.resize(curves.size());
        os << fmt_double(x);
        for (const auto& v : row) os << ',' << v;
        os << '\n';
    }
}

double ebn0_at_ber(const BerCurve& curve, double target) {
    const auto& pts = curve.points;
    const double lt = std::log10(target);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double b0 = pts[i].ber(), b1 = pts[i + 1].ber();
        if (b0 >= target && b1 <= target && b0 > 0) {
            if (b1 <= 0) return pts[i + 1].ebn0_db;
            const double l0 = std::log10(b0), l1 = std::log10(b1);
            if (l0 == l1) return pts[i].ebn0_db;
            return pts[i].ebn0_db + (lt - l0) / (l1 - l0) * (pts[i + 1].ebn0_db - pts[i].ebn0_db);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace impdet
