#include "impdet/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <string_view>

namespace impdet {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a number, got '" + v + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
        const auto n = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return n;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key, "expected true/false, got '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, sep);) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
}

struct Field {
    const char* name;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

#define IMPDET_DOUBLE(member)                                                                      \
    Field {                                                                                        \
        #member, [](ExperimentConfig& c, const std::string& v) { c.member = to_double(#member, v); }, \
            [](const ExperimentConfig& c) { return fmt(c.member); }                                \
    }
#define IMPDET_UINT(member)                                                                        \
    Field {                                                                                        \
        #member,                                                                                   \
            [](ExperimentConfig& c, const std::string& v) {                                        \
                c.member = static_cast<decltype(c.member)>(to_u64(#member, v));                    \
            },                                                                                     \
            [](const ExperimentConfig& c) { return std::to_string(c.member); }                     \
    }
#define IMPDET_BOOL(member)                                                                        \
    Field {                                                                                        \
        #member, [](ExperimentConfig& c, const std::string& v) { c.member = to_bool(#member, v); }, \
            [](const ExperimentConfig& c) { return std::string(c.member ? "true" : "false"); }     \
    }
#define IMPDET_GRID(member)                                                                        \
    Field {                                                                                        \
        #member, [](ExperimentConfig& c, const std::string& v) { c.member = parse_grid(#member, v); }, \
            [](const ExperimentConfig& c) { return join(c.member); }                               \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        IMPDET_UINT(seed),
        IMPDET_UINT(cp_len),
        IMPDET_UINT(channel_taps),
        IMPDET_DOUBLE(mean_arrival),
        IMPDET_DOUBLE(decay),
        IMPDET_BOOL(perfect_csi),
        IMPDET_BOOL(bit_interleave),
        IMPDET_UINT(bit_il_rows),
        IMPDET_UINT(bit_il_cols),
        IMPDET_BOOL(time_interleave),
        IMPDET_UINT(time_il_rows),
        IMPDET_UINT(time_il_cols),
        Field{"noise", [](ExperimentConfig& c, const std::string& v) { c.noise = parse_noise_kind(v); },
              [](const ExperimentConfig& c) { return to_string(c.noise); }},
        IMPDET_DOUBLE(epsilon),
        IMPDET_DOUBLE(sir_db),
        IMPDET_DOUBLE(mca_A),
        IMPDET_DOUBLE(mca_Gamma),
        Field{"mca_terms",
              [](ExperimentConfig& c, const std::string& v) { c.mca_terms = static_cast<int>(to_u64("mca_terms", v)); },
              [](const ExperimentConfig& c) { return std::to_string(c.mca_terms); }},
        IMPDET_DOUBLE(sas_alpha),
        IMPDET_DOUBLE(sas_beta),
        IMPDET_DOUBLE(sas_gamma),
        IMPDET_DOUBLE(sas_mu),
        IMPDET_DOUBLE(sas_sir_db),
        IMPDET_UINT(burst_len),
        IMPDET_GRID(ebn0_db),
        Field{"policies", [](ExperimentConfig& c, const std::string& v) { c.policies = split(v, ','); },
              [](const ExperimentConfig& c) { return join(c.policies); }},
        Field{"model_path", [](ExperimentConfig& c, const std::string& v) { c.model_path = v; },
              [](const ExperimentConfig& c) { return c.model_path; }},
        IMPDET_DOUBLE(p_fa),
        IMPDET_DOUBLE(decision),
        IMPDET_UINT(half_window),
        IMPDET_UINT(min_errors),
        IMPDET_UINT(max_bits),
        IMPDET_UINT(batch_trials),
        IMPDET_UINT(threads),
        Field{"train_noise", [](ExperimentConfig& c, const std::string& v) { c.train_noise = parse_noise_kind(v); },
              [](const ExperimentConfig& c) { return to_string(c.train_noise); }},
        IMPDET_UINT(dataset_symbols),
        IMPDET_GRID(train_ebn0_db),
        IMPDET_GRID(train_sir_db),
        IMPDET_GRID(train_epsilon),
        Field{"eta", [](ExperimentConfig& c, const std::string& v) { c.train.eta = to_double("eta", v); },
              [](const ExperimentConfig& c) { return fmt(c.train.eta); }},
        Field{"lambda", [](ExperimentConfig& c, const std::string& v) { c.train.lambda = to_double("lambda", v); },
              [](const ExperimentConfig& c) { return fmt(c.train.lambda); }},
        Field{"epochs",
              [](ExperimentConfig& c, const std::string& v) { c.train.epochs = static_cast<int>(to_u64("epochs", v)); },
              [](const ExperimentConfig& c) { return std::to_string(c.train.epochs); }},
        Field{"batch_size",
              [](ExperimentConfig& c, const std::string& v) {
                  c.train.batch_size = static_cast<int>(to_u64("batch_size", v));
              },
              [](const ExperimentConfig& c) { return std::to_string(c.train.batch_size); }},
    };
    return table;
}

#undef IMPDET_DOUBLE
#undef IMPDET_UINT
#undef IMPDET_BOOL
#undef IMPDET_GRID

}  // namespace

std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::Awgn: return "awgn";
        case NoiseKind::Bg: return "bg";
        case NoiseKind::Mca: return "mca";
        case NoiseKind::Sas: return "sas";
        case NoiseKind::Bursty: return "bursty";
    }
    return "?";
}

NoiseKind parse_noise_kind(const std::string& s) {
    if (s == "awgn") return NoiseKind::Awgn;
    if (s == "bg") return NoiseKind::Bg;
    if (s == "mca") return NoiseKind::Mca;
    if (s == "sas") return NoiseKind::Sas;
    if (s == "bursty") return NoiseKind::Bursty;
    throw ConfigError("noise", "expected one of awgn, bg, mca, sas, bursty; got '" + s + "'");
}

std::vector<double> parse_grid(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::vector<double> out;
    if (t.find(':') != std::string::npos) {
        const auto parts = split(t, ':');
        if (parts.size() != 3) throw ConfigError(key, "range must be start:step:stop");
        const double start = to_double(key, parts[0]);
        const double step = to_double(key, parts[1]);
        const double stop = to_double(key, parts[2]);
        if (!(step > 0.0) || stop < start) throw ConfigError(key, "range needs step > 0 and stop >= start");
        const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
        for (std::size_t i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    } else {
        std::stringstream ss(t);
        for (std::string item; std::getline(ss, item, ',');) {
            item = trim(item);
            if (item.empty()) throw ConfigError(key, "empty grid entry");
            out.push_back(to_double(key, item));
        }
    }
    if (out.empty()) throw ConfigError(key, "grid must not be empty");
    return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    for (const auto& f : fields()) {
        if (key == f.name) {
            f.set(*this, trim(value));
            return;
        }
    }
    throw ConfigError(key, "unknown key");
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& f : fields()) keys.emplace_back(f.name);
    return keys;
}

std::string ExperimentConfig::canonical() const {
    std::string s;
    for (const auto& f : fields())
        if (std::string_view(f.name) != "threads") s += std::string(f.name) + " = " + f.get(*this) + "\n";
    return s;
}

std::string ExperimentConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void ExperimentConfig::validate() const {
    auto need = [](bool ok, const char* key, const char* msg) {
        if (!ok) throw ConfigError(key, msg);
    };
    need(cp_len >= 1 && cp_len < 1024, "cp_len", "must be in [1, 1024)");
    need(channel_taps >= 1, "channel_taps", "must be >= 1");
    need(mean_arrival > 0.0, "mean_arrival", "must be > 0");
    need(decay > 0.0, "decay", "must be > 0");
    need(bit_il_rows >= 1 && bit_il_cols >= 1, "bit_il_rows", "interleaver dimensions must be >= 1");
    need(!bit_interleave || bit_il_rows * bit_il_cols >= 1344, "bit_il_rows",
         "bit interleaver must hold one coded block (1344 bits)");
    need(time_il_rows >= 1 && time_il_cols >= 1, "time_il_rows", "interleaver dimensions must be >= 1");
    need(!time_interleave || time_il_rows * time_il_cols >= 1024 + cp_len, "time_il_rows",
         "time interleaver must hold one OFDM symbol including the cyclic prefix");
    need(epsilon >= 0.0 && epsilon < 1.0, "epsilon", "must be in [0, 1)");
    need(mca_A > 0.0, "mca_A", "must be > 0");
    need(mca_Gamma > 0.0, "mca_Gamma", "must be > 0");
    need(mca_terms >= 1, "mca_terms", "must be >= 1");
    need(sas_alpha > 0.0 && sas_alpha <= 2.0, "sas_alpha", "must be in (0, 2]");
    need(sas_beta >= -1.0 && sas_beta <= 1.0, "sas_beta", "must be in [-1, 1]");
    need(sas_gamma > 0.0, "sas_gamma", "must be > 0");
    need(burst_len >= 1, "burst_len", "must be >= 1");
    need(!ebn0_db.empty(), "ebn0_db", "must not be empty");
    need(!policies.empty(), "policies", "must not be empty");
    need(p_fa > 0.0 && p_fa < 1.0, "p_fa", "must be in (0, 1)");
    need(decision > 0.0 && decision < 1.0, "decision", "must be in (0, 1)");
    need(half_window >= 1, "half_window", "must be >= 1");
    need(min_errors >= 1, "min_errors", "must be >= 1");
    need(max_bits >= 1, "max_bits", "must be >= 1");
    need(batch_trials >= 1, "batch_trials", "must be >= 1");
    need(dataset_symbols >= 1, "dataset_symbols", "must be >= 1");
    need(train_noise == NoiseKind::Bg || train_noise == NoiseKind::Mca || train_noise == NoiseKind::Bursty,
         "train_noise", "training needs labeled noise (bg, mca or bursty)");
    for (double e : train_epsilon) need(e >= 0.0 && e < 1.0, "train_epsilon", "entries must be in [0, 1)");
    need(train.eta > 0.0, "eta", "must be > 0");
    need(train.lambda >= 0.0, "lambda", "must be >= 0");
    need(train.batch_size >= 1, "batch_size", "must be >= 1");
}

OfdmConfig ExperimentConfig::ofdm() const { return OfdmConfig::standard(cp_len); }

ChannelProfile ExperimentConfig::channel_profile() const {
    ChannelProfile p;
    p.taps = channel_taps;
    p.mean_arrival = mean_arrival;
    p.decay = decay;
    p.max_delay = cp_len - 1;
    return p;
}

ExperimentConfig parse_config(std::istream& is, ExperimentConfig base) {
    int lineno = 0;
    for (std::string line; std::getline(is, line);) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line, "line " + std::to_string(lineno) + " is not of the form key = value");
        base.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file " + path);
    return parse_config(is, std::move(base));
}

}  // namespace impdet
