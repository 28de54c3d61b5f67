#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "qrng/byteio.hpp"
#include "qrng/detailed_model.hpp"
#include "qrng/model_types.hpp"
#include "qrng/simple_model.hpp"

namespace qrng::simulator {

// chi: output bits from paths, thresholds and deterministic clicks.
// Path bit 1 means the photon went to the v detector.
inline std::pair<bool, bool> chi(const std::vector<std::uint8_t>& paths, unsigned n,
                                 unsigned r_v, unsigned r_h, bool s_v, bool s_h) {
    if (paths.size() != n)
        throw std::invalid_argument("chi: path list length does not match n");
    if (r_v < 1 || r_h < 1)
        throw std::invalid_argument("chi: thresholds must be >= 1");
    unsigned m_v = 0;
    for (std::uint8_t p : paths) m_v += p ? 1 : 0;
    bool x_v = s_v || m_v >= r_v;
    bool x_h = s_h || (n - m_v) >= r_h;
    return {x_v, x_h};
}

struct PulseRecord {
    std::uint32_t n = 0;
    std::vector<std::uint8_t> paths;  // one bit per photon, 1 = v path
    std::uint32_t r_v = 1, r_h = 1;   // r = n+1 encodes "photons never trigger"
    std::uint8_t s_v = 0, s_h = 0;
    std::uint8_t x_v = 0, x_h = 0;

    std::size_t outcome_index() const { return 2u * x_v + x_h; }
};

enum class NoiseMode { stationary, mechanistic };

struct SimulationConfig {
    std::variant<models::SimpleModelParams, models::DetailedModelParams> params;
    std::uint64_t pulse_count = 0;
    std::uint64_t rng_seed = 0;
    NoiseMode noise_mode = NoiseMode::stationary;
};

// Samples pulse records and feeds them to the sink in order. Identical
// configs produce identical streams (single fixed draw order per pulse:
// n, paths, r_v, r_h, s_v, s_h). Mechanistic mode replaces the stationary
// deterministic-click draw by dark counts plus afterpulse/crosstalk driven
// by the previous pulse's output bits. This is a test oracle; its output is
// pseudo-random and must never feed the extractor as production input.
inline void simulate(const SimulationConfig& config,
                     const std::function<void(const PulseRecord&)>& sink) {
    const bool detailed = std::holds_alternative<models::DetailedModelParams>(config.params);
    double alpha2, mu;
    models::DetailedModelParams dparams;
    if (detailed) {
        dparams = std::get<models::DetailedModelParams>(config.params);
        dparams.validate();
        alpha2 = dparams.alpha2;
        mu = dparams.mu;
    } else {
        auto sparams = std::get<models::SimpleModelParams>(config.params);
        sparams.validate();
        alpha2 = sparams.alpha2;
        mu = sparams.mu;
    }

    double p_s1 = 0.0;
    if (detailed && (dparams.p_dark > 0.0 || dparams.gamma > 0.0 || dparams.delta > 0.0))
        p_s1 = models::solve_px(dparams).p_s1;

    std::mt19937_64 rng(config.rng_seed);
    std::poisson_distribution<unsigned> photon_count(alpha2 > 0.0 ? alpha2 : 1.0);
    std::bernoulli_distribution half(0.5);
    std::bernoulli_distribution sensitive(mu);
    std::geometric_distribution<unsigned> threshold_tail(mu < 1.0 && mu > 0.0 ? mu : 0.5);
    std::bernoulli_distribution stationary_click(p_s1);
    std::bernoulli_distribution dark(detailed ? dparams.p_dark : 0.0);
    std::bernoulli_distribution afterpulse(detailed ? dparams.gamma : 0.0);
    std::bernoulli_distribution crosstalk(detailed ? dparams.delta : 0.0);

    PulseRecord rec;
    bool prev_x_v = false, prev_x_h = false;
    for (std::uint64_t pulse = 0; pulse < config.pulse_count; ++pulse) {
        rec.n = alpha2 > 0.0 ? photon_count(rng) : 0;
        rec.paths.resize(rec.n);
        unsigned m_v = 0;
        for (auto& p : rec.paths) {
            p = half(rng) ? 1 : 0;
            m_v += p;
        }

        auto draw_threshold = [&]() -> std::uint32_t {
            if (detailed) {
                if (mu >= 1.0) return 1;
                if (mu <= 0.0) return rec.n + 1;
                std::uint64_t r = static_cast<std::uint64_t>(threshold_tail(rng)) + 1;
                return static_cast<std::uint32_t>(std::min<std::uint64_t>(r, rec.n + 1));
            }
            return sensitive(rng) ? 1 : rec.n + 1;
        };
        rec.r_v = draw_threshold();
        rec.r_h = draw_threshold();

        if (!detailed) {
            rec.s_v = rec.s_h = 0;
        } else if (config.noise_mode == NoiseMode::stationary) {
            rec.s_v = stationary_click(rng) ? 1 : 0;
            rec.s_h = stationary_click(rng) ? 1 : 0;
        } else {
            bool sv = dark(rng);
            if (prev_x_v && afterpulse(rng)) sv = true;
            if (prev_x_h && crosstalk(rng)) sv = true;
            bool sh = dark(rng);
            if (prev_x_h && afterpulse(rng)) sh = true;
            if (prev_x_v && crosstalk(rng)) sh = true;
            rec.s_v = sv ? 1 : 0;
            rec.s_h = sh ? 1 : 0;
        }

        rec.x_v = (rec.s_v || m_v >= rec.r_v) ? 1 : 0;
        rec.x_h = (rec.s_h || (rec.n - m_v) >= rec.r_h) ? 1 : 0;
        prev_x_v = rec.x_v;
        prev_x_h = rec.x_h;
        sink(rec);
    }
}

inline std::vector<PulseRecord> simulate_records(const SimulationConfig& config) {
    std::vector<PulseRecord> records;
    records.reserve(config.pulse_count);
    simulate(config, [&](const PulseRecord& rec) { records.push_back(rec); });
    return records;
}

struct SideInfoFields {
    bool n = false;
    bool r = false;
    bool s = false;
};

struct GuessingEstimate {
    double p_guess = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;

    double min_entropy_estimate() const { return -std::log2(p_guess); }
};

// Plug-in guessing estimator: for each observed side-information tuple the
// guess is the empirical modal outcome; the success probability is the
// weighted sum of modal frequencies. Supports n < 2^24 and r < 2^19.
class GuessingCounter {
public:
    explicit GuessingCounter(SideInfoFields fields) : fields_(fields) {}

    void add(const PulseRecord& rec) {
        cells_[key(rec)][rec.outcome_index()] += 1;
        ++total_;
    }

    GuessingEstimate estimate() const {
        if (total_ == 0)
            throw std::invalid_argument("GuessingCounter: empty stream");
        std::uint64_t correct = 0;
        for (const auto& [k, counts] : cells_) {
            std::uint64_t best = 0;
            for (std::uint64_t c : counts) best = std::max(best, c);
            correct += best;
        }
        GuessingEstimate est;
        est.samples = total_;
        est.p_guess = static_cast<double>(correct) / static_cast<double>(total_);
        est.std_error =
            std::sqrt(est.p_guess * (1.0 - est.p_guess) / static_cast<double>(total_));
        return est;
    }

private:
    std::uint64_t key(const PulseRecord& rec) const {
        std::uint64_t k = 0;
        if (fields_.n) k |= (rec.n & 0xffffffULL);
        if (fields_.r) {
            k |= (rec.r_v & 0x7ffffULL) << 24;
            k |= (rec.r_h & 0x7ffffULL) << 43;
        }
        if (fields_.s) k |= (static_cast<std::uint64_t>(rec.s_v) << 62) |
                            (static_cast<std::uint64_t>(rec.s_h) << 63);
        return k;
    }

    SideInfoFields fields_;
    std::unordered_map<std::uint64_t, std::array<std::uint64_t, 4>> cells_;
    std::uint64_t total_ = 0;
};

inline GuessingEstimate empirical_guessing_probability(const std::vector<PulseRecord>& stream,
                                                       SideInfoFields fields) {
    GuessingCounter counter(fields);
    for (const auto& rec : stream) counter.add(rec);
    return counter.estimate();
}

// Fixed-width side-information record: n, r_v, r_h as u32 little-endian,
// then s_v, s_h, x_v, x_h as single bytes (16 bytes per pulse).
inline void append_record(std::ostream& out, const PulseRecord& rec) {
    write_u32le(out, rec.n);
    write_u32le(out, rec.r_v);
    write_u32le(out, rec.r_h);
    char tail[4] = {static_cast<char>(rec.s_v), static_cast<char>(rec.s_h),
                    static_cast<char>(rec.x_v), static_cast<char>(rec.x_h)};
    out.write(tail, 4);
}

inline std::vector<PulseRecord> read_records(std::istream& in) {
    std::vector<PulseRecord> records;
    while (true) {
        std::uint32_t n;
        try {
            n = read_u32le(in);
        } catch (const io_error&) {
            if (in.eof() && in.gcount() == 0) break;
            throw io_error("read_records: truncated record");
        }
        PulseRecord rec;
        rec.n = n;
        rec.r_v = read_u32le(in);
        rec.r_h = read_u32le(in);
        char tail[4];
        in.read(tail, 4);
        if (!in) throw io_error("read_records: truncated record");
        rec.s_v = static_cast<std::uint8_t>(tail[0]);
        rec.s_h = static_cast<std::uint8_t>(tail[1]);
        rec.x_v = static_cast<std::uint8_t>(tail[2]);
        rec.x_h = static_cast<std::uint8_t>(tail[3]);
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace qrng::simulator
