// Command-line surface for the toolkit: model analysis sweeps, device
// simulation, seed generation and block-wise extraction.
//
// Exit codes: 0 success, 2 validation, 3 I/O, 4 insufficient entropy,
// 5 malformed seed file, 6 entropy source exhausted.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qrng/byteio.hpp"
#include "qrng/detailed_model.hpp"
#include "qrng/hashing.hpp"
#include "qrng/model_types.hpp"
#include "qrng/planning.hpp"
#include "qrng/simple_model.hpp"
#include "qrng/simulator.hpp"
#include "qrng/stream.hpp"

namespace {

constexpr const char* sweep_points_env = "QRNG_SWEEP_POINTS";

struct AnalyzeRequest {
    std::string model = "simple";
    qrng::models::DetailedModelParams params;  // superset of the simple params
    std::optional<double> single_alpha2;
    double sweep_start = 1e-3;
    double sweep_stop = 20.0;
    unsigned points = 0;  // 0 = environment default
    bool linear = false;
};

unsigned default_sweep_points() {
    if (const char* env = std::getenv(sweep_points_env)) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw std::invalid_argument(std::string(sweep_points_env) +
                                        " must be a positive integer");
        return static_cast<unsigned>(v);
    }
    return 50;
}

std::vector<double> sweep_grid(const AnalyzeRequest& req) {
    if (req.single_alpha2) return {*req.single_alpha2};
    unsigned points = req.points ? req.points : default_sweep_points();
    if (points == 1) return {req.sweep_start};
    if (!req.linear && !(req.sweep_start > 0.0 && req.sweep_stop > 0.0))
        throw std::invalid_argument("log sweep requires positive alpha2 bounds");
    if (!(req.sweep_stop >= req.sweep_start))
        throw std::invalid_argument("sweep stop must be >= sweep start");
    std::vector<double> grid(points);
    for (unsigned i = 0; i < points; ++i) {
        double t = static_cast<double>(i) / (points - 1);
        grid[i] = req.linear
                      ? req.sweep_start + t * (req.sweep_stop - req.sweep_start)
                      : std::exp(std::log(req.sweep_start) +
                                 t * (std::log(req.sweep_stop) - std::log(req.sweep_start)));
    }
    return grid;
}

int cmd_analyze(const AnalyzeRequest& req) {
    std::printf("alpha2,hmin_cond,shannon_cond,hmin_uncond,y_star,trunc_err\n");
    for (double alpha2 : sweep_grid(req)) {
        qrng::models::EntropyReport report;
        if (req.model == "simple") {
            qrng::models::SimpleModelParams p;
            p.alpha2 = alpha2;
            p.mu = req.params.mu;
            p.n_max = req.params.n_max;
            report = qrng::models::entropy_report_simple(p);
        } else {
            qrng::models::DetailedModelParams p = req.params;
            p.alpha2 = alpha2;
            report = qrng::models::entropy_report_detailed(p);
        }
        std::printf("%.12g,%.12g,%.12g,%.12g,", alpha2, report.hmin_cond,
                    report.shannon_cond, report.hmin_uncond);
        if (report.y_star) std::printf("%.12g", *report.y_star);
        std::printf(",%.12g\n", report.truncation_error);
    }
    return 0;
}

struct SimulateRequest {
    std::string model = "simple";
    qrng::models::DetailedModelParams params;
    std::uint64_t pulses = 0;
    std::uint64_t rng_seed = 1;
    std::string mode = "stationary";
    std::string out_bits;
    std::string out_records;
};

int cmd_simulate(const SimulateRequest& req) {
    qrng::simulator::SimulationConfig config;
    if (req.model == "simple") {
        qrng::models::SimpleModelParams p;
        p.alpha2 = req.params.alpha2;
        p.mu = req.params.mu;
        p.n_max = req.params.n_max;
        config.params = p;
    } else {
        config.params = req.params;
    }
    config.pulse_count = req.pulses;
    config.rng_seed = req.rng_seed;
    config.noise_mode = req.mode == "mechanistic" ? qrng::simulator::NoiseMode::mechanistic
                                                  : qrng::simulator::NoiseMode::stationary;

    std::ofstream records_out;
    if (!req.out_records.empty()) {
        records_out.open(req.out_records, std::ios::binary);
        if (!records_out) throw qrng::io_error("cannot open " + req.out_records);
    }

    qrng::extractor::BitWriter bits;
    std::uint64_t counts[4] = {0, 0, 0, 0};
    qrng::simulator::simulate(config, [&](const qrng::simulator::PulseRecord& rec) {
        bits.push(rec.x_v != 0);
        bits.push(rec.x_h != 0);
        ++counts[rec.outcome_index()];
        if (records_out.is_open()) qrng::simulator::append_record(records_out, rec);
    });

    qrng::write_file_bytes(req.out_bits, bits.bytes());
    if (records_out.is_open()) {
        records_out.close();
        if (!records_out) throw qrng::io_error("write failure on " + req.out_records);
    }

    double total = req.pulses > 0 ? static_cast<double>(req.pulses) : 1.0;
    std::printf("pulses %llu\n", static_cast<unsigned long long>(req.pulses));
    std::printf("rng_seed %llu\n", static_cast<unsigned long long>(req.rng_seed));
    const char* labels[4] = {"00", "01", "10", "11"};
    for (int i = 0; i < 4; ++i)
        std::printf("P(%s) %.6f\n", labels[i], static_cast<double>(counts[i]) / total);
    return 0;
}

struct ExtractRequest {
    std::string seed_file;
    std::string input;
    std::string output;
    double hmin_per_block = 0.0;
    double eps = 0.0;
    double eps_seed = 0.0;
    std::optional<double> shannon_per_block;
    std::optional<std::uint64_t> blocks;
};

int cmd_extract(const ExtractRequest& req) {
    std::ifstream seed_in(req.seed_file, std::ios::binary);
    if (!seed_in) throw qrng::io_error("cannot open " + req.seed_file);
    qrng::extractor::HashSeed seed = qrng::extractor::load_seed(seed_in);

    std::vector<std::uint8_t> input = qrng::read_file_bytes(req.input);
    std::uint64_t available_blocks =
        static_cast<std::uint64_t>(input.size()) * 8 / seed.n();
    std::uint64_t k_blocks = req.blocks ? *req.blocks : available_blocks;
    if (k_blocks == 0) k_blocks = 1;  // plan accounting needs at least one block

    auto plan = qrng::extractor::plan_extraction(req.hmin_per_block, req.shannon_per_block,
                                                 seed.n(), req.eps, k_blocks, req.eps_seed);
    if (seed.l() > plan.l)
        throw qrng::extractor::insufficient_entropy_error(
            "seed outputs " + std::to_string(seed.l()) + " bits per block but the plan allows " +
                std::to_string(plan.l),
            static_cast<double>(seed.l()) - static_cast<double>(plan.l));

    std::vector<std::uint8_t> output;
    auto stats = qrng::extractor::extract_stream(seed, input, output, req.blocks);
    qrng::write_file_bytes(req.output, output);

    std::printf("n %u\nl %u\neps_hash %.6g\neps_total %.6g\n", seed.n(), seed.l(),
                plan.eps_hash, plan.eps_total);
    if (plan.shannon_length_bound)
        std::printf("shannon_length_bound %.6g\nconsistent %s\n", *plan.shannon_length_bound,
                    plan.consistent ? "yes" : "no");
    std::printf("blocks_processed %llu\ndiscarded_bits %llu\n",
                static_cast<unsigned long long>(stats.blocks_processed),
                static_cast<unsigned long long>(stats.discarded_bits));
    return 0;
}

struct SeedgenRequest {
    std::uint32_t n = 0;
    std::uint32_t l = 0;
    std::string out;
    std::string source;  // empty = system entropy
};

std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

int cmd_seedgen(const SeedgenRequest& req) {
    std::unique_ptr<qrng::extractor::EntropySource> source;
    if (req.source.empty()) {
        source = std::make_unique<qrng::extractor::SystemEntropySource>();
    } else {
        source = std::make_unique<qrng::extractor::BufferEntropySource>(
            qrng::read_file_bytes(req.source));
    }
    qrng::extractor::HashSeed seed = qrng::extractor::sample_seed(req.n, req.l, *source);

    std::ofstream out(req.out, std::ios::binary);
    if (!out) throw qrng::io_error("cannot open " + req.out + " for writing");
    qrng::extractor::save_seed(out, seed);
    out.close();
    if (!out) throw qrng::io_error("write failure on " + req.out);

    std::printf("n %u\nl %u\nfingerprint %016llx\n", seed.n(), seed.l(),
                static_cast<unsigned long long>(
                    fnv1a64(qrng::read_file_bytes(req.out))));
    return 0;
}

void add_model_options(CLI::App* cmd, std::string& model,
                       qrng::models::DetailedModelParams& params, bool with_noise) {
    cmd->add_option("--model", model, "Model kind: simple or detailed")
        ->check(CLI::IsMember({"simple", "detailed"}));
    cmd->add_option("--mu", params.mu, "Detector efficiency in [0,1]");
    cmd->add_option("--n-max", params.n_max, "Poisson truncation (0 = automatic)");
    if (with_noise) {
        cmd->add_option("--p-dark", params.p_dark, "Dark-count probability (detailed model)");
        cmd->add_option("--gamma", params.gamma, "Afterpulse parameter (detailed model)");
        cmd->add_option("--delta", params.delta, "Crosstalk parameter (detailed model)");
        cmd->add_option("--y-grid", params.y_grid, "Adversarial-joint minimization grid size");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"True-randomness toolkit for beam-splitter QRNGs"};
    app.require_subcommand(1);

    AnalyzeRequest analyze;
    auto* analyze_cmd =
        app.add_subcommand("analyze", "Print entropy-rate CSV over an intensity sweep");
    add_model_options(analyze_cmd, analyze.model, analyze.params, true);
    double analyze_alpha2 = 0.0;
    auto* single = analyze_cmd->add_option("--alpha2", analyze_alpha2,
                                           "Evaluate a single intensity instead of a sweep");
    analyze_cmd->add_option("--alpha2-min", analyze.sweep_start, "Sweep start (default 1e-3)");
    analyze_cmd->add_option("--alpha2-max", analyze.sweep_stop, "Sweep stop (default 20)");
    analyze_cmd->add_option("--points", analyze.points,
                            "Sweep resolution (default from " + std::string(sweep_points_env) +
                                " or 50)");
    analyze_cmd->add_flag("--linear", analyze.linear, "Linear instead of logarithmic sweep");

    SimulateRequest simulate;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run the Monte Carlo device simulator");
    add_model_options(simulate_cmd, simulate.model, simulate.params, true);
    simulate_cmd->add_option("--alpha2", simulate.params.alpha2, "Mean photon number per pulse");
    simulate_cmd->add_option("--pulses", simulate.pulses, "Number of pulses")->required();
    simulate_cmd->add_option("--seed", simulate.rng_seed, "Replay seed (default 1)");
    simulate_cmd->add_option("--mode", simulate.mode, "stationary or mechanistic")
        ->check(CLI::IsMember({"stationary", "mechanistic"}));
    simulate_cmd->add_option("--out-bits", simulate.out_bits, "Raw-bit output file")->required();
    simulate_cmd->add_option("--out-records", simulate.out_records,
                             "Optional side-information record file");

    ExtractRequest extract;
    auto* extract_cmd =
        app.add_subcommand("extract", "Hash a raw bit stream block-wise with a stored seed");
    extract_cmd->add_option("--seed-file", extract.seed_file, "Seed file")->required();
    extract_cmd->add_option("--input", extract.input, "Raw input bit file")->required();
    extract_cmd->add_option("--output", extract.output, "Extracted output file")->required();
    extract_cmd->add_option("--hmin-per-block", extract.hmin_per_block,
                            "Min-entropy per input block in bits")->required();
    extract_cmd->add_option("--eps", extract.eps, "Total extraction error budget")->required();
    extract_cmd->add_option("--eps-seed", extract.eps_seed,
                            "Assumed seed imperfection (default 0)");
    double shannon_opt = 0.0;
    auto* shannon_flag = extract_cmd->add_option(
        "--shannon-per-block", shannon_opt, "Optional Shannon entropy per block (sanity bound)");
    std::uint64_t blocks_opt = 0;
    auto* blocks_flag = extract_cmd->add_option(
        "--blocks", blocks_opt, "Blocks in the error accounting (default: all full blocks)");

    SeedgenRequest seedgen;
    auto* seedgen_cmd = app.add_subcommand("seedgen", "Sample and store a hashing seed");
    seedgen_cmd->add_option("--n", seedgen.n, "Input block length in bits")->required();
    seedgen_cmd->add_option("--l", seedgen.l, "Output block length in bits")->required();
    seedgen_cmd->add_option("--out", seedgen.out, "Seed file path")->required();
    seedgen_cmd->add_option("--source", seedgen.source,
                            "Entropy source file (default: system entropy)");

    try {
        app.parse(argc, argv);
        if (*single) analyze.single_alpha2 = analyze_alpha2;
        if (*shannon_flag) extract.shannon_per_block = shannon_opt;
        if (*blocks_flag) extract.blocks = blocks_opt;

        if (analyze_cmd->parsed()) return cmd_analyze(analyze);
        if (simulate_cmd->parsed()) return cmd_simulate(simulate);
        if (extract_cmd->parsed()) return cmd_extract(extract);
        if (seedgen_cmd->parsed()) return cmd_seedgen(seedgen);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    } catch (const qrng::extractor::seed_format_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 5;
    } catch (const qrng::extractor::entropy_source_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 6;
    } catch (const qrng::extractor::insufficient_entropy_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const qrng::io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
