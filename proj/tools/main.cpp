// Command-line front end: code construction, circuit generation, sampling,
// decoding, sweeps and analysis. See README for the config schema.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lacross/analysis.hpp"
#include "lacross/bposd.hpp"
#include "lacross/circuit.hpp"
#include "lacross/codes.hpp"
#include "lacross/frame_sim.hpp"
#include "lacross/runner.hpp"
#include "lacross/rydberg.hpp"

using namespace lacross;

namespace {

LayoutMode parse_layout(const std::string& name) {
    if (name == "pbc") return LayoutMode::PBC;
    if (name == "squeezed") return LayoutMode::SqueezedOBC;
    return LayoutMode::OBC;
}

int cmd_build_code(uint32_t n, uint32_t k, const std::string& boundary, const std::string& poly,
                   const std::string& layout_name, uint32_t wmax, const std::string& out_path) {
    Boundary b = boundary == "pbc" ? Boundary::PBC : Boundary::OBC;
    PolyKind pk = poly == "1+x^k" ? PolyKind::TwoTerm : PolyKind::ThreeTerm;
    SeedCode seed = build_seed(n, k, b, pk);
    CssCode code = hypergraph_product(seed, seed);
    if (wmax > 0) {
        code.d_exact = distance_bruteforce(code, wmax).value_or(0);
        if (*code.d_exact == 0) {
            code.d_exact.reset();
        }
    }
    QubitLayout layout = assign_layout(code, parse_layout(layout_name.empty()
                                                              ? (b == Boundary::PBC ? "pbc" : "obc")
                                                              : layout_name));
    save_code_file(out_path, code, &layout);
    std::cout << "[[" << code.N << "," << code.K << ","
              << (code.d_exact ? std::to_string(*code.d_exact)
                               : (code.d_bound ? std::to_string(*code.d_bound) + "?" : "?"))
              << "]] -> " << out_path << "\n";
    return 0;
}

int cmd_build_circuit(const std::string& code_path, uint32_t rounds, const std::string& noise,
                      double p, const std::string& c_source, const std::string& basis,
                      const std::string& out_path, const std::string& dem_path) {
    LoadedCode loaded = load_code_file(code_path);
    if (!loaded.layout) {
        throw std::invalid_argument("code file has no layout section");
    }
    uint32_t r = rounds;
    if (r == 0) {
        if (!loaded.code.d_bound) {
            throw std::invalid_argument("rounds not given and code has no distance bound");
        }
        r = loaded.code.d_exact ? *loaded.code.d_exact : *loaded.code.d_bound;
    }
    NoisyCircuit skeleton = build_syndrome_circuit(loaded.code, *loaded.layout, r, basis == "X" ? 'X' : 'Z');
    NoisyCircuit circ = skeleton;
    if (noise != "none") {
        NoiseModel model;
        if (noise == "hw") {
            std::map<uint32_t, double> c = c_source == "model"
                                               ? range_table(RydbergConfig{}, 15).c_map()
                                               : default_c_table();
            model = NoiseModel::hardware_specific(p, c);
        } else if (noise == "agnostic") {
            model = NoiseModel::hardware_agnostic(p);
        } else {
            throw std::invalid_argument("noise must be hw, agnostic or none");
        }
        circ = instrument(skeleton, model);
    }
    save_circuit_file(out_path, circ);
    std::cout << "circuit: " << circ.layers.size() << " layers, " << circ.num_detectors()
              << " detectors, " << circ.num_observables() << " observables -> " << out_path << "\n";
    if (!dem_path.empty()) {
        Dem dem = extract_dem(circ);
        save_dem_file(dem_path, dem);
        std::cout << "dem: " << dem.mechanisms.size() << " mechanisms -> " << dem_path << "\n";
    }
    return 0;
}

int cmd_rydberg(uint32_t j_max, const std::string& mode, double omega_ref, double b_ref, double k_eff,
                double temperature, bool schedule_check, uint32_t sched_n, uint32_t sched_k) {
    RydbergConfig cfg;
    if (omega_ref > 0) cfg.omega_ref = omega_ref;
    if (b_ref > 0) cfg.b_ref = b_ref;
    if (k_eff > 0) cfg.k_eff_per_m = k_eff;
    if (temperature > 0) cfg.temperature_k = temperature;
    RangeErrorTable table =
        range_table(cfg, j_max, mode == "paper" ? RangeTableMode::Paper : RangeTableMode::Model);
    nlohmann::json out;
    out["mode"] = mode;
    out["doppler_rad_per_s"] = doppler_dephasing(cfg);
    for (std::size_t i = 0; i < table.j.size(); i++) {
        nlohmann::json row;
        row["j"] = table.j[i];
        row["c_j"] = table.c[i];
        row["tau_s"] = table.tau_s[i];
        if (mode != "paper") {
            row["n_j"] = table.n[i];
            row["infidelity"] = table.infidelity[i];
        }
        out["table"].push_back(row);
    }
    if (schedule_check) {
        SeedCode seed = build_seed(sched_n, sched_k, Boundary::OBC);
        CssCode code = hypergraph_product(seed, seed);
        QubitLayout layout = assign_layout(code, LayoutMode::OBC);
        ParallelSchedule sched = parallel_schedule(code, layout);
        ScheduleCheck chk = validate_schedule(code, layout, sched);
        out["schedule"] = {{"groups", sched.num_groups},
                           {"subregion", sched.subregion_side},
                           {"covered_once", chk.covered_once},
                           {"max_gate_range", chk.max_gate_range},
                           {"min_ancilla_separation", chk.min_ancilla_separation},
                           {"min_simultaneous_atom_distance", chk.min_simultaneous_atom_distance},
                           {"blockade_disjoint", chk.blockade_disjoint}};
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_sample(const std::string& circuit_path, uint64_t shots, uint64_t seed,
               const std::string& out_path, bool serial) {
    NoisyCircuit circ = load_circuit_file(circuit_path);
    ShotBatch batch = serial ? sample_reference(circ, shots, seed) : sample(circ, shots, seed);
    save_batch_file(out_path, batch);
    std::cout << "sampled " << shots << " shots (" << batch.num_detectors << " detectors) -> "
              << out_path << "\n";
    return 0;
}

int cmd_decode(const std::string& dem_path, const std::string& batch_path, int bp_iters, double scale,
               const std::string& osd, int order, int window) {
    Dem dem = load_dem_file(dem_path);
    ShotBatch batch = load_batch_file(batch_path);
    DecoderConfig cfg;
    cfg.bp_iterations = bp_iters;
    cfg.scaling_factor = scale;
    cfg.osd_mode = osd == "off" ? OsdMode::Off : (osd == "osd0" ? OsdMode::Osd0 : OsdMode::CombinationSweep);
    cfg.osd_order = order;
    cfg.cs_window = window;
    BatchStats stats = decode_batch(dem, batch, cfg);
    double p_l = stats.shots > 0 ? static_cast<double>(stats.failures) / stats.shots : 0.0;
    nlohmann::json out;
    out["shots"] = stats.shots;
    out["failures"] = stats.failures;
    out["p_L"] = p_l;
    out["stderr"] = stats.shots > 0 ? std::sqrt(p_l * (1.0 - p_l) / stats.shots) : 0.0;
    std::cout << out.dump(2) << "\n";
    if (stats.invalid > 0) {
        std::cerr << "decode integrity: " << stats.invalid << " syndromes outside the DEM column space\n";
        return 4;
    }
    return 0;
}

int cmd_sweep(const std::string& config_path) {
    ExperimentConfig cfg = config_from_json_file(config_path);
    MemoryRun run = run_memory_experiment(cfg, [](const std::string& msg) { std::cerr << msg << "\n"; });
    std::cout << "wrote " << run.csv_path << " (" << run.curves.size() << " curves)\n";
    return 0;
}

int cmd_compare(const std::string& config_path, uint32_t ldpc_n, double sc_pth) {
    ExperimentConfig cfg = config_from_json_file(config_path);
    ComparisonReport rep =
        run_comparison(cfg, ldpc_n, sc_pth, [](const std::string& msg) { std::cerr << msg << "\n"; });
    nlohmann::json out;
    out["ldpc"] = {{"N", rep.ldpc.N}, {"K", rep.ldpc.K}, {"D", rep.ldpc.D}};
    out["surface"] = {{"copies", rep.partition.copies},
                      {"distance", rep.partition.distance},
                      {"qubits_used", rep.partition.qubits_used},
                      {"leftover", rep.partition.leftover},
                      {"exact", rep.partition.exact}};
    if (rep.empirical_crossing) {
        out["empirical_crossing"] = *rep.empirical_crossing;
    }
    if (rep.closed_form) {
        out["closed_form_p_star"] = rep.closed_form->p_star;
        out["closed_form_p_star_limit"] = rep.closed_form->p_star_limit;
    }
    std::vector<DecodingCurve> both{rep.ldpc, rep.sc_combined};
    std::ofstream csv(cfg.out_dir + "/comparison.csv");
    write_csv(csv, both);
    out["csv"] = cfg.out_dir + "/comparison.csv";
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_analyze(const std::string& csv_path, bool threshold, const std::string& fit_key, double pth) {
    std::vector<DecodingCurve> curves = read_csv_file(csv_path);
    nlohmann::json out;
    if (threshold) {
        auto est = estimate_threshold(curves);
        if (est) {
            out["threshold"] = {{"p_mid", est->p_mid}, {"p_low", est->p_low}, {"p_high", est->p_high}};
        } else {
            out["threshold"] = nullptr;
        }
    }
    if (!fit_key.empty()) {
        if (pth <= 0) {
            throw std::invalid_argument("--pth required with --fit");
        }
        for (const auto& c : curves) {
            std::ostringstream key;
            key << c.family << ":" << c.k << ":" << c.n << ":" << c.noise;
            if (key.str() == fit_key) {
                SubthresholdFit fit = fit_subthreshold(c, pth);
                out["fit"] = {{"A", fit.a},
                              {"p_th", fit.p_th},
                              {"D_e", fit.d_e},
                              {"slope_free", fit.slope_free},
                              {"beta", fit.beta},
                              {"lambda_k", fit.lambda_k},
                              {"residual", fit.residual},
                              {"points", fit.points_used}};
            }
        }
        if (!out.contains("fit")) {
            throw std::invalid_argument("no curve matches " + fit_key);
        }
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"la-cross LDPC code workbench"};
    app.require_subcommand(1);

    auto* bc = app.add_subcommand("build-code", "build a hypergraph-product code from seeds");
    uint32_t n = 7, k = 3, wmax = 0, rounds = 0;
    std::string boundary = "obc", poly = "1+x+x^k", layout, out = "code.lcx";
    bc->add_option("--n", n, "seed length");
    bc->add_option("--k", k, "polynomial degree");
    bc->add_option("--boundary", boundary, "pbc|obc");
    bc->add_option("--poly", poly, "1+x+x^k | 1+x^k");
    bc->add_option("--layout", layout, "pbc|obc|squeezed (default from boundary)");
    bc->add_option("--distance-wmax", wmax, "brute-force distance search cap");
    bc->add_option("--out", out, "output path");

    auto* bcirc = app.add_subcommand("build-circuit", "emit a syndrome-extraction circuit");
    std::string code_path = "code.lcx", noise = "hw", c_source = "paper", basis = "Z",
                circ_out = "circuit.lct", dem_out;
    double p = 0.002;
    bcirc->add_option("--code", code_path, "code file");
    bcirc->add_option("--rounds", rounds, "rounds (0: use code distance)");
    bcirc->add_option("--noise", noise, "hw|agnostic|none");
    bcirc->add_option("--p", p, "nearest-neighbor two-qubit error probability");
    bcirc->add_option("--c", c_source, "paper|model c_j source");
    bcirc->add_option("--basis", basis, "Z|X memory basis");
    bcirc->add_option("--out", circ_out, "circuit output path");
    bcirc->add_option("--dem", dem_out, "also write the detector error model here");

    auto* ryd = app.add_subcommand("rydberg", "range-dependent CZ infidelity table");
    uint32_t j_max = 7, sched_n = 7, sched_k = 3;
    std::string mode = "model";
    double omega_ref = 0, b_ref = 0, k_eff = 0, temperature = 0;
    bool sched_check = false;
    ryd->add_option("--j-max", j_max, "largest range");
    ryd->add_option("--mode", mode, "model|paper");
    ryd->add_option("--omega-ref", omega_ref, "Rabi frequency at n_ref (rad/s)");
    ryd->add_option("--b-ref", b_ref, "blockade at (n_ref, R) (rad/s)");
    ryd->add_option("--k-eff", k_eff, "effective wave vector (1/m)");
    ryd->add_option("--temperature", temperature, "atom temperature (K)");
    ryd->add_flag("--schedule", sched_check, "also report the blockade-safe schedule");
    ryd->add_option("--schedule-n", sched_n, "seed length for --schedule");
    ryd->add_option("--schedule-k", sched_k, "seed degree for --schedule");

    auto* smp = app.add_subcommand("sample", "Pauli-frame Monte Carlo sampling");
    std::string circuit_path = "circuit.lct", batch_out = "batch.bin";
    uint64_t shots = 1000, seed = 1;
    bool serial = false;
    smp->add_option("--circuit", circuit_path, "circuit file");
    smp->add_option("--shots", shots, "shot count");
    smp->add_option("--seed", seed, "master seed");
    smp->add_option("--out", batch_out, "batch output path");
    smp->add_flag("--serial", serial, "use the serial reference sampler");

    auto* dec = app.add_subcommand("decode", "BP+OSD decoding of a sampled batch");
    std::string dem_path = "model.dem", batch_path = "batch.bin", osd = "cs";
    int bp_iters = 4, order = 1, window = 0;
    double scale = 1.0;
    dec->add_option("--dem", dem_path, "detector error model");
    dec->add_option("--shots", batch_path, "batch file");
    dec->add_option("--bp-iters", bp_iters, "belief-propagation iterations");
    dec->add_option("--scale", scale, "min-sum scaling factor");
    dec->add_option("--osd", osd, "off|osd0|cs");
    dec->add_option("--order", order, "combination-sweep order");
    dec->add_option("--window", window, "combination-sweep window (0: 2*order)");

    auto* swp = app.add_subcommand("sweep", "run a memory-experiment sweep from a config");
    std::string config_path = "config.json";
    swp->add_option("--config", config_path, "JSON config")->required();

    auto* cmp = app.add_subcommand("compare", "LDPC vs K-copy surface code at matched qubits");
    uint32_t ldpc_n = 7;
    double sc_pth = 0.0;
    std::string cmp_config;
    cmp->add_option("--config", cmp_config, "JSON config")->required();
    cmp->add_option("--ldpc-n", ldpc_n, "seed length of the LDPC code")->required();
    cmp->add_option("--sc-pth", sc_pth, "surface-code threshold anchor for the closed form");

    auto* ana = app.add_subcommand("analyze", "thresholds and sub-threshold fits from CSV");
    std::string csv_path = "curves.csv", fit_key;
    double pth = 0.0;
    bool threshold = false;
    ana->add_option("--csv", csv_path, "input CSV")->required();
    ana->add_flag("--threshold", threshold, "estimate the threshold crossing");
    ana->add_option("--fit", fit_key, "curve key family:k:n:noise for a sub-threshold fit");
    ana->add_option("--pth", pth, "threshold anchor for --fit");

    try {
        app.parse(argc, argv);
        if (bc->parsed()) {
            return cmd_build_code(n, k, boundary, poly, layout, wmax, out);
        }
        if (bcirc->parsed()) {
            return cmd_build_circuit(code_path, rounds, noise, p, c_source, basis, circ_out, dem_out);
        }
        if (ryd->parsed()) {
            return cmd_rydberg(j_max, mode, omega_ref, b_ref, k_eff, temperature, sched_check, sched_n,
                               sched_k);
        }
        if (smp->parsed()) {
            return cmd_sample(circuit_path, shots, seed, batch_out, serial);
        }
        if (dec->parsed()) {
            return cmd_decode(dem_path, batch_path, bp_iters, scale, osd, order, window);
        }
        if (swp->parsed()) {
            return cmd_sweep(config_path);
        }
        if (cmp->parsed()) {
            return cmd_compare(cmp_config, ldpc_n, sc_pth);
        }
        if (ana->parsed()) {
            return cmd_analyze(csv_path, threshold, fit_key, pth);
        }
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::string what = e.what();
        std::cerr << "error: " << what << "\n";
        return what.find("decode integrity") != std::string::npos ? 4 : 1;
    }
    return 0;
}
