#include "lacross/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lacross/frame_sim.hpp"
#include "lacross/rng.hpp"
#include "lacross/rydberg.hpp"

namespace lacross {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* boundary_name(Boundary b) { return b == Boundary::PBC ? "pbc" : "obc"; }
const char* layout_name(LayoutMode m) {
    switch (m) {
        case LayoutMode::PBC: return "pbc";
        case LayoutMode::OBC: return "obc";
        default: return "squeezed";
    }
}

}  // namespace

const char* noise_name(NoiseKind kind) {
    return kind == NoiseKind::HardwareSpecific ? "hw" : "agnostic";
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream out;
    out << "family k=" << family.k << " sizes=";
    for (uint32_t n : family.sizes) {
        out << n << ";";
    }
    out << " boundary=" << boundary_name(family.boundary) << " layout=" << layout_name(family.layout)
        << " poly=" << (family.poly == PolyKind::ThreeTerm ? "1+x+x^k" : "1+x^k") << "\n";
    out << "noise kind=" << noise_name(noise.kind) << " c="
        << (noise.c_source == NoiseSpec::CSource::Paper ? "paper" : "model") << " p=";
    for (double p : noise.p_grid) {
        out << fmt_double(p) << ";";
    }
    out << "\n";
    out << "rounds=" << rounds << " basis=" << memory_basis << "\n";
    out << "shots max=" << shots.max_shots << " errors=" << shots.max_errors << " batch=" << shots.batch
        << "\n";
    out << "decoder iters=" << decoder.bp_iterations << " scale=" << fmt_double(decoder.scaling_factor)
        << " osd=" << static_cast<int>(decoder.osd_mode) << " order=" << decoder.osd_order
        << " window=" << decoder.cs_window << "\n";
    out << "seed=" << seed << "\n";
    return out.str();
}

uint64_t ExperimentConfig::hash() const {
    std::string c = canonical();
    return fnv1a64(c.data(), c.size());
}

ExperimentConfig config_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ExperimentConfig cfg;
    const auto& fam = j.at("family");
    cfg.family.k = fam.at("k").get<uint32_t>();
    cfg.family.sizes = fam.at("sizes").get<std::vector<uint32_t>>();
    std::string b = fam.value("boundary", "obc");
    cfg.family.boundary = b == "pbc" ? Boundary::PBC : Boundary::OBC;
    std::string lay = fam.value("layout", b == "pbc" ? "pbc" : "obc");
    cfg.family.layout = lay == "pbc" ? LayoutMode::PBC
                                     : (lay == "squeezed" ? LayoutMode::SqueezedOBC : LayoutMode::OBC);
    cfg.family.poly = fam.value("poly", "1+x+x^k") == "1+x^k" ? PolyKind::TwoTerm : PolyKind::ThreeTerm;

    const auto& noi = j.at("noise");
    std::string kind = noi.at("kind").get<std::string>();
    if (kind == "hw" || kind == "hardware-specific") {
        cfg.noise.kind = NoiseKind::HardwareSpecific;
    } else if (kind == "agnostic" || kind == "hardware-agnostic") {
        cfg.noise.kind = NoiseKind::HardwareAgnostic;
    } else {
        throw std::invalid_argument("unknown noise kind: " + kind);
    }
    cfg.noise.p_grid = noi.at("p_grid").get<std::vector<double>>();
    std::sort(cfg.noise.p_grid.begin(), cfg.noise.p_grid.end());
    cfg.noise.c_source = noi.value("c_source", "paper") == "model" ? NoiseSpec::CSource::Model
                                                                   : NoiseSpec::CSource::Paper;

    cfg.rounds = j.value("rounds", 0u);
    if (j.contains("shots")) {
        const auto& s = j.at("shots");
        cfg.shots.max_shots = s.value("max_shots", cfg.shots.max_shots);
        cfg.shots.max_errors = s.value("max_errors", cfg.shots.max_errors);
        cfg.shots.batch = s.value("batch", cfg.shots.batch);
    }
    if (cfg.shots.max_shots < 1 || cfg.shots.batch < 1) {
        throw std::invalid_argument("shots policy must be positive");
    }
    if (j.contains("decoder")) {
        const auto& d = j.at("decoder");
        cfg.decoder.bp_iterations = d.value("bp_iters", cfg.decoder.bp_iterations);
        cfg.decoder.scaling_factor = d.value("scale", cfg.decoder.scaling_factor);
        std::string osd = d.value("osd", "cs");
        cfg.decoder.osd_mode =
            osd == "off" ? OsdMode::Off : (osd == "osd0" ? OsdMode::Osd0 : OsdMode::CombinationSweep);
        cfg.decoder.osd_order = d.value("order", cfg.decoder.osd_order);
        cfg.decoder.cs_window = d.value("window", cfg.decoder.cs_window);
    }
    cfg.seed = j.value("seed", uint64_t{1});
    cfg.out_dir = j.value("out", "results");
    std::string basis = j.value("basis", "Z");
    cfg.memory_basis = basis == "X" ? 'X' : 'Z';
    return cfg;
}

ExperimentConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config: " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

CurvePoint run_point(const NoisyCircuit& instrumented, const Dem& dem, double p, uint32_t rounds,
                     const ShotsPolicy& shots, const DecoderConfig& decoder, uint64_t point_seed) {
    uint64_t done = 0;
    uint64_t failures = 0;
    uint64_t next = std::min(shots.batch, shots.max_shots);
    while (done < shots.max_shots && failures < shots.max_errors) {
        // Shot indices continue across batches, so the batching schedule does
        // not affect the sampled stream.
        ShotBatch batch = sample(instrumented, next, point_seed, done);
        BatchStats stats = decode_batch(dem, batch, decoder);
        if (stats.invalid > 0) {
            throw std::runtime_error("decode integrity: syndrome outside DEM column space");
        }
        failures += stats.failures;
        done += batch.shots;
        if (failures >= shots.max_errors || done >= shots.max_shots) {
            break;
        }
        // Aim for >= 10 failures per batch near threshold; deterministic in
        // the accumulated counts only.
        double rate = done > 0 ? static_cast<double>(failures) / static_cast<double>(done) : 0.0;
        uint64_t want = rate > 0.0 ? static_cast<uint64_t>(std::ceil(10.0 / rate)) : shots.max_shots;
        want = std::max(want, shots.batch);
        next = std::min(want, shots.max_shots - done);
    }
    return make_point(p, done, failures, rounds);
}

MemoryRun run_memory_experiment(const ExperimentConfig& cfg,
                                const std::function<void(const std::string&)>& log) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::string csv_path = cfg.out_dir + "/curves.csv";
    const std::string manifest_path = cfg.out_dir + "/manifest.json";
    const uint64_t cfg_hash = cfg.hash();

    // Resume: completed points are keyed by (family, k, n, noise, p) and only
    // honored when the manifest hash matches this config.
    std::set<std::string> have;
    std::vector<std::string> existing_rows;
    if (std::filesystem::exists(manifest_path) && std::filesystem::exists(csv_path)) {
        std::ifstream mf(manifest_path);
        nlohmann::json m = nlohmann::json::parse(mf, nullptr, false);
        if (!m.is_discarded() && m.value("config_hash", uint64_t{0}) == cfg_hash) {
            std::ifstream cf(csv_path);
            std::string line;
            std::getline(cf, line);  // header
            while (std::getline(cf, line)) {
                if (line.empty()) {
                    continue;
                }
                existing_rows.push_back(line);
                std::vector<std::string> f;
                std::size_t start = 0;
                for (int i = 0; i < 8; i++) {
                    std::size_t comma = line.find(',', start);
                    f.push_back(line.substr(start, comma - start));
                    start = comma + 1;
                }
                have.insert(f[0] + "|" + f[1] + "|" + f[2] + "|" + f[6] + "|" + f[7]);
            }
        }
    }

    std::map<uint32_t, double> c_table;
    if (cfg.noise.kind == NoiseKind::HardwareSpecific) {
        if (cfg.noise.c_source == NoiseSpec::CSource::Paper) {
            c_table = default_c_table();
        } else {
            RydbergConfig rcfg;
            c_table = range_table(rcfg, 2 * std::max<uint32_t>(cfg.family.k, 1) - 1).c_map();
        }
    }

    std::ofstream csv(csv_path, std::ios::trunc);
    csv << csv_header() << "\n";
    for (const std::string& row : existing_rows) {
        csv << row << "\n";
    }
    csv.flush();

    MemoryRun run;
    run.csv_path = csv_path;
    for (uint32_t n : cfg.family.sizes) {
        SeedCode seed_code = build_seed(n, cfg.family.k, cfg.family.boundary, cfg.family.poly);
        CssCode code = hypergraph_product(seed_code, seed_code);
        QubitLayout layout = assign_layout(code, cfg.family.layout);
        uint32_t dist = code.d_bound ? *code.d_bound : 1;
        uint32_t rounds = cfg.rounds > 0 ? cfg.rounds : dist;
        NoisyCircuit skeleton = build_syndrome_circuit(code, layout, rounds, cfg.memory_basis);

        DecodingCurve curve;
        curve.family = "lacross";
        curve.k = cfg.family.k;
        curve.n = n;
        curve.N = code.N;
        curve.K = code.K;
        curve.D = dist;
        curve.noise = noise_name(cfg.noise.kind);
        curve.rounds = rounds;

        for (double p : cfg.noise.p_grid) {
            std::ostringstream keys;
            keys << curve.family << "|" << curve.k << "|" << curve.n << "|" << curve.noise << "|"
                 << fmt_double(p);
            if (have.count(keys.str())) {
                continue;
            }
            NoiseModel model = cfg.noise.kind == NoiseKind::HardwareSpecific
                                   ? NoiseModel::hardware_specific(p, c_table)
                                   : NoiseModel::hardware_agnostic(p);
            NoisyCircuit inst = instrument(skeleton, model);
            Dem dem = extract_dem(inst);
            uint64_t point_seed = fnv1a64(keys.str().data(), keys.str().size(), cfg.seed);
            CurvePoint pt = run_point(inst, dem, p, rounds, cfg.shots, cfg.decoder, point_seed);
            csv << csv_row(curve, pt) << "\n";
            csv.flush();
            if (log) {
                std::ostringstream msg;
                msg << "point n=" << n << " p=" << p << " shots=" << pt.shots
                    << " failures=" << pt.failures << " P_L=" << pt.per_round;
                log(msg.str());
            }
        }
    }
    csv.close();

    // Reload so returned curves include resumed points, in grid order.
    {
        std::vector<DecodingCurve> all = read_csv_file(csv_path);
        // Re-emit the whole file sorted by the config grid for byte stability.
        std::ofstream out(csv_path, std::ios::trunc);
        out << csv_header() << "\n";
        for (uint32_t n : cfg.family.sizes) {
            for (auto& c : all) {
                if (c.n != n || c.family != "lacross") {
                    continue;
                }
                std::sort(c.points.begin(), c.points.end(),
                          [](const CurvePoint& a, const CurvePoint& b) { return a.p < b.p; });
                for (const auto& pt : c.points) {
                    out << csv_row(c, pt) << "\n";
                }
            }
        }
        run.curves = read_csv_file(csv_path);
    }

    std::ofstream mf(manifest_path, std::ios::trunc);
    mf << "{\"config_hash\":" << cfg_hash << ",\"seed\":" << cfg.seed << "}\n";
    return run;
}

SurfacePartition surface_partition(uint32_t n_qubits, uint32_t k_logical) {
    auto qubits_for = [](uint32_t d) { return d * d + (d - 1) * (d - 1); };
    SurfacePartition part;
    part.copies = k_logical;
    uint32_t best_odd = 0;
    for (uint32_t d = 3; k_logical * qubits_for(d) <= n_qubits; d += 2) {
        best_odd = d;
    }
    if (best_odd >= 3) {
        part.distance = best_odd;
    } else {
        // No odd distance fits; take the distance whose total is nearest N.
        uint32_t best_d = 2;
        uint64_t best_gap = UINT64_MAX;
        for (uint32_t d = 2; d <= 64; d++) {
            uint64_t total = uint64_t{k_logical} * qubits_for(d);
            uint64_t gap = total > n_qubits ? total - n_qubits : n_qubits - total;
            if (gap < best_gap) {
                best_gap = gap;
                best_d = d;
            }
            if (total > n_qubits && d > 2) {
                break;
            }
        }
        part.distance = best_d;
    }
    part.qubits_used = k_logical * qubits_for(part.distance);
    part.leftover = part.qubits_used <= n_qubits ? n_qubits - part.qubits_used : 0;
    part.exact = part.qubits_used == n_qubits;
    return part;
}

ComparisonReport run_comparison(const ExperimentConfig& cfg, uint32_t ldpc_n, double sc_p_th_hint,
                                const std::function<void(const std::string&)>& log) {
    ComparisonReport rep;

    ExperimentConfig ldpc_cfg = cfg;
    ldpc_cfg.family.sizes = {ldpc_n};
    ldpc_cfg.out_dir = cfg.out_dir + "/ldpc";
    MemoryRun ldpc_run = run_memory_experiment(ldpc_cfg, log);
    if (ldpc_run.curves.empty()) {
        throw std::runtime_error("comparison: empty LDPC run");
    }
    rep.ldpc = ldpc_run.curves.front();

    rep.partition = surface_partition(rep.ldpc.N, rep.ldpc.K);

    // Surface-code arm: k = 1 seeds, nearest-neighbor layout, decoded with
    // the optimized scaling factor, run for D_ldpc rounds.
    ExperimentConfig sc_cfg = cfg;
    sc_cfg.family.k = 1;
    sc_cfg.family.sizes = {rep.partition.distance};
    sc_cfg.family.poly = PolyKind::ThreeTerm;
    sc_cfg.rounds = rep.ldpc.rounds;
    sc_cfg.decoder.scaling_factor = 0.625;
    sc_cfg.out_dir = cfg.out_dir + "/surface";
    MemoryRun sc_run = run_memory_experiment(sc_cfg, log);
    if (sc_run.curves.empty()) {
        throw std::runtime_error("comparison: empty surface run");
    }
    rep.sc_single = sc_run.curves.front();
    rep.sc_single.family = "surface";
    rep.sc_single.rounds = rep.ldpc.rounds;
    rep.sc_combined = sc_family_curve(rep.sc_single, rep.partition.copies);
    rep.sc_combined.family = "surface";

    rep.empirical_crossing = curve_crossing(rep.ldpc, rep.sc_combined);

    // Closed form needs sub-threshold fits of both arms; the thresholds used
    // are configuration hints here, not measured quantities.
    try {
        double ldpc_pth = cfg.noise.p_grid.empty() ? 0.0 : cfg.noise.p_grid.back();
        if (ldpc_pth > 0.0) {
            rep.fit_ldpc = fit_subthreshold(rep.ldpc, ldpc_pth);
            double sc_pth = sc_p_th_hint > 0.0 ? sc_p_th_hint : ldpc_pth;
            rep.fit_sc = fit_subthreshold(rep.sc_combined, sc_pth);
            rep.closed_form = crossing_point(rep.fit_ldpc->a, rep.fit_ldpc->p_th, rep.fit_ldpc->beta,
                                             rep.fit_sc->a, rep.fit_sc->p_th, rep.fit_sc->beta,
                                             rep.ldpc.N);
        }
    } catch (const InsufficientData&) {
        // comparison still reports the raw curves
    } catch (const DegenerateExponents&) {
    }
    return rep;
}

}  // namespace lacross
