#include "lacross/frame_sim.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "lacross/rng.hpp"

namespace lacross {

namespace {

constexpr uint32_t kObsBase = uint32_t{1} << 30;

/// Symmetric difference of two sorted id lists.
std::vector<uint32_t> xor_sorted(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    std::vector<uint32_t> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            out.push_back(a[i++]);
        } else if (b[j] < a[i]) {
            out.push_back(b[j++]);
        } else {
            i++;
            j++;
        }
    }
    out.insert(out.end(), a.begin() + i, a.end());
    out.insert(out.end(), b.begin() + j, b.end());
    return out;
}

/// Measurement index of each (layer, slot) measurement, in circuit order.
std::vector<uint32_t> layer_measurement_base(const NoisyCircuit& c) {
    std::vector<uint32_t> base(c.layers.size(), 0);
    uint32_t m = 0;
    for (std::size_t i = 0; i < c.layers.size(); i++) {
        base[i] = m;
        const Layer& l = c.layers[i];
        if (l.kind == OpKind::MeasureZ || l.kind == OpKind::MeasureX || l.kind == OpKind::MeasureResetZ) {
            m += static_cast<uint32_t>(l.qubits.size());
        }
    }
    if (m != c.num_measurements) {
        throw std::runtime_error("measurement count mismatch");
    }
    return base;
}

// Dep2 component index c in 0..14 maps to Pauli pair (a, b) with codes
// 0=I 1=X 2=Z 3=Y via c+1 = 4a+b; code bit 0 flips the X frame, bit 1 the Z.
inline void dep2_paulis(uint32_t component, uint32_t& pa, uint32_t& pb) {
    uint32_t c = component + 1;
    pa = c >> 2;
    pb = c & 3;
}

}  // namespace

std::vector<ErrorComponent> enumerate_components(const NoisyCircuit& circuit) {
    validate_circuit(circuit);
    const uint32_t nq = circuit.num_qubits;
    std::vector<uint32_t> mbase = layer_measurement_base(circuit);

    // sig_of_meas[m]: sorted detector/observable ids referencing measurement m.
    std::vector<std::vector<uint32_t>> sig_of_meas(circuit.num_measurements);
    for (uint32_t d = 0; d < circuit.num_detectors(); d++) {
        for (uint32_t m : circuit.detectors[d]) {
            sig_of_meas[m].push_back(d);
        }
    }
    for (uint32_t o = 0; o < circuit.num_observables(); o++) {
        for (uint32_t m : circuit.observables[o]) {
            sig_of_meas[m].push_back(kObsBase + o);
        }
    }
    for (auto& v : sig_of_meas) {
        std::sort(v.begin(), v.end());
    }

    // xs[q] (zs[q]): signature an X (Z) error on q would have if inserted at
    // the current position of the backward walk.
    std::vector<std::vector<uint32_t>> xs(nq), zs(nq);
    std::vector<ErrorComponent> components;

    auto emit = [&](uint32_t layer, uint32_t item, uint32_t comp, double prior,
                    std::vector<uint32_t> sig) {
        ErrorComponent ec;
        ec.layer = layer;
        ec.item = item;
        ec.component = comp;
        ec.prior = prior;
        for (uint32_t id : sig) {
            if (id >= kObsBase) {
                ec.observables.push_back(id - kObsBase);
            } else {
                ec.detectors.push_back(id);
            }
        }
        components.push_back(std::move(ec));
    };

    for (std::size_t li = circuit.layers.size(); li-- > 0;) {
        const Layer& l = circuit.layers[li];
        const uint32_t lidx = static_cast<uint32_t>(li);
        switch (l.kind) {
            case OpKind::ResetZ:
            case OpKind::ResetX:
                for (uint32_t q : l.qubits) {
                    xs[q].clear();
                    zs[q].clear();
                }
                break;
            case OpKind::H:
                for (uint32_t q : l.qubits) {
                    std::swap(xs[q], zs[q]);
                }
                break;
            case OpKind::CX:
                for (std::size_t g = 0; g < l.ranges.size(); g++) {
                    uint32_t ctrl = l.qubits[2 * g];
                    uint32_t tgt = l.qubits[2 * g + 1];
                    xs[ctrl] = xor_sorted(xs[ctrl], xs[tgt]);
                    zs[tgt] = xor_sorted(zs[tgt], zs[ctrl]);
                }
                break;
            case OpKind::MeasureZ:
                for (std::size_t s = 0; s < l.qubits.size(); s++) {
                    xs[l.qubits[s]] =
                        xor_sorted(xs[l.qubits[s]], sig_of_meas[mbase[li] + s]);
                }
                break;
            case OpKind::MeasureX:
                for (std::size_t s = 0; s < l.qubits.size(); s++) {
                    zs[l.qubits[s]] =
                        xor_sorted(zs[l.qubits[s]], sig_of_meas[mbase[li] + s]);
                }
                break;
            case OpKind::MeasureResetZ:
                for (std::size_t s = 0; s < l.qubits.size(); s++) {
                    uint32_t q = l.qubits[s];
                    xs[q].clear();
                    zs[q].clear();
                    xs[q] = sig_of_meas[mbase[li] + s];
                }
                break;
            case OpKind::Dep1:
                for (std::size_t s = 0; s < l.qubits.size(); s++) {
                    uint32_t q = l.qubits[s];
                    emit(lidx, static_cast<uint32_t>(s), 0, l.p / 3.0, xs[q]);
                    emit(lidx, static_cast<uint32_t>(s), 1, l.p / 3.0, zs[q]);
                    emit(lidx, static_cast<uint32_t>(s), 2, l.p / 3.0, xor_sorted(xs[q], zs[q]));
                }
                break;
            case OpKind::Dep2:
                for (std::size_t g = 0; 2 * g + 1 < l.qubits.size(); g++) {
                    uint32_t a = l.qubits[2 * g];
                    uint32_t b = l.qubits[2 * g + 1];
                    for (uint32_t comp = 0; comp < 15; comp++) {
                        uint32_t pa = 0, pb = 0;
                        dep2_paulis(comp, pa, pb);
                        std::vector<uint32_t> sig;
                        if (pa & 1) sig = xor_sorted(sig, xs[a]);
                        if (pa & 2) sig = xor_sorted(sig, zs[a]);
                        if (pb & 1) sig = xor_sorted(sig, xs[b]);
                        if (pb & 2) sig = xor_sorted(sig, zs[b]);
                        emit(lidx, static_cast<uint32_t>(g), comp, l.p / 15.0, std::move(sig));
                    }
                }
                break;
            case OpKind::XFlip:
                for (std::size_t s = 0; s < l.qubits.size(); s++) {
                    emit(lidx, static_cast<uint32_t>(s), 0, l.p, xs[l.qubits[s]]);
                }
                break;
            case OpKind::ZFlip:
                for (std::size_t s = 0; s < l.qubits.size(); s++) {
                    emit(lidx, static_cast<uint32_t>(s), 0, l.p, zs[l.qubits[s]]);
                }
                break;
        }
    }
    std::sort(components.begin(), components.end(), [](const ErrorComponent& a, const ErrorComponent& b) {
        return std::tie(a.layer, a.item, a.component) < std::tie(b.layer, b.item, b.component);
    });
    return components;
}

Dem extract_dem(const NoisyCircuit& circuit) {
    Dem dem;
    dem.num_detectors = circuit.num_detectors();
    dem.num_observables = circuit.num_observables();

    std::unordered_map<uint64_t, std::vector<uint32_t>> index_of_sig;
    auto sig_hash = [](const std::vector<uint32_t>& dets, const std::vector<uint32_t>& obs) {
        uint64_t h = fnv1a64(dets.data(), dets.size() * sizeof(uint32_t));
        h = fnv1a64(obs.data(), obs.size() * sizeof(uint32_t), h ^ 0x5bd1e995);
        return h;
    };

    for (ErrorComponent& ec : enumerate_components(circuit)) {
        if (ec.prior <= 0.0) {
            continue;
        }
        if (ec.prior > 0.5) {
            throw std::invalid_argument("error component with probability above 0.5");
        }
        if (ec.detectors.empty() && ec.observables.empty()) {
            continue;
        }
        uint64_t h = sig_hash(ec.detectors, ec.observables);
        auto& bucket = index_of_sig[h];
        bool merged = false;
        for (uint32_t idx : bucket) {
            Dem::Mechanism& m = dem.mechanisms[idx];
            if (m.detectors == ec.detectors && m.observables == ec.observables) {
                m.prior = m.prior * (1.0 - ec.prior) + ec.prior * (1.0 - m.prior);
                merged = true;
                break;
            }
        }
        if (!merged) {
            bucket.push_back(static_cast<uint32_t>(dem.mechanisms.size()));
            dem.mechanisms.push_back(Dem::Mechanism{ec.prior, std::move(ec.detectors), std::move(ec.observables)});
        }
    }

    // Canonical order for reproducible output and decoding.
    std::sort(dem.mechanisms.begin(), dem.mechanisms.end(), [](const Dem::Mechanism& a, const Dem::Mechanism& b) {
        return std::tie(a.detectors, a.observables) < std::tie(b.detectors, b.observables);
    });
    dem.mechanisms.erase(std::remove_if(dem.mechanisms.begin(), dem.mechanisms.end(),
                                        [](const Dem::Mechanism& m) { return m.prior <= 0.0; }),
                         dem.mechanisms.end());
    for (const Dem::Mechanism& m : dem.mechanisms) {
        if (m.prior > 0.5) {
            throw std::invalid_argument("merged mechanism probability above 0.5");
        }
        if (m.detectors.empty() && !m.observables.empty()) {
            dem.num_undetectable_observable++;
        }
    }
    return dem;
}

BitVec ShotBatch::detector_row(uint64_t shot) const {
    BitVec v(num_detectors);
    for (uint32_t d = 0; d < num_detectors; d++) {
        if (detector(shot, d)) {
            v.set(d);
        }
    }
    return v;
}

BitVec ShotBatch::observable_row(uint64_t shot) const {
    BitVec v(num_observables);
    for (uint32_t o = 0; o < num_observables; o++) {
        if (observable(shot, o)) {
            v.set(o);
        }
    }
    return v;
}

namespace {

/// Runs one shot; frames and measurement buffer provided by the caller.
/// When `forced` is non-null all channels are silent except the forced one.
void run_shot(const NoisyCircuit& c, Rng* rng, const ForcedError* forced,
              std::vector<uint8_t>& fx, std::vector<uint8_t>& fz, std::vector<uint8_t>& mbits) {
    std::fill(fx.begin(), fx.end(), 0);
    std::fill(fz.begin(), fz.end(), 0);
    uint32_t m = 0;
    for (std::size_t li = 0; li < c.layers.size(); li++) {
        const Layer& l = c.layers[li];
        switch (l.kind) {
            case OpKind::ResetZ:
            case OpKind::ResetX:
                for (uint32_t q : l.qubits) {
                    fx[q] = 0;
                    fz[q] = 0;
                }
                break;
            case OpKind::H:
                for (uint32_t q : l.qubits) {
                    std::swap(fx[q], fz[q]);
                }
                break;
            case OpKind::CX:
                for (std::size_t g = 0; g < l.ranges.size(); g++) {
                    uint32_t ctrl = l.qubits[2 * g];
                    uint32_t tgt = l.qubits[2 * g + 1];
                    fx[tgt] ^= fx[ctrl];
                    fz[ctrl] ^= fz[tgt];
                }
                break;
            case OpKind::MeasureZ:
            case OpKind::MeasureResetZ:
                for (uint32_t q : l.qubits) {
                    mbits[m++] = fx[q];
                    if (l.kind == OpKind::MeasureResetZ) {
                        fx[q] = 0;
                        fz[q] = 0;
                    }
                }
                break;
            case OpKind::MeasureX:
                for (uint32_t q : l.qubits) {
                    mbits[m++] = fz[q];
                }
                break;
            case OpKind::Dep1:
                if (forced == nullptr) {
                    for (uint32_t q : l.qubits) {
                        if (rng->bernoulli(l.p)) {
                            uint32_t pauli = rng->below(3) + 1;  // 1=X 2=Z 3=Y
                            fx[q] ^= pauli & 1;
                            fz[q] ^= (pauli >> 1) & 1;
                        }
                    }
                } else if (forced->layer == li) {
                    uint32_t q = l.qubits[forced->item];
                    uint32_t pauli = forced->component == 0 ? 1 : (forced->component == 1 ? 2 : 3);
                    fx[q] ^= pauli & 1;
                    fz[q] ^= (pauli >> 1) & 1;
                }
                break;
            case OpKind::Dep2:
                if (forced == nullptr) {
                    for (std::size_t g = 0; 2 * g + 1 < l.qubits.size(); g++) {
                        if (rng->bernoulli(l.p)) {
                            uint32_t comp = rng->below(15);
                            uint32_t pa = 0, pb = 0;
                            dep2_paulis(comp, pa, pb);
                            uint32_t a = l.qubits[2 * g];
                            uint32_t b = l.qubits[2 * g + 1];
                            fx[a] ^= pa & 1;
                            fz[a] ^= (pa >> 1) & 1;
                            fx[b] ^= pb & 1;
                            fz[b] ^= (pb >> 1) & 1;
                        }
                    }
                } else if (forced->layer == li) {
                    uint32_t pa = 0, pb = 0;
                    dep2_paulis(forced->component, pa, pb);
                    uint32_t a = l.qubits[2 * forced->item];
                    uint32_t b = l.qubits[2 * forced->item + 1];
                    fx[a] ^= pa & 1;
                    fz[a] ^= (pa >> 1) & 1;
                    fx[b] ^= pb & 1;
                    fz[b] ^= (pb >> 1) & 1;
                }
                break;
            case OpKind::XFlip:
                if (forced == nullptr) {
                    for (uint32_t q : l.qubits) {
                        fx[q] ^= rng->bernoulli(l.p) ? 1 : 0;
                    }
                } else if (forced->layer == li) {
                    fx[l.qubits[forced->item]] ^= 1;
                }
                break;
            case OpKind::ZFlip:
                if (forced == nullptr) {
                    for (uint32_t q : l.qubits) {
                        fz[q] ^= rng->bernoulli(l.p) ? 1 : 0;
                    }
                } else if (forced->layer == li) {
                    fz[l.qubits[forced->item]] ^= 1;
                }
                break;
        }
    }
}

void write_shot(const NoisyCircuit& c, const std::vector<uint8_t>& mbits, uint8_t* row,
                std::size_t det_bytes) {
    for (uint32_t d = 0; d < c.num_detectors(); d++) {
        uint8_t parity = 0;
        for (uint32_t mi : c.detectors[d]) {
            parity ^= mbits[mi];
        }
        if (parity) {
            row[d / 8] |= uint8_t(1) << (d % 8);
        }
    }
    for (uint32_t o = 0; o < c.num_observables(); o++) {
        uint8_t parity = 0;
        for (uint32_t mi : c.observables[o]) {
            parity ^= mbits[mi];
        }
        if (parity) {
            row[det_bytes + o / 8] |= uint8_t(1) << (o % 8);
        }
    }
}

ShotBatch sample_impl(const NoisyCircuit& circuit, uint64_t shots, uint64_t seed, uint64_t shot_base,
                      bool parallel) {
    if (shots < 1) {
        throw std::invalid_argument("shots must be >= 1");
    }
    validate_circuit(circuit);
    ShotBatch batch;
    batch.shots = shots;
    batch.num_detectors = circuit.num_detectors();
    batch.num_observables = circuit.num_observables();
    batch.seed = seed;
    batch.data.assign(shots * batch.stride(), 0);
    const std::size_t stride = batch.stride();
    const std::size_t det_bytes = batch.det_bytes();

#pragma omp parallel if (parallel)
    {
        std::vector<uint8_t> fx(circuit.num_qubits), fz(circuit.num_qubits);
        std::vector<uint8_t> mbits(circuit.num_measurements);
#pragma omp for schedule(static)
        for (int64_t s = 0; s < static_cast<int64_t>(shots); s++) {
            Rng rng(seed, shot_base + static_cast<uint64_t>(s));
            run_shot(circuit, &rng, nullptr, fx, fz, mbits);
            write_shot(circuit, mbits, &batch.data[s * stride], det_bytes);
        }
    }
    return batch;
}

}  // namespace

ShotBatch sample(const NoisyCircuit& circuit, uint64_t shots, uint64_t seed, uint64_t shot_base) {
    return sample_impl(circuit, shots, seed, shot_base, true);
}

ShotBatch sample_reference(const NoisyCircuit& circuit, uint64_t shots, uint64_t seed,
                           uint64_t shot_base) {
    return sample_impl(circuit, shots, seed, shot_base, false);
}

ShotBatch sample_forced(const NoisyCircuit& circuit, const ForcedError& forced) {
    validate_circuit(circuit);
    ShotBatch batch;
    batch.shots = 1;
    batch.num_detectors = circuit.num_detectors();
    batch.num_observables = circuit.num_observables();
    batch.seed = 0;
    batch.data.assign(batch.stride(), 0);
    std::vector<uint8_t> fx(circuit.num_qubits), fz(circuit.num_qubits);
    std::vector<uint8_t> mbits(circuit.num_measurements);
    run_shot(circuit, nullptr, &forced, fx, fz, mbits);
    write_shot(circuit, mbits, batch.data.data(), batch.det_bytes());
    return batch;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string dem_to_text(const Dem& dem) {
    std::ostringstream out;
    out << "lacross-dem v1 " << dem.num_detectors << " " << dem.num_observables << "\n";
    for (const auto& m : dem.mechanisms) {
        out << "error(" << fmt_double(m.prior) << ")";
        for (uint32_t d : m.detectors) {
            out << " D" << d;
        }
        for (uint32_t o : m.observables) {
            out << " L" << o;
        }
        out << "\n";
    }
    return out.str();
}

Dem dem_from_text(std::istream& in) {
    std::string tag, version;
    Dem dem;
    if (!(in >> tag >> version >> dem.num_detectors >> dem.num_observables) || tag != "lacross-dem") {
        throw std::runtime_error("not a lacross-dem file");
    }
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line.rfind("error(", 0) != 0) {
            throw std::runtime_error("dem text: bad line: " + line);
        }
        std::size_t close = line.find(')');
        if (close == std::string::npos) {
            throw std::runtime_error("dem text: missing )");
        }
        Dem::Mechanism m;
        m.prior = std::stod(line.substr(6, close - 6));
        std::istringstream rest(line.substr(close + 1));
        std::string tok;
        while (rest >> tok) {
            if (tok[0] == 'D') {
                m.detectors.push_back(static_cast<uint32_t>(std::stoul(tok.substr(1))));
            } else if (tok[0] == 'L') {
                m.observables.push_back(static_cast<uint32_t>(std::stoul(tok.substr(1))));
            } else {
                throw std::runtime_error("dem text: bad token " + tok);
            }
        }
        if (m.detectors.empty() && !m.observables.empty()) {
            dem.num_undetectable_observable++;
        }
        dem.mechanisms.push_back(std::move(m));
    }
    return dem;
}

Dem dem_from_text(const std::string& text) {
    std::istringstream in(text);
    return dem_from_text(in);
}

Dem load_dem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open dem file: " + path);
    }
    return dem_from_text(in);
}

void save_dem_file(const std::string& path, const Dem& dem) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write dem file: " + path);
    }
    out << dem_to_text(dem);
}

void save_batch_file(const std::string& path, const ShotBatch& batch) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write batch file: " + path);
    }
    out << "{\"shots\":" << batch.shots << ",\"detectors\":" << batch.num_detectors
        << ",\"observables\":" << batch.num_observables << ",\"seed\":" << batch.seed << "}\n";
    out.write(reinterpret_cast<const char*>(batch.data.data()),
              static_cast<std::streamsize>(batch.data.size()));
}

ShotBatch load_batch_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open batch file: " + path);
    }
    std::string header;
    std::getline(in, header);
    ShotBatch batch;
    auto field = [&](const char* name) -> uint64_t {
        std::string key = std::string("\"") + name + "\":";
        std::size_t at = header.find(key);
        if (at == std::string::npos) {
            throw std::runtime_error("batch header missing field " + std::string(name));
        }
        return std::stoull(header.substr(at + key.size()));
    };
    batch.shots = field("shots");
    batch.num_detectors = static_cast<uint32_t>(field("detectors"));
    batch.num_observables = static_cast<uint32_t>(field("observables"));
    batch.seed = field("seed");
    batch.data.resize(batch.shots * batch.stride());
    in.read(reinterpret_cast<char*>(batch.data.data()), static_cast<std::streamsize>(batch.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(batch.data.size())) {
        throw std::runtime_error("batch file truncated");
    }
    return batch;
}

}  // namespace lacross
