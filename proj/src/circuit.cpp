#include "lacross/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace lacross {

std::map<uint32_t, double> default_c_table() {
    return {{1, 1.0}, {2, 1.6}, {3, 2.5}, {4, 3.6}, {5, 4.8}, {6, 6.1}, {7, 7.5}};
}

NoiseModel NoiseModel::hardware_specific(double p, const std::map<uint32_t, double>& c) {
    NoiseModel m;
    m.kind = NoiseKind::HardwareSpecific;
    m.p = p;
    m.p1 = p / 10.0;
    m.p_prep = 2.0 * p;
    m.p_meas = 2.0 * p;
    m.c_of_range = c;
    m.validate();
    return m;
}

NoiseModel NoiseModel::hardware_agnostic(double p) {
    NoiseModel m;
    m.kind = NoiseKind::HardwareAgnostic;
    m.p = p;
    m.p1 = p;
    m.p_prep = 0.0;
    m.p_meas = 0.0;
    m.validate();
    return m;
}

double NoiseModel::p2(uint32_t range) const {
    if (kind == NoiseKind::HardwareAgnostic) {
        return p;
    }
    auto it = c_of_range.find(range);
    if (it == c_of_range.end()) {
        throw std::invalid_argument("no c_j entry for gate range " + std::to_string(range));
    }
    return it->second * p;
}

void NoiseModel::validate() const {
    auto check01 = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument(std::string(name) + " outside [0, 1]");
        }
    };
    check01(p, "p");
    check01(p1, "p1");
    check01(p_prep, "p_prep");
    check01(p_meas, "p_meas");
    if (kind == NoiseKind::HardwareSpecific) {
        if (c_of_range.empty() || c_of_range.begin()->first != 1 || c_of_range.begin()->second != 1.0) {
            throw std::invalid_argument("hardware-specific model requires c_1 = 1");
        }
        double prev = 0.0;
        for (auto [j, c] : c_of_range) {
            if (c < prev) {
                throw std::invalid_argument("c_j must be nondecreasing in j");
            }
            prev = c;
            check01(c * p, "p2(j)");
        }
    }
}

bool is_gate_layer(OpKind k) {
    switch (k) {
        case OpKind::ResetZ:
        case OpKind::ResetX:
        case OpKind::H:
        case OpKind::CX:
        case OpKind::MeasureZ:
        case OpKind::MeasureX:
        case OpKind::MeasureResetZ:
            return true;
        default:
            return false;
    }
}

bool is_noise_layer(OpKind k) { return !is_gate_layer(k); }

void validate_circuit(const NoisyCircuit& circuit) {
    for (const Layer& l : circuit.layers) {
        if (!is_gate_layer(l.kind)) {
            continue;
        }
        std::vector<uint8_t> seen(circuit.num_qubits, 0);
        for (uint32_t q : l.qubits) {
            if (q >= circuit.num_qubits) {
                throw std::runtime_error("circuit references qubit out of range");
            }
            if (seen[q]++) {
                throw std::runtime_error("qubit participates twice in one layer");
            }
        }
        if (l.kind == OpKind::CX) {
            if (l.qubits.size() % 2 != 0 || l.ranges.size() != l.qubits.size() / 2) {
                throw std::runtime_error("malformed CX layer");
            }
        }
    }
    for (const auto& det : circuit.detectors) {
        for (uint32_t m : det) {
            if (m >= circuit.num_measurements) {
                throw std::runtime_error("detector references missing measurement");
            }
        }
    }
    for (const auto& obs : circuit.observables) {
        for (uint32_t m : obs) {
            if (m >= circuit.num_measurements) {
                throw std::runtime_error("observable references missing measurement");
            }
        }
    }
}

namespace {

struct StabGeometry {
    uint32_t ancilla = 0;
    // Nearest-neighbor supports keyed by direction index N=0, E=1, W=2, S=3.
    std::array<std::optional<uint32_t>, 4> near;
    std::optional<uint32_t> arm_vertical;
    std::optional<uint32_t> arm_horizontal;
};

StabGeometry classify_stab(const CssCode& code, const QubitLayout& layout, const BinaryMatrix& h,
                           std::size_t row, uint32_t ancilla) {
    StabGeometry g;
    g.ancilla = ancilla;
    auto [ax, ay] = layout.coords[ancilla];
    for (uint32_t q = 0; q < code.N; q++) {
        if (!h.get(row, q)) {
            continue;
        }
        auto [qx, qy] = layout.coords[q];
        int32_t dx = qx - ax;
        int32_t dy = qy - ay;
        if (layout.mode == LayoutMode::PBC) {
            if (dx > layout.period_x / 2) dx -= layout.period_x;
            if (dx < -layout.period_x / 2) dx += layout.period_x;
            if (dy > layout.period_y / 2) dy -= layout.period_y;
            if (dy < -layout.period_y / 2) dy += layout.period_y;
        }
        if (std::abs(dx) + std::abs(dy) == 1) {
            int dir = dy == 1 ? 0 : (dx == 1 ? 1 : (dx == -1 ? 2 : 3));
            if (g.near[dir]) {
                throw std::runtime_error("two supports share a nearest-neighbor direction");
            }
            g.near[dir] = q;
        } else if (dx == 0) {
            if (g.arm_vertical) {
                throw std::runtime_error("stabilizer has two vertical arms");
            }
            g.arm_vertical = q;
        } else if (dy == 0) {
            if (g.arm_horizontal) {
                throw std::runtime_error("stabilizer has two horizontal arms");
            }
            g.arm_horizontal = q;
        } else {
            throw std::runtime_error("stabilizer support is not axis-aligned with its ancilla");
        }
    }
    return g;
}

}  // namespace

NoisyCircuit build_syndrome_circuit(const CssCode& code, const QubitLayout& layout, uint32_t rounds,
                                    char memory_basis) {
    if (rounds < 1) {
        throw std::invalid_argument("rounds must be >= 1");
    }
    if (layout.coords.size() != code.num_qubits_total()) {
        throw std::invalid_argument("layout inconsistent with code");
    }
    if (memory_basis != 'Z' && memory_basis != 'X') {
        throw std::invalid_argument("memory basis must be 'Z' or 'X'");
    }
    const bool zmem = memory_basis == 'Z';
    const uint32_t nx = code.num_x_stabs();
    const uint32_t nz = code.num_z_stabs();

    std::vector<StabGeometry> xg, zg;
    xg.reserve(nx);
    zg.reserve(nz);
    for (uint32_t s = 0; s < nx; s++) {
        xg.push_back(classify_stab(code, layout, code.h_x, s, code.N + s));
    }
    for (uint32_t s = 0; s < nz; s++) {
        zg.push_back(classify_stab(code, layout, code.h_z, s, code.N + nx + s));
    }

    NoisyCircuit c;
    c.num_qubits = code.num_qubits_total();
    c.rounds = rounds;

    auto add_layer = [&](OpKind kind) -> Layer& {
        c.layers.push_back(Layer{kind, 0.0, {}, {}});
        return c.layers.back();
    };
    auto add_cx = [&](Layer& l, uint32_t ctrl, uint32_t tgt) {
        l.qubits.push_back(ctrl);
        l.qubits.push_back(tgt);
        l.ranges.push_back(gate_range(layout, ctrl, tgt));
    };

    // Initial preparation: data in the memory basis, ancillas in |0>.
    {
        Layer& data_prep = add_layer(zmem ? OpKind::ResetZ : OpKind::ResetX);
        for (uint32_t q = 0; q < code.N; q++) {
            data_prep.qubits.push_back(q);
        }
        Layer& anc_prep = add_layer(OpKind::ResetZ);
        for (uint32_t q = code.N; q < c.num_qubits; q++) {
            anc_prep.qubits.push_back(q);
        }
    }

    // Nearest-neighbor order: X ancillas sweep N,E,W,S while Z ancillas sweep
    // N,W,E,S; each layer pairs same-axis directions so no qubit is touched
    // twice (X hits primal on vertical steps, Z hits primal on horizontal).
    constexpr int kDirX[4] = {0, 1, 2, 3};
    constexpr int kDirZ[4] = {0, 2, 1, 3};

    for (uint32_t r = 0; r < rounds; r++) {
        {
            Layer& h = add_layer(OpKind::H);
            for (const auto& g : xg) {
                h.qubits.push_back(g.ancilla);
            }
        }
        for (int t = 0; t < 4; t++) {
            Layer& l = add_layer(OpKind::CX);
            for (const auto& g : xg) {
                if (g.near[kDirX[t]]) {
                    add_cx(l, g.ancilla, *g.near[kDirX[t]]);
                }
            }
            for (const auto& g : zg) {
                if (g.near[kDirZ[t]]) {
                    add_cx(l, *g.near[kDirZ[t]], g.ancilla);
                }
            }
            if (l.qubits.empty()) {
                c.layers.pop_back();
            }
        }
        // Long arms run separately for X and Z: horizontal then vertical for
        // X stabilizers, vertical then horizontal for Z stabilizers.
        auto arm_layer = [&](bool x_type, bool vertical) {
            Layer& l = add_layer(OpKind::CX);
            const auto& geos = x_type ? xg : zg;
            for (const auto& g : geos) {
                const auto& arm = vertical ? g.arm_vertical : g.arm_horizontal;
                if (arm) {
                    if (x_type) {
                        add_cx(l, g.ancilla, *arm);
                    } else {
                        add_cx(l, *arm, g.ancilla);
                    }
                }
            }
            if (l.qubits.empty()) {
                c.layers.pop_back();
            }
        };
        arm_layer(true, false);
        arm_layer(true, true);
        arm_layer(false, true);
        arm_layer(false, false);
        {
            Layer& h = add_layer(OpKind::H);
            for (const auto& g : xg) {
                h.qubits.push_back(g.ancilla);
            }
        }
        {
            Layer& mr = add_layer(OpKind::MeasureResetZ);
            for (uint32_t q = code.N; q < c.num_qubits; q++) {
                mr.qubits.push_back(q);
            }
        }
    }

    // Final transversal data readout in the memory basis.
    {
        Layer& m = add_layer(zmem ? OpKind::MeasureZ : OpKind::MeasureX);
        for (uint32_t q = 0; q < code.N; q++) {
            m.qubits.push_back(q);
        }
    }
    const uint32_t per_round = nx + nz;
    c.num_measurements = rounds * per_round + code.N;
    auto m_x = [&](uint32_t r, uint32_t s) { return (r - 1) * per_round + s; };          // r is 1-based
    auto m_z = [&](uint32_t r, uint32_t s) { return (r - 1) * per_round + nx + s; };
    auto m_data = [&](uint32_t q) { return rounds * per_round + q; };

    // Tracked-type detectors are absolute in round 1 (data prepared in the
    // tracked basis) and reconstructed from the data readout at the end; the
    // other type starts comparing from round 2.
    const BinaryMatrix& tracked = zmem ? code.h_z : code.h_x;
    const uint32_t n_tracked = zmem ? nz : nx;
    const uint32_t n_other = zmem ? nx : nz;
    auto m_tracked = [&](uint32_t r, uint32_t s) { return zmem ? m_z(r, s) : m_x(r, s); };
    auto m_other = [&](uint32_t r, uint32_t s) { return zmem ? m_x(r, s) : m_z(r, s); };

    for (uint32_t s = 0; s < n_tracked; s++) {
        c.detectors.push_back({m_tracked(1, s)});
    }
    for (uint32_t r = 2; r <= rounds; r++) {
        for (uint32_t s = 0; s < n_tracked; s++) {
            c.detectors.push_back({m_tracked(r - 1, s), m_tracked(r, s)});
        }
        for (uint32_t s = 0; s < n_other; s++) {
            c.detectors.push_back({m_other(r - 1, s), m_other(r, s)});
        }
    }
    for (uint32_t s = 0; s < n_tracked; s++) {
        std::vector<uint32_t> det{m_tracked(rounds, s)};
        for (uint32_t q = 0; q < code.N; q++) {
            if (tracked.get(s, q)) {
                det.push_back(m_data(q));
            }
        }
        c.detectors.push_back(std::move(det));
    }

    const BinaryMatrix& logicals = zmem ? code.logicals_z : code.logicals_x;
    for (std::size_t li = 0; li < logicals.rows(); li++) {
        std::vector<uint32_t> obs;
        for (uint32_t q = 0; q < code.N; q++) {
            if (logicals.get(li, q)) {
                obs.push_back(m_data(q));
            }
        }
        c.observables.push_back(std::move(obs));
    }

    validate_circuit(c);
    return c;
}

NoisyCircuit instrument(const NoisyCircuit& circuit, const NoiseModel& model) {
    model.validate();
    NoisyCircuit out;
    out.num_qubits = circuit.num_qubits;
    out.rounds = circuit.rounds;
    out.detectors = circuit.detectors;
    out.observables = circuit.observables;
    out.num_measurements = circuit.num_measurements;

    auto push_flip = [&](OpKind kind, double p, const std::vector<uint32_t>& qubits) {
        if (p > 0.0 && !qubits.empty()) {
            out.layers.push_back(Layer{kind, p, qubits, {}});
        }
    };

    for (const Layer& l : circuit.layers) {
        if (is_noise_layer(l.kind)) {
            throw std::invalid_argument("instrument expects a noiseless skeleton");
        }
        switch (l.kind) {
            case OpKind::ResetZ:
                out.layers.push_back(l);
                push_flip(OpKind::XFlip, model.p_prep, l.qubits);
                break;
            case OpKind::ResetX:
                out.layers.push_back(l);
                push_flip(OpKind::ZFlip, model.p_prep, l.qubits);
                break;
            case OpKind::H:
                out.layers.push_back(l);
                push_flip(OpKind::Dep1, model.p1, l.qubits);
                break;
            case OpKind::CX: {
                out.layers.push_back(l);
                if (model.p > 0.0) {
                    std::map<double, std::vector<uint32_t>> groups;
                    for (std::size_t g = 0; g < l.ranges.size(); g++) {
                        double p2 = model.p2(l.ranges[g]);
                        if (p2 > 0.0) {
                            auto& v = groups[p2];
                            v.push_back(l.qubits[2 * g]);
                            v.push_back(l.qubits[2 * g + 1]);
                        }
                    }
                    for (auto& [p2, pairs] : groups) {
                        out.layers.push_back(Layer{OpKind::Dep2, p2, pairs, {}});
                    }
                }
                break;
            }
            case OpKind::MeasureZ:
                push_flip(OpKind::XFlip, model.p_meas, l.qubits);
                out.layers.push_back(l);
                break;
            case OpKind::MeasureX:
                push_flip(OpKind::ZFlip, model.p_meas, l.qubits);
                out.layers.push_back(l);
                break;
            case OpKind::MeasureResetZ:
                push_flip(OpKind::XFlip, model.p_meas, l.qubits);
                out.layers.push_back(l);
                push_flip(OpKind::XFlip, model.p_prep, l.qubits);
                break;
            default:
                break;
        }
    }
    return out;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* op_name(OpKind k) {
    switch (k) {
        case OpKind::ResetZ: return "R";
        case OpKind::ResetX: return "RX";
        case OpKind::H: return "H";
        case OpKind::CX: return "CX";
        case OpKind::MeasureZ: return "M";
        case OpKind::MeasureX: return "MX";
        case OpKind::MeasureResetZ: return "MR";
        case OpKind::Dep1: return "DEP1";
        case OpKind::Dep2: return "DEP2";
        case OpKind::XFlip: return "XERR";
        case OpKind::ZFlip: return "ZERR";
    }
    return "?";
}

}  // namespace

std::string circuit_to_text(const NoisyCircuit& circuit) {
    std::ostringstream out;
    out << "lacross-circuit v1\n";
    out << "qubits " << circuit.num_qubits << "\n";
    out << "rounds " << circuit.rounds << "\n";
    for (const Layer& l : circuit.layers) {
        out << op_name(l.kind);
        if (is_noise_layer(l.kind)) {
            out << " " << fmt_double(l.p);
        }
        if (l.kind == OpKind::CX) {
            for (std::size_t g = 0; g < l.ranges.size(); g++) {
                out << " " << l.qubits[2 * g] << " " << l.qubits[2 * g + 1] << " " << l.ranges[g];
            }
        } else {
            for (uint32_t q : l.qubits) {
                out << " " << q;
            }
        }
        out << "\n";
    }
    for (const auto& det : circuit.detectors) {
        out << "DETECTOR";
        for (uint32_t m : det) {
            out << " " << m;
        }
        out << "\n";
    }
    for (std::size_t i = 0; i < circuit.observables.size(); i++) {
        out << "OBSERVABLE " << i;
        for (uint32_t m : circuit.observables[i]) {
            out << " " << m;
        }
        out << "\n";
    }
    out << "END\n";
    return out.str();
}

NoisyCircuit circuit_from_text(std::istream& in) {
    std::string line;
    std::getline(in, line);
    if (line != "lacross-circuit v1") {
        throw std::runtime_error("not a lacross-circuit file");
    }
    NoisyCircuit c;
    uint32_t meas = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        std::string op;
        ls >> op;
        if (op == "END") {
            c.num_measurements = meas;
            validate_circuit(c);
            return c;
        }
        if (op == "qubits") {
            ls >> c.num_qubits;
            continue;
        }
        if (op == "rounds") {
            ls >> c.rounds;
            continue;
        }
        if (op == "DETECTOR") {
            std::vector<uint32_t> refs;
            uint32_t m = 0;
            while (ls >> m) {
                refs.push_back(m);
            }
            c.detectors.push_back(std::move(refs));
            continue;
        }
        if (op == "OBSERVABLE") {
            std::size_t idx = 0;
            ls >> idx;
            if (idx != c.observables.size()) {
                throw std::runtime_error("circuit text: observable indices must be sequential");
            }
            std::vector<uint32_t> refs;
            uint32_t m = 0;
            while (ls >> m) {
                refs.push_back(m);
            }
            c.observables.push_back(std::move(refs));
            continue;
        }
        Layer l;
        if (op == "R") l.kind = OpKind::ResetZ;
        else if (op == "RX") l.kind = OpKind::ResetX;
        else if (op == "H") l.kind = OpKind::H;
        else if (op == "CX") l.kind = OpKind::CX;
        else if (op == "M") l.kind = OpKind::MeasureZ;
        else if (op == "MX") l.kind = OpKind::MeasureX;
        else if (op == "MR") l.kind = OpKind::MeasureResetZ;
        else if (op == "DEP1") l.kind = OpKind::Dep1;
        else if (op == "DEP2") l.kind = OpKind::Dep2;
        else if (op == "XERR") l.kind = OpKind::XFlip;
        else if (op == "ZERR") l.kind = OpKind::ZFlip;
        else throw std::runtime_error("circuit text: unknown op " + op);

        if (is_noise_layer(l.kind)) {
            ls >> l.p;
        }
        if (l.kind == OpKind::CX) {
            uint32_t ctrl = 0, tgt = 0, rng = 0;
            while (ls >> ctrl >> tgt >> rng) {
                l.qubits.push_back(ctrl);
                l.qubits.push_back(tgt);
                l.ranges.push_back(rng);
            }
        } else {
            uint32_t q = 0;
            while (ls >> q) {
                l.qubits.push_back(q);
            }
        }
        switch (l.kind) {
            case OpKind::MeasureZ:
            case OpKind::MeasureX:
            case OpKind::MeasureResetZ:
                meas += static_cast<uint32_t>(l.qubits.size());
                break;
            default:
                break;
        }
        c.layers.push_back(std::move(l));
    }
    throw std::runtime_error("circuit text: missing END");
}

NoisyCircuit circuit_from_text(const std::string& text) {
    std::istringstream in(text);
    return circuit_from_text(in);
}

NoisyCircuit load_circuit_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open circuit file: " + path);
    }
    return circuit_from_text(in);
}

void save_circuit_file(const std::string& path, const NoisyCircuit& circuit) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write circuit file: " + path);
    }
    out << circuit_to_text(circuit);
}

}  // namespace lacross
