#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lacross/codes.hpp"

namespace lacross {

enum class NoiseKind { HardwareSpecific, HardwareAgnostic };

/// Error-probability ratios c_j between a range-j CZ and the nearest-neighbor
/// CZ from the hardware model, tabulated for ranges 1..7.
std::map<uint32_t, double> default_c_table();

struct NoiseModel {
    NoiseKind kind = NoiseKind::HardwareAgnostic;
    double p = 0.0;       // nearest-neighbor two-qubit error probability
    double p1 = 0.0;      // single-qubit error probability
    double p_prep = 0.0;  // preparation flip probability
    double p_meas = 0.0;  // measurement flip probability
    std::map<uint32_t, double> c_of_range;  // hardware-specific only

    // p1 = p/10, p2(j) = c_j p, p_prep = p_meas = 2p
    static NoiseModel hardware_specific(double p, const std::map<uint32_t, double>& c = default_c_table());
    // p1 = p2(j) = p for all j, SPAM perfect
    static NoiseModel hardware_agnostic(double p);

    /// Two-qubit depolarizing probability for a gate spanning `range` sites.
    /// Throws when the range has no c_j entry in hardware-specific mode.
    double p2(uint32_t range) const;

    void validate() const;
};

enum class OpKind : uint8_t {
    ResetZ,         // prepare |0>
    ResetX,         // prepare |+>
    H,
    CX,             // qubit list holds (control, target) pairs; ranges per pair
    MeasureZ,
    MeasureX,
    MeasureResetZ,  // ancilla readout followed by |0> reset
    Dep1,           // single-qubit depolarizing, prob p
    Dep2,           // two-qubit depolarizing on (a, b) pairs, prob p
    XFlip,          // X error with prob p (prep/meas flips in Z basis)
    ZFlip,          // Z error with prob p (prep/meas flips in X basis)
};

bool is_gate_layer(OpKind k);
bool is_noise_layer(OpKind k);

struct Layer {
    OpKind kind;
    double p = 0.0;                // noise layers only
    std::vector<uint32_t> qubits;  // CX/Dep2: flattened pairs
    std::vector<uint32_t> ranges;  // CX only: one entry per pair
};

/// Layered Clifford circuit with attached noise channels, detectors (parities
/// of measurement indices) and logical observables.
struct NoisyCircuit {
    uint32_t num_qubits = 0;
    uint32_t rounds = 0;
    std::vector<Layer> layers;
    std::vector<std::vector<uint32_t>> detectors;
    std::vector<std::vector<uint32_t>> observables;
    uint32_t num_measurements = 0;

    uint32_t num_detectors() const { return static_cast<uint32_t>(detectors.size()); }
    uint32_t num_observables() const { return static_cast<uint32_t>(observables.size()); }
};

/// Validation: within any gate layer each qubit participates in at most one
/// gate; detectors/observables reference existing measurements.
void validate_circuit(const NoisyCircuit& circuit);

/// D-round syndrome-extraction skeleton (no noise channels). Per round the
/// bulk depth is 10: H, 4 interleaved nearest-neighbor CX layers, 2 X-arm
/// layers, 2 Z-arm layers, H; then ancilla measure+reset. Data qubits are
/// measured once after the last round.
NoisyCircuit build_syndrome_circuit(const CssCode& code, const QubitLayout& layout, uint32_t rounds,
                                    char memory_basis = 'Z');

/// Attaches depolarizing channels after every gate and flip channels around
/// preparations and measurements. Idle locations receive no noise.
NoisyCircuit instrument(const NoisyCircuit& circuit, const NoiseModel& model);

std::string circuit_to_text(const NoisyCircuit& circuit);
NoisyCircuit circuit_from_text(std::istream& in);
NoisyCircuit circuit_from_text(const std::string& text);
NoisyCircuit load_circuit_file(const std::string& path);
void save_circuit_file(const std::string& path, const NoisyCircuit& circuit);

}  // namespace lacross
