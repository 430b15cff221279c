#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace radqec {

enum class Pauli : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

enum class GateClass : uint8_t { Q1, Q2, M, R };

// Device relaxation time, seconds.
inline constexpr double kTau1 = 85e-6;

struct NoiseParams {
    double p = 1e-5;
};

struct PauliTerm {
    Pauli a = Pauli::I;
    Pauli b = Pauli::I;  // second operand, Q2 only
    double prob = 0.0;
};

struct PauliChannel {
    GateClass cls;
    std::vector<PauliTerm> terms;  // identity first, then the faulting terms
};

// Per-class intrinsic channels. Q1 noise follows the gate, Q2 noise follows
// the gate, M noise precedes the measurement, R noise follows the reset.
inline PauliChannel intrinsic_channel(GateClass cls, double p) {
    if (p < 0.0 || p > 0.1) throw std::invalid_argument("intrinsic_channel: p must lie in [0, 0.1]");
    PauliChannel ch;
    ch.cls = cls;
    switch (cls) {
        case GateClass::Q1: {
            ch.terms.push_back({Pauli::I, Pauli::I, 1.0 - p / 10.0});
            for (Pauli q : {Pauli::X, Pauli::Y, Pauli::Z}) ch.terms.push_back({q, Pauli::I, p / 30.0});
            break;
        }
        case GateClass::Q2: {
            ch.terms.push_back({Pauli::I, Pauli::I, 1.0 - p});
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    if (a == 0 && b == 0) continue;
                    ch.terms.push_back({static_cast<Pauli>(a), static_cast<Pauli>(b), p / 15.0});
                }
            break;
        }
        case GateClass::M: {
            ch.terms.push_back({Pauli::I, Pauli::I, 1.0 - 5.0 * p});
            for (Pauli q : {Pauli::X, Pauli::Y, Pauli::Z}) ch.terms.push_back({q, Pauli::I, 5.0 * p / 3.0});
            break;
        }
        case GateClass::R: {
            ch.terms.push_back({Pauli::I, Pauli::I, 1.0 - 2.0 * p});
            for (Pauli q : {Pauli::X, Pauli::Y, Pauli::Z}) ch.terms.push_back({q, Pauli::I, 2.0 * p / 3.0});
            break;
        }
    }
    return ch;
}

// A radiation impact: locus in chip coordinates, onset time and duration in
// seconds. Every op overlapping the window gets a Y fault on each operand
// with probability fault_probability.
struct RadiationEvent {
    double x = 0.0;
    double y = 0.0;
    double t_rad = 0.0;
    double dt_rad = 1e-3;
    double tau1 = kTau1;
};

// Transient relaxation-time suppression. At onset tau drops to tau1 * e^-10
// and recovers to tau1 by t_rad + dt_rad.
inline double tau_rad(const RadiationEvent& ev, double t) {
    return ev.tau1 * std::exp(10.0 * ((t - ev.t_rad) / ev.dt_rad - 1.0));
}

// Spatial decay with distance from the locus, unit scale.
inline double spatial_factor(double dist) { return 1.0 / ((dist + 1.0) * (dist + 1.0)); }

// Fault probability for an op starting at time t on a qubit at distance dist
// whose previous op ended dt_g earlier. Zero outside the event window.
inline double fault_probability(const RadiationEvent& ev, double dist, double dt_g, double t) {
    if (t < ev.t_rad || t > ev.t_rad + ev.dt_rad) return 0.0;
    if (dt_g < 0.0) throw std::invalid_argument("fault_probability: negative idle time");
    double temporal = 1.0 - std::exp(-dt_g / tau_rad(ev, t));
    return spatial_factor(dist) * temporal;
}

}  // namespace radqec
