#pragma once

#include <vector>

#include "spump/generator.hpp"
#include "spump/operator.hpp"
#include "spump/params.hpp"

namespace spump {

/// Omega_s[(1 - r/2) s1+ + (1 + r/2) e^{i phi} s2+] b^+ + Omega_c(|a><up|_1 + |a><up|_2) + h.c.
/// The sideband and carrier parts can be switched off individually.
QuantumOperator build_coherent_hamiltonian(const SchemeParams& p, const HilbertLayout& layout, bool sideband = true,
                                           bool carrier = true);

/// Off-resonant coupling A = g4 (s1+ - s2+) c^+ with g4 = Omega_s eta4/eta3;
/// the mode-4 Hamiltonian is A e^{-i delta t} + h.c.
QuantumOperator build_mode4_coupling(const SchemeParams& p, const HilbertLayout& layout);
QuantumOperator build_mode4_hamiltonian(const SchemeParams& p, const HilbertLayout& layout, double t);

/// {sqrt(kappa) b, sqrt(kappa_h) b^+} and, with mode 4 present,
/// sqrt(kappa4) c. The list shape is fixed; zero-rate entries are zero
/// operators.
std::vector<QuantumOperator> build_cooling_lindblads(const SchemeParams& p, const HilbertLayout& layout);

/// sqrt(gamma_up_a)|up><a| and sqrt(gamma_down_a)|down><a| on each ion;
/// zero-rate operators are omitted.
std::vector<QuantumOperator> build_repump_lindblads(const SchemeParams& p, const HilbertLayout& layout);

/// sqrt(Gamma_{j,i})|j><i| on each ion for every table entry with i != j.
/// Throws std::invalid_argument for a leak target on a 3-level layout unless
/// skip_leak_targets is set, in which case those entries are left out.
std::vector<QuantumOperator> build_spontaneous_lindblads(const SchemeParams& p, const HilbertLayout& layout,
                                                         bool skip_leak_targets = false);

/// Absorbing form of the scattering into the leak level: sqrt(Gamma_{x,i})|i><i|
/// per ion. Only the anticommutator part of these channels acts on the
/// stored state; what they remove is booked as leaked probability.
std::vector<QuantumOperator> build_leak_losses(const SchemeParams& p, const HilbertLayout& layout);

/// Layout for a parameter set: the leak level is stored explicitly only when
/// requested and needed, mode 4 only when its channel is on.
HilbertLayout model_layout(const SchemeParams& p, const Channels& ch, int mode3_dim = 5, int mode4_dim = 3,
                           bool explicit_leak = false);

/// Full generator with the enabled channels. Cooling of mode 4 rides on the
/// cooling channel and is present only when the layout holds mode 4.
LindbladGenerator assemble_generator(const SchemeParams& p, const HilbertLayout& layout, const Channels& ch);

}  // namespace spump
