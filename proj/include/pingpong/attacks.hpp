#pragma once

// Eavesdropper handles. Every attack is a coupling unitary Q acting on the
// travel register and Eve's ancilla: Q on the forward leg, Q^-1 on the return
// leg, followed by a readout of the ancilla.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pingpong/protocol.hpp"
#include "pingpong/qstate.hpp"

namespace pingpong {

// Orthonormal ancilla states sharing one layout. Used both for the detection
// family alpha^(m) and the probe family a^(k).
class StateFamily {
 public:
  StateFamily() = default;
  // Throws BasisError unless the states share a layout and are orthonormal
  // within tol::orthonormal.
  explicit StateFamily(std::vector<StateVector> states);

  const std::vector<StateVector>& states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  const StateVector& operator[](std::size_t i) const { return states_[i]; }
  const SubsystemLayout& layout() const { return states_.front().layout(); }
  std::vector<Amplitudes> vectors() const;

 private:
  std::vector<StateVector> states_;
};

using DetectionFamily = StateFamily;
using ProbeFamily = StateFamily;

// One of the three levels of a photonic rail.
namespace rail {
inline constexpr std::size_t vacuum = 0;
inline constexpr std::size_t horizontal = 1;
inline constexpr std::size_t vertical = 2;
inline constexpr std::size_t dim = 3;
}  // namespace rail

// Ancilla states of the beam-splitter circuit on rails [x, y].
struct PavicicStates {
  StateVector chi0;  // |v_x 0_y>
  StateVector chi1;  // |0_x v_y>
  StateVector a_E;   // (|0_x v_y> + |v_x 1_y>)/sqrt2
  StateVector d_E;   // (|v_x 0_y> + |1_x v_y>)/sqrt2
};
PavicicStates pavicic_states();

enum class ReturnLeg {
  // Apply Q^-1, then project the ancilla onto the readout basis.
  coupling_inverse,
  // Measure the returning fake qudit, forward the stored genuine one.
  intercept_resend,
};

struct ReturnResult {
  StateVector signal;                   // layout [h, t]
  std::optional<std::size_t> mu_guess;  // empty when Eve abstains
};

class Eavesdropper {
 public:
  struct Parts {
    std::string name;
    std::size_t travel_dim = 2;
    StateVector initial_ancilla;
    Operator coupling;
    ReturnLeg return_leg = ReturnLeg::coupling_inverse;
    OrthonormalBasis readout_basis = {};
    std::vector<std::optional<std::size_t>> readout_map = {};
    std::optional<DetectionFamily> detection = {};
    std::optional<ProbeFamily> probes = {};
  };

  explicit Eavesdropper(Parts parts);

  const std::string& name() const { return p_.name; }
  std::size_t travel_dim() const { return p_.travel_dim; }
  const SubsystemLayout& ancilla_layout() const { return p_.initial_ancilla.layout(); }
  const StateVector& initial_ancilla() const { return p_.initial_ancilla; }
  // Q acting on [t] followed by the ancilla labels.
  const Operator& coupling() const { return p_.coupling; }
  const std::vector<std::string>& coupling_targets() const { return targets_; }
  ReturnLeg return_leg() const { return p_.return_leg; }
  const OrthonormalBasis& readout_basis() const { return p_.readout_basis; }
  const std::optional<DetectionFamily>& detection() const { return p_.detection; }
  const std::optional<ProbeFamily>& probes() const { return p_.probes; }

  // (I_h (x) Q)(ht (x) chi_E)
  StateVector couple(const StateVector& ht) const;
  // Q^-1 on the coupled registers, ancilla kept.
  StateVector decouple(const StateVector& htE) const;
  // Full return leg: decouple, read the ancilla and hand Bob the [h, t] pair.
  ReturnResult decouple_and_read(const StateVector& htE, RngStream& rng) const;

 private:
  ReturnResult intercept_resend_return(const StateVector& htE, RngStream& rng) const;

  Parts p_;
  std::vector<std::string> targets_;
  std::vector<std::string> ancilla_labels_;
};

Eavesdropper no_attack(std::size_t dim = 2);
Eavesdropper intercept_resend(std::size_t dim);
Eavesdropper cnot_attack();
Eavesdropper pavicic_circuit();
Eavesdropper qudit_shift_attack(std::size_t dim);
// Q from the D^2 mappings |k>|alpha^(m)> -> |k>|a^(m+k mod D)>, completed to a
// unitary and checked with validate_coupling. Throws BasisError for
// non-orthonormal families and std::runtime_error if validation fails.
Eavesdropper generic_coupling(std::size_t dim, const DetectionFamily& detection, const ProbeFamily& probes);

// Controlled polarization beam splitter on [t, x, y] (dims 2, 3, 3).
Operator cpbs();

struct CouplingResidual {
  std::size_t k = 0;
  std::size_t m = 0;
  double forward = 0.0;  // ||Q|k,alpha^m> - |k,a^(m+k)>||
  double inverse = 0.0;  // ||Q^-1|k,a^m> - |k,alpha^(m-k)>||
};

struct ValidationReport {
  std::vector<CouplingResidual> rows;
  double max_residual = 0.0;
  bool passed = false;
};

// Q acts on [t] (dim D) followed by the family layout.
ValidationReport validate_coupling(const Operator& q, const DetectionFamily& detection, const ProbeFamily& probes,
                                   std::size_t dim);

struct FamilyPair {
  DetectionFamily detection;
  ProbeFamily probes;
};

// Both families are the first D columns of independent random unitaries on a
// single ancilla register "E" of dimension ancilla_dim.
FamilyPair random_families(std::size_t dim, std::size_t ancilla_dim, RngStream& rng);

// JSON description:
//   { "ancilla": [{"label": "E", "dim": 4}],          (optional)
//     "detection": [[[re, im], ...], ...],
//     "probes":    [[[re, im], ...], ...] }
FamilyPair families_from_json(std::string_view text);
FamilyPair families_from_file(const std::string& path);

// none | intercept-resend | cnot | pavicic | qudit-shift | generic:<file> |
// generic:random (families drawn from `seed`, ancilla dim D + 1).
Eavesdropper make_attack(std::string_view name, std::size_t dim, std::uint64_t seed = 1);

}  // namespace pingpong
