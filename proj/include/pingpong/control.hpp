#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pingpong/attacks.hpp"
#include "pingpong/protocol.hpp"
#include "pingpong/qstate.hpp"

namespace pingpong {

struct ControlBasis {
  std::string name;
  OrthonormalBasis vectors;  // single-qudit basis used by both parties
  double weight = 1.0;       // selection probability
};

// A control-mode strategy. Alice measures t and Bob measures h in the same
// randomly selected basis. The pass predicate for each basis is derived from
// the legitimate initial state: an outcome pair passes iff that state can
// produce it.
class ControlMode {
 public:
  ControlMode(std::string name, std::vector<ControlBasis> menu, InitialKind kind, std::size_t dim);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  InitialKind kind() const { return kind_; }
  const std::vector<ControlBasis>& menu() const { return menu_; }

  bool passes(std::size_t basis_id, std::size_t alice, std::size_t bob) const;
  // Samples a basis index according to the menu weights (one draw).
  std::size_t pick_basis(RngStream& rng) const;

  // Same bases, new selection probabilities.
  ControlMode with_weights(const std::vector<double>& weights) const;

 private:
  std::string name_;
  std::vector<ControlBasis> menu_;
  InitialKind kind_;
  std::size_t dim_;
  // pass_[basis][alice * dim + bob]
  std::vector<std::vector<bool>> pass_;
};

// Single computational-basis menu. For the singlet the derived predicate is
// anticorrelation, for beta00 it is equality.
ControlMode computational_control(std::size_t dim, InitialKind kind);
// Computational and X-eigenbasis {|+>, |->}, each with probability 1/2. D = 2.
ControlMode two_basis_control(InitialKind kind = InitialKind::qubit_psi_minus);
// computational | two-basis
ControlMode make_control(std::string_view name, std::size_t dim, InitialKind kind);

// Projector on [h, t] onto the outcome pairs of basis `basis_id` that fail the
// pass predicate.
Operator fail_projector(const ControlMode& control, std::size_t basis_id);

// sum_b w_b Tr(P_fail^(b) Tr_E |psi_htE><psi_htE|), with
// |psi_htE> = (I_h (x) Q)(|init> (x) |chi_E>).
double analytic_pdet(const Eavesdropper& eve, const ControlMode& control);
double analytic_pdet(const Eavesdropper& eve, const ControlMode& control, const ProtocolConfig& cfg);

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

// Wilson score interval; z = 1.959964 for 95 %.
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

struct DetectionReport {
  double analytic = 0.0;
  double empirical = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  WilsonInterval ci;
  // Per-basis counts, indexed like the control menu.
  std::vector<std::size_t> basis_trials;
  std::vector<std::size_t> basis_failures;
};

// Runs `trials` independent control cycles. Trial i draws from
// RngStream::derive(cfg.seed, i). The result does not depend on `jobs`.
DetectionReport empirical_pdet(const Eavesdropper& eve, const ControlMode& control, const ProtocolConfig& cfg,
                               std::size_t trials, unsigned jobs = 1);

// Components of a qubit-protocol state on [h, t, ancilla...] in the dual basis:
// term[2*sh + st] = (<sh|_h (x) <st|_t (x) I) psi, with index 0 = '+', 1 = '-'.
struct DualBasisExpansion {
  std::vector<Amplitudes> terms;
  SubsystemLayout ancilla;

  const Amplitudes& term(bool home_minus, bool travel_minus) const { return terms[2 * home_minus + travel_minus]; }
  double norm(bool home_minus, bool travel_minus) const { return term(home_minus, travel_minus).norm(); }
};

DualBasisExpansion dual_basis_expand(const StateVector& state);

}  // namespace pingpong
