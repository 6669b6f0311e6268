#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pingpong/qstate.hpp"

namespace pingpong {

// Register labels shared by every module.
inline const std::string kHome = "h";
inline const std::string kTravel = "t";

enum class InitialKind {
  qubit_psi_minus,  // (|0 1> - |1 0>)/sqrt2, D = 2 only
  qudit_beta00,     // (1/sqrtD) sum_k |k k>
};

std::string to_string(InitialKind kind);
// Accepts "qubit", "qudit", "qubit_psi_minus", "qudit_beta00".
InitialKind parse_initial_kind(std::string_view name);

struct ProtocolConfig {
  std::size_t dim = 2;
  double control_prob = 0.5;
  std::size_t n_cycles = 1;
  std::uint64_t seed = 1;
  InitialKind kind = InitialKind::qubit_psi_minus;

  // Throws std::invalid_argument on out-of-range fields or a qubit kind with
  // dim != 2.
  void validate() const;
};

// Generalized Pauli operators for one qudit: X|k> = |k+1 mod D>,
// Z|k> = w^k |k>, w = exp(2 pi i / D).
class QuditAlgebra {
 public:
  explicit QuditAlgebra(std::size_t dim);

  std::size_t dim() const { return dim_; }
  complex omega() const { return omega_; }
  const Operator& X() const { return x_; }
  const Operator& Z() const { return z_; }
  // X^mu Z^nu
  Operator encoding(std::size_t mu, std::size_t nu) const;

 private:
  std::size_t dim_;
  complex omega_;
  Operator x_;
  Operator z_;
};

struct SymbolPair {
  std::size_t mu = 0;
  std::size_t nu = 0;

  bool operator==(const SymbolPair&) const = default;
};

using Message = std::vector<SymbolPair>;

// Uniform symbols over {0..D-1}^2.
Message random_message(std::size_t dim, std::size_t length, RngStream& rng);

// Raised by bob_decode when the received pair is not one of the encoded Bell
// states; this is a detectable disturbance, not a programming error.
struct CoherenceBreak : std::runtime_error {
  using std::runtime_error::runtime_error;
};

StateVector make_initial_state(const ProtocolConfig& cfg);
StateVector make_initial_state(InitialKind kind, std::size_t dim);

// Applies X^mu Z^nu to the travel register. Throws std::out_of_range for
// symbols >= D.
StateVector dense_encode(const StateVector& state, std::size_t mu, std::size_t nu, const QuditAlgebra& alg);

struct BellElement {
  SymbolPair symbols;
  StateVector state;  // layout [h, t]
};

// The D^2 encoded versions of the initial state, ordered by mu * D + nu.
std::vector<BellElement> bell_basis(InitialKind kind, std::size_t dim);

// Bob's collective measurement: returns the unique (mu, nu) whose encoded Bell
// state has overlap magnitude above 1 - 1e-9 with `state`. The state must
// carry exactly the labels h and t.
SymbolPair bob_decode(const StateVector& state, InitialKind kind, std::size_t dim);
SymbolPair bob_decode(const StateVector& state, const ProtocolConfig& cfg);

}  // namespace pingpong
