#pragma once

#include <optional>
#include <vector>

#include "pingpong/attacks.hpp"
#include "pingpong/control.hpp"
#include "pingpong/protocol.hpp"

namespace pingpong {

enum class CycleMode { message, control };

struct ControlOutcome {
  std::size_t alice = 0;
  std::size_t bob = 0;
  std::size_t basis_id = 0;
  bool passed = true;

  bool operator==(const ControlOutcome&) const = default;
};

// Transcript of one protocol cycle. Message cycles fill the symbol and Eve
// fields; control cycles fill `control`.
struct CycleRecord {
  CycleMode mode = CycleMode::message;
  std::optional<SymbolPair> alice_symbols;
  std::optional<SymbolPair> bob_decoded;
  std::optional<ControlOutcome> control;
  // Eve's guesses. When her readout abstains the mu guess is a uniform draw
  // and `eve_abstained` is set; the nu guess is always uniform.
  std::optional<std::size_t> eve_mu;
  std::optional<std::size_t> eve_nu;
  bool eve_abstained = false;

  bool operator==(const CycleRecord&) const = default;
};

// Runs cfg.n_cycles cycles: Bob prepares the pair, Eve couples on the forward
// leg, Alice picks the mode with probability cfg.control_prob of control.
// Message cycles consume the next symbol pair of `message`; throws
// std::invalid_argument if it runs out. All randomness comes from cfg.seed.
// CoherenceBreak from bob_decode propagates.
std::vector<CycleRecord> run_session(const ProtocolConfig& cfg, const Message& message, const Eavesdropper& eve,
                                     const ControlMode& control);

struct SessionStats {
  std::size_t message_cycles = 0;
  std::size_t control_cycles = 0;
  std::size_t control_failures = 0;
  std::size_t bob_correct = 0;
  std::size_t eve_mu_correct = 0;
  std::size_t eve_nu_correct = 0;

  double message_integrity() const;
  double eve_mu_accuracy() const;
  double eve_nu_accuracy() const;
  double control_fail_rate() const;
};

SessionStats summarize(const std::vector<CycleRecord>& records);

}  // namespace pingpong
