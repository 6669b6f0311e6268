#include "pingpong/session.hpp"

#include <limits>
#include <stdexcept>

namespace pingpong {

std::vector<CycleRecord> run_session(const ProtocolConfig& cfg, const Message& message, const Eavesdropper& eve,
                                     const ControlMode& control) {
  cfg.validate();
  if (eve.travel_dim() != cfg.dim) throw DimensionError("attack '" + eve.name() + "' does not match the protocol dimension");
  if (control.dim() != cfg.dim || control.kind() != cfg.kind)
    throw DimensionError("control mode was built for a different dimension or initial state");

  const QuditAlgebra alg(cfg.dim);
  const StateVector init = make_initial_state(cfg);
  const std::vector<std::string> travel{kTravel}, home{kHome};
  RngStream rng(cfg.seed);

  std::vector<CycleRecord> records;
  records.reserve(cfg.n_cycles);
  std::size_t next_symbol = 0;
  for (std::size_t cycle = 0; cycle < cfg.n_cycles; ++cycle) {
    // Eve's ancilla is freshly prepared each cycle.
    const StateVector coupled = eve.couple(init);
    CycleRecord rec;
    if (rng.uniform() < cfg.control_prob) {
      rec.mode = CycleMode::control;
      const std::size_t b = control.pick_basis(rng);
      const auto& basis = control.menu()[b].vectors;
      const MeasurementOutcome alice = measure(coupled, travel, basis, rng);
      const MeasurementOutcome bob = measure(alice.post_state, home, basis, rng);
      rec.control = ControlOutcome{alice.outcome, bob.outcome, b, control.passes(b, alice.outcome, bob.outcome)};
    } else {
      rec.mode = CycleMode::message;
      if (next_symbol >= message.size()) throw std::invalid_argument("message exhausted after " + std::to_string(message.size()) + " symbols");
      const SymbolPair sym = message[next_symbol++];
      rec.alice_symbols = sym;
      const StateVector encoded = dense_encode(coupled, sym.mu, sym.nu, alg);
      ReturnResult back = eve.decouple_and_read(encoded, rng);
      if (back.mu_guess) {
        rec.eve_mu = *back.mu_guess;
      } else {
        rec.eve_mu = static_cast<std::size_t>(rng.uniform_int(cfg.dim));
        rec.eve_abstained = true;
      }
      rec.eve_nu = static_cast<std::size_t>(rng.uniform_int(cfg.dim));
      rec.bob_decoded = bob_decode(back.signal, cfg);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

namespace {
double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? std::numeric_limits<double>::quiet_NaN() : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

double SessionStats::message_integrity() const { return ratio(bob_correct, message_cycles); }
double SessionStats::eve_mu_accuracy() const { return ratio(eve_mu_correct, message_cycles); }
double SessionStats::eve_nu_accuracy() const { return ratio(eve_nu_correct, message_cycles); }
double SessionStats::control_fail_rate() const { return ratio(control_failures, control_cycles); }

SessionStats summarize(const std::vector<CycleRecord>& records) {
  SessionStats s;
  for (const auto& r : records) {
    if (r.mode == CycleMode::control) {
      ++s.control_cycles;
      if (r.control && !r.control->passed) ++s.control_failures;
      continue;
    }
    ++s.message_cycles;
    if (r.bob_decoded == r.alice_symbols) ++s.bob_correct;
    if (r.alice_symbols && r.eve_mu == r.alice_symbols->mu) ++s.eve_mu_correct;
    if (r.alice_symbols && r.eve_nu == r.alice_symbols->nu) ++s.eve_nu_correct;
  }
  return s;
}

}  // namespace pingpong
