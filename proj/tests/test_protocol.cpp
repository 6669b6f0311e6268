#include "pingpong/protocol.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "pingpong/session.hpp"
#include "test_util.hpp"

using namespace pingpong;

TEST(QuditAlgebra, CommutationAndOrder) {
  for (std::size_t d = 2; d <= 6; ++d) {
    const QuditAlgebra alg(d);
    const Matrix id = Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    test::expect_matrix_near(alg.X().pow(static_cast<unsigned>(d)).matrix(), id, 1e-12);
    test::expect_matrix_near(alg.Z().pow(static_cast<unsigned>(d)).matrix(), id, 1e-12);
    test::expect_matrix_near((alg.Z() * alg.X()).matrix(), alg.omega() * (alg.X() * alg.Z()).matrix(), 1e-12);
  }
}

TEST(InitialState, Singlet) {
  const auto s = make_initial_state(InitialKind::qubit_psi_minus, 2);
  const double r = 1.0 / std::numbers::sqrt2;
  test::expect_amps(s, {0, r, -r, 0});
}

TEST(InitialState, QutritBeta00) {
  const auto s = make_initial_state(InitialKind::qudit_beta00, 3);
  const double c = 1.0 / std::sqrt(3.0);
  test::expect_amps(s, {c, 0, 0, 0, c, 0, 0, 0, c});
}

TEST(InitialState, QubitBeta00IsPhiPlus) {
  const auto s = make_initial_state(InitialKind::qudit_beta00, 2);
  const double r = 1.0 / std::numbers::sqrt2;
  test::expect_amps(s, {r, 0, 0, r});
}

TEST(InitialState, QubitKindRequiresTwoLevels) {
  EXPECT_THROW(make_initial_state(InitialKind::qubit_psi_minus, 3), std::invalid_argument);
  ProtocolConfig cfg;
  cfg.dim = 4;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(DenseEncode, IdentitySymbolLeavesStateAlone) {
  const auto s = make_initial_state(InitialKind::qudit_beta00, 4);
  test::expect_amps(dense_encode(s, 0, 0, QuditAlgebra(4)), std::vector<complex>(s.amps().begin(), s.amps().end()));
}

TEST(DenseEncode, PhaseFlipOnSingletGivesMinusPsiPlus) {
  const auto s = dense_encode(make_initial_state(InitialKind::qubit_psi_minus, 2), 0, 1, QuditAlgebra(2));
  const double r = 1.0 / std::numbers::sqrt2;
  test::expect_amps(s, {0, -r, -r, 0});
}

TEST(DenseEncode, QutritSymbolOneTwo) {
  const QuditAlgebra alg(3);
  const auto s = dense_encode(make_initial_state(InitialKind::qudit_beta00, 3), 1, 2, alg);
  // (1/sqrt3) sum_k w^{2k} |k>|k+1 mod 3>
  std::vector<complex> ref(9, 0.0);
  for (std::size_t k = 0; k < 3; ++k) ref[k * 3 + (k + 1) % 3] = std::pow(alg.omega(), 2.0 * k) / std::sqrt(3.0);
  test::expect_amps(s, ref);
}

TEST(DenseEncode, OutOfRangeSymbolThrows) {
  const auto s = make_initial_state(InitialKind::qudit_beta00, 3);
  EXPECT_THROW(dense_encode(s, 3, 0, QuditAlgebra(3)), std::out_of_range);
}

TEST(BobDecode, RoundTripAllSymbols) {
  for (std::size_t d = 2; d <= 5; ++d) {
    const QuditAlgebra alg(d);
    for (auto kind : {InitialKind::qubit_psi_minus, InitialKind::qudit_beta00}) {
      if (kind == InitialKind::qubit_psi_minus && d != 2) continue;
      const auto init = make_initial_state(kind, d);
      for (std::size_t mu = 0; mu < d; ++mu)
        for (std::size_t nu = 0; nu < d; ++nu)
          EXPECT_EQ(bob_decode(dense_encode(init, mu, nu, alg), kind, d), (SymbolPair{mu, nu})) << d << " " << mu << nu;
    }
  }
}

TEST(BobDecode, UndisturbedIsZeroZero) {
  EXPECT_EQ(bob_decode(make_initial_state(InitialKind::qubit_psi_minus, 2), InitialKind::qubit_psi_minus, 2), (SymbolPair{0, 0}));
}

TEST(BobDecode, CollapsedPairIsCoherenceBreak) {
  const auto s = StateVector::basis({{"h", 2}, {"t", 2}}, {0, 0});
  // |00> has overlap 1/2 with both Phi+ and Phi-.
  EXPECT_THROW(bob_decode(s, InitialKind::qubit_psi_minus, 2), CoherenceBreak);
}

TEST(BobDecode, GlobalPhaseAndRegisterOrderDoNotMatter) {
  const QuditAlgebra alg(3);
  for (std::uint64_t seed : test::kSeeds) {
    RngStream rng(seed);
    const auto s = dense_encode(make_initial_state(InitialKind::qudit_beta00, 3), 2, 1, alg).with_phase(2 * std::numbers::pi * rng.uniform());
    EXPECT_EQ(bob_decode(s, InitialKind::qudit_beta00, 3), (SymbolPair{2, 1}));
    const std::vector<std::string> swapped{"t", "h"};
    EXPECT_EQ(bob_decode(s.reordered(swapped), InitialKind::qudit_beta00, 3), (SymbolPair{2, 1}));
  }
}

TEST(BellBasis, IsOrthonormal) {
  for (std::size_t d = 2; d <= 5; ++d) {
    const auto basis = bell_basis(InitialKind::qudit_beta00, d);
    std::vector<Amplitudes> v;
    for (const auto& b : basis) v.push_back(b.state.amps());
    EXPECT_LT(gram_deviation(v), 1e-12);
  }
  const auto q = bell_basis(InitialKind::qubit_psi_minus, 2);
  std::vector<Amplitudes> v;
  for (const auto& b : q) v.push_back(b.state.amps());
  EXPECT_LT(gram_deviation(v), 1e-12);
}

// ------------------------------------------------------------
// sessions

namespace {
ProtocolConfig session_cfg(std::size_t d, InitialKind kind, double control_prob, std::size_t cycles, std::uint64_t seed) {
  ProtocolConfig c;
  c.dim = d;
  c.kind = kind;
  c.control_prob = control_prob;
  c.n_cycles = cycles;
  c.seed = seed;
  return c;
}
}  // namespace

TEST(Session, NoControlNoAttackDeliversEverything) {
  const auto cfg = session_cfg(2, InitialKind::qubit_psi_minus, 0.0, 200, 4);
  RngStream rng(4, 1);
  const auto msg = random_message(2, 200, rng);
  const auto records = run_session(cfg, msg, no_attack(2), computational_control(2, cfg.kind));
  ASSERT_EQ(records.size(), 200u);
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(records[i].mode, CycleMode::message);
    EXPECT_EQ(records[i].bob_decoded, msg[i]);
    EXPECT_FALSE(records[i].control.has_value());
    EXPECT_TRUE(records[i].eve_abstained);
  }
}

TEST(Session, AllControlCyclesPassWithoutAttack) {
  const auto cfg = session_cfg(2, InitialKind::qubit_psi_minus, 1.0, 500, 5);
  const auto records = run_session(cfg, {}, no_attack(2), computational_control(2, cfg.kind));
  for (const auto& r : records) {
    ASSERT_EQ(r.mode, CycleMode::control);
    EXPECT_TRUE(r.control->passed);
    EXPECT_NE(r.control->alice, r.control->bob);
    EXPECT_FALSE(r.alice_symbols.has_value());
  }
}

TEST(Session, CnotPassesComputationalControl) {
  const auto cfg = session_cfg(2, InitialKind::qubit_psi_minus, 1.0, 500, 6);
  for (const auto& r : run_session(cfg, {}, cnot_attack(), computational_control(2, cfg.kind))) EXPECT_TRUE(r.control->passed);
}

TEST(Session, DeterministicForSeed) {
  const auto cfg = session_cfg(3, InitialKind::qudit_beta00, 0.3, 300, 77);
  RngStream rng(77, 1);
  const auto msg = random_message(3, 300, rng);
  const auto eve = qudit_shift_attack(3);
  const auto ctl = computational_control(3, cfg.kind);
  EXPECT_EQ(run_session(cfg, msg, eve, ctl), run_session(cfg, msg, eve, ctl));
}

TEST(Session, ShortMessageThrows) {
  const auto cfg = session_cfg(2, InitialKind::qubit_psi_minus, 0.0, 5, 1);
  EXPECT_THROW(run_session(cfg, Message(3), no_attack(2), computational_control(2, cfg.kind)), std::invalid_argument);
}

TEST(Session, MixedModesRespectControlProbability) {
  const auto cfg = session_cfg(2, InitialKind::qubit_psi_minus, 0.25, 4000, 9);
  RngStream rng(9, 1);
  const auto stats = summarize(run_session(cfg, random_message(2, 4000, rng), no_attack(2), computational_control(2, cfg.kind)));
  EXPECT_NEAR(stats.control_cycles / 4000.0, 0.25, 4.0 * std::sqrt(0.25 * 0.75 / 4000));
  EXPECT_EQ(stats.control_failures, 0u);
  EXPECT_EQ(stats.bob_correct, stats.message_cycles);
}
