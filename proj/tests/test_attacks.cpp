#include "pingpong/attacks.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "pingpong/session.hpp"
#include "test_util.hpp"

using namespace pingpong;

namespace {

const SubsystemLayout kTXY{{"t", 2}, {"x", 3}, {"y", 3}};

Amplitudes ket_txy(std::size_t t, std::size_t x, std::size_t y) { return StateVector::basis(kTXY, {t, x, y}).amps(); }

Amplitudes with_travel(std::size_t t, const StateVector& anc) {
  return tensor(StateVector::basis({{"t", 2}}, {t}), anc).amps();
}

std::vector<Eavesdropper> transparent_zoo() {
  RngStream rng(31337);
  const auto fam = random_families(3, 4, rng);
  std::vector<Eavesdropper> zoo;
  zoo.push_back(cnot_attack());
  zoo.push_back(pavicic_circuit());
  zoo.push_back(qudit_shift_attack(2));
  zoo.push_back(qudit_shift_attack(3));
  zoo.push_back(qudit_shift_attack(5));
  zoo.push_back(generic_coupling(3, fam.detection, fam.probes));
  return zoo;
}

InitialKind kind_for(const Eavesdropper& e) {
  return (e.name() == "cnot" || e.name() == "pavicic") ? InitialKind::qubit_psi_minus : InitialKind::qudit_beta00;
}

}  // namespace

// ------------------------------------------------------------
// beam-splitter circuit

TEST(Cpbs, TruthTable) {
  using namespace rail;
  const auto u = cpbs();
  struct Row {
    std::size_t t, x, y, tx, xx, yx;
  };
  const Row rows[] = {
      {0, vacuum, horizontal, 0, horizontal, vacuum}, {1, vacuum, horizontal, 1, vacuum, horizontal},
      {0, horizontal, vacuum, 0, vacuum, horizontal}, {1, horizontal, vacuum, 1, horizontal, vacuum},
      {0, vacuum, vertical, 0, vacuum, vertical},     {1, vacuum, vertical, 1, vertical, vacuum},
      {0, vertical, vacuum, 0, vertical, vacuum},     {1, vertical, vacuum, 1, vacuum, vertical},
  };
  for (const auto& r : rows) EXPECT_LT((u.matrix() * ket_txy(r.t, r.x, r.y) - ket_txy(r.tx, r.xx, r.yx)).norm(), 1e-12);
}

TEST(Cpbs, InvolutionOnSingleRailStates) {
  using namespace rail;
  const auto u = cpbs();
  for (std::size_t t = 0; t < 2; ++t)
    for (auto [x, y] : {std::pair{vacuum, horizontal}, {horizontal, vacuum}, {vacuum, vertical}, {vertical, vacuum}})
      EXPECT_LT((u.matrix() * (u.matrix() * ket_txy(t, x, y)) - ket_txy(t, x, y)).norm(), 1e-12);
}

TEST(Cpbs, IdentityOnUntouchedBasisStates) {
  const auto u = cpbs();
  EXPECT_LT((u.matrix() * ket_txy(0, rail::horizontal, rail::vertical) - ket_txy(0, rail::horizontal, rail::vertical)).norm(), 1e-15);
  EXPECT_LT((u.matrix() * ket_txy(1, rail::vacuum, rail::vacuum) - ket_txy(1, rail::vacuum, rail::vacuum)).norm(), 1e-15);
}

TEST(Pavicic, CouplingRows) {
  const auto e = pavicic_circuit();
  const auto s = pavicic_states();
  const Matrix& q = e.coupling().matrix();
  EXPECT_LT((q * with_travel(0, s.chi0) - with_travel(0, s.a_E)).norm(), 1e-12);
  EXPECT_LT((q * with_travel(1, s.chi0) - with_travel(1, s.d_E)).norm(), 1e-12);
  EXPECT_LT((q * with_travel(0, s.chi1) - with_travel(0, s.d_E)).norm(), 1e-12);
  EXPECT_LT((q * with_travel(1, s.chi1) - with_travel(1, s.a_E)).norm(), 1e-12);
  // Explicit first row: |0_t>(|0_x v_y> + |v_x 1_y>)/sqrt2
  const Amplitudes ref = (ket_txy(0, rail::horizontal, rail::vacuum) + ket_txy(0, rail::vacuum, rail::vertical)) / std::numbers::sqrt2;
  EXPECT_LT((q * ket_txy(0, rail::vacuum, rail::horizontal) - ref).norm(), 1e-12);
}

TEST(Pavicic, PhaseFlipRestoresChi0) {
  const auto e = pavicic_circuit();
  const auto s = pavicic_states();
  const auto init = make_initial_state(InitialKind::qubit_psi_minus, 2);
  const auto back = e.decouple(dense_encode(e.couple(init), 0, 1, QuditAlgebra(2)));
  const auto expected = tensor(apply(init, QuditAlgebra(2).Z(), {"t"}), s.chi0);
  EXPECT_NEAR(back.fidelity(expected), 1.0, 1e-12);
  EXPECT_LT((back.amps() - expected.amps()).norm(), 1e-12);  // same phase too
}

TEST(Pavicic, BitFlipMovesAncillaToChi1) {
  const auto e = pavicic_circuit();
  const auto s = pavicic_states();
  const auto init = make_initial_state(InitialKind::qubit_psi_minus, 2);
  const auto back = e.decouple(dense_encode(e.couple(init), 1, 0, QuditAlgebra(2)));
  const auto expected = tensor(apply(init, QuditAlgebra(2).X(), {"t"}), s.chi1);
  EXPECT_LT((back.amps() - expected.amps()).norm(), 1e-12);

  RngStream rng(2);
  const auto read = e.decouple_and_read(e.couple(init), rng);
  EXPECT_EQ(read.mu_guess, 0u);
  const auto read1 = e.decouple_and_read(dense_encode(e.couple(init), 1, 0, QuditAlgebra(2)), rng);
  EXPECT_EQ(read1.mu_guess, 1u);
}

TEST(Pavicic, EvolutionStaysInReachableSubspace) {
  // Completion choices are unobservable: every protocol state lies in the span
  // of the prescribed domain (before Q / after Q^-1) or image (after Q).
  const auto e = pavicic_circuit();
  const auto s = pavicic_states();
  const auto init = make_initial_state(InitialKind::qubit_psi_minus, 2);
  const std::vector<Amplitudes> image{with_travel(0, s.a_E), with_travel(1, s.a_E), with_travel(0, s.d_E), with_travel(1, s.d_E)};
  const std::vector<Amplitudes> domain{with_travel(0, s.chi0), with_travel(1, s.chi0), with_travel(0, s.chi1), with_travel(1, s.chi1)};
  const auto residual = [](const StateVector& st, const std::vector<Amplitudes>& span) {
    // Project the [t, x, y] factor for each home value.
    double worst = 0.0;
    for (std::size_t h = 0; h < 2; ++h) {
      Amplitudes v = st.amps().segment(static_cast<Eigen::Index>(h * 18), 18);
      Amplitudes proj = Amplitudes::Zero(18);
      for (const auto& b : span) proj += b.dot(v) * b;
      worst = std::max(worst, (v - proj).norm());
    }
    return worst;
  };
  const QuditAlgebra alg(2);
  for (std::size_t mu = 0; mu < 2; ++mu)
    for (std::size_t nu = 0; nu < 2; ++nu) {
      const auto enc = dense_encode(e.couple(init), mu, nu, alg);
      EXPECT_LT(residual(enc, image), 1e-10);
      EXPECT_LT(residual(e.decouple(enc), domain), 1e-10);
    }
}

// ------------------------------------------------------------
// qudit shift / cnot / generic

TEST(QuditShift, ShiftsAncillaByTravelValue) {
  for (std::size_t d : {2u, 3u, 5u}) {
    const auto e = qudit_shift_attack(d);
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t m = 0; m < d; ++m) {
        const auto in = StateVector::basis({{"t", d}, {"E", d}}, {k, m});
        const auto out = StateVector::basis({{"t", d}, {"E", d}}, {k, (m + k) % d});
        EXPECT_LT((e.coupling().matrix() * in.amps() - out.amps()).norm(), 1e-15);
      }
  }
}

TEST(QuditShift, QutritMuOneLeavesAncillaInTwo) {
  const auto e = qudit_shift_attack(3);
  const auto enc = dense_encode(e.couple(make_initial_state(InitialKind::qudit_beta00, 3)), 1, 0, QuditAlgebra(3));
  const auto rho = partial_trace(e.decouple(enc), {"E"});
  EXPECT_NEAR(rho.rho(2, 2).real(), 1.0, 1e-12);
  RngStream rng(1);
  EXPECT_EQ(e.decouple_and_read(enc, rng).mu_guess, 1u);
}

TEST(QuditShift, QubitInstanceIsCnot) {
  EXPECT_EQ(qudit_shift_attack(2).coupling().matrix(), cnot_attack().coupling().matrix());
}

TEST(Generic, ComputationalFamiliesReproduceQuditShift) {
  for (std::size_t d : {2u, 3u, 4u}) {
    const SubsystemLayout anc{{"E", d}};
    std::vector<StateVector> comp;
    for (std::size_t m = 0; m < d; ++m) comp.push_back(StateVector::basis(anc, {m}));
    const auto g = generic_coupling(d, StateFamily(comp), StateFamily(comp));
    test::expect_matrix_near(g.coupling().matrix(), qudit_shift_attack(d).coupling().matrix(), 1e-12);
  }
}

TEST(Generic, PavicicFamiliesAgreeOnReachableSubspace) {
  const auto s = pavicic_states();
  const auto g = generic_coupling(2, StateFamily({s.chi0, s.chi1}), StateFamily({s.a_E, s.d_E}));
  const auto p = pavicic_circuit();
  for (std::size_t t = 0; t < 2; ++t)
    for (const auto* chi : {&s.chi0, &s.chi1}) {
      const Amplitudes v = with_travel(t, *chi);
      EXPECT_LT((g.coupling().matrix() * v - p.coupling().matrix() * v).norm(), 1e-12);
    }
}

TEST(Generic, RejectsNonOrthonormalFamily) {
  const SubsystemLayout anc{{"E", 3}};
  const auto a = StateVector::basis(anc, {0});
  EXPECT_THROW(StateFamily({a, a}), BasisError);
}

TEST(Generic, RandomFamiliesRecoverMuWithoutDetection) {
  for (std::uint64_t seed : test::kSeeds) {
    RngStream rng(seed);
    const auto fam = random_families(3, 4, rng);
    const auto e = generic_coupling(3, fam.detection, fam.probes);
    ProtocolConfig cfg;
    cfg.dim = 3;
    cfg.kind = InitialKind::qudit_beta00;
    cfg.control_prob = 0.3;
    cfg.n_cycles = 600;
    cfg.seed = seed;
    RngStream mrng(seed, 1);
    const auto stats = summarize(run_session(cfg, random_message(3, 600, mrng), e, computational_control(3, cfg.kind)));
    EXPECT_EQ(stats.eve_mu_correct, stats.message_cycles);
    EXPECT_EQ(stats.bob_correct, stats.message_cycles);
    EXPECT_EQ(stats.control_failures, 0u);
  }
}

TEST(Generic, FamiliesFromJson) {
  const auto f = families_from_json(R"({
    "detection": [[[1,0],[0,0],[0,0]], [[0,0],[1,0],[0,0]]],
    "probes":    [[[0,0],[0,0],[1,0]], [[0.6,0],[0,0.8],[0,0]]]
  })");
  EXPECT_EQ(f.detection.size(), 2u);
  EXPECT_EQ(f.probes.layout().total_dim(), 3u);
  const auto e = generic_coupling(2, f.detection, f.probes);
  EXPECT_TRUE(validate_coupling(e.coupling(), f.detection, f.probes, 2).passed);
  EXPECT_THROW(families_from_json(R"({"detection": [[[1,0],[0,0]], [[1,0],[0,0]]], "probes": [[[1,0],[0,0]], [[0,0],[1,0]]]})"),
               BasisError);
}

// ------------------------------------------------------------
// validate_coupling

TEST(Validate, CnotResidualsAreExact) {
  const auto e = cnot_attack();
  const auto r = validate_coupling(e.coupling(), *e.detection(), *e.probes(), 2);
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.max_residual, 1e-14);
  EXPECT_EQ(r.rows.size(), 4u);
}

TEST(Validate, IdentityFailsShiftedRows) {
  const SubsystemLayout anc{{"E", 3}};
  std::vector<StateVector> comp;
  for (std::size_t m = 0; m < 3; ++m) comp.push_back(StateVector::basis(anc, {m}));
  const StateFamily fam(comp);
  const auto r = validate_coupling(Operator::identity(9), fam, fam, 3);
  EXPECT_FALSE(r.passed);
  for (const auto& row : r.rows) {
    if (row.k == 0) {
      EXPECT_LT(row.forward, 1e-14);
      EXPECT_LT(row.inverse, 1e-14);
    } else {
      EXPECT_GT(row.forward, 1.0);
      EXPECT_GT(row.inverse, 1.0);
    }
  }
}

TEST(Validate, PavicicPasses) {
  const auto e = pavicic_circuit();
  EXPECT_TRUE(validate_coupling(e.coupling(), *e.detection(), *e.probes(), 2).passed);
}

// ------------------------------------------------------------
// zoo-wide properties

TEST(Zoo, CouplingsAreUnitary) {
  for (const auto& e : transparent_zoo()) EXPECT_LT(e.coupling().unitarity_defect(), 1e-12) << e.name();
  EXPECT_LT(intercept_resend(3).coupling().unitarity_defect(), 1e-12);
  EXPECT_LT(no_attack(4).coupling().unitarity_defect(), 1e-12);
}

TEST(Zoo, CoupleThenDecoupleRestoresState) {
  for (const auto& e : transparent_zoo()) {
    const auto init = make_initial_state(kind_for(e), e.travel_dim());
    const auto back = e.decouple(e.couple(init));
    const auto orig = tensor(init, e.initial_ancilla());
    EXPECT_LT((back.amps() - orig.amps()).norm(), 1e-12) << e.name();
  }
}

TEST(Zoo, DecouplingFactorizesAndIndexesDetectionFamily) {
  for (const auto& e : transparent_zoo()) {
    const std::size_t d = e.travel_dim();
    const QuditAlgebra alg(d);
    const auto init = make_initial_state(kind_for(e), d);
    const auto anc = e.ancilla_layout().labels();
    for (std::size_t mu = 0; mu < d; ++mu)
      for (std::size_t nu = 0; nu < d; ++nu) {
        const auto back = e.decouple(dense_encode(e.couple(init), mu, nu, alg));
        EXPECT_GT(partial_trace(back, {"h", "t"}).purity(), 1.0 - 1e-10) << e.name();
        const auto expected = tensor(dense_encode(init, mu, nu, alg), (*e.detection())[(d - mu) % d]);
        EXPECT_GT(back.fidelity(expected), 1.0 - 1e-10) << e.name() << " mu=" << mu;
      }
  }
}

TEST(InterceptResend, MessageModeRecoversMuButDropsNu) {
  const auto e = intercept_resend(2);
  const auto init = make_initial_state(InitialKind::qubit_psi_minus, 2);
  const QuditAlgebra alg(2);
  RngStream rng(17);
  for (int i = 0; i < 50; ++i)
    for (std::size_t mu = 0; mu < 2; ++mu)
      for (std::size_t nu = 0; nu < 2; ++nu) {
        const auto r = e.decouple_and_read(dense_encode(e.couple(init), mu, nu, alg), rng);
        EXPECT_EQ(r.mu_guess, mu);
        EXPECT_EQ(bob_decode(r.signal, InitialKind::qubit_psi_minus, 2), (SymbolPair{mu, 0}));
      }
}

TEST(MakeAttack, NamesAndErrors) {
  EXPECT_EQ(make_attack("cnot", 2).name(), "cnot");
  EXPECT_EQ(make_attack("qudit-shift", 4).travel_dim(), 4u);
  EXPECT_EQ(make_attack("generic:random", 3, 5).name(), "generic");
  EXPECT_THROW(make_attack("cnot", 3), std::invalid_argument);
  EXPECT_THROW(make_attack("teleport", 2), std::invalid_argument);
  EXPECT_THROW(make_attack("generic:/nonexistent.json", 2), std::runtime_error);
}
