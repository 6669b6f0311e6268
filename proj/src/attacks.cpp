#include "pingpong/attacks.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pingpong {

namespace {

const std::string kAncilla = "E";

Amplitudes stacked(const Amplitudes& a, const Amplitudes& b) {
  Amplitudes out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

Amplitudes unit(std::size_t dim, std::size_t k) {
  Amplitudes e = Amplitudes::Zero(static_cast<Eigen::Index>(dim));
  e[static_cast<Eigen::Index>(k)] = 1.0;
  return e;
}

std::vector<std::optional<std::size_t>> detection_readout_map(std::size_t dim, std::size_t ancilla_dim) {
  // The ancilla ends in alpha^((-mu) mod D), so outcome m reports mu = -m mod D.
  std::vector<std::optional<std::size_t>> map(ancilla_dim);
  for (std::size_t m = 0; m < dim; ++m) map[m] = (dim - m) % dim;
  return map;
}

}  // namespace

// ---------------------------------------------------------------------------
// StateFamily

StateFamily::StateFamily(std::vector<StateVector> states) : states_(std::move(states)) {
  if (states_.empty()) throw BasisError("state family is empty");
  for (const auto& s : states_)
    if (s.layout() != states_.front().layout()) throw BasisError("state family members have different layouts");
  const auto v = vectors();
  require_orthonormal(v, tol::orthonormal, "state family");
}

std::vector<Amplitudes> StateFamily::vectors() const {
  std::vector<Amplitudes> v;
  v.reserve(states_.size());
  for (const auto& s : states_) v.push_back(s.amps());
  return v;
}

// ---------------------------------------------------------------------------
// Eavesdropper

Eavesdropper::Eavesdropper(Parts parts) : p_(std::move(parts)) {
  ancilla_labels_ = p_.initial_ancilla.layout().labels();
  for (const auto& l : ancilla_labels_)
    if (l == kHome || l == kTravel) throw LayoutError("ancilla label '" + l + "' collides with a protocol register");
  targets_.push_back(kTravel);
  targets_.insert(targets_.end(), ancilla_labels_.begin(), ancilla_labels_.end());
  if (!p_.coupling.is_unitary()) throw DimensionError("coupling must be unitary");
  if (p_.coupling.dim() != p_.travel_dim * p_.initial_ancilla.dim())
    throw DimensionError("coupling dimension does not match travel (x) ancilla");
  if (p_.return_leg == ReturnLeg::coupling_inverse) {
    if (p_.readout_basis.size() != p_.initial_ancilla.dim() || p_.readout_map.size() != p_.readout_basis.size())
      throw DimensionError("readout basis must span the ancilla space");
    require_orthonormal(p_.readout_basis, tol::orthonormal, "readout basis");
  }
}

StateVector Eavesdropper::couple(const StateVector& ht) const {
  if (ht.layout().dim_of(kTravel) != p_.travel_dim) throw DimensionError(p_.name + ": travel dimension mismatch");
  return apply(tensor(ht, p_.initial_ancilla), p_.coupling, targets_);
}

StateVector Eavesdropper::decouple(const StateVector& htE) const { return apply(htE, p_.coupling.inverse(), targets_); }

ReturnResult Eavesdropper::decouple_and_read(const StateVector& htE, RngStream& rng) const {
  if (p_.return_leg == ReturnLeg::intercept_resend) return intercept_resend_return(htE, rng);
  const StateVector back = decouple(htE);
  const MeasurementOutcome out = measure(back, ancilla_labels_, p_.readout_basis, rng);
  StateVector signal = contract(out.post_state, ancilla_labels_, p_.readout_basis[out.outcome]);
  return {std::move(signal), p_.readout_map[out.outcome]};
}

ReturnResult Eavesdropper::intercept_resend_return(const StateVector& htE, RngStream& rng) const {
  // Ancilla: [store, coin]. The fake qudit that Alice encoded is on t; the coin
  // records which basis state Eve sent; the genuine travel qudit sits in store.
  const std::string& store = ancilla_labels_.at(0);
  const std::string& coin = ancilla_labels_.at(1);
  const std::size_t d = p_.travel_dim;
  const auto comp = computational_basis(d);

  const std::vector<std::string> t_only{kTravel};
  const std::vector<std::string> coin_only{coin};
  const MeasurementOutcome seen = measure(htE, t_only, comp, rng);
  const MeasurementOutcome sent = measure(seen.post_state, coin_only, comp, rng);
  const std::size_t mu = (seen.outcome + d - sent.outcome) % d;

  StateVector rest = contract(sent.post_state, t_only, comp[seen.outcome]);
  rest = contract(rest, coin_only, comp[sent.outcome]);
  rest = rest.relabeled(store, kTravel);
  const QuditAlgebra alg(d);
  rest = apply(rest, alg.X().pow(static_cast<unsigned>(mu)), {kTravel});
  const std::vector<std::string> order{kHome, kTravel};
  return {rest.reordered(order), mu};
}

// ---------------------------------------------------------------------------
// Attack zoo

Eavesdropper no_attack(std::size_t dim) {
  SubsystemLayout anc{{kAncilla, 1}};
  return Eavesdropper({
      .name = "none",
      .travel_dim = dim,
      .initial_ancilla = StateVector::basis(anc, {0}),
      .coupling = Operator::identity(dim),
      .return_leg = ReturnLeg::coupling_inverse,
      .readout_basis = computational_basis(1),
      .readout_map = {std::nullopt},
  });
}

Eavesdropper intercept_resend(std::size_t dim) {
  if (dim < 2) throw std::invalid_argument("intercept_resend: dimension must be at least 2");
  // Eve keeps the genuine travel qudit in `store` and forwards a fake prepared
  // in a uniformly random computational state, purified into `coin`. The forward
  // leg is a swap of t and store.
  SubsystemLayout anc{{"store", dim}, {"coin", dim}};
  Amplitudes chi = Amplitudes::Zero(static_cast<Eigen::Index>(dim * dim));
  for (std::size_t f = 0; f < dim; ++f) chi[static_cast<Eigen::Index>(f * dim + f)] = 1.0 / std::sqrt(static_cast<double>(dim));

  const auto n = static_cast<Eigen::Index>(dim * dim * dim);
  Matrix swap = Matrix::Zero(n, n);
  for (std::size_t t = 0; t < dim; ++t)
    for (std::size_t s = 0; s < dim; ++s)
      for (std::size_t c = 0; c < dim; ++c) {
        const auto from = static_cast<Eigen::Index>((t * dim + s) * dim + c);
        const auto to = static_cast<Eigen::Index>((s * dim + t) * dim + c);
        swap(to, from) = 1.0;
      }

  return Eavesdropper({
      .name = "intercept-resend",
      .travel_dim = dim,
      .initial_ancilla = StateVector(anc, chi),
      .coupling = Operator::unitary(std::move(swap)),
      .return_leg = ReturnLeg::intercept_resend,
  });
}

Eavesdropper qudit_shift_attack(std::size_t dim) {
  if (dim < 2) throw std::invalid_argument("qudit_shift_attack: dimension must be at least 2");
  SubsystemLayout anc{{kAncilla, dim}};
  // C_X: |k_t>|m_E> -> |k_t>|m+k mod D>_E
  const auto n = static_cast<Eigen::Index>(dim * dim);
  Matrix q = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < dim; ++k)
    for (std::size_t m = 0; m < dim; ++m)
      q(static_cast<Eigen::Index>(k * dim + (m + k) % dim), static_cast<Eigen::Index>(k * dim + m)) = 1.0;

  std::vector<StateVector> comp;
  for (std::size_t m = 0; m < dim; ++m) comp.push_back(StateVector::basis(anc, {m}));
  StateFamily family(comp);

  return Eavesdropper({
      .name = "qudit-shift",
      .travel_dim = dim,
      .initial_ancilla = StateVector::basis(anc, {0}),
      .coupling = Operator::unitary(std::move(q)),
      .return_leg = ReturnLeg::coupling_inverse,
      .readout_basis = computational_basis(dim),
      .readout_map = detection_readout_map(dim, dim),
      .detection = family,
      .probes = family,
  });
}

Eavesdropper cnot_attack() {
  SubsystemLayout anc{{"x", 2}};
  Matrix q = Matrix::Zero(4, 4);
  q(0, 0) = 1.0;  // |0 0> -> |0 0>
  q(1, 1) = 1.0;  // |0 1> -> |0 1>
  q(3, 2) = 1.0;  // |1 0> -> |1 1>
  q(2, 3) = 1.0;  // |1 1> -> |1 0>
  StateFamily family({StateVector::basis(anc, {0}), StateVector::basis(anc, {1})});
  return Eavesdropper({
      .name = "cnot",
      .travel_dim = 2,
      .initial_ancilla = StateVector::basis(anc, {0}),
      .coupling = Operator::unitary(std::move(q)),
      .return_leg = ReturnLeg::coupling_inverse,
      .readout_basis = computational_basis(2),
      .readout_map = detection_readout_map(2, 2),
      .detection = family,
      .probes = family,
  });
}

PavicicStates pavicic_states() {
  const SubsystemLayout rails{{"x", rail::dim}, {"y", rail::dim}};
  const auto ket = [&](std::size_t x, std::size_t y) { return StateVector::basis(rails, {x, y}).amps(); };
  const double r = 1.0 / std::numbers::sqrt2;
  return {
      StateVector(rails, ket(rail::vacuum, rail::horizontal)),
      StateVector(rails, ket(rail::horizontal, rail::vacuum)),
      StateVector(rails, r * (ket(rail::horizontal, rail::vacuum) + ket(rail::vacuum, rail::vertical))),
      StateVector(rails, r * (ket(rail::vacuum, rail::horizontal) + ket(rail::vertical, rail::vacuum))),
  };
}

Eavesdropper pavicic_circuit() {
  const PavicicStates s = pavicic_states();
  const Amplitudes t0 = unit(2, 0), t1 = unit(2, 1);
  // Q_txy is fixed on the protocol-relevant subspace by its action on chi0 and
  // chi1; the rest of the space is filled in by canonical completion.
  const std::vector<Amplitudes> domain{stacked(t0, s.chi0.amps()), stacked(t1, s.chi0.amps()), stacked(t0, s.chi1.amps()),
                                       stacked(t1, s.chi1.amps())};
  const std::vector<Amplitudes> image{stacked(t0, s.a_E.amps()), stacked(t1, s.d_E.amps()), stacked(t0, s.d_E.amps()),
                                      stacked(t1, s.a_E.amps())};
  Operator q = complete_isometry(domain, image);

  const std::vector<Amplitudes> chis{s.chi0.amps(), s.chi1.amps()};
  return Eavesdropper({
      .name = "pavicic",
      .travel_dim = 2,
      .initial_ancilla = s.chi0,
      .coupling = std::move(q),
      .return_leg = ReturnLeg::coupling_inverse,
      .readout_basis = complete_basis(chis, rail::dim * rail::dim),
      .readout_map = detection_readout_map(2, rail::dim * rail::dim),
      .detection = StateFamily({s.chi0, s.chi1}),
      .probes = StateFamily({s.a_E, s.d_E}),
  });
}

Operator cpbs() {
  const SubsystemLayout txy{{kTravel, 2}, {"x", rail::dim}, {"y", rail::dim}};
  const auto ket = [&](std::size_t t, std::size_t x, std::size_t y) { return StateVector::basis(txy, {t, x, y}).amps(); };
  using namespace rail;
  // Control |0_t>: ordinary PBS, horizontal photons change rail.
  // Control |1_t>: vertical photons change rail instead.
  const std::vector<Amplitudes> domain{
      ket(0, vacuum, horizontal), ket(0, horizontal, vacuum), ket(0, vacuum, vertical), ket(0, vertical, vacuum),
      ket(1, vacuum, horizontal), ket(1, horizontal, vacuum), ket(1, vacuum, vertical), ket(1, vertical, vacuum),
  };
  const std::vector<Amplitudes> image{
      ket(0, horizontal, vacuum), ket(0, vacuum, horizontal), ket(0, vacuum, vertical), ket(0, vertical, vacuum),
      ket(1, vacuum, horizontal), ket(1, horizontal, vacuum), ket(1, vertical, vacuum), ket(1, vacuum, vertical),
  };
  return complete_isometry(domain, image);
}

Eavesdropper generic_coupling(std::size_t dim, const DetectionFamily& detection, const ProbeFamily& probes) {
  if (detection.size() != dim || probes.size() != dim)
    throw BasisError("generic_coupling: each family needs exactly D states");
  if (detection.layout() != probes.layout()) throw BasisError("generic_coupling: families live on different ancilla layouts");
  for (const auto& l : detection.layout().labels())
    if (l == kHome || l == kTravel) throw LayoutError("ancilla label '" + l + "' collides with a protocol register");
  const std::size_t anc_dim = detection.layout().total_dim();
  if (anc_dim < dim) throw DimensionError("generic_coupling: ancilla dimension must be at least D");

  std::vector<Amplitudes> domain, image;
  for (std::size_t m = 0; m < dim; ++m)
    for (std::size_t k = 0; k < dim; ++k) {
      domain.push_back(stacked(unit(dim, k), detection[m].amps()));
      image.push_back(stacked(unit(dim, k), probes[(m + k) % dim].amps()));
    }
  Operator q = complete_isometry(domain, image);

  const ValidationReport report = validate_coupling(q, detection, probes, dim);
  if (!report.passed)
    throw std::runtime_error("generic_coupling: validation failed (max residual " + std::to_string(report.max_residual) + ")");

  const auto det = detection.vectors();
  return Eavesdropper({
      .name = "generic",
      .travel_dim = dim,
      .initial_ancilla = detection[0],
      .coupling = std::move(q),
      .return_leg = ReturnLeg::coupling_inverse,
      .readout_basis = complete_basis(det, anc_dim),
      .readout_map = detection_readout_map(dim, anc_dim),
      .detection = detection,
      .probes = probes,
  });
}

ValidationReport validate_coupling(const Operator& q, const DetectionFamily& detection, const ProbeFamily& probes,
                                   std::size_t dim) {
  const std::size_t anc_dim = detection.layout().total_dim();
  if (detection.size() != dim || probes.size() != dim || probes.layout().total_dim() != anc_dim ||
      q.dim() != dim * anc_dim)
    throw DimensionError("validate_coupling: inconsistent dimensions");

  const Matrix& m = q.matrix();
  const Matrix inv = m.adjoint();
  ValidationReport report;
  for (std::size_t k = 0; k < dim; ++k)
    for (std::size_t j = 0; j < dim; ++j) {
      const Amplitudes tk = unit(dim, k);
      const Amplitudes fwd = m * stacked(tk, detection[j].amps()) - stacked(tk, probes[(j + k) % dim].amps());
      const Amplitudes bwd = inv * stacked(tk, probes[j].amps()) - stacked(tk, detection[(j + dim - k) % dim].amps());
      CouplingResidual row{k, j, fwd.norm(), bwd.norm()};
      report.max_residual = std::max({report.max_residual, row.forward, row.inverse});
      report.rows.push_back(row);
    }
  report.passed = report.max_residual < tol::orthonormal;
  return report;
}

FamilyPair random_families(std::size_t dim, std::size_t ancilla_dim, RngStream& rng) {
  if (ancilla_dim < dim) throw DimensionError("random_families: ancilla dimension must be at least D");
  const SubsystemLayout anc{{kAncilla, ancilla_dim}};
  const auto take = [&](const Operator& u) {
    std::vector<StateVector> out;
    for (std::size_t i = 0; i < dim; ++i) out.emplace_back(anc, u.matrix().col(static_cast<Eigen::Index>(i)));
    return StateFamily(std::move(out));
  };
  DetectionFamily det = take(random_unitary(ancilla_dim, rng));
  ProbeFamily probes = take(random_unitary(ancilla_dim, rng));
  return {std::move(det), std::move(probes)};
}

FamilyPair families_from_json(std::string_view text) {
  const auto doc = nlohmann::json::parse(text);
  const auto read_family = [&](const char* key, const SubsystemLayout* layout_hint) {
    std::vector<Amplitudes> vecs;
    for (const auto& state : doc.at(key)) {
      Amplitudes v(static_cast<Eigen::Index>(state.size()));
      Eigen::Index i = 0;
      for (const auto& c : state) v[i++] = complex(c.at(0).get<double>(), c.at(1).get<double>());
      vecs.push_back(std::move(v));
    }
    if (vecs.empty()) throw BasisError(std::string("family '") + key + "' is empty");
    SubsystemLayout layout = layout_hint ? *layout_hint : SubsystemLayout{{kAncilla, static_cast<std::size_t>(vecs.front().size())}};
    std::vector<StateVector> states;
    for (auto& v : vecs) states.emplace_back(layout, std::move(v));
    return StateFamily(std::move(states));
  };

  std::optional<SubsystemLayout> layout;
  if (doc.contains("ancilla")) {
    std::vector<Subsystem> entries;
    for (const auto& e : doc.at("ancilla")) entries.push_back({e.at("label").get<std::string>(), e.at("dim").get<std::size_t>()});
    layout = SubsystemLayout(std::move(entries));
  }
  const SubsystemLayout* hint = layout ? &*layout : nullptr;
  return {read_family("detection", hint), read_family("probes", hint)};
}

FamilyPair families_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open family file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return families_from_json(ss.str());
}

Eavesdropper make_attack(std::string_view name, std::size_t dim, std::uint64_t seed) {
  const auto need_qubit = [&](std::string_view n) {
    if (dim != 2) throw std::invalid_argument(std::string(n) + " attack requires D = 2, got " + std::to_string(dim));
  };
  if (name == "none") return no_attack(dim);
  if (name == "intercept-resend") return intercept_resend(dim);
  if (name == "cnot") {
    need_qubit(name);
    return cnot_attack();
  }
  if (name == "pavicic") {
    need_qubit(name);
    return pavicic_circuit();
  }
  if (name == "qudit-shift") return qudit_shift_attack(dim);
  if (name.starts_with("generic:")) {
    const std::string arg(name.substr(8));
    if (arg == "random") {
      RngStream rng(seed, 0x67656e65726963ULL);
      const FamilyPair f = random_families(dim, dim + 1, rng);
      return generic_coupling(dim, f.detection, f.probes);
    }
    const FamilyPair f = families_from_file(arg);
    return generic_coupling(dim, f.detection, f.probes);
  }
  throw std::invalid_argument("unknown attack '" + std::string(name) + "'");
}

}  // namespace pingpong
