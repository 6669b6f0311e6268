#include "pingpong/protocol.hpp"

#include <cmath>
#include <deque>
#include <numbers>

namespace pingpong {

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::qubit_psi_minus:
      return "qubit";
    case InitialKind::qudit_beta00:
      return "qudit";
  }
  return "?";
}

InitialKind parse_initial_kind(std::string_view name) {
  if (name == "qubit" || name == "qubit_psi_minus" || name == "psi-minus") return InitialKind::qubit_psi_minus;
  if (name == "qudit" || name == "qudit_beta00" || name == "beta00") return InitialKind::qudit_beta00;
  throw std::invalid_argument("unknown initial state kind '" + std::string(name) + "'");
}

void ProtocolConfig::validate() const {
  if (dim < 2) throw std::invalid_argument("dimension must be at least 2");
  if (!(control_prob >= 0.0 && control_prob <= 1.0)) throw std::invalid_argument("control_prob must lie in [0, 1]");
  if (n_cycles == 0) throw std::invalid_argument("n_cycles must be positive");
  if (kind == InitialKind::qubit_psi_minus && dim != 2)
    throw std::invalid_argument("the qubit kind requires dimension 2, got " + std::to_string(dim));
}

QuditAlgebra::QuditAlgebra(std::size_t dim)
    : dim_(dim),
      omega_(std::polar(1.0, 2.0 * std::numbers::pi / static_cast<double>(dim))),
      x_(Operator::identity(dim)),
      z_(Operator::identity(dim)) {
  if (dim < 2) throw std::invalid_argument("qudit dimension must be at least 2");
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix x = Matrix::Zero(n, n);
  Matrix z = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    x((k + 1) % n, k) = 1.0;
    // Exact phase per k rather than omega^k to keep Z^D = I tight.
    z(k, k) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(dim));
  }
  x_ = Operator::unitary(std::move(x));
  z_ = Operator::unitary(std::move(z));
}

Operator QuditAlgebra::encoding(std::size_t mu, std::size_t nu) const {
  if (mu >= dim_ || nu >= dim_) throw std::out_of_range("symbol out of range for dimension " + std::to_string(dim_));
  return x_.pow(static_cast<unsigned>(mu)) * z_.pow(static_cast<unsigned>(nu));
}

Message random_message(std::size_t dim, std::size_t length, RngStream& rng) {
  Message m;
  m.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    const auto mu = static_cast<std::size_t>(rng.uniform_int(dim));
    const auto nu = static_cast<std::size_t>(rng.uniform_int(dim));
    m.push_back({mu, nu});
  }
  return m;
}

StateVector make_initial_state(InitialKind kind, std::size_t dim) {
  if (kind == InitialKind::qubit_psi_minus && dim != 2)
    throw std::invalid_argument("the qubit kind requires dimension 2, got " + std::to_string(dim));
  if (dim < 2) throw std::invalid_argument("dimension must be at least 2");
  SubsystemLayout layout{{kHome, dim}, {kTravel, dim}};
  const auto n = static_cast<Eigen::Index>(dim);
  Amplitudes a = Amplitudes::Zero(n * n);
  if (kind == InitialKind::qubit_psi_minus) {
    a[1] = 1.0 / std::numbers::sqrt2;   // |0_h 1_t>
    a[2] = -1.0 / std::numbers::sqrt2;  // |1_h 0_t>
  } else {
    const double c = 1.0 / std::sqrt(static_cast<double>(dim));
    for (Eigen::Index k = 0; k < n; ++k) a[k * n + k] = c;
  }
  return StateVector(std::move(layout), std::move(a));
}

StateVector make_initial_state(const ProtocolConfig& cfg) {
  cfg.validate();
  return make_initial_state(cfg.kind, cfg.dim);
}

StateVector dense_encode(const StateVector& state, std::size_t mu, std::size_t nu, const QuditAlgebra& alg) {
  if (state.layout().dim_of(kTravel) != alg.dim()) throw DimensionError("travel register dimension does not match the algebra");
  return apply(state, alg.encoding(mu, nu), {kTravel});
}

std::vector<BellElement> bell_basis(InitialKind kind, std::size_t dim) {
  const StateVector init = make_initial_state(kind, dim);
  const QuditAlgebra alg(dim);
  std::vector<BellElement> out;
  out.reserve(dim * dim);
  for (std::size_t mu = 0; mu < dim; ++mu)
    for (std::size_t nu = 0; nu < dim; ++nu) out.push_back({{mu, nu}, dense_encode(init, mu, nu, alg)});
  return out;
}

namespace {

struct BellCache {
  InitialKind kind;
  std::size_t dim;
  std::vector<BellElement> basis;
};

const std::vector<BellElement>& cached_bell_basis(InitialKind kind, std::size_t dim) {
  thread_local std::deque<BellCache> cache;
  for (const auto& c : cache)
    if (c.kind == kind && c.dim == dim) return c.basis;
  cache.push_back({kind, dim, bell_basis(kind, dim)});
  return cache.back().basis;
}

}  // namespace

SymbolPair bob_decode(const StateVector& state, InitialKind kind, std::size_t dim) {
  const auto& layout = state.layout();
  if (layout.size() != 2 || !layout.contains(kHome) || !layout.contains(kTravel))
    throw LayoutError("bob_decode expects exactly the registers h and t");
  const std::vector<std::string> order{kHome, kTravel};
  const StateVector ht = state.reordered(order);
  if (ht.layout().dim_of(kHome) != dim || ht.layout().dim_of(kTravel) != dim)
    throw DimensionError("bob_decode: register dimensions do not match D");

  const auto& basis = cached_bell_basis(kind, dim);
  double best = -1.0;
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double overlap = std::abs(basis[i].state.inner(ht));
    if (overlap > best) {
      best = overlap;
      best_index = i;
    }
  }
  if (best <= 1.0 - 1e-9)
    throw CoherenceBreak("received pair matches no encoded Bell state (best overlap " + std::to_string(best) + ")");
  return basis[best_index].symbols;
}

SymbolPair bob_decode(const StateVector& state, const ProtocolConfig& cfg) {
  return bob_decode(state, cfg.kind, cfg.dim);
}

}  // namespace pingpong
