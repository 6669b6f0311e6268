#include "pingpong/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace pingpong {

namespace {

// A legitimate outcome pair must have probability well above rounding noise.
constexpr double kPossible = 1e-9;

OrthonormalBasis dual_basis() {
  const double r = 1.0 / std::numbers::sqrt2;
  Amplitudes plus(2), minus(2);
  plus << r, r;
  minus << r, -r;
  return {plus, minus};
}

}  // namespace

ControlMode::ControlMode(std::string name, std::vector<ControlBasis> menu, InitialKind kind, std::size_t dim)
    : name_(std::move(name)), menu_(std::move(menu)), kind_(kind), dim_(dim) {
  if (menu_.empty()) throw std::invalid_argument("control mode needs at least one basis");
  double total = 0.0;
  for (const auto& b : menu_) {
    if (b.vectors.size() != dim_) throw DimensionError("control basis '" + b.name + "' has the wrong size");
    require_orthonormal(b.vectors, tol::orthonormal, "control basis");
    if (b.weight < 0.0) throw std::invalid_argument("negative basis weight");
    total += b.weight;
  }
  if (std::abs(total - 1.0) > tol::algebraic) throw std::invalid_argument("basis selection probabilities must sum to 1");

  // Outcome distribution of the undisturbed pair decides what passes.
  const StateVector init = make_initial_state(kind_, dim_);
  for (const auto& b : menu_) {
    std::vector<bool> table(dim_ * dim_);
    for (std::size_t a = 0; a < dim_; ++a)
      for (std::size_t h = 0; h < dim_; ++h) {
        // amplitude of |b_h>_h |b_a>_t
        complex amp = 0.0;
        for (std::size_t i = 0; i < dim_; ++i)
          for (std::size_t j = 0; j < dim_; ++j)
            amp += std::conj(b.vectors[h][static_cast<Eigen::Index>(i)] * b.vectors[a][static_cast<Eigen::Index>(j)]) *
                   init[i * dim_ + j];
        table[a * dim_ + h] = std::norm(amp) > kPossible;
      }
    pass_.push_back(std::move(table));
  }
}

bool ControlMode::passes(std::size_t basis_id, std::size_t alice, std::size_t bob) const {
  return pass_.at(basis_id).at(alice * dim_ + bob);
}

std::size_t ControlMode::pick_basis(RngStream& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < menu_.size(); ++i) {
    acc += menu_[i].weight;
    if (u < acc) return i;
  }
  for (std::size_t i = menu_.size(); i-- > 0;)
    if (menu_[i].weight > 0.0) return i;
  return 0;
}

ControlMode ControlMode::with_weights(const std::vector<double>& weights) const {
  if (weights.size() != menu_.size()) throw std::invalid_argument("one weight per basis required");
  auto menu = menu_;
  for (std::size_t i = 0; i < menu.size(); ++i) menu[i].weight = weights[i];
  return ControlMode(name_, std::move(menu), kind_, dim_);
}

ControlMode computational_control(std::size_t dim, InitialKind kind) {
  return ControlMode("computational", {{"computational", computational_basis(dim), 1.0}}, kind, dim);
}

ControlMode two_basis_control(InitialKind kind) {
  return ControlMode("two-basis", {{"computational", computational_basis(2), 0.5}, {"dual", dual_basis(), 0.5}}, kind, 2);
}

ControlMode make_control(std::string_view name, std::size_t dim, InitialKind kind) {
  if (name == "computational") return computational_control(dim, kind);
  if (name == "two-basis") {
    if (dim != 2) throw std::invalid_argument("two-basis control is defined for D = 2 only, got " + std::to_string(dim));
    return two_basis_control(kind);
  }
  throw std::invalid_argument("unknown control mode '" + std::string(name) + "'");
}

Operator fail_projector(const ControlMode& control, std::size_t basis_id) {
  const std::size_t d = control.dim();
  const auto& basis = control.menu().at(basis_id).vectors;
  const auto n = static_cast<Eigen::Index>(d * d);
  Matrix p = Matrix::Zero(n, n);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      if (control.passes(basis_id, a, b)) continue;
      // |b_b>_h (x) |b_a>_t on layout [h, t]
      Amplitudes v(n);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          v[static_cast<Eigen::Index>(i * d + j)] = basis[b][static_cast<Eigen::Index>(i)] * basis[a][static_cast<Eigen::Index>(j)];
      p += v * v.adjoint();
    }
  return Operator::projector(std::move(p));
}

double analytic_pdet(const Eavesdropper& eve, const ControlMode& control) {
  if (eve.travel_dim() != control.dim())
    throw DimensionError("attack dimension " + std::to_string(eve.travel_dim()) + " does not match control dimension " +
                         std::to_string(control.dim()));
  const StateVector coupled = eve.couple(make_initial_state(control.kind(), control.dim()));
  const DensityMatrix rho = partial_trace(coupled, {kHome, kTravel});
  double p = 0.0;
  for (std::size_t b = 0; b < control.menu().size(); ++b) p += control.menu()[b].weight * rho.expectation(fail_projector(control, b));
  return std::clamp(p, 0.0, 1.0);
}

double analytic_pdet(const Eavesdropper& eve, const ControlMode& control, const ProtocolConfig& cfg) {
  cfg.validate();
  if (cfg.dim != control.dim() || cfg.kind != control.kind())
    throw DimensionError("control mode was built for a different dimension or initial state");
  return analytic_pdet(eve, control);
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  const double low = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double high = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {low, high};
}

DetectionReport empirical_pdet(const Eavesdropper& eve, const ControlMode& control, const ProtocolConfig& cfg,
                               std::size_t trials, unsigned jobs) {
  if (trials == 0) throw std::invalid_argument("empirical_pdet: trials must be positive");
  cfg.validate();
  if (cfg.dim != control.dim() || cfg.kind != control.kind())
    throw DimensionError("control mode was built for a different dimension or initial state");

  // The coupled state involves no randomness; only the measurements are sampled.
  const StateVector coupled = eve.couple(make_initial_state(cfg));
  const std::size_t nb = control.menu().size();
  const std::vector<std::string> travel{kTravel}, home{kHome};

  struct Counts {
    std::vector<std::size_t> trials, failures;
  };
  const auto run_range = [&](std::size_t begin, std::size_t end) {
    Counts c{std::vector<std::size_t>(nb), std::vector<std::size_t>(nb)};
    for (std::size_t i = begin; i < end; ++i) {
      RngStream rng = RngStream::derive(cfg.seed, i);
      const std::size_t b = control.pick_basis(rng);
      const auto& basis = control.menu()[b].vectors;
      const MeasurementOutcome alice = measure(coupled, travel, basis, rng);
      const MeasurementOutcome bob = measure(alice.post_state, home, basis, rng);
      ++c.trials[b];
      if (!control.passes(b, alice.outcome, bob.outcome)) ++c.failures[b];
    }
    return c;
  };

  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::min<std::size_t>(trials, 256))));
  std::vector<Counts> parts(jobs);
  if (jobs == 1) {
    parts[0] = run_range(0, trials);
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) {
      const std::size_t begin = trials * j / jobs, end = trials * (j + 1) / jobs;
      pool.emplace_back([&, j, begin, end] { parts[j] = run_range(begin, end); });
    }
    for (auto& t : pool) t.join();
  }

  DetectionReport r;
  r.trials = trials;
  r.basis_trials.assign(nb, 0);
  r.basis_failures.assign(nb, 0);
  for (const auto& c : parts)
    for (std::size_t b = 0; b < nb; ++b) {
      r.basis_trials[b] += c.trials[b];
      r.basis_failures[b] += c.failures[b];
    }
  r.failures = std::accumulate(r.basis_failures.begin(), r.basis_failures.end(), std::size_t{0});
  r.empirical = static_cast<double>(r.failures) / static_cast<double>(trials);
  r.ci = wilson_interval(r.failures, trials);
  r.analytic = analytic_pdet(eve, control);
  return r;
}

DualBasisExpansion dual_basis_expand(const StateVector& state) {
  const auto& layout = state.layout();
  if (!layout.contains(kHome) || !layout.contains(kTravel) || layout.dim_of(kHome) != 2 || layout.dim_of(kTravel) != 2)
    throw DimensionError("dual_basis_expand needs qubit registers h and t");
  const std::vector<std::string> ht{kHome, kTravel};
  const SubsystemLayout ancilla = layout.without(ht);
  const auto toff = offsets_for(layout, ht);
  const auto roff = offsets_for(layout, ancilla.labels());
  const OrthonormalBasis pm = dual_basis();

  DualBasisExpansion out;
  out.ancilla = ancilla;
  for (std::size_t sh = 0; sh < 2; ++sh)
    for (std::size_t st = 0; st < 2; ++st) {
      Amplitudes term = Amplitudes::Zero(static_cast<Eigen::Index>(roff.size()));
      for (std::size_t r = 0; r < roff.size(); ++r)
        for (std::size_t i = 0; i < 2; ++i)
          for (std::size_t j = 0; j < 2; ++j)
            term[static_cast<Eigen::Index>(r)] += std::conj(pm[sh][static_cast<Eigen::Index>(i)] * pm[st][static_cast<Eigen::Index>(j)]) *
                                                  state[roff[r] + toff[i * 2 + j]];
      out.terms.push_back(std::move(term));
    }
  return out;
}

}  // namespace pingpong
