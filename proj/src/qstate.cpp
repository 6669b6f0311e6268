#include "pingpong/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace pingpong {

// ---------------------------------------------------------------------------
// SubsystemLayout

SubsystemLayout::SubsystemLayout(std::initializer_list<Subsystem> entries)
    : SubsystemLayout(std::vector<Subsystem>(entries)) {}

SubsystemLayout::SubsystemLayout(std::vector<Subsystem> entries) : entries_(std::move(entries)) {
  std::set<std::string> seen;
  for (const auto& e : entries_) {
    if (e.dim == 0) throw LayoutError("subsystem '" + e.label + "' has dimension 0");
    if (!seen.insert(e.label).second) throw LayoutError("duplicate subsystem label '" + e.label + "'");
  }
}

std::size_t SubsystemLayout::total_dim() const {
  std::size_t d = 1;
  for (const auto& e : entries_) d *= e.dim;
  return d;
}

bool SubsystemLayout::contains(const std::string& label) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const Subsystem& e) { return e.label == label; });
}

std::size_t SubsystemLayout::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].label == label) return i;
  throw LayoutError("unknown subsystem label '" + label + "'");
}

std::size_t SubsystemLayout::dim_of(const std::string& label) const { return entries_[index_of(label)].dim; }

std::vector<std::string> SubsystemLayout::labels() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.label);
  return out;
}

std::vector<std::size_t> SubsystemLayout::strides() const {
  std::vector<std::size_t> s(entries_.size());
  std::size_t acc = 1;
  for (std::size_t i = entries_.size(); i-- > 0;) {
    s[i] = acc;
    acc *= entries_[i].dim;
  }
  return s;
}

SubsystemLayout SubsystemLayout::concat(const SubsystemLayout& other) const {
  std::vector<Subsystem> all = entries_;
  all.insert(all.end(), other.entries_.begin(), other.entries_.end());
  return SubsystemLayout(std::move(all));
}

SubsystemLayout SubsystemLayout::select(std::span<const std::string> labels) const {
  std::vector<Subsystem> out;
  for (const auto& l : labels) out.push_back(entries_[index_of(l)]);
  return SubsystemLayout(std::move(out));
}

SubsystemLayout SubsystemLayout::without(std::span<const std::string> labels) const {
  for (const auto& l : labels) (void)index_of(l);
  std::vector<Subsystem> out;
  for (const auto& e : entries_)
    if (std::find(labels.begin(), labels.end(), e.label) == labels.end()) out.push_back(e);
  return SubsystemLayout(std::move(out));
}

std::vector<std::size_t> offsets_for(const SubsystemLayout& layout, std::span<const std::string> labels) {
  const auto strides = layout.strides();
  std::vector<std::size_t> out{0};
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) throw LayoutError("label '" + l + "' listed twice");
    const std::size_t i = layout.index_of(l);
    const std::size_t d = layout.entries()[i].dim;
    std::vector<std::size_t> next;
    next.reserve(out.size() * d);
    for (std::size_t base : out)
      for (std::size_t k = 0; k < d; ++k) next.push_back(base + k * strides[i]);
    out = std::move(next);
  }
  return out;
}

namespace {

// Offsets of the complement of `labels`. Every flat index is uniquely
// rest[r] + target[j].
std::vector<std::size_t> rest_offsets(const SubsystemLayout& layout, std::span<const std::string> labels) {
  const auto rest = layout.without(labels).labels();
  return offsets_for(layout, rest);
}

}  // namespace

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(SubsystemLayout layout, Amplitudes amps) : layout_(std::move(layout)), amps_(std::move(amps)) {
  if (static_cast<std::size_t>(amps_.size()) != layout_.total_dim())
    throw DimensionError("amplitude vector length " + std::to_string(amps_.size()) + " does not match layout dimension " +
                         std::to_string(layout_.total_dim()));
  const double n = amps_.norm();
  if (std::abs(n - 1.0) > tol::orthonormal) throw DimensionError("state vector is not normalized (norm " + std::to_string(n) + ")");
  amps_ /= n;
}

StateVector StateVector::normalized(SubsystemLayout layout, Amplitudes amps) {
  const double n = amps.norm();
  if (n == 0.0) throw DimensionError("cannot normalize the zero vector");
  amps /= n;
  return StateVector(std::move(layout), std::move(amps));
}

StateVector StateVector::basis(SubsystemLayout layout, std::span<const std::size_t> digits) {
  if (digits.size() != layout.size()) throw DimensionError("basis: one digit per subsystem required");
  const auto strides = layout.strides();
  std::size_t index = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] >= layout.entries()[i].dim) throw DimensionError("basis: digit out of range");
    index += digits[i] * strides[i];
  }
  Amplitudes a = Amplitudes::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  a[static_cast<Eigen::Index>(index)] = 1.0;
  return StateVector(std::move(layout), std::move(a));
}

StateVector StateVector::basis(SubsystemLayout layout, std::initializer_list<std::size_t> digits) {
  return basis(std::move(layout), std::span<const std::size_t>(digits.begin(), digits.size()));
}

complex StateVector::inner(const StateVector& other) const {
  if (layout_ != other.layout_) throw LayoutError("inner product between different layouts");
  return amps_.dot(other.amps_);
}

double StateVector::fidelity(const StateVector& other) const { return std::norm(inner(other)); }

StateVector StateVector::reordered(std::span<const std::string> order) const {
  if (order.size() != layout_.size()) throw LayoutError("reordered: order must list every subsystem");
  SubsystemLayout target = layout_.select(order);
  const auto src = offsets_for(layout_, order);
  Amplitudes out(amps_.size());
  for (std::size_t i = 0; i < src.size(); ++i) out[static_cast<Eigen::Index>(i)] = amps_[static_cast<Eigen::Index>(src[i])];
  return StateVector(std::move(target), std::move(out));
}

StateVector StateVector::relabeled(const std::string& from, const std::string& to) const {
  std::vector<Subsystem> entries = layout_.entries();
  entries[layout_.index_of(from)].label = to;
  return StateVector(SubsystemLayout(std::move(entries)), amps_);
}

StateVector StateVector::with_phase(double theta) const {
  return StateVector(layout_, amps_ * std::polar(1.0, theta));
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(Matrix entries, OperatorTag tag) : m_(std::move(entries)), tag_(tag) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) throw DimensionError("operator matrix must be square and nonempty");
  if (tag_ == OperatorTag::unitary) {
    const double defect = unitarity_defect();
    if (defect >= tol::algebraic) throw DimensionError("matrix is not unitary (defect " + std::to_string(defect) + ")");
  } else if (tag_ == OperatorTag::projector) {
    const double idem = (m_ * m_ - m_).cwiseAbs().maxCoeff();
    const double herm = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (idem >= tol::algebraic || herm >= tol::algebraic) throw DimensionError("matrix is not an orthogonal projector");
  }
}

Operator Operator::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return Operator(Matrix::Identity(n, n), OperatorTag::unitary);
}

double Operator::unitarity_defect() const {
  return (m_.adjoint() * m_ - Matrix::Identity(m_.rows(), m_.cols())).cwiseAbs().maxCoeff();
}

Operator Operator::adjoint() const { return Operator(m_.adjoint(), tag_); }

Operator Operator::inverse() const {
  if (tag_ != OperatorTag::unitary) throw DimensionError("inverse is only provided for unitaries");
  return adjoint();
}

Operator Operator::pow(unsigned exponent) const {
  Matrix r = Matrix::Identity(m_.rows(), m_.cols());
  for (unsigned i = 0; i < exponent; ++i) r = r * m_;
  return Operator(std::move(r), tag_ == OperatorTag::unitary ? OperatorTag::unitary : OperatorTag::general);
}

Operator Operator::operator*(const Operator& rhs) const {
  if (dim() != rhs.dim()) throw DimensionError("operator product dimension mismatch");
  const bool u = tag_ == OperatorTag::unitary && rhs.tag_ == OperatorTag::unitary;
  return Operator(m_ * rhs.m_, u ? OperatorTag::unitary : OperatorTag::general);
}

Operator kron(const Operator& a, const Operator& b) {
  const Eigen::Index na = a.matrix().rows(), nb = b.matrix().rows();
  Matrix r(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < na; ++j) r.block(i * nb, j * nb, nb, nb) = a.matrix()(i, j) * b.matrix();
  const bool u = a.is_unitary() && b.is_unitary();
  return Operator(std::move(r), u ? OperatorTag::unitary : OperatorTag::general);
}

// ---------------------------------------------------------------------------
// Bases

double gram_deviation(std::span<const Amplitudes> vectors) {
  double worst = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i; j < vectors.size(); ++j) {
      if (vectors[i].size() != vectors[j].size()) return std::numeric_limits<double>::infinity();
      const complex g = vectors[i].dot(vectors[j]);
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

void require_orthonormal(std::span<const Amplitudes> vectors, double tolerance, const char* what) {
  const double dev = gram_deviation(vectors);
  if (!(dev <= tolerance)) throw BasisError(std::string(what) + ": vectors are not orthonormal (Gram deviation " + std::to_string(dev) + ")");
}

OrthonormalBasis computational_basis(std::size_t dim) {
  OrthonormalBasis b;
  for (std::size_t k = 0; k < dim; ++k) {
    Amplitudes e = Amplitudes::Zero(static_cast<Eigen::Index>(dim));
    e[static_cast<Eigen::Index>(k)] = 1.0;
    b.push_back(std::move(e));
  }
  return b;
}

OrthonormalBasis complete_basis(std::span<const Amplitudes> seed, std::size_t dim) {
  for (const auto& v : seed)
    if (static_cast<std::size_t>(v.size()) != dim) throw DimensionError("complete_basis: vector length mismatch");
  if (seed.size() > dim) throw DimensionError("complete_basis: more vectors than the dimension");
  OrthonormalBasis out(seed.begin(), seed.end());
  for (std::size_t k = 0; k < dim && out.size() < dim; ++k) {
    Amplitudes v = Amplitudes::Zero(static_cast<Eigen::Index>(dim));
    v[static_cast<Eigen::Index>(k)] = 1.0;
    // Two passes of classical Gram-Schmidt keep the complement orthogonal to
    // machine precision.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : out) v -= u.dot(v) * u;
    const double n = v.norm();
    if (n > 1e-6) out.push_back(v / n);
  }
  if (out.size() != dim) throw DimensionError("complete_basis: completion failed");
  return out;
}

// ---------------------------------------------------------------------------
// Kernel operations

StateVector tensor(const StateVector& a, const StateVector& b) {
  SubsystemLayout layout = a.layout().concat(b.layout());
  const Eigen::Index nb = b.amps().size();
  Amplitudes out(a.amps().size() * nb);
  for (Eigen::Index i = 0; i < a.amps().size(); ++i) out.segment(i * nb, nb) = a.amps()[i] * b.amps();
  return StateVector(std::move(layout), std::move(out));
}

StateVector apply(const StateVector& state, const Operator& op, std::span<const std::string> targets) {
  const auto toff = offsets_for(state.layout(), targets);
  if (toff.size() != op.dim())
    throw DimensionError("operator dimension " + std::to_string(op.dim()) + " does not match target dimension " +
                         std::to_string(toff.size()));
  if (op.tag() == OperatorTag::general) throw DimensionError("apply requires a unitary or projector");
  const auto roff = rest_offsets(state.layout(), targets);
  const Matrix& m = op.matrix();
  const Amplitudes& in = state.amps();
  Amplitudes out = Amplitudes::Zero(in.size());
  Amplitudes local(static_cast<Eigen::Index>(toff.size()));
  for (std::size_t r : roff) {
    for (std::size_t j = 0; j < toff.size(); ++j) local[static_cast<Eigen::Index>(j)] = in[static_cast<Eigen::Index>(r + toff[j])];
    const Amplitudes res = m * local;
    for (std::size_t i = 0; i < toff.size(); ++i) out[static_cast<Eigen::Index>(r + toff[i])] = res[static_cast<Eigen::Index>(i)];
  }
  if (op.tag() == OperatorTag::projector) {
    if (out.norm() < tol::algebraic) throw DimensionError("projector annihilates the state");
    return StateVector::normalized(state.layout(), std::move(out));
  }
  return StateVector(state.layout(), std::move(out));
}

StateVector apply(const StateVector& state, const Operator& op, std::initializer_list<std::string> targets) {
  return apply(state, op, std::span<const std::string>(targets.begin(), targets.size()));
}

namespace {

// c[i][r] = sum_j conj(basis[i][j]) * psi[rest[r] + target[j]]
std::vector<Amplitudes> project_components(const StateVector& state, std::span<const std::string> labels,
                                           const OrthonormalBasis& basis, std::vector<std::size_t>& toff,
                                           std::vector<std::size_t>& roff) {
  toff = offsets_for(state.layout(), labels);
  roff = rest_offsets(state.layout(), labels);
  if (basis.size() != toff.size()) throw DimensionError("basis size does not match the measured dimension");
  for (const auto& b : basis)
    if (static_cast<std::size_t>(b.size()) != toff.size()) throw DimensionError("basis vector length mismatch");
  require_orthonormal(basis, tol::orthonormal, "measurement basis");
  std::vector<Amplitudes> comps;
  comps.reserve(basis.size());
  Amplitudes local(static_cast<Eigen::Index>(toff.size()));
  for (const auto& b : basis) {
    Amplitudes c(static_cast<Eigen::Index>(roff.size()));
    for (std::size_t r = 0; r < roff.size(); ++r) {
      complex acc = 0.0;
      for (std::size_t j = 0; j < toff.size(); ++j)
        acc += std::conj(b[static_cast<Eigen::Index>(j)]) * state[roff[r] + toff[j]];
      c[static_cast<Eigen::Index>(r)] = acc;
    }
    comps.push_back(std::move(c));
  }
  return comps;
}

}  // namespace

std::vector<double> outcome_probabilities(const StateVector& state, std::span<const std::string> labels,
                                          const OrthonormalBasis& basis) {
  std::vector<std::size_t> toff, roff;
  const auto comps = project_components(state, labels, basis, toff, roff);
  std::vector<double> p;
  p.reserve(comps.size());
  for (const auto& c : comps) p.push_back(c.squaredNorm());
  return p;
}

MeasurementOutcome measure(const StateVector& state, std::span<const std::string> labels, const OrthonormalBasis& basis,
                           RngStream& rng) {
  std::vector<std::size_t> toff, roff;
  const auto comps = project_components(state, labels, basis, toff, roff);
  std::vector<double> p;
  for (const auto& c : comps) p.push_back(c.squaredNorm());

  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  const double u = rng.uniform() * total;
  std::size_t pick = p.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) {
      pick = i;
      break;
    }
  }
  if (pick == p.size()) {
    // u landed on the rounding slack at the top; take the last possible outcome.
    for (std::size_t i = p.size(); i-- > 0;)
      if (p[i] > 0.0) {
        pick = i;
        break;
      }
  }

  Amplitudes post = Amplitudes::Zero(state.amps().size());
  const Amplitudes& c = comps[pick];
  const Amplitudes& b = basis[pick];
  const double scale = 1.0 / std::sqrt(p[pick]);
  for (std::size_t r = 0; r < roff.size(); ++r)
    for (std::size_t j = 0; j < toff.size(); ++j)
      post[static_cast<Eigen::Index>(roff[r] + toff[j])] = b[static_cast<Eigen::Index>(j)] * c[static_cast<Eigen::Index>(r)] * scale;

  return MeasurementOutcome{std::vector<std::string>(labels.begin(), labels.end()), pick, p[pick],
                            StateVector::normalized(state.layout(), std::move(post))};
}

MeasurementOutcome measure(const StateVector& state, std::initializer_list<std::string> labels,
                           const OrthonormalBasis& basis, RngStream& rng) {
  return measure(state, std::span<const std::string>(labels.begin(), labels.size()), basis, rng);
}

StateVector contract(const StateVector& state, std::span<const std::string> labels, const Amplitudes& bra) {
  const auto toff = offsets_for(state.layout(), labels);
  if (static_cast<std::size_t>(bra.size()) != toff.size()) throw DimensionError("contract: vector length mismatch");
  SubsystemLayout rest = state.layout().without(labels);
  const auto roff = offsets_for(state.layout(), rest.labels());
  Amplitudes out(static_cast<Eigen::Index>(roff.size()));
  for (std::size_t r = 0; r < roff.size(); ++r) {
    complex acc = 0.0;
    for (std::size_t j = 0; j < toff.size(); ++j) acc += std::conj(bra[static_cast<Eigen::Index>(j)]) * state[roff[r] + toff[j]];
    out[static_cast<Eigen::Index>(r)] = acc;
  }
  if (out.norm() < tol::algebraic) throw DimensionError("contract: state has no support on the given vector");
  return StateVector::normalized(std::move(rest), std::move(out));
}

// ---------------------------------------------------------------------------
// Density matrices

double DensityMatrix::purity() const { return (rho * rho).trace().real(); }

std::vector<double> DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

double DensityMatrix::expectation(const Operator& op) const {
  if (op.dim() != static_cast<std::size_t>(rho.rows())) throw DimensionError("expectation: operator dimension mismatch");
  return (op.matrix() * rho).trace().real();
}

DensityMatrix partial_trace(const StateVector& state, std::span<const std::string> keep) {
  if (keep.empty()) throw LayoutError("partial_trace: keep list is empty");
  SubsystemLayout kept = state.layout().select(keep);
  const auto koff = offsets_for(state.layout(), keep);
  const auto roff = rest_offsets(state.layout(), keep);
  const auto n = static_cast<Eigen::Index>(koff.size());
  // Gather into a (kept x rest) matrix M; then rho = M M^dag.
  Matrix m(n, static_cast<Eigen::Index>(roff.size()));
  for (std::size_t i = 0; i < koff.size(); ++i)
    for (std::size_t r = 0; r < roff.size(); ++r) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) = state[koff[i] + roff[r]];
  return DensityMatrix{std::move(kept), m * m.adjoint()};
}

DensityMatrix partial_trace(const StateVector& state, std::initializer_list<std::string> keep) {
  return partial_trace(state, std::span<const std::string>(keep.begin(), keep.size()));
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.rho.rows() != b.rho.rows()) throw DimensionError("trace_distance: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.rho - b.rho, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// ---------------------------------------------------------------------------
// Unitary completion

Operator complete_isometry(std::span<const Amplitudes> domain, std::span<const Amplitudes> image) {
  if (domain.size() != image.size()) throw BasisError("complete_isometry: domain and image lengths differ");
  if (domain.empty()) throw BasisError("complete_isometry: empty mapping");
  const auto dim = static_cast<std::size_t>(domain.front().size());
  for (const auto& v : image)
    if (static_cast<std::size_t>(v.size()) != dim) throw BasisError("complete_isometry: vector dimensions differ");
  require_orthonormal(domain, tol::orthonormal, "complete_isometry domain");
  require_orthonormal(image, tol::orthonormal, "complete_isometry image");

  const OrthonormalBasis d = complete_basis(domain, dim);
  const OrthonormalBasis im = complete_basis(image, dim);
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix dm(n, n), imm(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    dm.col(k) = d[static_cast<std::size_t>(k)];
    imm.col(k) = im[static_cast<std::size_t>(k)];
  }
  return Operator::unitary(imm * dm.adjoint());
}

Operator complete_isometry(std::span<const StateVector> domain, std::span<const StateVector> image) {
  std::vector<Amplitudes> d, im;
  for (const auto& s : domain) d.push_back(s.amps());
  for (const auto& s : image) im.push_back(s.amps());
  return complete_isometry(d, im);
}

Operator random_unitary(std::size_t dim, RngStream& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = complex(rng.normal(), rng.normal());
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const complex d = r(k, k);
    q.col(k) *= d / std::abs(d);
  }
  return Operator::unitary(std::move(q));
}

StateVector random_state(const SubsystemLayout& layout, RngStream& rng) {
  Amplitudes a(static_cast<Eigen::Index>(layout.total_dim()));
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = complex(rng.normal(), rng.normal());
  return StateVector::normalized(layout, std::move(a));
}

}  // namespace pingpong
