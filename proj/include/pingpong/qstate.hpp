#pragma once

// Dense state-vector kernel for small composite systems made of labelled
// subsystems of arbitrary dimension.
//
// Amplitudes are stored row-major in layout order: the first subsystem is the
// most significant digit of the flat index.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pingpong/rng.hpp"

namespace pingpong {

using complex = std::complex<double>;
using Amplitudes = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

namespace tol {
inline constexpr double algebraic = 1e-12;
inline constexpr double orthonormal = 1e-10;
}  // namespace tol

struct LayoutError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BasisError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Subsystem {
  std::string label;
  std::size_t dim = 2;

  bool operator==(const Subsystem&) const = default;
};

class SubsystemLayout {
 public:
  SubsystemLayout() = default;
  SubsystemLayout(std::initializer_list<Subsystem> entries);
  explicit SubsystemLayout(std::vector<Subsystem> entries);

  const std::vector<Subsystem>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t total_dim() const;

  bool contains(const std::string& label) const;
  // Position of `label` in the layout; throws LayoutError if absent.
  std::size_t index_of(const std::string& label) const;
  std::size_t dim_of(const std::string& label) const;
  std::vector<std::string> labels() const;
  // Place value of each subsystem in the flat index.
  std::vector<std::size_t> strides() const;

  // Concatenation; throws LayoutError on label collision.
  SubsystemLayout concat(const SubsystemLayout& other) const;
  // The entries for `labels`, in the order given.
  SubsystemLayout select(std::span<const std::string> labels) const;
  // Everything except `labels`, in layout order.
  SubsystemLayout without(std::span<const std::string> labels) const;

  bool operator==(const SubsystemLayout&) const = default;

 private:
  std::vector<Subsystem> entries_;
};

// Flat offsets enumerating the joint index of `labels` (first label most
// significant) inside a vector laid out by `layout`.
std::vector<std::size_t> offsets_for(const SubsystemLayout& layout, std::span<const std::string> labels);

class StateVector {
 public:
  // Throws DimensionError if the length does not match or the norm deviates
  // from one by more than tol::orthonormal; the stored vector is renormalized.
  StateVector(SubsystemLayout layout, Amplitudes amps);

  // Renormalizes any nonzero vector.
  static StateVector normalized(SubsystemLayout layout, Amplitudes amps);
  // Product of computational basis states, one digit per subsystem.
  static StateVector basis(SubsystemLayout layout, std::span<const std::size_t> digits);
  static StateVector basis(SubsystemLayout layout, std::initializer_list<std::size_t> digits);

  const SubsystemLayout& layout() const { return layout_; }
  const Amplitudes& amps() const { return amps_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  complex operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }

  double norm() const { return amps_.norm(); }
  complex inner(const StateVector& other) const;  // <this|other>
  // Squared overlap, insensitive to global phase.
  double fidelity(const StateVector& other) const;

  // Same state with subsystems listed in the given order.
  StateVector reordered(std::span<const std::string> order) const;
  StateVector relabeled(const std::string& from, const std::string& to) const;
  StateVector with_phase(double theta) const;

 private:
  SubsystemLayout layout_;
  Amplitudes amps_;
};

enum class OperatorTag { general, unitary, projector };

class Operator {
 public:
  // Checks the tag: unitary needs ||U^dag U - I||_max < tol::algebraic,
  // projector needs P^2 = P = P^dag within tol::algebraic.
  Operator(Matrix entries, OperatorTag tag);

  static Operator unitary(Matrix entries) { return Operator(std::move(entries), OperatorTag::unitary); }
  static Operator projector(Matrix entries) { return Operator(std::move(entries), OperatorTag::projector); }
  static Operator identity(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  OperatorTag tag() const { return tag_; }
  bool is_unitary() const { return tag_ == OperatorTag::unitary; }

  Operator adjoint() const;
  // For unitaries this is the adjoint; otherwise throws.
  Operator inverse() const;
  Operator pow(unsigned exponent) const;
  // this * rhs; tagged unitary if both are.
  Operator operator*(const Operator& rhs) const;

  double unitarity_defect() const;

 private:
  Matrix m_;
  OperatorTag tag_;
};

// Kronecker product; a is the more significant factor.
Operator kron(const Operator& a, const Operator& b);

using OrthonormalBasis = std::vector<Amplitudes>;

// Maximum entry of |G - I| where G is the Gram matrix of `vectors`.
double gram_deviation(std::span<const Amplitudes> vectors);
void require_orthonormal(std::span<const Amplitudes> vectors, double tolerance, const char* what);
OrthonormalBasis computational_basis(std::size_t dim);

StateVector tensor(const StateVector& a, const StateVector& b);

// Applies `op` to the joint factor of `targets` (first target most
// significant), identity elsewhere. Unitaries preserve the norm; a projector
// result is renormalized and throws DimensionError if it annihilates the state.
StateVector apply(const StateVector& state, const Operator& op, std::span<const std::string> targets);
StateVector apply(const StateVector& state, const Operator& op, std::initializer_list<std::string> targets);

struct MeasurementOutcome {
  std::vector<std::string> labels;
  std::size_t outcome = 0;
  double probability = 0.0;
  StateVector post_state;
};

// Born probabilities of each basis element on the joint factor of `labels`.
std::vector<double> outcome_probabilities(const StateVector& state, std::span<const std::string> labels,
                                          const OrthonormalBasis& basis);

// Projective measurement. Consumes exactly one draw from `rng`.
// Throws BasisError if the basis Gram deviation exceeds tol::orthonormal.
MeasurementOutcome measure(const StateVector& state, std::span<const std::string> labels,
                           const OrthonormalBasis& basis, RngStream& rng);
MeasurementOutcome measure(const StateVector& state, std::initializer_list<std::string> labels,
                           const OrthonormalBasis& basis, RngStream& rng);

// (<bra| (x) I) state, renormalized; the contracted labels leave the layout.
// Throws DimensionError if the result vanishes.
StateVector contract(const StateVector& state, std::span<const std::string> labels, const Amplitudes& bra);

struct DensityMatrix {
  SubsystemLayout layout;
  Matrix rho;

  double trace() const { return rho.trace().real(); }
  double purity() const;
  std::vector<double> eigenvalues() const;
  double expectation(const Operator& op) const;
};

// Reduced state on `keep` (in the order given). Throws LayoutError on an
// empty or unknown keep list.
DensityMatrix partial_trace(const StateVector& state, std::span<const std::string> keep);
DensityMatrix partial_trace(const StateVector& state, std::initializer_list<std::string> keep);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// Extends the partial isometry domain[k] -> image[k] to a unitary. Both lists
// are completed by Gram-Schmidt over canonical basis vectors in ascending
// index order, and the k-th complement vector of the domain is mapped to the
// k-th complement vector of the image.
Operator complete_isometry(std::span<const Amplitudes> domain, std::span<const Amplitudes> image);
Operator complete_isometry(std::span<const StateVector> domain, std::span<const StateVector> image);

// Orthonormal basis of C^dim whose first vectors are `seed` (already
// orthonormal), completed canonically as in complete_isometry.
OrthonormalBasis complete_basis(std::span<const Amplitudes> seed, std::size_t dim);

// Haar-ish random unitary via QR of a complex Gaussian matrix.
Operator random_unitary(std::size_t dim, RngStream& rng);
StateVector random_state(const SubsystemLayout& layout, RngStream& rng);

}  // namespace pingpong
