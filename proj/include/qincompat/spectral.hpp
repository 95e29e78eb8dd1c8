#ifndef QINCOMPAT_SPECTRAL_HPP
#define QINCOMPAT_SPECTRAL_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qincompat/types.hpp"

namespace qincompat {

/// Absolute tolerance for H == H^dagger entry checks.
constexpr double kHermitianTol = 1e-12;

/// Largest |H_ij - conj(H_ji)| over all entries.
double hermiticity_error(const CMatrix& m);

/// Dense self-adjoint operator. Validates symmetry on construction and is
/// immutable afterwards, so downstream code can assume exact-enough
/// Hermiticity without re-checking.
class HermitianOperator {
  public:
    explicit HermitianOperator(CMatrix entries, double tol = kHermitianTol);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const CMatrix& matrix() const { return entries_; }

  private:
    CMatrix entries_;
};

/// Eigen-decomposition with ascending eigenvalues, orthonormal columns and a
/// deterministic phase convention (first component above 1e-12 in modulus is
/// made real positive). Ties in the spectrum are ordered lexicographically by
/// the phase-fixed eigenvector entries.
struct SpectralDecomposition {
    RVector eigenvalues;
    CMatrix eigenvectors;

    int dim() const { return static_cast<int>(eigenvalues.size()); }

    /// Spectral norm of the decomposed operator.
    double norm() const;

    /// Two eigenvalues closer than this are treated as degenerate. The
    /// perturbative formulas divide by (E_j - E_i)^2, so the cutoff scales
    /// with the operator norm.
    double gap_tol() const { return 1e-10 * std::max(1.0, norm()); }

    CMatrix reconstruct() const;
};

SpectralDecomposition eig_hermitian(const HermitianOperator& h);

/// Gibbs weights of a Hamiltonian at inverse temperature beta. Probabilities
/// use the max-shifted convention exp(-beta (E_i - E_min)) / Z so that beta
/// up to ~1e4 stays finite; `partition` is the shifted partition sum.
struct ThermalEnsemble {
    SpectralDecomposition decomposition;
    double beta = 0.0;
    RVector probabilities;
    double partition = 0.0;

    int dim() const { return decomposition.dim(); }

    /// Density matrix in the original basis.
    CMatrix density() const;
};

ThermalEnsemble thermal_state(const HermitianOperator& h, double beta);

/// A family of Hamiltonians H(lambda) over n_params real parameters.
/// `derivative`, when set, supplies analytic dH/dlambda_mu; otherwise use
/// numeric_derivatives. `in_domain` (optional) guards finite-difference
/// probes.
struct ParametrizedModel {
    int n_params = 0;
    std::function<CMatrix(const RVector&)> hamiltonian;
    std::function<CMatrix(const RVector&, int)> derivative;
    std::vector<std::string> labels;
    std::function<bool(const RVector&)> in_domain;

    bool has_analytic_derivative() const { return static_cast<bool>(derivative); }
};

/// Central differences (H(l+s e_mu) - H(l-s e_mu)) / 2s, symmetrized to exact
/// Hermiticity. Throws DomainError if a probe point leaves the model domain.
std::vector<HermitianOperator> numeric_derivatives(const ParametrizedModel& model,
                                                   const RVector& point, double step);

/// Parameter derivatives at `point`: analytic when available, otherwise
/// central differences with the given step.
std::vector<HermitianOperator> model_derivatives(const ParametrizedModel& model,
                                                 const RVector& point, double step = 1e-5);

} // namespace qincompat

#endif
