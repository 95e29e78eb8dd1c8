#ifndef QINCOMPAT_ESTIMATION_HPP
#define QINCOMPAT_ESTIMATION_HPP

#include <utility>
#include <vector>

#include "qincompat/spectral.hpp"
#include "qincompat/types.hpp"

namespace qincompat {

/// Fisher and Uhlmann data of one model point. J = Jc + Jq is the quantum
/// Fisher information matrix, U the mean Uhlmann curvature, R the
/// incompatibility measure ||2i J^{-1} U||_inf in [0, 1].
///
/// Sign convention: U_{mu nu} = (i/4) Tr rho [L_mu, L_nu], i.e. the sign that
/// matches the spectral sum in muc_thermal_spectral. R and det(2U) do not
/// depend on this choice.
struct EstimationResult {
    int n_params = 0;
    RMatrix Jc, Jq, J, U;
    double R = 0.0;
    std::vector<std::string> labels;

    // diagnostics
    int effective_rank = 0;
    bool rank_reduced = false;

    /// Asserts symmetry/antisymmetry/PSD/R-range invariants; throws Error.
    void validate() const;
};

/// Symmetric logarithmic derivatives L_mu solving
/// d_mu rho = (rho L_mu + L_mu rho) / 2 for the Gibbs family
/// rho(lambda) = exp(-beta H(lambda)) / Z. Throws DegenerateBlockError when a
/// degenerate eigenvalue pair carries a coupling |(dH)_ij| > 1e-10, where the
/// perturbative off-diagonal formula breaks down.
std::vector<CMatrix> sld(const ThermalEnsemble& ensemble, const std::vector<HermitianOperator>& dH);

/// J_{mu nu} = (1/2) Tr rho {L_mu, L_nu}.
RMatrix qfim(const ThermalEnsemble& ensemble, const std::vector<CMatrix>& slds);

/// U_{mu nu} = (i/4) Tr rho [L_mu, L_nu]  (real antisymmetric; imaginary
/// residue is checked to be below 1e-12).
RMatrix muc(const ThermalEnsemble& ensemble, const std::vector<CMatrix>& slds);

/// Spectral-sum route for the two QFIM parts:
///   Jc_{mu nu} = sum_i d_mu p_i d_nu p_i / p_i
///   Jq_{mu nu} = 2 sum_{E_i != E_j} (p_i-p_j)^2/(p_i+p_j)
///                  (dH_mu)_ij (dH_nu)_ji / (E_j-E_i)^2
std::pair<RMatrix, RMatrix> qfim_thermal_spectral(const ThermalEnsemble& ensemble,
                                                  const std::vector<HermitianOperator>& dH);

/// Spectral-sum route for the mean Uhlmann curvature:
///   U_{mu nu} = i sum_{E_i != E_j} (p_i-p_j)^3/(p_i+p_j)^2
///                 (dH_mu)_ij (dH_nu)_ji / (E_j-E_i)^2
RMatrix muc_thermal_spectral(const ThermalEnsemble& ensemble,
                             const std::vector<HermitianOperator>& dH);

/// Incompatibility measure R = ||2i J^{-1} U||_inf, evaluated as twice the
/// largest singular value of J^{-1/2} U J^{-1/2}. A singular J is projected
/// onto its eigen-subspace with eigenvalues above 1e-10 ||J||; throws
/// SingularFisherError when that subspace is empty.
double r_measure(const RMatrix& J, const RMatrix& U);

/// Detailed variant of r_measure exposing the rank projection.
struct RMeasureResult {
    double R = 0.0;
    int effective_rank = 0;
    bool rank_reduced = false;
};
RMeasureResult r_measure_detail(const RMatrix& J, const RMatrix& U);

/// Congruence of (J, U) onto the eigen-subspace of J with eigenvalues above
/// 1e-10 ||J||. Leaves invertible inputs untouched; throws
/// SingularFisherError at effective rank zero.
std::pair<RMatrix, RMatrix> project_onto_support(const RMatrix& J, const RMatrix& U);

/// Two-parameter closed form sqrt(det 2U / det J). Throws DimensionError
/// unless both matrices are 2x2.
double r_two_param(const RMatrix& J, const RMatrix& U);

/// Schrodinger-Robertson determinant inequality det J >= det 2U.
struct RobertsonCheck {
    double margin = 0.0; // det J - det 2U
    bool pass = false;   // margin >= -1e-10
};
RobertsonCheck robertson_check(const RMatrix& J, const RMatrix& U);

/// Ztilde = J^{-1} - 2i J^{-1} U J^{-1}, the Holevo-side matrix obtained from
/// the operators Xtilde_mu = sum_nu [J^{-1}]_{mu nu} L_nu. Also reports the
/// eigenvalues of 1 - 2i J^{-1/2} U J^{-1/2} = J^{1/2} Ztilde J^{1/2}, which
/// must be >= -1e-10.
struct TildeZ {
    CMatrix z;
    RVector positivity_eigenvalues;
    double min_eigenvalue = 0.0;
};
TildeZ tilde_z(const RMatrix& J, const RMatrix& U);

/// Upper bound tr(W J^{-1}) R on the gap between the attainable
/// multi-parameter bound and tr(W J^{-1}), together with the intermediate
/// trace-norm term 2 ||sqrt(W) J^{-1} U J^{-1} sqrt(W)||_1 of the bounding
/// chain. `chain_ok` records that the chain ordering held numerically.
struct DiscrepancyBound {
    double bound = 0.0;
    double trace_norm_term = 0.0;
    double middle_term = 0.0;
    bool chain_ok = false;
};
DiscrepancyBound discrepancy_bound(const RMatrix& J, const RMatrix& U, const RMatrix& W);
DiscrepancyBound discrepancy_bound(const RMatrix& J, const RMatrix& U); // W = identity

/// Energy-resolved transition data over non-degenerate level pairs:
/// omega = E_j - E_i and weight_{mu nu} = p_i (dH_mu)_ij (dH_nu)_ji.
struct TransitionTable {
    struct Row {
        int i = 0, j = 0;
        double omega = 0.0;
        CMatrix weight;
    };
    std::vector<Row> rows;
};
TransitionTable transition_table(const ThermalEnsemble& ensemble,
                                 const std::vector<HermitianOperator>& dH);

/// Structure-factor route: the tanh^2(omega beta / 2) moments of the
/// dynamical structure factor, collapsed to discrete sums over the
/// transition table. Agrees with the spectral-sum route to rounding.
std::pair<RMatrix, RMatrix> structure_factor_paths(const ThermalEnsemble& ensemble,
                                                   const std::vector<HermitianOperator>& dH);

/// Leading small-beta behaviour of (Jc, Jq, U) and the induced estimate of R.
/// Relative error against the exact route is O(beta).
struct HighTApproximation {
    RMatrix Jc, Jq, U;
    double r_estimate = 0.0;
    bool outside_recommended_range = false; // beta * spectral range >= 0.1
};
HighTApproximation high_t_approximation(const ThermalEnsemble& ensemble,
                                        const std::vector<HermitianOperator>& dH);

/// Convenience: full pipeline (spectral sums + R) for a model point.
EstimationResult estimate(const ThermalEnsemble& ensemble,
                          const std::vector<HermitianOperator>& dH,
                          std::vector<std::string> labels = {});

} // namespace qincompat

#endif
