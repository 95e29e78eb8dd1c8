#ifndef QINCOMPAT_ISING_HPP
#define QINCOMPAT_ISING_HPP

#include <optional>
#include <utility>

#include "qincompat/estimation.hpp"
#include "qincompat/types.hpp"

namespace qincompat {

// Transverse-field Ising chain, rotated about z by phi/2. Parameter order is
// (beta, h, phi) throughout; all per-site quantities are intensive (divided
// by the number of modes, or integrated over the Brillouin zone with measure
// dk / 2 pi).

/// Bogoliubov dispersion data of one quasi-momentum.
struct ModeData {
    double k = 0.0;
    double eps = 0.0;    // cos k - h
    double delta = 0.0;  // sin k
    double lambda = 0.0; // sqrt(eps^2 + delta^2)
    double theta = 0.0;  // arccos(eps / lambda), undefined (0) when gapless
    bool gapless = false;
};

ModeData dispersion(double k, double h);

/// Per-mode 3x3 blocks of the classical/quantum Fisher parts and the mean
/// Uhlmann curvature. At a gapless mode all tanh factors vanish and every
/// entry goes to zero, which is the analytic limit.
struct ModeMatrices {
    Eigen::Matrix3d Jc = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d Jq = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d U = Eigen::Matrix3d::Zero();
};

ModeMatrices mode_matrices(double k, double h, double beta);

/// Bloch vector and trace part of the per-mode SLD,
///   m = -d_mu(beta Lambda) hhat - tanh(beta Lambda) d_mu hhat,
///   eta = d_mu(beta Lambda) tanh(beta Lambda / 2),
/// with hhat = (sin t cos phi, sin t sin phi, cos t), t = atan2(delta, eps)
/// so the sign of delta survives for k < 0. mu: 0 = beta, 1 = h, 2 = phi.
/// Throws GaplessModeError when Lambda vanishes.
struct ModeSld {
    Eigen::Vector3d m = Eigen::Vector3d::Zero();
    double eta = 0.0;
};

ModeSld sld_mode(double k, double h, double phi, double beta, int mu);

/// Parameter subset for which R is evaluated. Rows/columns outside the
/// subset are deleted before any inversion.
enum class ParamSet { h_phi, beta_h_phi };

/// One point of the phase diagram. `modes` empty means thermodynamic limit.
struct IsingPoint {
    double h = 0.0;
    double phi = 0.0;
    double beta = 0.0;
    std::optional<int> modes;
};

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-12;
    int max_intervals = 40000;
};

/// Intensive 3x3 matrices of one phase-diagram point.
struct IsingMatrices {
    Eigen::Matrix3d Jc = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d Jq = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d U = Eigen::Matrix3d::Zero();

    Eigen::Matrix3d J() const { return Jc + Jq; }
};

/// (1/M) sum over the M momenta k_n = 2 pi n / M, n in (-M/2, M/2].
/// M must be even and positive.
IsingMatrices finite_sum_matrices(int modes, double h, double beta);

/// Brillouin-zone integral (1/2pi) int dk of the mode matrices, by adaptive
/// quadrature on [1e-12, pi] (the integrand is even in k; the excluded sliver
/// at k = 0 is orders of magnitude below the tolerance and sidesteps the
/// derivative blow-up of the gapless mode at h = 1).
IsingMatrices thermo_limit_matrices(double h, double beta, const QuadOptions& opts = {});

IsingMatrices point_matrices(const IsingPoint& point, const QuadOptions& opts = {});

/// Submodel extraction + incompatibility measure for one point.
EstimationResult evaluate_point(const IsingPoint& point, ParamSet selector,
                                const QuadOptions& opts = {});

/// Extract the selector's rows/columns of a 3x3 (beta, h, phi) matrix.
RMatrix submatrix(const Eigen::Matrix3d& m, ParamSet selector);

/// Closed forms at T = 0 in the thermodynamic limit:
///   Jq = (f_q/4) diag(0, 1/|1-h^2|, 1),  U_{h phi} = g_q / 4,
/// with f_q = 1 for |h|<1, 1/h^2 for |h|>1 and g_q built from complete
/// elliptic integrals K(m), E(m) at m = 4|h|/(1+|h|)^2 (parameter
/// convention; the numeric Brillouin-zone integral pins this choice).
/// Throws CriticalFieldError at |h| = 1 where g_q diverges logarithmically.
struct ZeroTAnalytic {
    Eigen::Matrix3d Jq = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d U = Eigen::Matrix3d::Zero();
    double f_q = 0.0;
    double g_q = 0.0;
    double r0 = 0.0; // R of the (h, phi) submodel, 2 sqrt|1-h^2| g_q / f_q
};

ZeroTAnalytic zero_t_analytic(double h);

/// Leading term of R(T=0) near the critical field,
///   (2 sqrt2 / pi) (log(8/h_tilde) - 2) sqrt(h_tilde),
/// i.e. a log-corrected power law with power 1/2 and log-power 1.
double zero_t_series(double h_tilde);

// Constants of the critical scaling forms.
inline constexpr double kSeriesLogScale = 8.0;  // argument scale inside the log
inline constexpr double kSeriesLogOffset = -2.0;
inline constexpr double kSeriesPower = 0.5;     // nu * Delta_R = 1/2 (Delta_R = -1/2, nu = 1)
inline constexpr double kSeriesLogPower = 1.0;  // Delta-tilde_R = 1

/// Amplitude of the critical zero-T series, 2 sqrt(2) / pi.
double zero_t_series_amplitude();

/// High-temperature limits: R ~ c * beta in the thermodynamic limit, with
///   c = 1/sqrt(2)            for the full (h, phi) model,
///   c = sqrt((1 + h^2) / 2)  for the full (beta, h, phi) model,
///   c = max(1, |h|)          keeping only the quantum Fisher part of (h, phi).
enum class HighTModel { h_phi, beta_h_phi, quantum_h_phi };

double high_t_coefficient(double h, HighTModel model);

/// 4x4 annihilation operators of the fermion pair (d_k, d_{-k}) in the
/// occupation basis |n_k n_{-k}>, Jordan-Wigner ordered.
struct PairOperators {
    CMatrix c1; // d_k
    CMatrix c2; // d_{-k}
};

PairOperators pair_operators();

/// Many-body Hamiltonian of the (k, -k) pair,
///   eps (1 - n_k - n_{-k}) + delta (e^{-i phi} d_k d_{-k} + h.c.),
/// the quadratic form that reproduces the per-mode Bloch convention of
/// sld_mode / mode_matrices.
CMatrix pair_hamiltonian(const PairOperators& ops, double k, double h, double phi);

/// Psi M Psi^dagger for the Nambu spinor Psi = (d_k, d_{-k}^dag) when
/// negative_mode is false, or (d_{-k}, d_k^dag) when true.
CMatrix nambu_form(const PairOperators& ops, const Eigen::Matrix2cd& m, bool negative_mode);

/// Exact-diagonalization check of the per-mode closed forms: Gibbs state of
/// the pair Hamiltonian at (k, h, phi, beta), generic SLD machinery over
/// (beta, h, phi). Returns (J, U); compare against
/// mode_matrices(k) + mode_matrices(-k). Throws DomainError at k in {0, pi}.
std::pair<RMatrix, RMatrix> pair_space_oracle(double k, double h, double phi, double beta);

} // namespace qincompat

#endif
