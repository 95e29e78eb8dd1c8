#include "qincompat/ising.hpp"

#include <array>
#include <cmath>

#include "qincompat/elliptic.hpp"
#include "qincompat/quadrature.hpp"

namespace qincompat {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGaplessTol = 1e-14;
constexpr double kGaplessExclusion = 1e-12;

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

} // namespace

ModeData dispersion(double k, double h) {
    ModeData d;
    d.k = k;
    d.eps = std::cos(k) - h;
    d.delta = std::sin(k);
    d.lambda = std::hypot(d.eps, d.delta);
    d.gapless = d.lambda < kGaplessTol;
    d.theta = d.gapless ? 0.0 : std::acos(std::clamp(d.eps / d.lambda, -1.0, 1.0));
    return d;
}

ModeMatrices mode_matrices(double k, double h, double beta) {
    const ModeData d = dispersion(k, h);
    ModeMatrices m;
    if (d.gapless) return m; // all tanh factors vanish with the gap

    const double lam = d.lambda;
    const double t_half = std::tanh(0.5 * beta * lam);
    const double t_full = std::tanh(beta * lam);
    const double d2 = d.delta * d.delta;

    const double c = 0.25 * (1.0 - t_half * t_half);
    m.Jc(0, 0) = c * lam * lam;
    m.Jc(0, 1) = m.Jc(1, 0) = -c * beta * d.eps;
    m.Jc(1, 1) = c * beta * beta * d.eps * d.eps / (lam * lam);

    const double q = 0.5 * t_half * t_full * d2 / (lam * lam * lam);
    m.Jq(1, 1) = q / lam;
    m.Jq(2, 2) = q * lam;

    const double u = 0.25 * t_half * t_full * t_full * d2 / (lam * lam * lam);
    m.U(1, 2) = u;
    m.U(2, 1) = -u;
    return m;
}

ModeSld sld_mode(double k, double h, double phi, double beta, int mu) {
    if (mu < 0 || mu > 2) throw DimensionError("sld_mode parameter index must be 0, 1 or 2");
    const ModeData d = dispersion(k, h);
    if (d.gapless) throw GaplessModeError("SLD Bloch vector undefined at a gapless mode");

    const double lam = d.lambda;
    const double sin_t = d.delta / lam;
    const double cos_t = d.eps / lam;
    const Eigen::Vector3d hhat(sin_t * std::cos(phi), sin_t * std::sin(phi), cos_t);

    double d_beta_lam = 0.0;          // d_mu (beta Lambda)
    Eigen::Vector3d d_hhat = Eigen::Vector3d::Zero();
    switch (mu) {
        case 0:
            d_beta_lam = lam;
            break;
        case 1:
            d_beta_lam = -beta * cos_t;
            // d_h theta = delta / lambda^2
            d_hhat = (d.delta / (lam * lam)) *
                     Eigen::Vector3d(cos_t * std::cos(phi), cos_t * std::sin(phi), -sin_t);
            break;
        case 2:
            d_hhat = Eigen::Vector3d(-sin_t * std::sin(phi), sin_t * std::cos(phi), 0.0);
            break;
    }

    ModeSld out;
    out.m = -d_beta_lam * hhat - std::tanh(beta * lam) * d_hhat;
    out.eta = d_beta_lam * std::tanh(0.5 * beta * lam);
    return out;
}

IsingMatrices finite_sum_matrices(int modes, double h, double beta) {
    if (modes <= 0 || modes % 2 != 0)
        throw DomainError("mode count must be even and positive");
    IsingMatrices sum;
    for (int n = -modes / 2 + 1; n <= modes / 2; ++n) {
        const double k = 2.0 * kPi * n / modes;
        const ModeMatrices m = mode_matrices(k, h, beta);
        sum.Jc += m.Jc;
        sum.Jq += m.Jq;
        sum.U += m.U;
    }
    sum.Jc /= modes;
    sum.Jq /= modes;
    sum.U /= modes;
    return sum;
}

IsingMatrices thermo_limit_matrices(double h, double beta, const QuadOptions& opts) {
    // Independent entries: Jc(0,0), Jc(0,1), Jc(1,1), Jq(1,1), Jq(2,2), U(1,2).
    std::function<std::array<double, 6>(double)> integrand = [h, beta](double k) {
        const ModeMatrices m = mode_matrices(k, h, beta);
        return std::array<double, 6>{m.Jc(0, 0), m.Jc(0, 1), m.Jc(1, 1),
                                     m.Jq(1, 1), m.Jq(2, 2), m.U(1, 2)};
    };

    const auto q = integrate_adaptive<6>(integrand, kGaplessExclusion, kPi, opts.abs_tol,
                                         opts.rel_tol, opts.max_intervals);

    IsingMatrices out;
    const double norm = 1.0 / kPi; // (1/2pi) * 2 by evenness in k
    out.Jc(0, 0) = norm * q.value[0];
    out.Jc(0, 1) = out.Jc(1, 0) = norm * q.value[1];
    out.Jc(1, 1) = norm * q.value[2];
    out.Jq(1, 1) = norm * q.value[3];
    out.Jq(2, 2) = norm * q.value[4];
    out.U(1, 2) = norm * q.value[5];
    out.U(2, 1) = -out.U(1, 2);
    return out;
}

IsingMatrices point_matrices(const IsingPoint& point, const QuadOptions& opts) {
    if (!(point.beta >= 0.0) || !std::isfinite(point.beta))
        throw DomainError("inverse temperature must be finite and >= 0");
    if (point.modes) return finite_sum_matrices(*point.modes, point.h, point.beta);
    return thermo_limit_matrices(point.h, point.beta, opts);
}

RMatrix submatrix(const Eigen::Matrix3d& m, ParamSet selector) {
    if (selector == ParamSet::beta_h_phi) return m;
    RMatrix out(2, 2);
    out << m(1, 1), m(1, 2), m(2, 1), m(2, 2);
    return out;
}

EstimationResult evaluate_point(const IsingPoint& point, ParamSet selector,
                                const QuadOptions& opts) {
    const IsingMatrices m = point_matrices(point, opts);

    EstimationResult res;
    res.labels = selector == ParamSet::h_phi ? std::vector<std::string>{"h", "phi"}
                                             : std::vector<std::string>{"beta", "h", "phi"};
    res.n_params = static_cast<int>(res.labels.size());
    res.Jc = submatrix(m.Jc, selector);
    res.Jq = submatrix(m.Jq, selector);
    res.J = res.Jc + res.Jq;
    res.U = submatrix(m.U, selector);

    try {
        const RMeasureResult r = r_measure_detail(res.J, res.U);
        res.R = r.R;
        res.effective_rank = r.effective_rank;
        res.rank_reduced = r.rank_reduced;
    } catch (const SingularFisherError&) {
        if (res.U.cwiseAbs().maxCoeff() > 0.0) throw;
        res.R = 0.0;
        res.effective_rank = 0;
        res.rank_reduced = true;
    }
    return res;
}

ZeroTAnalytic zero_t_analytic(double h) {
    const double a = std::abs(h);
    if (std::abs(a - 1.0) < 1e-14)
        throw CriticalFieldError("zero-temperature closed form diverges at |h| = 1");

    ZeroTAnalytic out;
    out.f_q = a < 1.0 ? 1.0 : 1.0 / (a * a);
    if (a == 0.0) {
        out.g_q = 0.5; // limit of the elliptic expression
    } else {
        const double m = 4.0 * a / ((1.0 + a) * (1.0 + a));
        const EllipticKE ke = elliptic_KE(m);
        out.g_q = ((1.0 + a * a) * ke.K - (1.0 + a) * (1.0 + a) * ke.E) /
                  (kPi * a * a * (1.0 + a));
    }

    const double gap2 = std::abs(1.0 - h * h);
    out.Jq(1, 1) = 0.25 * out.f_q / gap2;
    out.Jq(2, 2) = 0.25 * out.f_q;
    out.U(1, 2) = 0.25 * out.g_q;
    out.U(2, 1) = -out.U(1, 2);

    RMatrix j2(2, 2), u2(2, 2);
    j2 << out.Jq(1, 1), 0.0, 0.0, out.Jq(2, 2);
    u2 << 0.0, out.U(1, 2), -out.U(1, 2), 0.0;
    out.r0 = r_measure(j2, u2);
    return out;
}

double zero_t_series_amplitude() { return 2.0 * std::sqrt(2.0) / kPi; }

double zero_t_series(double h_tilde) {
    if (!(h_tilde > 0.0 && h_tilde < 1.0))
        throw DomainError("series argument must lie in (0, 1)");
    return zero_t_series_amplitude() *
           (std::log(kSeriesLogScale / h_tilde) + kSeriesLogOffset) *
           std::pow(h_tilde, kSeriesPower);
}

double high_t_coefficient(double h, HighTModel model) {
    switch (model) {
        case HighTModel::h_phi:
            return 1.0 / std::sqrt(2.0);
        case HighTModel::beta_h_phi:
            return std::sqrt(0.5 * (1.0 + h * h));
        case HighTModel::quantum_h_phi:
            // sqrt(<delta^2> / <delta^2 / lambda^2>) over the zone
            return std::max(1.0, std::abs(h));
    }
    throw DomainError("unknown high-temperature model selector");
}

PairOperators pair_operators() {
    CMatrix lower(2, 2), id2(2, 2), sz(2, 2);
    lower << 0, 1, 0, 0;
    id2 << 1, 0, 0, 1;
    sz << 1, 0, 0, -1;
    PairOperators ops;
    ops.c1 = kron(lower, id2);
    ops.c2 = kron(sz, lower);
    return ops;
}

CMatrix pair_hamiltonian(const PairOperators& ops, double k, double h, double phi) {
    const ModeData d = dispersion(k, h);
    const CMatrix id = CMatrix::Identity(4, 4);
    const CMatrix number = ops.c1.adjoint() * ops.c1 + ops.c2.adjoint() * ops.c2;
    const Complex pair_phase = std::exp(Complex(0.0, -phi));
    const CMatrix pairing = ops.c1 * ops.c2;
    return d.eps * (id - number) + d.delta * (pair_phase * pairing +
                                              std::conj(pair_phase) * pairing.adjoint());
}

CMatrix nambu_form(const PairOperators& ops, const Eigen::Matrix2cd& m, bool negative_mode) {
    const CMatrix& a = negative_mode ? ops.c2 : ops.c1;
    const CMatrix& b = negative_mode ? ops.c1 : ops.c2;
    // Psi = (a, b^dag): sum_{rs} Psi_r M_rs Psi_s^dag
    return m(0, 0) * a * a.adjoint() + m(0, 1) * a * b +
           m(1, 0) * b.adjoint() * a.adjoint() + m(1, 1) * b.adjoint() * b;
}

std::pair<RMatrix, RMatrix> pair_space_oracle(double k, double h, double phi, double beta) {
    const double folded = std::abs(std::remainder(k, kPi));
    if (folded < 1e-12 || std::abs(folded - kPi) < 1e-12)
        throw DomainError("pair-space oracle needs k away from 0 and pi");

    const PairOperators ops = pair_operators();
    const CMatrix id = CMatrix::Identity(4, 4);
    const CMatrix number = ops.c1.adjoint() * ops.c1 + ops.c2.adjoint() * ops.c2;
    const ModeData d = dispersion(k, h);

    // rho = exp(-beta H(h, phi)) / Z handled as the generator G = beta H at
    // unit inverse temperature, so beta itself becomes a model parameter.
    const CMatrix hmat = pair_hamiltonian(ops, k, h, phi);
    const CMatrix pairing = ops.c1 * ops.c2;
    const Complex i_unit(0.0, 1.0);
    const Complex phase = std::exp(Complex(0.0, -phi));

    std::vector<HermitianOperator> dG;
    dG.emplace_back(hmat);                      // d/d beta
    dG.emplace_back(CMatrix(-beta * (id - number))); // d/d h
    dG.emplace_back(CMatrix(beta * d.delta *
                            (-i_unit * phase * pairing +
                             i_unit * std::conj(phase) * pairing.adjoint()))); // d/d phi

    // Spectral-sum route: stays defined at beta = 0, where the generator
    // beta H is fully degenerate and the SLD off-diagonal formula is not.
    const ThermalEnsemble ens = thermal_state(HermitianOperator(beta * hmat), 1.0);
    const auto [jc, jq] = qfim_thermal_spectral(ens, dG);
    return {jc + jq, muc_thermal_spectral(ens, dG)};
}

} // namespace qincompat
