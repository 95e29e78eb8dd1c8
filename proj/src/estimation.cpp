#include "qincompat/estimation.hpp"

#include <algorithm>
#include <cmath>

namespace qincompat {

namespace {

constexpr double kDegenerateCouplingTol = 1e-10;

struct EigenFrame {
    const ThermalEnsemble& ens;
    std::vector<CMatrix> dH; // derivative operators in the H eigenbasis

    EigenFrame(const ThermalEnsemble& ensemble, const std::vector<HermitianOperator>& ops)
        : ens(ensemble) {
        const CMatrix& v = ens.decomposition.eigenvectors;
        dH.reserve(ops.size());
        for (const auto& op : ops) {
            if (op.dim() != ens.dim())
                throw DimensionError("derivative operator dimension does not match ensemble");
            dH.push_back(v.adjoint() * op.matrix() * v);
        }
    }

    int dim() const { return ens.dim(); }
    int n_params() const { return static_cast<int>(dH.size()); }

    // d_mu p_i = -beta p_i [ (dH)_ii - sum_m p_m (dH)_mm ]
    RVector dp(int mu) const {
        const RVector& p = ens.probabilities;
        const CMatrix& a = dH[mu];
        double mean = 0.0;
        for (int i = 0; i < dim(); ++i) mean += p[i] * a(i, i).real();
        RVector out(dim());
        for (int i = 0; i < dim(); ++i) out[i] = -ens.beta * p[i] * (a(i, i).real() - mean);
        return out;
    }
};

RMatrix symmetric_sqrt(const RMatrix& m, bool inverse) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(m);
    if (es.info() != Eigen::Success) throw Error("symmetric eigensolve failed");
    const RVector& lam = es.eigenvalues();
    const double scale = lam.cwiseAbs().maxCoeff();
    const double tol = 1e-10 * scale;
    RVector d(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam[i] <= tol)
            throw SingularFisherError("matrix is singular within rank tolerance");
        d[i] = inverse ? 1.0 / std::sqrt(lam[i]) : std::sqrt(lam[i]);
    }
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

double trace_norm(const RMatrix& m) {
    Eigen::JacobiSVD<RMatrix> svd(m);
    return svd.singularValues().sum();
}

void check_common(const RMatrix& J, const RMatrix& U) {
    if (J.rows() != J.cols() || U.rows() != U.cols() || J.rows() != U.rows())
        throw DimensionError("J and U must be square matrices of equal size");
}

} // namespace

void EstimationResult::validate() const {
    auto scale = [](const RMatrix& m) { return std::max(1e-300, m.cwiseAbs().maxCoeff()); };
    if ((J - J.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale(J))
        throw Error("J is not symmetric");
    if ((U + U.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw Error("U is not antisymmetric");
    Eigen::SelfAdjointEigenSolver<RMatrix> es(J);
    const double jnorm = es.eigenvalues().cwiseAbs().maxCoeff();
    if (es.eigenvalues().minCoeff() < -1e-10 * jnorm)
        throw Error("J has an eigenvalue below the PSD tolerance");
    if (R < 0.0 || R > 1.0 + 1e-9) throw Error("R is outside [0, 1]");
}

std::vector<CMatrix> sld(const ThermalEnsemble& ensemble,
                         const std::vector<HermitianOperator>& dH) {
    const EigenFrame frame(ensemble, dH);
    const RVector& p = ensemble.probabilities;
    const RVector& e = ensemble.decomposition.eigenvalues;
    const CMatrix& v = ensemble.decomposition.eigenvectors;
    const double gap_tol = ensemble.decomposition.gap_tol();
    const int d = frame.dim();

    std::vector<CMatrix> out;
    out.reserve(frame.n_params());
    for (int mu = 0; mu < frame.n_params(); ++mu) {
        const CMatrix& a = frame.dH[mu];
        double mean = 0.0;
        for (int i = 0; i < d; ++i) mean += p[i] * a(i, i).real();
        CMatrix l = CMatrix::Zero(d, d);
        for (int i = 0; i < d; ++i) {
            // d_mu p_i / p_i without the 0/0 of frozen levels
            l(i, i) = -ensemble.beta * (a(i, i).real() - mean);
            for (int j = i + 1; j < d; ++j) {
                const double gap = e[j] - e[i];
                if (std::abs(gap) <= gap_tol) {
                    if (std::abs(a(i, j)) > kDegenerateCouplingTol)
                        throw DegenerateBlockError(
                            "derivative couples a degenerate eigenvalue pair");
                    continue;
                }
                const double denom = p[i] + p[j];
                if (denom > 1e-300) {
                    // d_mu rho_ij = (dH)_ij (p_j - p_i) / (E_j - E_i)
                    const Complex drho = a(i, j) * (p[j] - p[i]) / gap;
                    l(i, j) = 2.0 * drho / denom;
                } else {
                    // continuous limit once both weights underflow:
                    // (p_j - p_i)/(p_i + p_j) -> -tanh(beta gap / 2)
                    l(i, j) = -2.0 * a(i, j) * std::tanh(0.5 * ensemble.beta * gap) / gap;
                }
                l(j, i) = std::conj(l(i, j));
            }
        }
        out.push_back(v * l * v.adjoint());
    }
    return out;
}

RMatrix qfim(const ThermalEnsemble& ensemble, const std::vector<CMatrix>& slds) {
    const int n = static_cast<int>(slds.size());
    const CMatrix rho = ensemble.density();
    RMatrix j(n, n);
    for (int mu = 0; mu < n; ++mu)
        for (int nu = mu; nu < n; ++nu) {
            const Complex t = (rho * slds[mu] * slds[nu]).trace();
            j(mu, nu) = t.real();
            j(nu, mu) = t.real();
        }
    return j;
}

RMatrix muc(const ThermalEnsemble& ensemble, const std::vector<CMatrix>& slds) {
    const int n = static_cast<int>(slds.size());
    const CMatrix rho = ensemble.density();
    RMatrix u = RMatrix::Zero(n, n);
    for (int mu = 0; mu < n; ++mu)
        for (int nu = mu + 1; nu < n; ++nu) {
            // (i/4) Tr rho [L_mu, L_nu] = -(1/2) Im Tr rho L_mu L_nu
            const Complex t = (rho * slds[mu] * slds[nu]).trace();
            u(mu, nu) = -0.5 * t.imag();
            u(nu, mu) = -u(mu, nu);
        }
    return u;
}

std::pair<RMatrix, RMatrix> qfim_thermal_spectral(const ThermalEnsemble& ensemble,
                                                  const std::vector<HermitianOperator>& dH) {
    const EigenFrame frame(ensemble, dH);
    const RVector& p = ensemble.probabilities;
    const RVector& e = ensemble.decomposition.eigenvalues;
    const double gap_tol = ensemble.decomposition.gap_tol();
    const int n = frame.n_params();
    const int d = frame.dim();

    std::vector<RVector> dps;
    dps.reserve(n);
    for (int mu = 0; mu < n; ++mu) dps.push_back(frame.dp(mu));

    RMatrix jc = RMatrix::Zero(n, n);
    RMatrix jq = RMatrix::Zero(n, n);
    for (int mu = 0; mu < n; ++mu)
        for (int nu = mu; nu < n; ++nu) {
            double c = 0.0;
            for (int i = 0; i < d; ++i)
                if (p[i] > 1e-300) c += dps[mu][i] * dps[nu][i] / p[i];
            double q = 0.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    if (i == j) continue;
                    const double gap = e[j] - e[i];
                    if (std::abs(gap) <= gap_tol) continue;
                    if (p[i] + p[j] < 1e-300) continue; // frozen pair contributes 0
                    const double w = (p[i] - p[j]) * (p[i] - p[j]) / (p[i] + p[j]) / (gap * gap);
                    q += 2.0 * w * (frame.dH[mu](i, j) * frame.dH[nu](j, i)).real();
                }
            jc(mu, nu) = jc(nu, mu) = c;
            jq(mu, nu) = jq(nu, mu) = q;
        }
    return {jc, jq};
}

RMatrix muc_thermal_spectral(const ThermalEnsemble& ensemble,
                             const std::vector<HermitianOperator>& dH) {
    const EigenFrame frame(ensemble, dH);
    const RVector& p = ensemble.probabilities;
    const RVector& e = ensemble.decomposition.eigenvalues;
    const double gap_tol = ensemble.decomposition.gap_tol();
    const int n = frame.n_params();
    const int d = frame.dim();

    RMatrix u = RMatrix::Zero(n, n);
    for (int mu = 0; mu < n; ++mu)
        for (int nu = mu + 1; nu < n; ++nu) {
            Complex z(0.0, 0.0);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    if (i == j) continue;
                    const double gap = e[j] - e[i];
                    if (std::abs(gap) <= gap_tol) continue;
                    const double diff = p[i] - p[j];
                    const double sum = p[i] + p[j];
                    if (sum < 1e-300) continue; // frozen pair contributes 0
                    z += diff * diff * diff / (sum * sum) / (gap * gap) *
                         frame.dH[mu](i, j) * frame.dH[nu](j, i);
                }
            const Complex val = Complex(0.0, 1.0) * z;
            if (std::abs(val.imag()) > 1e-12 * std::max(1.0, std::abs(val.real())))
                throw Error("mean Uhlmann curvature has a non-real residue");
            u(mu, nu) = val.real();
            u(nu, mu) = -val.real();
        }
    return u;
}

RMeasureResult r_measure_detail(const RMatrix& J, const RMatrix& U) {
    check_common(J, U);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(J);
    if (es.info() != Eigen::Success) throw Error("eigensolve of J failed");
    const RVector& lam = es.eigenvalues();
    const double jnorm = lam.cwiseAbs().maxCoeff();
    const double rank_tol = 1e-10 * jnorm;

    std::vector<int> kept;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        if (lam[i] > rank_tol && lam[i] > 0.0) kept.push_back(static_cast<int>(i));
    if (kept.empty())
        throw SingularFisherError("Fisher matrix has effective rank zero");

    const int r = static_cast<int>(kept.size());
    RMatrix vk(J.rows(), r);
    RVector inv_sqrt(r);
    for (int c = 0; c < r; ++c) {
        vk.col(c) = es.eigenvectors().col(kept[c]);
        inv_sqrt[c] = 1.0 / std::sqrt(lam[kept[c]]);
    }

    RMatrix k = inv_sqrt.asDiagonal() * (vk.transpose() * U * vk) * inv_sqrt.asDiagonal();
    k = 0.5 * (k - k.transpose()).eval();

    // K is real skew; eigenvalues of -K^2 are the squared singular values.
    Eigen::SelfAdjointEigenSolver<RMatrix> es2(RMatrix(-k * k));
    const double top = std::max(0.0, es2.eigenvalues().maxCoeff());

    RMeasureResult out;
    out.R = 2.0 * std::sqrt(top);
    out.effective_rank = r;
    out.rank_reduced = r < J.rows();
    return out;
}

double r_measure(const RMatrix& J, const RMatrix& U) { return r_measure_detail(J, U).R; }

std::pair<RMatrix, RMatrix> project_onto_support(const RMatrix& J, const RMatrix& U) {
    check_common(J, U);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(J);
    const RVector& lam = es.eigenvalues();
    const double rank_tol = 1e-10 * lam.cwiseAbs().maxCoeff();
    std::vector<int> kept;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        if (lam[i] > rank_tol && lam[i] > 0.0) kept.push_back(static_cast<int>(i));
    if (kept.empty()) throw SingularFisherError("Fisher matrix has effective rank zero");
    if (static_cast<Eigen::Index>(kept.size()) == J.rows()) return {J, U};

    RMatrix vk(J.rows(), kept.size());
    for (std::size_t c = 0; c < kept.size(); ++c) vk.col(c) = es.eigenvectors().col(kept[c]);
    RMatrix u_proj = vk.transpose() * U * vk;
    u_proj = 0.5 * (u_proj - u_proj.transpose()).eval();
    return {vk.transpose() * J * vk, u_proj};
}

double r_two_param(const RMatrix& J, const RMatrix& U) {
    check_common(J, U);
    if (J.rows() != 2) throw DimensionError("two-parameter form requires 2x2 matrices");
    const double det_j = J.determinant();
    if (!(det_j > 0.0)) throw SingularFisherError("det J must be positive");
    const double det_2u = 4.0 * U(0, 1) * U(0, 1);
    return std::sqrt(det_2u / det_j);
}

RobertsonCheck robertson_check(const RMatrix& J, const RMatrix& U) {
    check_common(J, U);
    const double det_j = J.determinant();
    const double det_2u = (2.0 * U).determinant();
    RobertsonCheck out;
    out.margin = det_j - det_2u;
    out.pass = out.margin >= -1e-10;
    return out;
}

TildeZ tilde_z(const RMatrix& J, const RMatrix& U) {
    check_common(J, U);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(J);
    if (es.info() != Eigen::Success) throw Error("eigensolve of J failed");
    const RVector& lam = es.eigenvalues();
    const double tol = 1e-10 * lam.cwiseAbs().maxCoeff();
    RVector inv_sqrt(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam[i] <= tol)
            throw SingularFisherError("tilde-Z requires an invertible Fisher matrix");
        inv_sqrt[i] = 1.0 / std::sqrt(lam[i]);
    }
    const RMatrix& v = es.eigenvectors();

    // K = J^{-1/2} U J^{-1/2} assembled in the eigenbasis and antisymmetrized,
    // so I - 2iK stays exactly Hermitian under rounding
    RMatrix k = inv_sqrt.asDiagonal() * (v.transpose() * U * v) * inv_sqrt.asDiagonal();
    k = 0.5 * (k - k.transpose()).eval();

    TildeZ out;
    const RMatrix z_real = v * lam.cwiseInverse().asDiagonal() * v.transpose();
    const RMatrix z_imag =
        -2.0 * (v * inv_sqrt.asDiagonal() * k * inv_sqrt.asDiagonal() * v.transpose());
    out.z = z_real.cast<Complex>() + Complex(0.0, 1.0) * z_imag.cast<Complex>();

    const CMatrix m =
        CMatrix::Identity(J.rows(), J.cols()) - Complex(0.0, 2.0) * k.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<CMatrix> es2(m);
    out.positivity_eigenvalues = es2.eigenvalues();
    out.min_eigenvalue = es2.eigenvalues().minCoeff();
    if (out.min_eigenvalue < -1e-10)
        throw Error("tilde-Z positivity violated beyond tolerance");
    return out;
}

DiscrepancyBound discrepancy_bound(const RMatrix& J, const RMatrix& U, const RMatrix& W) {
    check_common(J, U);
    if (W.rows() != J.rows() || W.cols() != J.cols())
        throw DimensionError("weight matrix dimension mismatch");
    if ((W - W.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, W.cwiseAbs().maxCoeff()))
        throw InvalidWeightError("weight matrix must be symmetric");
    RMatrix sqrt_w;
    try {
        sqrt_w = symmetric_sqrt(W, /*inverse=*/false);
    } catch (const SingularFisherError&) {
        throw InvalidWeightError("weight matrix must be positive definite");
    }

    const RMatrix j_inv_sqrt = symmetric_sqrt(J, /*inverse=*/true);
    const RMatrix j_inv = j_inv_sqrt * j_inv_sqrt;

    DiscrepancyBound out;
    out.trace_norm_term = 2.0 * trace_norm(sqrt_w * j_inv * U * j_inv * sqrt_w);
    out.middle_term = 2.0 * trace_norm(j_inv_sqrt * W * j_inv * U * j_inv_sqrt);
    out.bound = (W * j_inv).trace() * r_measure(J, U);
    const double slack = 1e-10 * std::max(1.0, std::abs(out.bound));
    out.chain_ok = out.trace_norm_term <= out.middle_term + slack &&
                   out.middle_term <= out.bound + slack;
    return out;
}

DiscrepancyBound discrepancy_bound(const RMatrix& J, const RMatrix& U) {
    return discrepancy_bound(J, U, RMatrix::Identity(J.rows(), J.cols()));
}

TransitionTable transition_table(const ThermalEnsemble& ensemble,
                                 const std::vector<HermitianOperator>& dH) {
    const EigenFrame frame(ensemble, dH);
    const RVector& p = ensemble.probabilities;
    const RVector& e = ensemble.decomposition.eigenvalues;
    const double gap_tol = ensemble.decomposition.gap_tol();
    const int n = frame.n_params();
    const int d = frame.dim();

    TransitionTable table;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (i == j) continue;
            const double omega = e[j] - e[i];
            if (std::abs(omega) <= gap_tol) continue;
            TransitionTable::Row row;
            row.i = i;
            row.j = j;
            row.omega = omega;
            row.weight = CMatrix(n, n);
            for (int mu = 0; mu < n; ++mu)
                for (int nu = 0; nu < n; ++nu)
                    row.weight(mu, nu) = p[i] * frame.dH[mu](i, j) * frame.dH[nu](j, i);
            table.rows.push_back(std::move(row));
        }
    return table;
}

std::pair<RMatrix, RMatrix> structure_factor_paths(const ThermalEnsemble& ensemble,
                                                   const std::vector<HermitianOperator>& dH) {
    const TransitionTable table = transition_table(ensemble, dH);
    const int n = static_cast<int>(dH.size());
    const double beta = ensemble.beta;

    CMatrix jq = CMatrix::Zero(n, n);
    CMatrix u = CMatrix::Zero(n, n);
    for (const auto& row : table.rows) {
        const double t = std::tanh(0.5 * beta * row.omega);
        const double factor = t * t / (row.omega * row.omega);
        const CMatrix sym = 0.5 * (row.weight + row.weight.transpose());
        const CMatrix skew = 0.5 * (row.weight - row.weight.transpose());
        jq += 4.0 * factor * sym;
        u += Complex(0.0, 2.0) * factor * skew;
    }

    const double scale_q = std::max(1.0, jq.cwiseAbs().maxCoeff());
    const double scale_u = std::max(1.0, u.cwiseAbs().maxCoeff());
    if (jq.imag().cwiseAbs().maxCoeff() > 1e-12 * scale_q ||
        u.imag().cwiseAbs().maxCoeff() > 1e-12 * scale_u)
        throw Error("structure-factor sums left a non-real residue");
    return {jq.real(), u.real()};
}

HighTApproximation high_t_approximation(const ThermalEnsemble& ensemble,
                                        const std::vector<HermitianOperator>& dH) {
    const EigenFrame frame(ensemble, dH);
    const RVector& p = ensemble.probabilities;
    const RVector& e = ensemble.decomposition.eigenvalues;
    const double gap_tol = ensemble.decomposition.gap_tol();
    const double beta = ensemble.beta;
    const int n = frame.n_params();
    const int d = frame.dim();

    HighTApproximation out;
    out.outside_recommended_range = beta * (e.maxCoeff() - e.minCoeff()) >= 0.1;
    out.Jc = RMatrix::Zero(n, n);
    out.Jq = RMatrix::Zero(n, n);
    out.U = RMatrix::Zero(n, n);

    std::vector<RVector> diag(n);
    RVector mean = RVector::Zero(n);
    for (int mu = 0; mu < n; ++mu) {
        diag[mu] = frame.dH[mu].diagonal().real();
        mean[mu] = p.dot(diag[mu]);
    }

    for (int mu = 0; mu < n; ++mu)
        for (int nu = mu; nu < n; ++nu) {
            double c = 0.0;
            for (int i = 0; i < d; ++i) c += p[i] * diag[mu][i] * diag[nu][i];
            out.Jc(mu, nu) = out.Jc(nu, mu) = beta * beta * (c - mean[mu] * mean[nu]);

            double q = 0.0;
            Complex z(0.0, 0.0);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    if (i == j || std::abs(e[j] - e[i]) <= gap_tol) continue;
                    const Complex x = frame.dH[mu](i, j) * frame.dH[nu](j, i);
                    q += x.real();
                    z += (e[i] - e[j]) * x;
                }
            out.Jq(mu, nu) = out.Jq(nu, mu) = beta * beta / d * q;
            if (nu > mu) {
                const double u = beta * beta * beta / (4.0 * d) * z.imag();
                out.U(mu, nu) = u;
                out.U(nu, mu) = -u;
            }
        }

    if (out.U.cwiseAbs().maxCoeff() == 0.0) {
        out.r_estimate = 0.0;
    } else {
        out.r_estimate = r_measure(out.Jc + out.Jq, out.U);
    }
    return out;
}

EstimationResult estimate(const ThermalEnsemble& ensemble,
                          const std::vector<HermitianOperator>& dH,
                          std::vector<std::string> labels) {
    EstimationResult res;
    res.n_params = static_cast<int>(dH.size());
    res.labels = std::move(labels);
    auto [jc, jq] = qfim_thermal_spectral(ensemble, dH);
    res.Jc = std::move(jc);
    res.Jq = std::move(jq);
    res.J = res.Jc + res.Jq;
    res.U = muc_thermal_spectral(ensemble, dH);
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

} // namespace qincompat
