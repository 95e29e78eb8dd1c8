#include "qincompat/verification.hpp"

#include <cmath>

namespace qincompat {

namespace {

double rel_dev(const RMatrix& a, const RMatrix& b) {
    const double scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), 1e-300});
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

} // namespace

CMatrix random_hermitian(std::mt19937_64& rng, int dim, double scale) {
    std::normal_distribution<double> gauss(0.0, scale);
    CMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        m(i, i) = Complex(gauss(rng), 0.0);
        for (int j = i + 1; j < dim; ++j) {
            m(i, j) = 0.5 * Complex(gauss(rng), gauss(rng));
            m(j, i) = std::conj(m(i, j));
        }
    }
    return m;
}

RandomModel random_model(std::mt19937_64& rng, int max_dim, int max_params, double beta_lo,
                         double beta_hi) {
    std::uniform_int_distribution<int> dim_dist(2, max_dim);
    std::uniform_int_distribution<int> par_dist(1, max_params);
    std::uniform_real_distribution<double> log_beta(std::log(beta_lo), std::log(beta_hi));

    const int dim = dim_dist(rng);
    const int n = par_dist(rng);
    RandomModel model{HermitianOperator(random_hermitian(rng, dim)), {}, std::exp(log_beta(rng))};
    model.dH.reserve(n);
    for (int mu = 0; mu < n; ++mu) model.dH.emplace_back(random_hermitian(rng, dim));
    return model;
}

CrossPathReport run_cross_path_suite(int models, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    CrossPathReport rep;
    rep.models = models;
    rep.min_r = 1e300;
    rep.min_robertson = 1e300;
    rep.min_tilde_eig = 1e300;

    for (int trial = 0; trial < models; ++trial) {
        const RandomModel model = random_model(rng);
        const int n = static_cast<int>(model.dH.size());
        const ThermalEnsemble ens = thermal_state(model.hamiltonian, model.beta);

        const std::vector<CMatrix> slds = sld(ens, model.dH);
        const RMatrix j_sld = qfim(ens, slds);
        const RMatrix u_sld = muc(ens, slds);

        const auto [jc, jq] = qfim_thermal_spectral(ens, model.dH);
        const RMatrix j_spec = jc + jq;
        const RMatrix u_spec = muc_thermal_spectral(ens, model.dH);

        const auto [jq_sf, u_sf] = structure_factor_paths(ens, model.dH);

        rep.max_j_dev = std::max(rep.max_j_dev, rel_dev(j_sld, j_spec));
        rep.max_u_dev = std::max(rep.max_u_dev, rel_dev(u_sld, u_spec));
        rep.max_sf_dev = std::max(rep.max_sf_dev, std::max(rel_dev(jq_sf, jq), rel_dev(u_sf, u_spec)));

        const RMeasureResult rd = r_measure_detail(j_spec, u_spec);
        const double r = rd.R;
        rep.max_r = std::max(rep.max_r, r);
        rep.min_r = std::min(rep.min_r, r);

        if (n == 2) rep.min_robertson = std::min(rep.min_robertson, robertson_check(j_spec, u_spec).margin);

        // dim = 2 with four parameters is structurally rank-deficient, so the
        // positivity check runs on the support of J
        const auto [j_supp, u_supp] = project_onto_support(j_spec, u_spec);
        const TildeZ tz = tilde_z(j_supp, u_supp);
        rep.min_tilde_eig = std::min(rep.min_tilde_eig, tz.min_eigenvalue);

        // reparametrization lambda = A lambda': dH'_mu = sum_nu A_{nu mu} dH_nu
        RMatrix a(n, n);
        do {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    a(i, j) = (i == j ? 1.0 : 0.0) + 0.4 * unit(rng);
        } while (std::abs(a.determinant()) < 0.05);
        std::vector<HermitianOperator> dh_prime;
        dh_prime.reserve(n);
        for (int mu = 0; mu < n; ++mu) {
            CMatrix acc = CMatrix::Zero(ens.dim(), ens.dim());
            for (int nu = 0; nu < n; ++nu) acc += a(nu, mu) * model.dH[nu].matrix();
            dh_prime.emplace_back(std::move(acc));
        }
        const auto [jc_p, jq_p] = qfim_thermal_spectral(ens, dh_prime);
        const RMatrix u_p = muc_thermal_spectral(ens, dh_prime);
        rep.max_reparam_dev =
            std::max(rep.max_reparam_dev, std::abs(r_measure(jc_p + jq_p, u_p) - r));

        // unbiasedness residue: (1/2) Tr rho {Xtilde_mu, L_nu} = delta_mu_nu,
        // defined only when J is invertible
        if (rd.rank_reduced) continue;
        const RMatrix j_inv = j_spec.inverse();
        const CMatrix rho = ens.density();
        for (int mu = 0; mu < n; ++mu) {
            CMatrix x = CMatrix::Zero(ens.dim(), ens.dim());
            for (int nu = 0; nu < n; ++nu) x += j_inv(mu, nu) * slds[nu];
            for (int nu = 0; nu < n; ++nu) {
                const Complex t = 0.5 * (rho * (x * slds[nu] + slds[nu] * x)).trace();
                const double expect = mu == nu ? 1.0 : 0.0;
                rep.max_unbiased_dev =
                    std::max(rep.max_unbiased_dev, std::abs(t - Complex(expect, 0.0)));
            }
        }
    }
    return rep;
}

PairOracleReport run_pair_oracle_suite(int tuples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> k_dist(0.05, 3.09);
    std::uniform_real_distribution<double> h_dist(-2.0, 2.0);
    std::uniform_real_distribution<double> phi_dist(0.0, 6.28);
    std::uniform_real_distribution<double> log_beta(std::log(0.05), std::log(20.0));

    PairOracleReport rep;
    rep.tuples = tuples;
    for (int trial = 0; trial < tuples; ++trial) {
        const double k = k_dist(rng);
        const double h = h_dist(rng);
        const double phi = phi_dist(rng);
        const double beta = std::exp(log_beta(rng));

        const ModeMatrices plus = mode_matrices(k, h, beta);
        const ModeMatrices minus = mode_matrices(-k, h, beta);
        const Eigen::Matrix3d j_modes = plus.Jc + plus.Jq + minus.Jc + minus.Jq;
        const Eigen::Matrix3d u_modes = plus.U + minus.U;

        const auto [j_pair, u_pair] = pair_space_oracle(k, h, phi, beta);
        rep.max_dev = std::max(rep.max_dev, (j_modes - j_pair).cwiseAbs().maxCoeff());
        rep.max_dev = std::max(rep.max_dev, (u_modes - u_pair).cwiseAbs().maxCoeff());
    }
    return rep;
}

} // namespace qincompat
