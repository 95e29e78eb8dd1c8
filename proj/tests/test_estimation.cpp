#include <doctest.h>

#include <cmath>
#include <random>

#include "qincompat/estimation.hpp"
#include "qincompat/verification.hpp"

using namespace qincompat;

namespace {

CMatrix sigma_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

CMatrix sigma_y() {
    CMatrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

CMatrix sigma_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

CMatrix two_level() {
    CMatrix h(2, 2);
    h << 0, 0, 0, 1;
    return h;
}

// d rho / d lambda by central differences of the Gibbs family
// rho(lambda) = exp(-beta H(lambda)) / Z, the defining object of the SLD.
CMatrix drho_fd(const std::function<CMatrix(double)>& h_of, double at, double beta,
                double step = 1e-6) {
    const CMatrix up = thermal_state(HermitianOperator(h_of(at + step)), beta).density();
    const CMatrix down = thermal_state(HermitianOperator(h_of(at - step)), beta).density();
    return (up - down) / (2.0 * step);
}

} // namespace

TEST_CASE("constant family has a vanishing SLD and zero information") {
    std::mt19937_64 rng(5);
    const auto ens = thermal_state(HermitianOperator(random_hermitian(rng, 4)), 1.3);
    const auto slds = sld(ens, {HermitianOperator(CMatrix::Zero(4, 4))});
    CHECK(slds[0].cwiseAbs().maxCoeff() == 0.0);
    CHECK(qfim(ens, slds)(0, 0) == 0.0);
}

TEST_CASE("maximally mixed state has a vanishing SLD") {
    std::mt19937_64 rng(6);
    const auto ens = thermal_state(HermitianOperator(random_hermitian(rng, 4)), 0.0);
    const auto slds = sld(ens, {HermitianOperator(random_hermitian(rng, 4))});
    for (int i = 0; i < 4; ++i) CHECK(std::abs(slds[0](i, i)) <= 1e-14);
    CHECK(slds[0].cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("SLD solves the Lyapunov equation for a commuting family") {
    const auto h_of = [](double l) { return CMatrix(l * sigma_z()); };
    const auto ens = thermal_state(HermitianOperator(h_of(1.0)), 1.0);
    const auto slds = sld(ens, {HermitianOperator(sigma_z())});
    const CMatrix rho = ens.density();
    const CMatrix resid = drho_fd(h_of, 1.0, 1.0) - 0.5 * (rho * slds[0] + slds[0] * rho);
    CHECK(resid.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("SLD solves the Lyapunov equation for a rotating family") {
    const auto h_of = [](double l) { return CMatrix(two_level() + l * sigma_x()); };
    const double beta = 1.0;
    const auto ens = thermal_state(HermitianOperator(h_of(0.0)), beta);
    const auto slds = sld(ens, {HermitianOperator(sigma_x())});

    // hand result: off-diagonal 2 (p1 - p0), no diagonal part
    const double p0 = ens.probabilities[0];
    const double p1 = ens.probabilities[1];
    CHECK(slds[0](0, 1).real() == doctest::Approx(2.0 * (p1 - p0)).epsilon(1e-12));
    CHECK(std::abs(slds[0](0, 0)) <= 1e-14);

    const CMatrix rho = ens.density();
    const CMatrix resid = drho_fd(h_of, 0.0, beta) - 0.5 * (rho * slds[0] + slds[0] * rho);
    CHECK(resid.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("SLD residual check on a random multi-parameter model") {
    std::mt19937_64 rng(42);
    const CMatrix h0 = random_hermitian(rng, 5);
    const CMatrix g1 = random_hermitian(rng, 5);
    const CMatrix g2 = random_hermitian(rng, 5);
    const double beta = 0.8;
    const auto h_of = [&](const RVector& l) { return CMatrix(h0 + l[0] * g1 + l[1] * g2); };

    RVector at(2);
    at << 0.0, 0.0;
    const auto ens = thermal_state(HermitianOperator(h_of(at)), beta);
    const auto slds = sld(ens, {HermitianOperator(g1), HermitianOperator(g2)});
    const CMatrix rho = ens.density();
    for (int mu = 0; mu < 2; ++mu) {
        const auto h_scan = [&](double x) {
            RVector l = at;
            l[mu] = x;
            return h_of(l);
        };
        const CMatrix resid =
            drho_fd(h_scan, 0.0, beta) - 0.5 * (rho * slds[mu] + slds[mu] * rho);
        CHECK(resid.cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("degenerate pairs with live couplings are refused") {
    const auto ens = thermal_state(HermitianOperator(CMatrix::Identity(2, 2)), 1.0);
    CHECK_THROWS_AS(sld(ens, {HermitianOperator(sigma_x())}), DegenerateBlockError);
    // zero coupling across the degenerate pair is fine
    CHECK_NOTHROW(sld(ens, {HermitianOperator(sigma_z())}));
}

TEST_CASE("two-level quantum Fisher information, single-pair sum by hand") {
    const double beta = 1.0;
    const auto ens = thermal_state(HermitianOperator(two_level()), beta);
    const auto [jc, jq] = qfim_thermal_spectral(ens, {HermitianOperator(sigma_x())});
    // ordered-pair sum: 2 * 2 * (p0-p1)^2/(p0+p1) = 4 tanh(beta/2)^2
    const double expected = 4.0 * std::pow(std::tanh(0.5 * beta), 2);
    CHECK(jq(0, 0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(jc(0, 0) == doctest::Approx(0.0).epsilon(1e-14));

    // and the SLD trace formula agrees
    const auto slds = sld(ens, {HermitianOperator(sigma_x())});
    const RMatrix j = qfim(ens, slds);
    CHECK(j(0, 0) == doctest::Approx(expected).epsilon(1e-12));

    // pure-state limit: QFI of the perturbed ground state is 4
    const auto cold = thermal_state(HermitianOperator(two_level()), 500.0);
    const auto [jc2, jq2] = qfim_thermal_spectral(cold, {HermitianOperator(sigma_x())});
    CHECK(jq2(0, 0) == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("QFIM diagonal is a second moment") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 25; ++trial) {
        const RandomModel model = random_model(rng);
        const auto ens = thermal_state(model.hamiltonian, model.beta);
        const RMatrix j = qfim(ens, sld(ens, model.dH));
        for (int mu = 0; mu < j.rows(); ++mu) CHECK(j(mu, mu) >= -1e-12);
    }
}

TEST_CASE("beta = 0 kills both Fisher parts and the curvature") {
    std::mt19937_64 rng(10);
    const auto ens = thermal_state(HermitianOperator(random_hermitian(rng, 5)), 0.0);
    std::vector<HermitianOperator> dh;
    dh.emplace_back(random_hermitian(rng, 5));
    dh.emplace_back(random_hermitian(rng, 5));
    const auto [jc, jq] = qfim_thermal_spectral(ens, dh);
    CHECK(jc.cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(jq.cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(muc_thermal_spectral(ens, dh).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("commuting derivative contributes no quantum part") {
    const auto ens = thermal_state(HermitianOperator(two_level()), 1.2);
    std::vector<HermitianOperator> dh;
    dh.emplace_back(sigma_z()); // commutes with H
    dh.emplace_back(sigma_x());
    const auto [jc, jq] = qfim_thermal_spectral(ens, dh);
    CHECK(jq(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(jq(0, 1) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(jq(1, 1) > 0.0);
}

TEST_CASE("single-parameter and proportional models have zero curvature") {
    std::mt19937_64 rng(12);
    const auto ens = thermal_state(HermitianOperator(random_hermitian(rng, 4)), 1.0);
    const CMatrix g = random_hermitian(rng, 4);

    const RMatrix u1 = muc(ens, sld(ens, {HermitianOperator(g)}));
    CHECK(u1.cwiseAbs().maxCoeff() == 0.0);

    std::vector<HermitianOperator> dh;
    dh.emplace_back(g);
    dh.emplace_back(CMatrix(2.5 * g));
    const RMatrix u2 = muc_thermal_spectral(ens, dh);
    CHECK(u2.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("cross-path agreement on a quick random batch") {
    const CrossPathReport rep = run_cross_path_suite(100, 20240501);
    CHECK(rep.max_j_dev <= 1e-8);
    CHECK(rep.max_u_dev <= 1e-8);
    CHECK(rep.max_sf_dev <= 1e-10);
    CHECK(rep.min_r >= 0.0);
    CHECK(rep.max_r <= 1.0 + 1e-9);
    CHECK(rep.min_robertson >= -1e-10);
    CHECK(rep.min_tilde_eig >= -1e-10);
    CHECK(rep.max_reparam_dev <= 1e-10);
    CHECK(rep.max_unbiased_dev <= 1e-9);
}

TEST_CASE("r_measure basics") {
    RMatrix j = RMatrix::Identity(2, 2);
    RMatrix u = RMatrix::Zero(2, 2);
    CHECK(r_measure(j, u) == 0.0);

    u(0, 1) = 0.5;
    u(1, 0) = -0.5;
    CHECK(r_measure(j, u) == doctest::Approx(1.0).epsilon(1e-14));

    // diagonal J: R = 2 |u| / sqrt(j1 j2)
    RMatrix jd(2, 2);
    jd << 4.0, 0.0, 0.0, 9.0;
    RMatrix ud = RMatrix::Zero(2, 2);
    ud(0, 1) = 0.3;
    ud(1, 0) = -0.3;
    CHECK(r_measure(jd, ud) == doctest::Approx(2.0 * 0.3 / 6.0).epsilon(1e-14));
}

TEST_CASE("r_measure projects out null directions of J") {
    RMatrix j = RMatrix::Zero(3, 3);
    j(0, 0) = 2.0;
    j(1, 1) = 2.0; // third direction carries no information
    RMatrix u = RMatrix::Zero(3, 3);
    u(0, 1) = 0.4;
    u(1, 0) = -0.4;
    const RMeasureResult r = r_measure_detail(j, u);
    CHECK(r.effective_rank == 2);
    CHECK(r.rank_reduced);
    CHECK(r.R == doctest::Approx(2.0 * 0.4 / 2.0).epsilon(1e-14));

    CHECK_THROWS_AS(r_measure(RMatrix::Zero(2, 2), u.topLeftCorner(2, 2)), SingularFisherError);
}

TEST_CASE("two-parameter determinant form equals the eigenvalue form") {
    CHECK(r_two_param(RMatrix::Identity(2, 2), RMatrix::Zero(2, 2)) == 0.0);

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        RMatrix g(2, 2);
        g << unif(rng), unif(rng), unif(rng), unif(rng);
        const RMatrix j = g * g.transpose() + 0.1 * RMatrix::Identity(2, 2);
        RMatrix u = RMatrix::Zero(2, 2);
        u(0, 1) = unif(rng);
        u(1, 0) = -u(0, 1);
        CHECK(r_two_param(j, u) == doctest::Approx(r_measure(j, u)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(r_two_param(RMatrix::Identity(3, 3), RMatrix::Zero(3, 3)), DimensionError);
}

TEST_CASE("Robertson margin") {
    RMatrix j = RMatrix::Identity(2, 2);
    RMatrix u = RMatrix::Zero(2, 2);
    const auto a = robertson_check(j, u);
    CHECK(a.pass);
    CHECK(a.margin == doctest::Approx(1.0));

    u(0, 1) = 0.5;
    u(1, 0) = -0.5;
    const auto b = robertson_check(j, u); // maximal incompatibility saturates
    CHECK(b.pass);
    CHECK(b.margin == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("tilde-Z reduces to the inverse Fisher matrix for compatible models") {
    RMatrix j(2, 2);
    j << 2.0, 0.3, 0.3, 1.0;
    const TildeZ tz = tilde_z(j, RMatrix::Zero(2, 2));
    CHECK((tz.z.imag()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((tz.z.real() - j.inverse()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("tilde-Z positivity saturates at maximal incompatibility") {
    RMatrix j = RMatrix::Identity(2, 2);
    RMatrix u = RMatrix::Zero(2, 2);
    u(0, 1) = 0.5;
    u(1, 0) = -0.5;
    const TildeZ tz = tilde_z(j, u);
    CHECK(tz.positivity_eigenvalues.minCoeff() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(tz.positivity_eigenvalues.maxCoeff() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("discrepancy bound basics and chain ordering") {
    RMatrix j = RMatrix::Identity(2, 2);
    RMatrix u = RMatrix::Zero(2, 2);
    CHECK(discrepancy_bound(j, u).bound == 0.0);

    u(0, 1) = 0.2;
    u(1, 0) = -0.2;
    const auto with_j_weight = discrepancy_bound(j, u, j);
    CHECK(with_j_weight.bound == doctest::Approx(2.0 * r_measure(j, u)).epsilon(1e-12));
    CHECK(with_j_weight.chain_ok);

    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        RMatrix g(3, 3), wroot(3, 3);
        for (int i = 0; i < 9; ++i) {
            g(i / 3, i % 3) = unif(rng);
            wroot(i / 3, i % 3) = unif(rng);
        }
        const RMatrix jj = g * g.transpose() + 0.2 * RMatrix::Identity(3, 3);
        const RMatrix w = wroot * wroot.transpose() + 0.2 * RMatrix::Identity(3, 3);
        RMatrix uu = RMatrix::Zero(3, 3);
        uu(0, 1) = 0.2 * unif(rng);
        uu(1, 0) = -uu(0, 1);
        uu(0, 2) = 0.2 * unif(rng);
        uu(2, 0) = -uu(0, 2);
        uu(1, 2) = 0.2 * unif(rng);
        uu(2, 1) = -uu(1, 2);
        const auto d = discrepancy_bound(jj, uu, w);
        CHECK(d.chain_ok);
        CHECK(d.trace_norm_term <= d.bound + 1e-10);
    }

    CHECK_THROWS_AS(discrepancy_bound(j, u, RMatrix(-RMatrix::Identity(2, 2))),
                    InvalidWeightError);
}

TEST_CASE("structure-factor route: single-transition identity") {
    // one nondegenerate pair: tanh^2(omega beta / 2) (p0+p1)^2 = (p0-p1)^2
    const double beta = 1.7;
    const auto ens = thermal_state(HermitianOperator(two_level()), beta);
    const double p0 = ens.probabilities[0], p1 = ens.probabilities[1];
    const double lhs = std::pow(std::tanh(0.5 * beta), 2) * std::pow(p0 + p1, 2);
    CHECK(lhs == doctest::Approx(std::pow(p0 - p1, 2)).epsilon(1e-14));

    const auto [jq_sf, u_sf] = structure_factor_paths(ens, {HermitianOperator(sigma_x())});
    const auto [jc, jq] = qfim_thermal_spectral(ens, {HermitianOperator(sigma_x())});
    CHECK(jq_sf(0, 0) == doctest::Approx(jq(0, 0)).epsilon(1e-14));
    CHECK(u_sf.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("structure-factor route vanishes at beta = 0") {
    std::mt19937_64 rng(14);
    const auto ens = thermal_state(HermitianOperator(random_hermitian(rng, 5)), 0.0);
    std::vector<HermitianOperator> dh;
    dh.emplace_back(random_hermitian(rng, 5));
    dh.emplace_back(random_hermitian(rng, 5));
    const auto [jq, u] = structure_factor_paths(ens, dh);
    CHECK(jq.cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(u.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("transition table keeps only resolved pairs") {
    const auto ens = thermal_state(HermitianOperator(CMatrix::Identity(3, 3)), 1.0);
    CHECK(transition_table(ens, {HermitianOperator(CMatrix::Zero(3, 3))}).rows.empty());
}

TEST_CASE("high-temperature approximation error is O(beta)") {
    std::mt19937_64 rng(25);
    const CMatrix h = random_hermitian(rng, 5);
    std::vector<HermitianOperator> dh;
    dh.emplace_back(random_hermitian(rng, 5));
    dh.emplace_back(random_hermitian(rng, 5));

    auto rel_err = [&](double beta) {
        const auto ens = thermal_state(HermitianOperator(h), beta);
        const auto approx = high_t_approximation(ens, dh);
        const auto [jc, jq] = qfim_thermal_spectral(ens, dh);
        const RMatrix u = muc_thermal_spectral(ens, dh);
        const RMatrix j_exact = jc + jq;
        const double ej = (approx.Jc + approx.Jq - j_exact).cwiseAbs().maxCoeff() /
                          j_exact.cwiseAbs().maxCoeff();
        const double eu = (approx.U - u).cwiseAbs().maxCoeff() / u.cwiseAbs().maxCoeff();
        return std::max(ej, eu);
    };

    const double e1 = rel_err(2e-3);
    const double e2 = rel_err(1e-3);
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.2));

    // R itself scales linearly in beta
    const auto r_of = [&](double beta) {
        const auto ens = thermal_state(HermitianOperator(h), beta);
        return high_t_approximation(ens, dh).r_estimate;
    };
    CHECK(r_of(2e-4) / r_of(1e-4) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("high-temperature approximation trivia") {
    std::mt19937_64 rng(26);
    const CMatrix h = random_hermitian(rng, 4);
    const auto ens0 = thermal_state(HermitianOperator(h), 0.0);
    std::vector<HermitianOperator> dh;
    dh.emplace_back(random_hermitian(rng, 4));
    const auto approx0 = high_t_approximation(ens0, dh);
    CHECK(approx0.Jc.cwiseAbs().maxCoeff() == 0.0);
    CHECK(approx0.Jq.cwiseAbs().maxCoeff() == 0.0);
    CHECK(approx0.U.cwiseAbs().maxCoeff() == 0.0);
    CHECK(approx0.r_estimate == 0.0);
    CHECK_FALSE(approx0.outside_recommended_range);

    // commuting family: no off-diagonal elements anywhere
    CMatrix diag_h = CMatrix::Zero(3, 3);
    diag_h(0, 0) = 0.0;
    diag_h(1, 1) = 1.0;
    diag_h(2, 2) = 2.5;
    CMatrix diag_g = CMatrix::Zero(3, 3);
    diag_g(1, 1) = 2.0;
    diag_g(2, 2) = -1.0;
    const auto ens = thermal_state(HermitianOperator(diag_h), 0.01);
    const auto approx = high_t_approximation(ens, {HermitianOperator(diag_g)});
    CHECK(approx.Jq.cwiseAbs().maxCoeff() == 0.0);
    CHECK(approx.U.cwiseAbs().maxCoeff() == 0.0);
    CHECK(approx.Jc(0, 0) > 0.0);

    const auto hot = thermal_state(HermitianOperator(diag_h), 1.0);
    CHECK(high_t_approximation(hot, {HermitianOperator(diag_g)}).outside_recommended_range);
}

TEST_CASE("spectral sums and SLDs survive the zero-temperature proxy") {
    // at beta = 1e4 the excited-state weight underflows to exactly zero
    CMatrix h(3, 3);
    h << 0, 0, 0, 0, 1.0, 0, 0, 0, 2.2;
    std::mt19937_64 rng(61);
    std::vector<HermitianOperator> dh;
    dh.emplace_back(random_hermitian(rng, 3));
    dh.emplace_back(random_hermitian(rng, 3));
    const auto ens = thermal_state(HermitianOperator(h), 1e4);
    CHECK(ens.probabilities[1] == 0.0);

    const auto [jc, jq] = qfim_thermal_spectral(ens, dh);
    const RMatrix u = muc_thermal_spectral(ens, dh);
    CHECK(jq.allFinite());
    CHECK(jc.allFinite());
    CHECK(u.allFinite());

    const auto slds = sld(ens, dh);
    for (const auto& l : slds) CHECK(l.allFinite());
    CHECK((qfim(ens, slds) - (jc + jq)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((muc(ens, slds) - u).cwiseAbs().maxCoeff() <= 1e-8);

    const double r = r_measure(jc + jq, u);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0 + 1e-9);
}

TEST_CASE("J and U transform covariantly under reparametrization") {
    std::mt19937_64 rng(57);
    const CMatrix h = random_hermitian(rng, 5);
    std::vector<HermitianOperator> dh;
    for (int mu = 0; mu < 3; ++mu) dh.emplace_back(random_hermitian(rng, 5));
    const auto ens = thermal_state(HermitianOperator(h), 1.1);
    const auto [jc, jq] = qfim_thermal_spectral(ens, dh);
    const RMatrix j = jc + jq;
    const RMatrix u = muc_thermal_spectral(ens, dh);

    RMatrix a(3, 3);
    a << 1.0, 0.3, -0.2, 0.1, 0.8, 0.4, -0.5, 0.2, 1.2;
    std::vector<HermitianOperator> dh_prime;
    for (int mu = 0; mu < 3; ++mu) {
        CMatrix acc = CMatrix::Zero(5, 5);
        for (int nu = 0; nu < 3; ++nu) acc += a(nu, mu) * dh[nu].matrix();
        dh_prime.emplace_back(std::move(acc));
    }
    const auto [jc_p, jq_p] = qfim_thermal_spectral(ens, dh_prime);
    const RMatrix u_p = muc_thermal_spectral(ens, dh_prime);
    CHECK((jc_p + jq_p - a.transpose() * j * a).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((u_p - a.transpose() * u * a).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(r_measure(jc_p + jq_p, u_p) == doctest::Approx(r_measure(j, u)).epsilon(1e-10));
}

TEST_CASE("estimate() assembles a validated result") {
    std::mt19937_64 rng(31);
    const RandomModel model = random_model(rng);
    const auto ens = thermal_state(model.hamiltonian, model.beta);
    const EstimationResult res = estimate(ens, model.dH, {"a", "b", "c", "d"});
    CHECK_NOTHROW(res.validate());
    CHECK(res.J.isApprox(res.Jc + res.Jq));
    CHECK(res.effective_rank >= 1);
}
