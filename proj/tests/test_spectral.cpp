#include <doctest.h>

#include <cmath>
#include <random>

#include "qincompat/spectral.hpp"
#include "qincompat/verification.hpp"

using namespace qincompat;

namespace {

CMatrix sigma_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

CMatrix sigma_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

} // namespace

TEST_CASE("eig_hermitian handles the identity") {
    const auto dec = eig_hermitian(HermitianOperator(CMatrix::Identity(2, 2)));
    CHECK(dec.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(dec.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eig_hermitian sorts an already diagonal operator") {
    CMatrix h(2, 2);
    h << 3, 0, 0, -1;
    const auto dec = eig_hermitian(HermitianOperator(h));
    CHECK(dec.eigenvalues[0] == doctest::Approx(-1.0));
    CHECK(dec.eigenvalues[1] == doctest::Approx(3.0));
    CHECK(std::abs(dec.eigenvectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(dec.eigenvectors(0, 1)) == doctest::Approx(1.0));
    // phase convention: pivot entries real positive
    CHECK(dec.eigenvectors(1, 0).real() == doctest::Approx(1.0));
    CHECK(dec.eigenvectors(0, 1).real() == doctest::Approx(1.0));
}

TEST_CASE("eig_hermitian reconstructs a random operator") {
    std::mt19937_64 rng(7);
    const CMatrix h = random_hermitian(rng, 6);
    const auto dec = eig_hermitian(HermitianOperator(h));
    const double scale = h.cwiseAbs().maxCoeff();
    CHECK((dec.reconstruct() - h).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    CHECK((dec.eigenvectors.adjoint() * dec.eigenvectors - CMatrix::Identity(6, 6))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
    for (int i = 1; i < 6; ++i) CHECK(dec.eigenvalues[i] >= dec.eigenvalues[i - 1]);
}

TEST_CASE("eig_hermitian recovers a planted spectrum") {
    std::mt19937_64 rng(11);
    // random unitary from the QR of a random complex matrix
    const CMatrix g = random_hermitian(rng, 5) + Complex(0, 1) * random_hermitian(rng, 5);
    const Eigen::HouseholderQR<CMatrix> qr(g);
    const CMatrix v = qr.householderQ();
    RVector e(5);
    e << -2.0, -0.5, 0.1, 1.3, 4.0;
    const CMatrix h = v * e.asDiagonal() * v.adjoint();
    const auto dec = eig_hermitian(HermitianOperator(0.5 * (h + h.adjoint())));
    for (int i = 0; i < 5; ++i) CHECK(dec.eigenvalues[i] == doctest::Approx(e[i]).epsilon(1e-10));
}

TEST_CASE("eig_hermitian is bit-reproducible") {
    std::mt19937_64 rng(23);
    const CMatrix h = random_hermitian(rng, 7);
    const auto a = eig_hermitian(HermitianOperator(h));
    const auto b = eig_hermitian(HermitianOperator(h));
    CHECK((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.eigenvectors - b.eigenvectors).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("non-Hermitian input is rejected") {
    CMatrix m(2, 2);
    m << 1, 2, 3, 1;
    CHECK_THROWS_AS(HermitianOperator{m}, NotHermitianError);
}

TEST_CASE("thermal_state at beta = 0 is maximally mixed") {
    std::mt19937_64 rng(3);
    const auto ens = thermal_state(HermitianOperator(random_hermitian(rng, 5)), 0.0);
    for (int i = 0; i < 5; ++i) CHECK(ens.probabilities[i] == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("thermal_state approaches the ground-state projector at large beta") {
    CMatrix h(2, 2);
    h << 0, 0, 0, 2.5;
    const auto ens = thermal_state(HermitianOperator(h), 200.0);
    CHECK(ens.probabilities[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ens.probabilities[1] <= 1e-100);
}

TEST_CASE("two-level Boltzmann weights match the hand result") {
    CMatrix h(2, 2);
    h << 0, 0, 0, 1;
    const auto ens = thermal_state(HermitianOperator(h), 1.0);
    const double p0 = 1.0 / (1.0 + std::exp(-1.0));
    CHECK(ens.probabilities[0] == doctest::Approx(p0).epsilon(1e-14));
    CHECK(ens.probabilities[1] == doctest::Approx(1.0 - p0).epsilon(1e-14));
    CHECK(ens.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("thermal_state survives very stiff spectra via the max shift") {
    CMatrix h(2, 2);
    h << 0, 0, 0, 1.0;
    const auto ens = thermal_state(HermitianOperator(h), 1e4);
    CHECK(std::isfinite(ens.partition));
    CHECK(ens.probabilities[0] == doctest::Approx(1.0));
}

TEST_CASE("Gibbs probabilities are invariant under a uniform energy shift") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix h = random_hermitian(rng, 4);
        const double beta = 0.1 + 3.0 * trial / 20.0;
        const auto a = thermal_state(HermitianOperator(h), beta);
        const auto b = thermal_state(
            HermitianOperator(h + 3.7 * CMatrix::Identity(4, 4)), beta);
        CHECK((a.probabilities - b.probabilities).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("numeric derivatives of a linear model are exact") {
    ParametrizedModel model;
    model.n_params = 1;
    model.hamiltonian = [](const RVector& l) { return CMatrix(l[0] * sigma_z()); };
    RVector at(1);
    at << 0.7;
    const auto d = numeric_derivatives(model, at, 1e-5);
    CHECK((d[0].matrix() - sigma_z()).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("numeric derivatives of a quadratic model") {
    ParametrizedModel model;
    model.n_params = 1;
    model.hamiltonian = [](const RVector& l) { return CMatrix(l[0] * l[0] * sigma_x()); };
    RVector at(1);
    at << 1.0;
    const auto d = numeric_derivatives(model, at, 1e-5);
    CHECK((d[0].matrix() - 2.0 * sigma_x()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("numeric derivatives of a constant model vanish") {
    ParametrizedModel model;
    model.n_params = 2;
    model.hamiltonian = [](const RVector&) { return CMatrix(sigma_x()); };
    RVector at(2);
    at << 0.3, -0.2;
    for (const auto& d : numeric_derivatives(model, at, 1e-4))
        CHECK(d.matrix().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("numeric derivative error scales as step squared") {
    ParametrizedModel model;
    model.n_params = 1;
    model.hamiltonian = [](const RVector& l) {
        return CMatrix(std::sin(l[0]) * sigma_x() + std::exp(l[0]) * sigma_z());
    };
    RVector at(1);
    at << 0.4;
    const CMatrix exact = std::cos(0.4) * sigma_x() + std::exp(0.4) * sigma_z();
    const double err1 =
        (numeric_derivatives(model, at, 2e-3)[0].matrix() - exact).cwiseAbs().maxCoeff();
    const double err2 =
        (numeric_derivatives(model, at, 1e-3)[0].matrix() - exact).cwiseAbs().maxCoeff();
    CHECK(err1 / err2 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("numeric derivatives honor the model domain") {
    ParametrizedModel model;
    model.n_params = 1;
    model.hamiltonian = [](const RVector& l) { return CMatrix(l[0] * sigma_z()); };
    model.in_domain = [](const RVector& l) { return l[0] >= 0.0; };
    RVector at(1);
    at << 1e-8;
    CHECK_THROWS_AS(numeric_derivatives(model, at, 1e-5), DomainError);
}
