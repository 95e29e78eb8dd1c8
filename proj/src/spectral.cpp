#include "qincompat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qincompat {

double hermiticity_error(const CMatrix& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

HermitianOperator::HermitianOperator(CMatrix entries, double tol) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
        throw NotHermitianError("operator must be square and non-empty");
    const double err = hermiticity_error(entries_);
    if (!(err <= tol))
        throw NotHermitianError("operator is not Hermitian: max asymmetry " + std::to_string(err));
}

double SpectralDecomposition::norm() const {
    return eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
}

CMatrix SpectralDecomposition::reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
}

namespace {

void fix_phase(Eigen::Ref<Eigen::VectorXcd> column) {
    for (Eigen::Index i = 0; i < column.size(); ++i) {
        const double mag = std::abs(column[i]);
        if (mag > 1e-12) {
            column *= std::conj(column[i]) / mag;
            // kill the residual imaginary part of the pivot entry
            column[i] = Complex(std::abs(column[i]), 0.0);
            return;
        }
    }
}

// Lexicographic comparison of phase-fixed eigenvectors, used only to order
// degenerate eigenvalues deterministically.
bool lex_less(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return false;
}

} // namespace

SpectralDecomposition eig_hermitian(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix());
    if (solver.info() != Eigen::Success)
        throw Error("eigen-decomposition failed to converge");

    SpectralDecomposition dec;
    dec.eigenvalues = solver.eigenvalues();
    dec.eigenvectors = solver.eigenvectors();

    for (int i = 0; i < dec.dim(); ++i) fix_phase(dec.eigenvectors.col(i));

    // Solver output is ascending already; re-order degenerate groups by the
    // phase-fixed vectors so the decomposition is reproducible across runs.
    const double tie_tol = dec.gap_tol();
    std::vector<int> order(dec.dim());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (std::abs(dec.eigenvalues[a] - dec.eigenvalues[b]) > tie_tol)
            return dec.eigenvalues[a] < dec.eigenvalues[b];
        return lex_less(dec.eigenvectors.col(a), dec.eigenvectors.col(b));
    });

    SpectralDecomposition out;
    out.eigenvalues.resize(dec.dim());
    out.eigenvectors.resize(dec.dim(), dec.dim());
    for (int i = 0; i < dec.dim(); ++i) {
        out.eigenvalues[i] = dec.eigenvalues[order[i]];
        out.eigenvectors.col(i) = dec.eigenvectors.col(order[i]);
    }
    return out;
}

CMatrix ThermalEnsemble::density() const {
    return decomposition.eigenvectors * probabilities.asDiagonal() *
           decomposition.eigenvectors.adjoint();
}

ThermalEnsemble thermal_state(const HermitianOperator& h, double beta) {
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw DomainError("inverse temperature must be finite and >= 0");

    ThermalEnsemble ens;
    ens.decomposition = eig_hermitian(h);
    ens.beta = beta;

    const RVector& e = ens.decomposition.eigenvalues;
    const double e_min = e.minCoeff();
    // std::exp underflows to an exact 0 for deeply frozen levels (Eigen's
    // vectorized exp clamps at ~exp(-709) instead)
    RVector w(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) w[i] = std::exp(-beta * (e[i] - e_min));
    ens.partition = w.sum();
    ens.probabilities = w / ens.partition;
    return ens;
}

std::vector<HermitianOperator> numeric_derivatives(const ParametrizedModel& model,
                                                   const RVector& point, double step) {
    if (!(step > 0.0)) throw DomainError("finite-difference step must be positive");
    if (!model.hamiltonian) throw Error("model has no Hamiltonian callable");

    std::vector<HermitianOperator> out;
    out.reserve(model.n_params);
    for (int mu = 0; mu < model.n_params; ++mu) {
        RVector up = point, down = point;
        up[mu] += step;
        down[mu] -= step;
        if (model.in_domain && (!model.in_domain(up) || !model.in_domain(down)))
            throw DomainError("finite-difference probe leaves the model domain");
        CMatrix d = (model.hamiltonian(up) - model.hamiltonian(down)) / (2.0 * step);
        // average away the rounding-level asymmetry of the difference
        d = 0.5 * (d + d.adjoint()).eval();
        out.emplace_back(std::move(d));
    }
    return out;
}

std::vector<HermitianOperator> model_derivatives(const ParametrizedModel& model,
                                                 const RVector& point, double step) {
    if (!model.has_analytic_derivative()) return numeric_derivatives(model, point, step);
    std::vector<HermitianOperator> out;
    out.reserve(model.n_params);
    for (int mu = 0; mu < model.n_params; ++mu) out.emplace_back(model.derivative(point, mu));
    return out;
}

} // namespace qincompat
