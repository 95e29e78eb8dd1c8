#ifndef QINCOMPAT_VERIFICATION_HPP
#define QINCOMPAT_VERIFICATION_HPP

#include <cstdint>
#include <random>

#include "qincompat/estimation.hpp"
#include "qincompat/ising.hpp"

namespace qincompat {

/// Random dense Hermitian matrix with entries of order `scale`.
CMatrix random_hermitian(std::mt19937_64& rng, int dim, double scale = 1.0);

/// Random thermal estimation model: Hamiltonian, derivative operators and an
/// inverse temperature drawn log-uniformly from [beta_lo, beta_hi].
struct RandomModel {
    HermitianOperator hamiltonian;
    std::vector<HermitianOperator> dH;
    double beta = 1.0;
};
RandomModel random_model(std::mt19937_64& rng, int max_dim = 8, int max_params = 4,
                         double beta_lo = 0.01, double beta_hi = 10.0);

/// Agreement of the three computation routes (SLD trace, spectral sums,
/// structure-factor sums) over random models, plus the bound diagnostics the
/// same sweep yields. Deviations are elementwise and relative to the largest
/// matrix entry of the pair being compared.
struct CrossPathReport {
    int models = 0;
    double max_j_dev = 0.0;       // SLD route vs spectral sums, J
    double max_u_dev = 0.0;       // SLD route vs spectral sums, U
    double max_sf_dev = 0.0;      // structure-factor route vs spectral sums
    double max_r = 0.0;           // largest R seen
    double min_r = 0.0;           // most negative R seen (should stay >= 0)
    double min_robertson = 0.0;   // min det J - det 2U over N = 2 models
    double min_tilde_eig = 0.0;   // min eigenvalue of 1 - 2i J^-1/2 U J^-1/2
    double max_reparam_dev = 0.0; // |R(A-model) - R(model)|
    double max_unbiased_dev = 0.0;// |(1/2) Tr rho {X_mu, L_nu} - delta| residue
};
CrossPathReport run_cross_path_suite(int models, std::uint64_t seed);

/// Pair-space exact diagonalization vs the closed per-mode matrices over
/// random (k, h, phi, beta) tuples. Deviation is the elementwise absolute
/// difference of mode_matrices(k) + mode_matrices(-k) against the oracle.
struct PairOracleReport {
    int tuples = 0;
    double max_dev = 0.0;
};
PairOracleReport run_pair_oracle_suite(int tuples, std::uint64_t seed);

} // namespace qincompat

#endif
