#ifndef QINCOMPAT_ANALYSIS_HPP
#define QINCOMPAT_ANALYSIS_HPP

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qincompat/ising.hpp"

namespace qincompat {

/// Rectangular (h, T) grid for phase-diagram sweeps. Temperatures are
/// strictly positive; both axes ascending.
struct SweepGrid {
    std::vector<double> h_values;
    std::vector<double> T_values;
    ParamSet selector = ParamSet::h_phi;
    std::optional<int> modes; // empty = thermodynamic limit
};

struct SweepRow {
    double h = 0.0;
    double T = 0.0;
    double R = 0.0;
    IsingMatrices matrices;
    int effective_rank = 0;
    bool rank_reduced = false;
    std::string error; // empty on success; the sweep continues past failures
};

/// Evaluates every grid point, h-major row order. Points are independent, so
/// the worker pool leaves results bit-identical for any thread count.
std::vector<SweepRow> sweep(const SweepGrid& grid, const QuadOptions& opts = {},
                            int threads = 0);

/// Result of a scaling-law fit R = amplitude * (log(scale/x) + offset)^log_power * x^power.
struct ScalingFit {
    double amplitude = 0.0;
    double power = 0.0;
    double log_power = 0.0;
    double log_arg_scale = 0.0; // "scale" inside the logarithm
    double log_offset = 0.0;    // additive offset of the logarithm, 0 if folded into scale
    double residual = 0.0;      // rms of the fit residuals
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::array<double, 3> stderrs{0.0, 0.0, 0.0}; // (log-amplitude, log_power, power)
};

/// One-parameter fit of the critical temperature law
///   R(T) = A (log(8/T) - 2) sqrt(T),
/// linear least squares in A. Needs >= 5 points.
ScalingFit fit_fixed_form(const std::vector<std::pair<double, double>>& data);

/// Three-parameter fit of R = A (log(c/x))^q x^p with c fixed by the caller,
/// solved exactly in log space (the model is linear there). Needs >= 8
/// points spanning at least two decades, x in (0, c), R > 0.
ScalingFit fit_log_power(const std::vector<std::pair<double, double>>& data, double log_arg_scale);

/// Folded log scale 8 e^{-2}, for which log(c/x) equals log(8/x) - 2.
double critical_log_scale();

// Default fit windows, inside the scaling regime but above the beta = 1e4
// zero-temperature proxy floor.
inline constexpr double kFitWindowLo = 1e-4;
inline constexpr double kFitWindowHi = 1e-2;

enum class Regime { thermal_dominated, field_dominated, high_t };

const char* regime_name(Regime r);

/// Descriptive crossover classification: high-T when T exceeds the spectral
/// scale 1 + |h|, otherwise field- vs thermal-dominated by comparing
/// |h - 1| against T (nu = z = 1).
Regime classify_regime(double h, double T);

std::vector<Regime> crossover_report(double h, const std::vector<double>& T_range);

} // namespace qincompat

#endif
