#include "qincompat/analysis.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace qincompat {

namespace {

void validate_grid(const SweepGrid& grid) {
    if (grid.h_values.empty() || grid.T_values.empty())
        throw DomainError("sweep grid must be non-empty");
    for (double t : grid.T_values)
        if (!(t > 0.0)) throw DomainError("sweep temperatures must be strictly positive");
    for (std::size_t i = 1; i < grid.h_values.size(); ++i)
        if (grid.h_values[i] < grid.h_values[i - 1])
            throw DomainError("h grid must be ascending");
    for (std::size_t i = 1; i < grid.T_values.size(); ++i)
        if (grid.T_values[i] < grid.T_values[i - 1])
            throw DomainError("T grid must be ascending");
}

} // namespace

std::vector<SweepRow> sweep(const SweepGrid& grid, const QuadOptions& opts, int threads) {
    validate_grid(grid);

    const std::size_t nh = grid.h_values.size();
    const std::size_t nt = grid.T_values.size();
    std::vector<SweepRow> rows(nh * nt);

    auto run_point = [&](std::size_t idx) {
        SweepRow& row = rows[idx];
        row.h = grid.h_values[idx / nt];
        row.T = grid.T_values[idx % nt];
        try {
            IsingPoint point;
            point.h = row.h;
            point.beta = 1.0 / row.T;
            point.modes = grid.modes;
            row.matrices = point_matrices(point, opts);

            EstimationResult res;
            res.J = submatrix(row.matrices.J(), grid.selector);
            res.U = submatrix(row.matrices.U, grid.selector);
            try {
                const RMeasureResult r = r_measure_detail(res.J, res.U);
                row.R = r.R;
                row.effective_rank = r.effective_rank;
                row.rank_reduced = r.rank_reduced;
            } catch (const SingularFisherError&) {
                if (res.U.cwiseAbs().maxCoeff() > 0.0) throw;
                row.R = 0.0;
                row.effective_rank = 0;
                row.rank_reduced = true;
            }
        } catch (const std::exception& e) {
            row.R = std::numeric_limits<double>::quiet_NaN();
            row.error = e.what();
        }
    };

    int pool = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    pool = std::max(1, std::min<int>(pool, static_cast<int>(rows.size())));

    if (pool == 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) run_point(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        workers.reserve(pool);
        for (int w = 0; w < pool; ++w)
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1))
                    run_point(i);
            });
        for (auto& t : workers) t.join();
    }
    return rows;
}

double critical_log_scale() { return kSeriesLogScale * std::exp(kSeriesLogOffset); }

ScalingFit fit_fixed_form(const std::vector<std::pair<double, double>>& data) {
    if (data.size() < 5)
        throw InsufficientDataError("fixed-form fit needs at least 5 points");

    double num = 0.0, den = 0.0;
    for (const auto& [t, r] : data) {
        if (!(t > 0.0)) throw DomainError("temperatures must be strictly positive");
        const double basis = (std::log(kSeriesLogScale / t) + kSeriesLogOffset) * std::sqrt(t);
        num += basis * r;
        den += basis * basis;
    }
    if (den == 0.0) throw InsufficientDataError("fixed-form basis vanished on this window");

    ScalingFit fit;
    fit.amplitude = num / den;
    fit.power = kSeriesPower;
    fit.log_power = kSeriesLogPower;
    fit.log_arg_scale = kSeriesLogScale;
    fit.log_offset = kSeriesLogOffset;

    double ss = 0.0;
    double lo = data.front().first, hi = data.front().first;
    for (const auto& [t, r] : data) {
        const double basis = (std::log(kSeriesLogScale / t) + kSeriesLogOffset) * std::sqrt(t);
        const double res = r - fit.amplitude * basis;
        ss += res * res;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    fit.residual = std::sqrt(ss / static_cast<double>(data.size()));
    fit.window_lo = lo;
    fit.window_hi = hi;
    return fit;
}

ScalingFit fit_log_power(const std::vector<std::pair<double, double>>& data,
                         double log_arg_scale) {
    const std::size_t n = data.size();
    if (n < 8) throw InsufficientDataError("log-power fit needs at least 8 points");

    double lo = data.front().first, hi = data.front().first;
    for (const auto& [x, r] : data) {
        if (!(x > 0.0 && x < log_arg_scale))
            throw DomainError("abscissae must lie in (0, log scale)");
        if (!(r > 0.0)) throw DomainError("log-space fit needs positive ordinates");
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (hi / lo < 99.0)
        throw InsufficientDataError("log-power fit needs data spanning two decades");

    RMatrix design(n, 3);
    RVector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& [x, r] = data[i];
        design(i, 0) = 1.0;
        design(i, 1) = std::log(std::log(log_arg_scale / x));
        design(i, 2) = std::log(x);
        y[i] = std::log(r);
    }

    const RVector beta = design.colPivHouseholderQr().solve(y);
    if (!beta.allFinite()) throw NonConvergenceError("log-power fit produced non-finite parameters");

    ScalingFit fit;
    fit.amplitude = std::exp(beta[0]);
    fit.log_power = beta[1];
    fit.power = beta[2];
    fit.log_arg_scale = log_arg_scale;
    fit.log_offset = 0.0;
    fit.window_lo = lo;
    fit.window_hi = hi;

    const RVector resid = y - design * beta;
    fit.residual = std::sqrt(resid.squaredNorm() / static_cast<double>(n));

    if (n > 3) {
        const double sigma2 = resid.squaredNorm() / static_cast<double>(n - 3);
        const RMatrix cov = sigma2 * (design.transpose() * design).inverse();
        for (int i = 0; i < 3; ++i) fit.stderrs[i] = std::sqrt(std::max(0.0, cov(i, i)));
    }
    return fit;
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::thermal_dominated: return "thermal-dominated";
        case Regime::field_dominated: return "field-dominated";
        case Regime::high_t: return "high-T";
    }
    return "unknown";
}

Regime classify_regime(double h, double T) {
    if (T > 1.0 + std::abs(h)) return Regime::high_t;
    return std::abs(h - 1.0) > T ? Regime::field_dominated : Regime::thermal_dominated;
}

std::vector<Regime> crossover_report(double h, const std::vector<double>& T_range) {
    std::vector<Regime> out;
    out.reserve(T_range.size());
    for (double t : T_range) out.push_back(classify_regime(h, t));
    return out;
}

} // namespace qincompat
