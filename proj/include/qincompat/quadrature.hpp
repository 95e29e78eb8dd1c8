#ifndef QINCOMPAT_QUADRATURE_HPP
#define QINCOMPAT_QUADRATURE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "qincompat/types.hpp"

namespace qincompat {

// 15-point Kronrod rule with embedded 7-point Gauss rule (nodes and weights
// for the positive half of [-1, 1]).
namespace gk15 {
inline constexpr std::array<double, 8> abscissae = {
    0.000000000000000000000000000000000e+00, 2.077849550078984676006894037732449e-01,
    4.058451513773971669066064120769615e-01, 5.860872354676911302941448382587296e-01,
    7.415311855993944398638647732807884e-01, 8.648644233597690727897127886409262e-01,
    9.491079123427585245261896840478513e-01, 9.914553711208126392068546975263285e-01};
inline constexpr std::array<double, 8> kronrod_weights = {
    2.094821410847278280129991748917143e-01, 2.044329400752988924141619992346491e-01,
    1.903505780647854099132564024210137e-01, 1.690047266392679028265834265985503e-01,
    1.406532597155259187451895905102379e-01, 1.047900103222501838398763225415180e-01,
    6.309209262997855329070066318920429e-02, 2.293532201052922496373200805896959e-02};
inline constexpr std::array<double, 4> gauss_weights = {
    4.179591836734693877551020408163265e-01, 3.818300505051189449503697754889751e-01,
    2.797053914892766679014677714237796e-01, 1.294849661688696932706114326790820e-01};
} // namespace gk15

/// One GK15 evaluation of an N-component integrand on [a, b].
/// Returns the Kronrod estimate; `err` receives |K15 - G7| per component.
template <std::size_t N>
std::array<double, N> gk15_panel(const std::function<std::array<double, N>(double)>& f, double a,
                                 double b, std::array<double, N>& err) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    std::array<double, N> kronrod{};
    std::array<double, N> gauss{};

    const auto fc = f(center);
    for (std::size_t c = 0; c < N; ++c) {
        kronrod[c] = gk15::kronrod_weights[0] * fc[c];
        gauss[c] = gk15::gauss_weights[0] * fc[c];
    }
    for (std::size_t i = 1; i < gk15::abscissae.size(); ++i) {
        const double dx = half * gk15::abscissae[i];
        const auto lo = f(center - dx);
        const auto hi = f(center + dx);
        for (std::size_t c = 0; c < N; ++c) {
            const double pair = lo[c] + hi[c];
            kronrod[c] += gk15::kronrod_weights[i] * pair;
            if (i % 2 == 0) gauss[c] += gk15::gauss_weights[i / 2] * pair;
        }
    }
    for (std::size_t c = 0; c < N; ++c) {
        kronrod[c] *= half;
        gauss[c] *= half;
        err[c] = std::abs(kronrod[c] - gauss[c]);
    }
    return kronrod;
}

template <std::size_t N>
struct QuadratureResult {
    std::array<double, N> value{};
    std::array<double, N> error{};
    int intervals = 0;
};

/// Globally adaptive GK15 over [a, b] for an N-component integrand. Bisects
/// the interval with the largest componentwise error estimate until every
/// component satisfies err_c <= max(abs_tol, rel_tol * |I_c|).
/// Throws QuadratureFailure when max_intervals is exhausted first.
template <std::size_t N>
QuadratureResult<N> integrate_adaptive(const std::function<std::array<double, N>(double)>& f,
                                       double a, double b, double abs_tol, double rel_tol = 1e-12,
                                       int max_intervals = 20000, int initial_subdivisions = 16) {
    struct Segment {
        double a, b;
        std::array<double, N> value;
        std::array<double, N> error;
        double worst;
    };

    auto make_segment = [&](double lo, double hi) {
        Segment s;
        s.a = lo;
        s.b = hi;
        s.value = gk15_panel<N>(f, lo, hi, s.error);
        s.worst = 0.0;
        for (std::size_t c = 0; c < N; ++c) s.worst = std::max(s.worst, s.error[c]);
        return s;
    };

    std::vector<Segment> segments;
    segments.reserve(256);
    const int seeds = std::max(1, initial_subdivisions);
    for (int i = 0; i < seeds; ++i) {
        const double lo = a + (b - a) * i / seeds;
        const double hi = a + (b - a) * (i + 1) / seeds;
        segments.push_back(make_segment(lo, hi));
    }

    auto totals = [&]() {
        QuadratureResult<N> r;
        r.intervals = static_cast<int>(segments.size());
        for (const auto& s : segments)
            for (std::size_t c = 0; c < N; ++c) {
                r.value[c] += s.value[c];
                r.error[c] += s.error[c];
            }
        return r;
    };

    while (true) {
        QuadratureResult<N> r = totals();
        bool converged = true;
        for (std::size_t c = 0; c < N; ++c)
            if (r.error[c] > std::max(abs_tol, rel_tol * std::abs(r.value[c]))) converged = false;
        if (converged) return r;
        if (static_cast<int>(segments.size()) >= max_intervals)
            throw QuadratureFailure("adaptive quadrature exhausted its interval budget");

        std::size_t worst = 0;
        for (std::size_t i = 1; i < segments.size(); ++i)
            if (segments[i].worst > segments[worst].worst) worst = i;

        const Segment seg = segments[worst];
        const double mid = 0.5 * (seg.a + seg.b);
        if (!(mid > seg.a && mid < seg.b))
            throw QuadratureFailure("adaptive quadrature interval underflow");
        segments[worst] = make_segment(seg.a, mid);
        segments.push_back(make_segment(mid, seg.b));
    }
}

/// Scalar convenience wrapper.
inline double integrate_adaptive_scalar(const std::function<double(double)>& f, double a, double b,
                                        double abs_tol, double rel_tol = 1e-12,
                                        int max_intervals = 20000) {
    std::function<std::array<double, 1>(double)> wrapped = [&](double x) {
        return std::array<double, 1>{f(x)};
    };
    return integrate_adaptive<1>(wrapped, a, b, abs_tol, rel_tol, max_intervals).value[0];
}

} // namespace qincompat

#endif
