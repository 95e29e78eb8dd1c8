#include "qincompat/elliptic.hpp"

#include <cmath>

namespace qincompat {

EllipticKE elliptic_KE(double m) {
    if (!(m >= 0.0 && m < 1.0))
        throw DomainError("elliptic parameter must satisfy 0 <= m < 1");

    const double pi = 3.14159265358979323846;
    if (m == 0.0) return {pi / 2.0, pi / 2.0};

    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    double c = std::sqrt(m);
    double c_sum = 0.5 * c * c;
    double pow2 = 1.0;

    // AGM converges quadratically; 60 iterations is far beyond what doubles
    // can ever use, the loop exits on c ~ machine epsilon.
    for (int n = 0; n < 60 && c > 1e-17 * a; ++n) {
        const double an = 0.5 * (a + b);
        const double bn = std::sqrt(a * b);
        c = 0.5 * (a - b);
        pow2 *= 2.0;
        c_sum += 0.5 * pow2 * c * c;
        a = an;
        b = bn;
    }

    EllipticKE out;
    out.K = pi / (2.0 * a);
    out.E = out.K * (1.0 - c_sum);
    return out;
}

} // namespace qincompat
