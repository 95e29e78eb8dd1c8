#ifndef QINCOMPAT_ELLIPTIC_HPP
#define QINCOMPAT_ELLIPTIC_HPP

#include "qincompat/types.hpp"

namespace qincompat {

struct EllipticKE {
    double K = 0.0;
    double E = 0.0;
};

/// Complete elliptic integrals K(m), E(m) in the PARAMETER convention
/// (m is the squared modulus), via the arithmetic-geometric mean.
/// Absolute error is below 1e-13 on [0, 1). Throws DomainError outside.
EllipticKE elliptic_KE(double m);

} // namespace qincompat

#endif
