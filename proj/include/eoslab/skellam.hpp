#pragma once

#include "eoslab/errors.hpp"

namespace eoslab {

// Means of the two Poissonian counting processes whose difference is observed.
struct SkellamParams {
    double m1 = 0.0;
    double m2 = 0.0;
};

// e^{-(m1+m2)} (m1/m2)^{dn/2} I_dn(2 sqrt(m1 m2)); exponentially scaled Bessel
// evaluation internally, stable for means up to ~1e6.
double skellam_pmf_exact(long long dn, const SkellamParams& p);

// Normal density with mean m1-m2 and variance m1+m2 at dn.
// Requires m1+m2 >= 25 (validity floor), else ApproximationDomain.
double skellam_pmf_gaussian(long long dn, const SkellamParams& p);

// |theta_3(z; tau) - 1| for the arguments of the Jacobi-theta form of the
// Gaussian approximation defect: z = (dn - 2 m1) m2/(m1+m2), tau = i*pi*2 m1 m2/(m1+m2).
double theta3_diagnostic(const SkellamParams& p, long long dn);

}  // namespace eoslab
