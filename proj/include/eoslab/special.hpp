#pragma once

#include <complex>
#include <vector>

namespace eoslab {

using cplx = std::complex<double>;

double log_factorial(int n);

// Physicists' Hermite polynomial H_n(x), upward recurrence.
double hermite_h(int n, double x);

// Generalized Laguerre L_n^{(k)}(x) by the standard three-term recurrence.
// Works for complex x (needed for analytically continued characteristic
// polynomials).
template <typename T>
T laguerre(int n, int k, T x) {
    if (n == 0) return T(1);
    T lm1 = T(1);
    T l = T(1 + k) - x;
    for (int m = 1; m < n; ++m) {
        T lp1 = ((T(2 * m + k + 1) - x) * l - T(m + k) * lm1) / T(m + 1);
        lm1 = l;
        l = lp1;
    }
    return l;
}

// Coefficients c_j of L_n^{(k)}(x) = sum_j c_j x^j.
std::vector<double> laguerre_coeffs(int n, int k);

// Normalized harmonic-oscillator eigenfunction in the X=(a+a^dag)/2 convention:
// psi_n(q) = (2/pi)^{1/4} (2^n n!)^{-1/2} H_n(sqrt(2) q) e^{-q^2}.
// Evaluated through the bounded normalized recurrence.
double oscillator_psi(int n, double q);
// Fills psi_0..psi_{nmax}(q).
void oscillator_psi_all(int nmax, double q, std::vector<double>& out);

// |theta_3(z; tau) - 1| for tau = i*t (t > 0 real), z real:
// theta_3 = 1 + 2 sum_{n>=1} e^{-pi t n^2} cos(2 pi n z).
double theta3_minus_one(double z, double t);

// Gauss-Hermite rule: integrates f with weight e^{-x^2} on (-inf, inf).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Golub-Welsch nodes/weights; cached per n.
const GaussHermiteRule& gauss_hermite(int n);

}  // namespace eoslab
