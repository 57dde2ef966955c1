#pragma once

// Independent test oracles. Everything here recomputes expected values through
// routes that do not share code with the implementation being checked.

#include <cmath>
#include <complex>
#include <vector>

#include "eoslab/eos_core.hpp"
#include "eoslab/phase_space.hpp"
#include "eoslab/special.hpp"

namespace oracles {

using eoslab::cplx;

// Brute-force difference-of-Poissons pmf: sum_n Pois(n+dn; m1) Pois(n; m2),
// truncated when both tail terms drop below 1e-18.
inline double poisson_product_skellam(long long dn, double m1, double m2) {
    auto log_pois = [](long long k, double m) -> double {
        if (k < 0) return -INFINITY;
        if (m <= 0.0) return (k == 0) ? 0.0 : -INFINITY;
        return k * std::log(m) - m - std::lgamma(static_cast<double>(k) + 1.0);
    };
    long long n0 = std::max(0LL, -dn);
    double sum = 0.0;
    bool seen = false;
    for (long long n = n0; n <= n0 + 2000; ++n) {
        double t = std::exp(log_pois(n + dn, m1) + log_pois(n, m2));
        sum += t;
        if (t > 1e-18) seen = true;
        if (seen && t < 1e-18) break;
    }
    return sum;
}

// Gaussian smoothing of a Wigner grid (the s_X, s_Y < 0 Weierstrass form):
// rho(z; sx, sy) = (2 / (pi sqrt(sx sy))) int rho(y;0) e^{2Re^2(y-z)/sx + 2Im^2(y-z)/sy} d^2y.
inline double weierstrass_of_wigner(const eoslab::QpdGrid& w, cplx z, double sx, double sy) {
    double acc = 0.0;
    for (int i = 0; i < w.nx; ++i) {
        double dx = w.x_at(i) - z.real();
        for (int j = 0; j < w.ny; ++j) {
            double dy = w.y_at(j) - z.imag();
            acc += w.values(i, j) * std::exp(2.0 * dx * dx / sx + 2.0 * dy * dy / sy);
        }
    }
    return acc * w.cell_area() * 2.0 / (M_PI * std::sqrt(sx * sy));
}

// Marginal of a Wigner grid along Im z (trapezoid-free plain sum; the grid
// decays to ~0 at the boundary so the plain sum is spectrally accurate).
inline double wigner_marginal_x(const eoslab::QpdGrid& w, int ix) {
    double acc = 0.0;
    for (int j = 0; j < w.ny; ++j) acc += w.values(ix, j);
    return acc * w.dy;
}

// Waveplate matrix of the appendix (W_11 = conj(W_22), W_12 = W_21).
inline Eigen::Matrix2cd waveplate_matrix(double phi, double theta) {
    cplx i(0.0, 1.0);
    Eigen::Matrix2cd W;
    cplx w11 = std::cos(phi / 2.0) + i * std::sin(phi / 2.0) * std::cos(2.0 * theta);
    cplx w12 = i * std::sin(phi / 2.0) * std::sin(2.0 * theta);
    W << w11, w12, w12, std::conj(w11);
    return W;
}

// Anti-normally ordered characteristic function of the post-measurement state
// for a coherent input (closed form up to its xi-independent normalization),
// evaluated from the printed integral representation.
struct PostCharCoherent {
    double mu, nu, ax, ay;
    cplx alpha;
    double ytx, yty;

    cplx log_chi(cplx xi) const {
        double bx = mu * mu / (1.0 + ax);
        double by = mu * mu / (1.0 + ay);
        cplx i(0.0, 1.0);
        cplx tx = alpha.real() / mu + i * xi.imag() + (nu / mu) * ytx;
        cplx ty = alpha.imag() / mu - i * xi.real() + (nu / mu) * yty;
        return bx * tx * tx + by * ty * ty;
    }

    // rho'(z; sx, sy) by direct 2-D Gauss-Hermite Fourier transform of chi',
    // self-normalized through chi'(0) and the grid-level normalization of the
    // result being left to the caller.
    double qpd(cplx z, double sx, double sy, int n_nodes = 180) const {
        const auto& rule = eoslab::gauss_hermite(n_nodes);
        // weights: e^{(1+sy)/2 Re^2 xi + (1+sx)/2 Im^2 xi} chi'(xi) e^{z conj(xi) - conj(z) xi}
        // chi' carries e^{-bx Im^2 xi - by Re^2 xi} type decay inside log_chi; pull the
        // quadratic parts out for the Hermite weight.
        double bx = mu * mu / (1.0 + ax);
        double by = mu * mu / (1.0 + ay);
        double au = by - 0.5 * (1.0 + sy);  // Re xi direction
        double av = bx - 0.5 * (1.0 + sx);  // Im xi direction
        cplx i(0.0, 1.0);
        cplx acc = 0.0;
        cplx lc0 = log_chi(cplx(0.0, 0.0));
        for (int p = 0; p < n_nodes; ++p) {
            double u = rule.nodes[p] / std::sqrt(au);
            for (int q = 0; q < n_nodes; ++q) {
                double v = rule.nodes[q] / std::sqrt(av);
                cplx xi(u, v);
                cplx phase = z * std::conj(xi) - std::conj(z) * xi;
                cplx rest = log_chi(xi) - lc0 + au * u * u + av * v * v +
                            0.5 * (1.0 + sy) * u * u + 0.5 * (1.0 + sx) * v * v;
                acc += rule.weights[p] * rule.weights[q] * std::exp(phase + rest);
            }
        }
        // chi'/chi'(0) is normalized, so the transform is a normalized QPD.
        return (acc / (M_PI * M_PI * std::sqrt(au * av))).real();
    }
};

}  // namespace oracles
