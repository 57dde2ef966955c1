#include "eoslab/special.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>

namespace eoslab {

double log_factorial(int n) {
    return std::lgamma(static_cast<double>(n) + 1.0);
}

double hermite_h(int n, double x) {
    if (n == 0) return 1.0;
    double hm1 = 1.0;
    double h = 2.0 * x;
    for (int m = 1; m < n; ++m) {
        double hp1 = 2.0 * x * h - 2.0 * m * hm1;
        hm1 = h;
        h = hp1;
    }
    return h;
}

std::vector<double> laguerre_coeffs(int n, int k) {
    // c_j = (-1)^j binom(n+k, n-j) / j!
    std::vector<double> c(n + 1);
    for (int j = 0; j <= n; ++j) {
        double lb = log_factorial(n + k) - log_factorial(n - j) - log_factorial(k + j) -
                    log_factorial(j);
        c[j] = ((j % 2) ? -1.0 : 1.0) * std::exp(lb);
    }
    return c;
}

void oscillator_psi_all(int nmax, double q, std::vector<double>& out) {
    // Normalized recurrence for psi_n(q) = (2/pi)^{1/4} (2^n n!)^{-1/2} H_n(sqrt2 q) e^{-q^2}:
    // psi_{n+1} = sqrt(2/(n+1)) * (sqrt2 q) psi_n - sqrt(n/(n+1)) psi_{n-1}.
    out.assign(nmax + 1, 0.0);
    double x = std::sqrt(2.0) * q;
    double p0 = std::pow(2.0 / M_PI, 0.25) * std::exp(-q * q);
    out[0] = p0;
    if (nmax == 0) return;
    out[1] = std::sqrt(2.0) * x * p0;
    for (int n = 1; n < nmax; ++n) {
        out[n + 1] = std::sqrt(2.0 / (n + 1)) * x * out[n] -
                     std::sqrt(static_cast<double>(n) / (n + 1)) * out[n - 1];
    }
}

double oscillator_psi(int n, double q) {
    std::vector<double> buf;
    oscillator_psi_all(n, q, buf);
    return buf[n];
}

double theta3_minus_one(double z, double t) {
    double sum = 0.0;
    for (int n = 1; n <= 64; ++n) {
        double lt = -M_PI * t * n * n;
        if (lt < -745.0) break;  // underflow floor
        double term = 2.0 * std::exp(lt) * std::cos(2.0 * M_PI * n * z);
        sum += term;
        if (std::abs(term) < 1e-16 * (1.0 + std::abs(sum))) break;
    }
    return std::abs(sum);
}

const GaussHermiteRule& gauss_hermite(int n) {
    static std::map<int, GaussHermiteRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    // Golub-Welsch on the Jacobi matrix of Hermite polynomials.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        double b = std::sqrt((i + 1) / 2.0);
        J(i, i + 1) = b;
        J(i + 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussHermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mu0 = std::sqrt(M_PI);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = es.eigenvalues()(i);
        double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    // enforce the exact +/- symmetry of the rule so symmetric integrands
    // cancel to rounding
    for (int i = 0; i < n / 2; ++i) {
        int j = n - 1 - i;
        double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.weights[i] = rule.weights[j] = w;
    }
    if (n % 2) rule.nodes[n / 2] = 0.0;
    return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace eoslab
