#pragma once

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <variant>

#include "eoslab/errors.hpp"

namespace eoslab {

using cplx = std::complex<double>;

namespace states {

struct Vacuum {};

struct Coherent {
    cplx alpha;
};

struct Fock {
    int n;
};

// |alpha> + parity*|-alpha>, parity in {+1,-1}; norm = [2(1 +/- e^{-2|a|^2})]^{-1/2}.
struct Cat {
    cplx alpha;
    int parity;
    double norm2;  // squared normalization constant
};

// S(xi)|0> with xi = r e^{i phase}; VarX = e^{-2r}/4 at phase = 0.
struct Squeezed {
    double r;
    double phase;
};

struct Numeric {
    Eigen::MatrixXcd rho;  // (n_max+1) x (n_max+1), validated
    int n_max;
    // Lazily built coefficient matrix of chi(gamma;0) e^{+|gamma|^2/2} as a
    // polynomial in (Re gamma, Im gamma); shared across copies.
    mutable std::shared_ptr<const Eigen::MatrixXcd> chi_poly;
};

}  // namespace states

class StateModel {
public:
    using Variant = std::variant<states::Vacuum, states::Coherent, states::Fock, states::Cat,
                                 states::Squeezed, states::Numeric>;

    static StateModel vacuum();
    static StateModel coherent(cplx alpha);
    static StateModel fock(int n);
    static StateModel cat(cplx alpha, int parity);
    static StateModel squeezed(double r, double phase);
    // Validates hermiticity (1e-12), unit trace (1e-10) and positivity
    // (eigenvalue floor -1e-10); throws InvalidState otherwise.
    static StateModel numeric(Eigen::MatrixXcd rho);

    const Variant& value() const { return v_; }
    bool is_numeric() const { return std::holds_alternative<states::Numeric>(v_); }
    bool is_pure() const;

    // First and second moments via operator algebra (exact, used for window
    // sizing; the public moments() contract in eos_core goes through the
    // Wigner grid as specified).
    cplx mean_a() const;       // <a>
    cplx mean_a2() const;      // <a^2>
    double mean_n() const;     // <a^dag a>
    double mean_x() const { return mean_a().real(); }
    double mean_y() const { return mean_a().imag(); }
    double var_x() const;
    double var_y() const;

    // Window radius covering >= 6 standard deviations of the Wigner envelope.
    double default_window_radius() const;

private:
    explicit StateModel(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

}  // namespace eoslab
