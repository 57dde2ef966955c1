#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "eoslab/state_model.hpp"

namespace eoslab {

// (s_X, s_Y) ordering pair; s_X = s_Y = 0 is the Wigner function, -1 Husimi.
struct OrderingParams {
    double s_x = 0.0;
    double s_y = 0.0;
};

enum class Quadrature { X, Y };

// chi(gamma; s_X, s_Y) = chi(gamma; 0) * exp(s_Y Re^2(gamma)/2 + s_X Im^2(gamma)/2).
// The reweighting is unconditional at the chi level.
cplx char_function(const StateModel& state, cplx gamma, const OrderingParams& ordering = {});

// rho(z; s_X, s_Y). Closed forms for the analytic families, tensor
// Gauss-Hermite quadrature of the Fourier integral for Numeric states.
double qpd_eval(const StateModel& state, cplx z, const OrderingParams& ordering);

struct QpdGrid {
    cplx origin;  // z of grid node (0,0)
    double dx = 0.0, dy = 0.0;
    int nx = 0, ny = 0;
    OrderingParams ordering;
    Eigen::MatrixXd values;  // values(ix, iy)

    double x_at(int ix) const { return origin.real() + ix * dx; }
    double y_at(int iy) const { return origin.imag() + iy * dy; }
    cplx z_at(int ix, int iy) const { return {x_at(ix), y_at(iy)}; }
    double cell_area() const { return dx * dy; }
    double integral() const { return values.sum() * cell_area(); }
    bool same_geometry(const QpdGrid& other, double tol = 1e-12) const;
};

struct GridWindow {
    cplx center = 0.0;
    double radius = 4.0;
    int n = 257;  // nodes per axis
};

QpdGrid qpd_grid(const StateModel& state, const GridWindow& window,
                 const OrderingParams& ordering);
// Default window: centered on <a>, radius from the state's Wigner envelope.
QpdGrid qpd_grid(const StateModel& state, const OrderingParams& ordering);

// <q|rho|q> for the chosen quadrature, X convention q = Re z.
double marginal(const StateModel& state, Quadrature quad, double q);

// pi * sum a*b*dx*dy for two Wigner grids of identical geometry.
double wigner_fidelity(const QpdGrid& a, const QpdGrid& b);

// Projects a Wigner grid onto a truncated Fock-basis density matrix:
// rho_mn = pi * sum W(z) G_mn(z; 0) dA.
Eigen::MatrixXcd wigner_grid_to_density(const QpdGrid& wigner, int n_max);

struct GridMoments {
    double mean_x = 0.0, mean_y = 0.0;
    double var_x = 0.0, var_y = 0.0;
};
GridMoments grid_moments(const QpdGrid& grid);

namespace detail {

// QPD of a Numeric state on the tensor point set {xs} x {ys}; returns
// values(ix, iy). Single points are the 1x1 case.
Eigen::MatrixXd numeric_qpd_tensor(const states::Numeric& num, const std::vector<double>& xs,
                                   const std::vector<double>& ys, const OrderingParams& ordering);

// Fourier kernel G_mn(z; s) of |n><m| (m >= n), shared by the diagonal-ordering
// closed forms and the grid -> density projection.
cplx displaced_fock_kernel(int m, int n, cplx z, double s);

}  // namespace detail

}  // namespace eoslab
