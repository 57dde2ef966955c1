#pragma once

#include "eoslab/eos_core.hpp"

namespace eoslab {

// (s'_X, s'_Y) of the pre-measurement distribution appearing in the
// post-measurement decomposition, for requested ordering (s_X, s_Y).
// Requires s_Q < 2 mu^2/(1+A_Q) - 1.
OrderingParams prime_params(const EosSetup& setup, const OrderingParams& requested);

struct PostMap {
    EosSetup setup;
    OutcomeSet outcomes;
    OrderingParams requested;  // ordering of the post-measurement QPD
    OrderingParams primed;     // (s'_X, s'_Y)
    cplx y_tilde;              // outcome combination of the displacement
    cplx z_tilde;              // (|nu|/mu) y_tilde
    double w_x = 0.0, w_y = 0.0;  // mu^2/(1+A_Q) - (1+s_Q)/2
};

PostMap make_post_map(const EosSetup& setup, const OutcomeSet& outcomes,
                      const OrderingParams& requested);

// Affine argument map z -> z' of the initial-state distribution.
cplx prime_map(const PostMap& pm, cplx z);

// rho'(z; s_X, s_Y) = N'(z) rho(z'(z); s'_X, s'_Y) on the initial state.
double post_qpd(const PostMap& pm, const StateModel& state, cplx z);

// Same quantity on the tensor point set {xs} x {ys}; values(ix, iy).
Eigen::MatrixXd post_qpd_tensor(const PostMap& pm, const StateModel& state,
                                const std::vector<double>& xs, const std::vector<double>& ys);

QpdGrid post_qpd_grid(const PostMap& pm, const StateModel& state, const GridWindow& window);
QpdGrid post_qpd_grid(const PostMap& pm, const StateModel& state);

// Infinite-squeezing limit: displaced squeezed state |y~, r>,
// r = (1/2) ln(sum_X |at|^2 / sum_Y |at|^2).
struct StrongLimit {
    bool degenerate = false;          // one quadrature set carries no pump
    Quadrature eigen_quad = Quadrature::X;  // which eigenstate the limit collapses to
    cplx center;                      // y~
    double r = 0.0;
};

StrongLimit strong_limit_params(const EosSetup& setup, const OutcomeSet& outcomes);
double strong_limit_qpd(const StrongLimit& lim, cplx z);

struct ChainStage {
    OutcomeSet outcomes;
    double probability = 0.0;
    QpdGrid post_wigner;
    StateModel post_state;  // re-gridded Numeric state feeding the next stage
};

// Consecutive measurements: stage t+1 consumes the stage-t post-measurement
// Wigner grid as a Numeric state. Mass lost to re-gridding must stay < 1e-6.
std::vector<ChainStage> chain(const EosSetup& setup, const StateModel& initial,
                              const std::vector<OutcomeSet>& outcomes, int regrid_n_max = 40);

}  // namespace eoslab
