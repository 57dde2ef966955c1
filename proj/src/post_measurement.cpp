#include "eoslab/post_measurement.hpp"

#include <cmath>

#include "eoslab/parallel.hpp"

namespace eoslab {

namespace {

double prime_w(const EosSetup& setup, double a_q, double s_q) {
    double w = setup.mu * setup.mu / (1.0 + a_q) - 0.5 * (1.0 + s_q);
    if (w <= 0.0)
        throw OrderingOutOfRange("requested ordering violates s_Q < 2 mu^2/(1+A_Q) - 1");
    return w;
}

double prime_s(const EosSetup& setup, double w) {
    double nu2 = std::norm(setup.nu);
    return 1.0 - 2.0 * setup.mu * setup.mu / (nu2 + 1.0 / w);
}

// ln of the z-independent part of N', with the cancellation-prone terms
// (|z~|^2 against the outcome Gaussians and 1/p) kept as one log sum.
double log_envelope_const(const PostMap& pm, double p_outcome) {
    const EosSetup& s = pm.setup;
    double lg = 0.5 * (std::log1p(-pm.primed.s_x) + std::log1p(-pm.primed.s_y)) - std::log(2.0);
    for (std::size_t i = 0; i < s.channels.size(); ++i) {
        double b2 = std::norm(s.channels[i].probe);
        double dn = static_cast<double>(pm.outcomes.dn[i]);
        lg += -dn * dn / (2.0 * b2) - 0.5 * std::log(2.0 * M_PI * b2);
    }
    lg -= 2.0 * std::log(s.mu) + 0.5 * (std::log(pm.w_x) + std::log(pm.w_y));
    lg -= std::log(p_outcome);
    lg += std::norm(pm.z_tilde);
    return lg;
}

}  // namespace

OrderingParams prime_params(const EosSetup& setup, const OrderingParams& requested) {
    double wx = prime_w(setup, setup.a_x, requested.s_x);
    double wy = prime_w(setup, setup.a_y, requested.s_y);
    return {prime_s(setup, wx), prime_s(setup, wy)};
}

PostMap make_post_map(const EosSetup& setup, const OutcomeSet& outcomes,
                      const OrderingParams& requested) {
    if (outcomes.dn.size() != setup.channels.size())
        throw UnsupportedConfiguration("outcome length must match channel count");
    PostMap pm;
    pm.setup = setup;
    pm.outcomes = outcomes;
    pm.requested = requested;
    pm.w_x = prime_w(setup, setup.a_x, requested.s_x);
    pm.w_y = prime_w(setup, setup.a_y, requested.s_y);
    pm.primed = {prime_s(setup, pm.w_x), prime_s(setup, pm.w_y)};
    double ytx = 0.0, yty = 0.0;
    for (std::size_t i = 0; i < setup.channels.size(); ++i) {
        double t = std::abs(setup.alpha_tilde[i]) / std::abs(setup.channels[i].probe) *
                   static_cast<double>(outcomes.dn[i]);
        if (setup.channels[i].quadrature == Quadrature::X)
            ytx += t;
        else
            yty += t;
    }
    pm.y_tilde = {ytx, yty};
    pm.z_tilde = setup.abs_nu() / setup.mu * pm.y_tilde;
    return pm;
}

cplx prime_map(const PostMap& pm, cplx z) {
    double xr = pm.z_tilde.real() + (z.real() - pm.z_tilde.real()) / pm.w_x;
    double yr = pm.z_tilde.imag() + (z.imag() - pm.z_tilde.imag()) / pm.w_y;
    return {(1.0 - pm.primed.s_x) / (2.0 * pm.setup.mu) * xr,
            (1.0 - pm.primed.s_y) / (2.0 * pm.setup.mu) * yr};
}

double post_qpd(const PostMap& pm, const StateModel& state, cplx z) {
    double p = count_probability_raw(pm.setup, state, pm.outcomes);
    if (p < 1e-300)
        throw VanishingOutcomeProbability("outcome probability underflows the envelope");
    cplx zp = prime_map(pm, z);
    double expo = 2.0 * zp.real() * zp.real() / (1.0 - pm.primed.s_x) +
                  2.0 * zp.imag() * zp.imag() / (1.0 - pm.primed.s_y) -
                  (z.real() - pm.z_tilde.real()) * (z.real() - pm.z_tilde.real()) / pm.w_x -
                  (z.imag() - pm.z_tilde.imag()) * (z.imag() - pm.z_tilde.imag()) / pm.w_y;
    double rho = qpd_eval(state, zp, pm.primed);
    return std::exp(log_envelope_const(pm, p) + expo) * rho;
}

Eigen::MatrixXd post_qpd_tensor(const PostMap& pm, const StateModel& state,
                                const std::vector<double>& xs, const std::vector<double>& ys) {
    double p = count_probability_raw(pm.setup, state, pm.outcomes);
    if (p < 1e-300)
        throw VanishingOutcomeProbability("outcome probability underflows the envelope");
    double lc = log_envelope_const(pm, p);

    const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
    std::vector<double> xp(nx), yp(ny);
    for (int i = 0; i < nx; ++i) {
        double xr = pm.z_tilde.real() + (xs[i] - pm.z_tilde.real()) / pm.w_x;
        xp[i] = (1.0 - pm.primed.s_x) / (2.0 * pm.setup.mu) * xr;
    }
    for (int j = 0; j < ny; ++j) {
        double yr = pm.z_tilde.imag() + (ys[j] - pm.z_tilde.imag()) / pm.w_y;
        yp[j] = (1.0 - pm.primed.s_y) / (2.0 * pm.setup.mu) * yr;
    }

    Eigen::MatrixXd rho;
    if (state.is_numeric()) {
        const auto& num = std::get<states::Numeric>(state.value());
        rho = detail::numeric_qpd_tensor(num, xp, yp, pm.primed);
    } else {
        rho.resize(nx, ny);
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j)
                rho(i, j) = qpd_eval(state, cplx(xp[i], yp[j]), pm.primed);
    }

    Eigen::MatrixXd out(nx, ny);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            double expo = 2.0 * xp[i] * xp[i] / (1.0 - pm.primed.s_x) +
                          2.0 * yp[j] * yp[j] / (1.0 - pm.primed.s_y) -
                          (xs[i] - pm.z_tilde.real()) * (xs[i] - pm.z_tilde.real()) / pm.w_x -
                          (ys[j] - pm.z_tilde.imag()) * (ys[j] - pm.z_tilde.imag()) / pm.w_y;
            out(i, j) = std::exp(lc + expo) * rho(i, j);
        }
    }
    return out;
}

QpdGrid post_qpd_grid(const PostMap& pm, const StateModel& state, const GridWindow& window) {
    QpdGrid grid;
    grid.ordering = pm.requested;
    grid.nx = grid.ny = window.n;
    grid.dx = grid.dy = 2.0 * window.radius / (window.n - 1);
    grid.origin = window.center - cplx(window.radius, window.radius);
    std::vector<double> xs(grid.nx), ys(grid.ny);
    for (int i = 0; i < grid.nx; ++i) xs[i] = grid.x_at(i);
    for (int j = 0; j < grid.ny; ++j) ys[j] = grid.y_at(j);
    grid.values = post_qpd_tensor(pm, state, xs, ys);
    return grid;
}

QpdGrid post_qpd_grid(const PostMap& pm, const StateModel& state) {
    GridWindow w;
    w.center = pm.z_tilde;
    w.radius = state.default_window_radius();
    return post_qpd_grid(pm, state, w);
}

StrongLimit strong_limit_params(const EosSetup& setup, const OutcomeSet& outcomes) {
    double sx2 = 0.0, sy2 = 0.0;
    for (std::size_t i = 0; i < setup.channels.size(); ++i) {
        double a2 = std::norm(setup.alpha_tilde[i]);
        if (setup.channels[i].quadrature == Quadrature::X)
            sx2 += a2;
        else
            sy2 += a2;
    }
    StrongLimit lim;
    double ytx = 0.0, yty = 0.0;
    for (std::size_t i = 0; i < setup.channels.size(); ++i) {
        double t = std::abs(setup.alpha_tilde[i]) / std::abs(setup.channels[i].probe) *
                   static_cast<double>(outcomes.dn[i]);
        (setup.channels[i].quadrature == Quadrature::X ? ytx : yty) += t;
    }
    lim.center = {ytx, yty};
    if (sx2 <= 0.0 || sy2 <= 0.0) {
        lim.degenerate = true;
        lim.eigen_quad = (sy2 <= 0.0) ? Quadrature::X : Quadrature::Y;
        return lim;
    }
    lim.r = 0.5 * std::log(sx2 / sy2);
    return lim;
}

double strong_limit_qpd(const StrongLimit& lim, cplx z) {
    if (lim.degenerate)
        throw DegeneratePartition("strong-squeezing limit is a quadrature eigenstate");
    double dx = z.real() - lim.center.real();
    double dy = z.imag() - lim.center.imag();
    return 2.0 / M_PI *
           std::exp(-2.0 * std::exp(2.0 * lim.r) * dx * dx -
                    2.0 * std::exp(-2.0 * lim.r) * dy * dy);
}

std::vector<ChainStage> chain(const EosSetup& setup, const StateModel& initial,
                              const std::vector<OutcomeSet>& outcomes, int regrid_n_max) {
    std::vector<ChainStage> stages;
    StateModel state = initial;
    for (const auto& o : outcomes) {
        PostMap pm = make_post_map(setup, o, OrderingParams{0.0, 0.0});
        ChainStage stage{o, count_probability(setup, state, o), post_qpd_grid(pm, state),
                         state};
        // re-grid onto a Numeric state for the next stage
        Eigen::MatrixXcd rho = wigner_grid_to_density(stage.post_wigner, regrid_n_max);
        double lost = std::abs(rho.trace().real() - 1.0);
        if (lost > 1e-6)
            throw TruncationOverflow("chain re-gridding lost more than 1e-6 of the state mass");
        rho /= rho.trace().real();
        rho = 0.5 * (rho + rho.adjoint().eval());
        // clip grid-noise negatives at the spectral floor
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
        rho = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
        rho /= rho.trace().real();
        stage.post_state = StateModel::numeric(rho);
        state = stage.post_state;
        stages.push_back(std::move(stage));
    }
    return stages;
}

}  // namespace eoslab
