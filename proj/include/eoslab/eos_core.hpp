#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "eoslab/phase_space.hpp"
#include "eoslab/state_model.hpp"

namespace eoslab {

struct Channel {
    int index = 0;
    cplx pump;         // alpha_i
    cplx probe;        // beta_i, phase solved for the balanced-signal condition
    double retardance = M_PI;  // phi_i
    double rotation = M_PI / 8.0;  // theta_i
    int k1 = 0, k2 = 0;
    Quadrature quadrature = Quadrature::X;
};

struct ChannelSpec {
    cplx pump;
    double probe_mag = 0.0;
    Quadrature quadrature = Quadrature::X;
};

struct WaveplateSolution {
    double retardance;
    double rotation;
    int k1, k2;
    double arg_beta;
};

// Canonical balanced-signal branch: phi = pi, k1 = k2 = 0, theta = pi/8,
// arg beta = pi + arg zeta - pump_phase - target (0 for X, pi/2 for Y).
WaveplateSolution solve_waveplate(double pump_phase, double probe_amp, Quadrature quadrature,
                                  double zeta_phase);

struct OutcomeSet {
    std::vector<long long> dn;  // one signed count difference per channel
};

class EosSetup {
public:
    static EosSetup derive(cplx zeta, const std::vector<ChannelSpec>& specs);

    cplx zeta;
    double mu = 1.0;   // cosh|zeta|
    cplx nu = 0.0;     // e^{i arg zeta} sinh|zeta|
    std::vector<Channel> channels;
    std::vector<cplx> alpha_tilde;  // normalized pumps, channel order
    double a_x = 0.0, a_y = 0.0;    // A_Q = 2|nu|^2 sum_Q |alpha_tilde|^2
    double s_tilde_x = 0.0, s_tilde_y = 0.0;  // -1 - 2/A_Q (or -inf when A_Q = 0)

    std::size_t channel_count() const { return channels.size(); }
    bool has_x() const { return a_x > 0.0; }
    bool has_y() const { return a_y > 0.0; }
    // one X channel + one Y channel with equal pump shares
    bool symmetric_xy() const;
    OrderingParams sampled_ordering() const { return {s_tilde_x, s_tilde_y}; }
    // varphi_i of the interference condition; e^{i varphi} is 1 (X) or i (Y).
    double interference_phase(std::size_t i) const;
    double abs_nu() const { return std::abs(nu); }
};

// z({dn}) per the linear outcome map.
cplx outcome_to_point(const EosSetup& setup, const OutcomeSet& outcomes);

// Renormalization envelope N({dn}).
double envelope(const EosSetup& setup, const OutcomeSet& outcomes);

// N({dn}) * rho(z({dn}); s~_X, s~_Y). Gaussian-approximation route; requires
// |beta_i| >= 5 on every channel.
double count_probability(const EosSetup& setup, const StateModel& state,
                         const OutcomeSet& outcomes);

// Same quantity without the probe floor; used by the post-measurement
// formalism when the small-probe approximation error is the object of study.
double count_probability_raw(const EosSetup& setup, const StateModel& state,
                             const OutcomeSet& outcomes);

// Diagnostic counter of values clamped from [-1e-12, 0) to 0.
std::uint64_t negative_probability_clamps();

struct CountTable {
    std::vector<long long> lo, hi;     // inclusive per-channel windows
    std::vector<double> probs;         // row-major over the lattice
    std::vector<std::size_t> strides;

    std::size_t size() const { return probs.size(); }
    double total() const;
    double boundary_mass() const;
    OutcomeSet outcome_at(std::size_t flat) const;
    std::size_t flat_index(const OutcomeSet& o) const;
    double prob(const OutcomeSet& o) const { return probs[flat_index(o)]; }
};

// Full outcome table over +/- 6 sigma windows (override with explicit windows).
CountTable count_distribution(const EosSetup& setup, const StateModel& state);
CountTable count_distribution(const EosSetup& setup, const StateModel& state,
                              const std::vector<long long>& lo, const std::vector<long long>& hi);

struct ChannelMoments {
    double mean = 0.0;
    double variance = 0.0;
};

// mean_Q = sqrt(2)|nu||beta_Q| <Q>, var_Q = 2|nu|^2|beta_Q|^2 (Var Q - s~/4),
// with <Q>, Var Q taken from the state's Wigner grid. Symmetric XY setups only.
std::vector<ChannelMoments> moments(const EosSetup& setup, const StateModel& state);

// X-only partitions: envelope times the Gaussian-smoothed position
// distribution; requires real zeta.
double marginal_count_probability(const EosSetup& setup, const StateModel& state,
                                  const OutcomeSet& outcomes);

// Pre-Gaussian-approximation quadrature with the exact Skellam kernel; valid
// for any probe amplitude. Coherent (or vacuum, alpha = 0) MIR input only.
double exact_count_probability_coherent(const EosSetup& setup, cplx alpha,
                                        const OutcomeSet& outcomes);

// Exact per-channel mean/variance helpers used for window sizing (operator
// algebra, not the grid route).
std::vector<ChannelMoments> window_moments(const EosSetup& setup, const StateModel& state);

}  // namespace eoslab
