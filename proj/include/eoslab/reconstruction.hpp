#pragma once

#include <cstdint>

#include "eoslab/post_measurement.hpp"
#include "eoslab/rng.hpp"

namespace eoslab {

// Parameterized state family for Bayesian reconstruction.
class ParameterFamily {
public:
    enum class Kind { Coherent, Fock };

    // Coherent family: nodes x nodes grid over [-alpha_max, alpha_max]^2 with
    // uniform Lebesgue measure.
    static ParameterFamily coherent(double alpha_max = 6.0, int nodes = 81);
    // Fock family: n in 0..n_top with uniform counting measure.
    static ParameterFamily fock(int n_top = 15);

    Kind kind() const { return kind_; }
    std::size_t size() const { return members_.size(); }
    const StateModel& member(std::size_t j) const { return members_[j]; }
    cplx coherent_node(std::size_t j) const;
    int fock_node(std::size_t j) const { return static_cast<int>(j); }
    double alpha_max() const { return alpha_max_; }
    int nodes_per_axis() const { return nodes_; }

private:
    ParameterFamily() = default;
    Kind kind_ = Kind::Coherent;
    double alpha_max_ = 6.0;
    int nodes_ = 81;
    std::vector<StateModel> members_;
};

struct PosteriorGrid {
    const ParameterFamily* family = nullptr;
    std::vector<double> weights;           // normalized to 1
    std::vector<OutcomeSet> history;

    double entropy() const;
    std::size_t argmax() const;
};

PosteriorGrid uniform_prior(const ParameterFamily& family);

// First (or simultaneous) update: likelihood is the count probability.
PosteriorGrid bayes_update(const PosteriorGrid& prior, const EosSetup& setup,
                           const OutcomeSet& outcomes);

// Consecutive second stage given first-stage outcome o1: the stage-2 kernel is
// the prime-mapped distribution of the family member, rho_lambda(z'(z(o2)); s~').
PosteriorGrid bayes_update_consecutive(const PosteriorGrid& prior, const EosSetup& setup,
                                       const OutcomeSet& o1, const OutcomeSet& o2);

// rho_rec = sum_j w_j rho_lambda_j in the truncated Fock basis.
StateModel reconstruct(const PosteriorGrid& posterior, int n_max = 80);

// <psi|rho_rec|psi> for a pure initial state.
double fidelity_vs_initial(const StateModel& initial, const StateModel& reconstructed);

// Fock-basis coefficients of a pure state (throws NonPureInitial otherwise).
Eigen::VectorXcd fock_coefficients(const StateModel& pure, int n_max);

enum class Scheme { XY, XYXY, XYtoXY };

struct FidelityEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    int n_samples = 0;
};

// Monte-Carlo average reconstruction fidelity. Outcomes are drawn by exact
// inverse-CDF over the truncated outcome tables; deterministic under the seed.
FidelityEstimate avg_fidelity_mc(const StateModel& initial, double zeta, double beta,
                                 Scheme scheme, const ParameterFamily& family, int n_samples,
                                 std::uint64_t seed = kDefaultSeed);

// [2 coth^2|zeta| + 1]^{-1}.
double analytic_avg_fidelity_single(double zeta);

// Dashed-line benchmark: the s = -1 (Husimi-sampling) limit of the same
// Bayesian pipeline. Exact 1/3 for the coherent family; Monte-Carlo for Fock.
FidelityEstimate eight_port_reference(const StateModel& initial, const ParameterFamily& family,
                                      int n_samples = 4000, std::uint64_t seed = kDefaultSeed);

// Average fidelity between the initial and post-measurement state over sampled
// outcomes of one symmetric XY measurement.
FidelityEstimate avg_post_measurement_fidelity(const StateModel& initial, double zeta,
                                               double beta, int n_samples,
                                               std::uint64_t seed = kDefaultSeed);

// Symmetric setups used by the schemes (one or two channels per quadrature).
EosSetup symmetric_xy_setup(double zeta, double beta);
EosSetup symmetric_xyxy_setup(double zeta, double beta);

}  // namespace eoslab
