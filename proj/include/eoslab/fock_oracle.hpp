#pragma once

#include <Eigen/Dense>

#include "eoslab/eos_core.hpp"

namespace eoslab {

// Brute-force simulator in a truncated multimode Fock basis. Mode order:
// [MIR, ch0_s, ch0_z, ch1_s, ch1_z, ...]. Refuses configurations outside its
// validated envelope (|beta| <= 2.2, |zeta| <= 0.55, <= 2 channels, modest
// pure inputs) instead of silently truncating.
class FockOracle {
public:
    enum class SqueezeRoute { Generator, Collective };

    FockOracle(const EosSetup& setup, const StateModel& input);

    // Full evolution U_WP D_z(beta) U_NL on the initial register. A nonzero
    // rotation_detune shifts every waveplate rotation away from the balanced
    // solution (negative control).
    void evolve(SqueezeRoute route = SqueezeRoute::Generator, double rotation_detune = 0.0);

    const Eigen::VectorXcd& state_vector() const { return psi_; }
    const std::vector<int>& dims() const { return dims_; }

    // Outcome probabilities over every representable {dn_i}; sums to
    // 1 - tail mass.
    CountTable outcome_table() const;
    double probability(const OutcomeSet& outcomes) const;
    double mean_dn(std::size_t channel) const;

    // Shell projection + NIR partial trace + renormalization.
    Eigen::MatrixXcd post_state(const OutcomeSet& outcomes) const;

    // Population leaked into any mode's top two levels (max over gates).
    double tail_mass() const { return max_tail_; }

private:
    void prepare_initial(const StateModel& input);
    void apply_single_mode(int mode, const Eigen::MatrixXcd& u);
    void apply_pair(int mode_a, const Eigen::MatrixXcd& u);  // modes must be adjacent
    void apply_squeeze_generator(const std::vector<cplx>& coeffs);
    void apply_collective_route();
    void lowering_pair_apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out,
                             const std::vector<cplx>& coeffs) const;
    void check_after_gate(const char* gate);

    EosSetup setup_;
    std::vector<int> dims_;
    std::vector<std::size_t> strides_;
    Eigen::VectorXcd psi_;
    double max_tail_ = 0.0;
    bool evolved_ = false;
};

}  // namespace eoslab
