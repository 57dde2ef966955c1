#include "eoslab/fock_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "eoslab/special.hpp"

namespace eoslab {

namespace {

constexpr cplx kI{0.0, 1.0};

Eigen::MatrixXcd ladder(int dim) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

// exp(i H) for Hermitian H via eigendecomposition (exactly unitary).
Eigen::MatrixXcd exp_i_hermitian(const Eigen::MatrixXcd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXcd phases(h.rows());
    for (int k = 0; k < h.rows(); ++k) phases(k) = std::exp(kI * es.eigenvalues()(k));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

int squeeze_cutoff(double az) {
    double lambda = std::tanh(az) * std::tanh(az);
    int geo = (lambda > 1e-9) ? static_cast<int>(std::ceil(std::log(1e-9) / std::log(lambda))) : 2;
    int formula = static_cast<int>(std::ceil(4.0 + 10.0 * std::sinh(az) * std::sinh(az)));
    return std::max(geo + 1, formula);
}

int displacement_cutoff(double amp) {
    return static_cast<int>(std::ceil(amp * amp + 8.0 * amp + 4.0));
}

}  // namespace

FockOracle::FockOracle(const EosSetup& setup, const StateModel& input) : setup_(setup) {
    const double az = std::abs(setup.zeta);
    if (setup.channels.size() > 2)
        throw EnvelopeRefusal("oracle envelope: at most 2 channels");
    if (az > 0.55) throw EnvelopeRefusal("oracle envelope: |zeta| <= 0.55");
    for (const auto& ch : setup.channels)
        if (std::abs(ch.probe) > 2.2)
            throw EnvelopeRefusal("oracle envelope: |beta| <= 2.2");

    int mir_cut = squeeze_cutoff(az);
    struct InputNeed {
        int operator()(const states::Vacuum&) const { return 0; }
        int operator()(const states::Coherent& c) const {
            return displacement_cutoff(std::abs(c.alpha));
        }
        int operator()(const states::Fock& f) const { return 2 * f.n + 4; }
        int operator()(const states::Cat& c) const {
            return displacement_cutoff(std::abs(c.alpha));
        }
        int operator()(const states::Squeezed&) const {
            throw EnvelopeRefusal("oracle envelope: squeezed inputs not validated");
        }
        int operator()(const states::Numeric&) const {
            throw EnvelopeRefusal("oracle inputs must be pure analytic states");
        }
    };
    int in_need = std::visit(InputNeed{}, input.value());
    if (in_need > 14) throw EnvelopeRefusal("oracle envelope: input state too large");
    mir_cut = std::min(mir_cut + in_need, 24);

    dims_.push_back(mir_cut + 1);
    for (const auto& ch : setup.channels) {
        int cut = std::min(std::max(squeeze_cutoff(az), displacement_cutoff(std::abs(ch.probe))),
                           26);
        dims_.push_back(cut + 1);  // s-polarized
        dims_.push_back(cut + 1);  // z-polarized
    }
    strides_.assign(dims_.size(), 1);
    std::size_t total = 1;
    for (std::size_t m = dims_.size(); m-- > 0;) {
        strides_[m] = total;
        total *= static_cast<std::size_t>(dims_[m]);
    }
    if (total > 30'000'000u) throw EnvelopeRefusal("oracle register exceeds the memory envelope");
    psi_ = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(total));
    prepare_initial(input);
}

void FockOracle::prepare_initial(const StateModel& input) {
    const int d0 = dims_[0];
    Eigen::VectorXcd mir = Eigen::VectorXcd::Zero(d0);
    struct Fill {
        Eigen::VectorXcd& v;
        void operator()(const states::Vacuum&) const { v(0) = 1.0; }
        void operator()(const states::Coherent& c) const {
            for (int n = 0; n < v.size(); ++n)
                v(n) = std::exp(-0.5 * std::norm(c.alpha) + double(n) * std::log(cplx(c.alpha)) -
                                0.5 * log_factorial(n));
            if (std::abs(c.alpha) == 0.0) {
                v.setZero();
                v(0) = 1.0;
            }
        }
        void operator()(const states::Fock& f) const { v(f.n) = 1.0; }
        void operator()(const states::Cat& c) const {
            for (int n = 0; n < v.size(); ++n) {
                cplx an = std::exp(-0.5 * std::norm(c.alpha) + double(n) * std::log(cplx(c.alpha)) -
                                   0.5 * log_factorial(n));
                v(n) = an * (1.0 + double(c.parity) * ((n % 2) ? -1.0 : 1.0));
            }
            v *= std::sqrt(c.norm2);
        }
        void operator()(const states::Squeezed&) const {}
        void operator()(const states::Numeric&) const {}
    };
    std::visit(Fill{mir}, input.value());
    double norm = mir.norm();
    if (std::abs(norm - 1.0) > 1e-8)
        throw EnvelopeRefusal("input state truncation loses more than 1e-8 amplitude");
    mir /= norm;
    // register = mir (stride_0 blocks) x vacuum elsewhere
    for (int n = 0; n < dims_[0]; ++n) psi_(n * static_cast<Eigen::Index>(strides_[0])) = mir(n);
}

void FockOracle::apply_single_mode(int mode, const Eigen::MatrixXcd& u) {
    const int d = dims_[mode];
    const std::size_t stride = strides_[mode];
    const std::size_t n_inner = stride;
    const std::size_t n_outer = static_cast<std::size_t>(psi_.size()) / (d * stride);
    Eigen::MatrixXcd slab(d, n_inner);
    for (std::size_t o = 0; o < n_outer; ++o) {
        cplx* base = psi_.data() + o * d * stride;
        Eigen::Map<Eigen::MatrixXcd, 0, Eigen::OuterStride<>>
            view(base, static_cast<Eigen::Index>(n_inner), d,
                 Eigen::OuterStride<>(static_cast<Eigen::Index>(stride)));
        // view(i, j) = amplitude with mode index j, inner index i
        slab.noalias() = u * view.transpose();
        view = slab.transpose();
    }
}

void FockOracle::apply_pair(int mode_a, const Eigen::MatrixXcd& u) {
    // acts on adjacent modes (mode_a, mode_a+1) as one axis of size da*db
    const int da = dims_[mode_a], db = dims_[mode_a + 1];
    const int d = da * db;
    const std::size_t stride = strides_[mode_a + 1];  // combined inner stride
    const std::size_t n_inner = stride;
    const std::size_t n_outer = static_cast<std::size_t>(psi_.size()) / (d * stride);
    Eigen::MatrixXcd slab(d, n_inner);
    for (std::size_t o = 0; o < n_outer; ++o) {
        cplx* base = psi_.data() + o * d * stride;
        Eigen::Map<Eigen::MatrixXcd, 0, Eigen::OuterStride<>>
            view(base, static_cast<Eigen::Index>(n_inner), d,
                 Eigen::OuterStride<>(static_cast<Eigen::Index>(stride)));
        slab.noalias() = u * view.transpose();
        view = slab.transpose();
    }
}

void FockOracle::lowering_pair_apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out,
                                     const std::vector<cplx>& coeffs) const {
    // out += sum_i coeffs[i] * (a_MIR a_{i,s}) in  and  -conj(coeffs[i]) (a^dag a^dag) in
    // handled jointly: G = sum_i [ c_i a_0 a_{s_i} - conj(c_i) a_0^dag a_{s_i}^dag ]
    out.setZero();
    const std::size_t n = static_cast<std::size_t>(in.size());
    const int d0 = dims_[0];
    const std::size_t s0 = strides_[0];
    for (std::size_t ch = 0; ch < setup_.channels.size(); ++ch) {
        const int mode = 1 + 2 * static_cast<int>(ch);
        const int dm = dims_[mode];
        const std::size_t sm = strides_[mode];
        const cplx c = coeffs[ch];
        const cplx cc = std::conj(c);
        for (std::size_t idx = 0; idx < n; ++idx) {
            int n0 = static_cast<int>((idx / s0) % d0);
            int nm = static_cast<int>((idx / sm) % dm);
            cplx amp = in(static_cast<Eigen::Index>(idx));
            if (amp == cplx(0.0)) continue;
            // lowering both: contributes to (n0-1, nm-1)
            if (n0 > 0 && nm > 0) {
                double f = std::sqrt(double(n0) * double(nm));
                out(static_cast<Eigen::Index>(idx - s0 - sm)) += c * f * amp;
            }
            // raising both: contributes to (n0+1, nm+1)
            if (n0 + 1 < d0 && nm + 1 < dm) {
                double f = std::sqrt(double(n0 + 1) * double(nm + 1));
                out(static_cast<Eigen::Index>(idx + s0 + sm)) -= cc * f * amp;
            }
        }
    }
}

void FockOracle::apply_squeeze_generator(const std::vector<cplx>& coeffs) {
    // psi <- exp(G) psi by scaling-and-Taylor; G is anti-Hermitian.
    double cnorm = 0.0;
    for (auto c : coeffs) cnorm += std::abs(c);
    double bound = cnorm * std::sqrt(double(dims_[0])) *
                   std::sqrt(double(*std::max_element(dims_.begin() + 1, dims_.end())));
    int scal = std::max(1, static_cast<int>(std::ceil(bound)));
    std::vector<cplx> scaled(coeffs);
    for (auto& c : scaled) c /= double(scal);

    Eigen::VectorXcd term(psi_.size()), tmp(psi_.size());
    for (int s = 0; s < scal; ++s) {
        term = psi_;
        for (int k = 1; k <= 60; ++k) {
            lowering_pair_apply(term, tmp, scaled);
            term = tmp / double(k);
            psi_ += term;
            if (term.norm() < 1e-16) break;
        }
    }
}

void FockOracle::apply_collective_route() {
    // basis change so the collective mode sum_i at_i a_{i,s} lands on channel-0 s,
    // two-mode squeeze (MIR, s0), inverse change. For one channel the change is
    // a pure phase.
    const auto& at = setup_.alpha_tilde;
    if (setup_.channels.size() == 1) {
        double theta0 = std::arg(at[0]);
        Eigen::MatrixXcd n0 = Eigen::MatrixXcd::Zero(dims_[1], dims_[1]);
        for (int k = 0; k < dims_[1]; ++k) n0(k, k) = double(k);
        apply_single_mode(1, exp_i_hermitian(-theta0 * n0));
        apply_squeeze_generator({std::conj(setup_.zeta) * 1.0});
        apply_single_mode(1, exp_i_hermitian(theta0 * n0));
        return;
    }
    // two channels: passive 2x2 unitary W with first row (at0, at1); collective
    // mode b = W row 0 applied to (a_{s0}, a_{s1}).
    cplx a = at[0], b = at[1];
    Eigen::Matrix2cd W;
    W << a, b, -std::conj(b), std::conj(a);  // unitary since |a|^2+|b|^2 = 1
    // Hermitian H2 with e^{iH2} = W (W is normal: eigendecompose)
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> ces(W);
    Eigen::Matrix2cd Q = ces.eigenvectors();
    Eigen::Vector2cd ev = ces.eigenvalues();
    Eigen::Matrix2cd H2 = Q *
                          Eigen::Vector2cd(std::arg(ev(0)), std::arg(ev(1)))
                              .cast<cplx>()
                              .asDiagonal() *
                          Q.adjoint();
    // apply exp(i (H2_00 n0 + H2_11 n1 + H2_01 a0^dag a1 + H2_10 a1^dag a0)) via Taylor
    const int m0 = 1, m1 = 3;
    const std::size_t sA = strides_[m0], sB = strides_[m1];
    const int dA = dims_[m0], dB = dims_[m1];
    auto apply_g = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out, double scale) {
        out.setZero();
        for (std::size_t idx = 0; idx < static_cast<std::size_t>(in.size()); ++idx) {
            cplx amp = in(static_cast<Eigen::Index>(idx));
            if (amp == cplx(0.0)) continue;
            int na = static_cast<int>((idx / sA) % dA);
            int nb = static_cast<int>((idx / sB) % dB);
            out(static_cast<Eigen::Index>(idx)) +=
                kI * (H2(0, 0) * double(na) + H2(1, 1) * double(nb)) * amp * scale;
            if (na + 1 < dA && nb > 0)
                out(static_cast<Eigen::Index>(idx + sA - sB)) +=
                    kI * H2(0, 1) * std::sqrt(double(na + 1) * double(nb)) * amp * scale;
            if (nb + 1 < dB && na > 0)
                out(static_cast<Eigen::Index>(idx - sA + sB)) +=
                    kI * H2(1, 0) * std::sqrt(double(na) * double(nb + 1)) * amp * scale;
        }
    };
    auto exp_passive = [&](double direction) {
        double bound = (std::abs(H2(0, 0)) + std::abs(H2(1, 1)) + 2.0 * std::abs(H2(0, 1))) *
                       std::max(dA, dB);
        int scal = std::max(1, static_cast<int>(std::ceil(bound)));
        Eigen::VectorXcd term(psi_.size()), tmp(psi_.size());
        for (int s = 0; s < scal; ++s) {
            term = psi_;
            for (int k = 1; k <= 80; ++k) {
                apply_g(term, tmp, direction / double(scal));
                term = tmp / double(k);
                psi_ += term;
                if (term.norm() < 1e-16) break;
            }
        }
    };
    // R = exp(+i sum H2 a^dag a) satisfies R^dag a_{s0} R = b; conjugate the
    // plain two-mode squeeze with it.
    exp_passive(1.0);
    apply_squeeze_generator({std::conj(setup_.zeta) * 1.0, cplx(0.0)});
    exp_passive(-1.0);
}

void FockOracle::check_after_gate(const char* gate) {
    double norm = psi_.norm();
    if (std::abs(norm - 1.0) > 1e-10)
        throw TruncationBreach(std::string("register norm drifted after ") + gate);
    // population in any mode's top two levels
    for (std::size_t m = 0; m < dims_.size(); ++m) {
        const int d = dims_[m];
        const std::size_t s = strides_[m];
        double pop = 0.0;
        for (std::size_t idx = 0; idx < static_cast<std::size_t>(psi_.size()); ++idx) {
            int nm = static_cast<int>((idx / s) % d);
            if (nm >= d - 2) pop += std::norm(psi_(static_cast<Eigen::Index>(idx)));
        }
        max_tail_ = std::max(max_tail_, pop);
        if (pop > 1e-8)
            throw TruncationBreach(std::string("top-two-level population above 1e-8 after ") +
                                   gate);
    }
}

void FockOracle::evolve(SqueezeRoute route, double rotation_detune) {
    if (evolved_) throw Error("oracle register already evolved");
    evolved_ = true;

    // (1) multimode squeeze
    if (std::abs(setup_.zeta) > 0.0) {
        if (route == SqueezeRoute::Generator) {
            std::vector<cplx> coeffs;
            for (std::size_t ch = 0; ch < setup_.channels.size(); ++ch)
                coeffs.push_back(std::conj(setup_.zeta) * setup_.alpha_tilde[ch]);
            apply_squeeze_generator(coeffs);
        } else {
            apply_collective_route();
        }
    }
    check_after_gate("squeeze");

    // (2) z-polarized displacements
    for (std::size_t ch = 0; ch < setup_.channels.size(); ++ch) {
        int mode = 2 + 2 * static_cast<int>(ch);
        cplx beta = setup_.channels[ch].probe;
        int d = dims_[mode];
        Eigen::MatrixXcd a = ladder(d);
        Eigen::MatrixXcd h = -kI * (beta * a.adjoint() - std::conj(beta) * a);
        apply_single_mode(mode, exp_i_hermitian(h));
        check_after_gate("displacement");
    }

    // (3) waveplates on each (s, z) pair
    for (std::size_t ch = 0; ch < setup_.channels.size(); ++ch) {
        int ms = 1 + 2 * static_cast<int>(ch);
        const auto& c = setup_.channels[ch];
        int ds = dims_[ms], dz = dims_[ms + 1];
        Eigen::MatrixXcd As = Eigen::MatrixXcd::Zero(ds * dz, ds * dz);
        Eigen::MatrixXcd Az = Eigen::MatrixXcd::Zero(ds * dz, ds * dz);
        Eigen::MatrixXcd ls = ladder(ds), lz = ladder(dz);
        for (int i = 0; i < ds; ++i)
            for (int j = 0; j < dz; ++j) {
                int row = i * dz + j;
                if (i + 1 < ds) As(row, (i + 1) * dz + j) = ls(i, i + 1);
                if (j + 1 < dz) Az(row, i * dz + j + 1) = lz(j, j + 1);
            }
        double rot = c.rotation + rotation_detune;
        Eigen::MatrixXcd atheta = std::cos(rot) * As + std::sin(rot) * Az;
        Eigen::MatrixXcd h = c.retardance * (atheta.adjoint() * atheta);
        apply_pair(ms, exp_i_hermitian(h));
        check_after_gate("waveplate");
    }
}

CountTable FockOracle::outcome_table() const {
    const std::size_t k = setup_.channels.size();
    CountTable table;
    table.lo.resize(k);
    table.hi.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        table.lo[c] = -(dims_[2 + 2 * c] - 1);
        table.hi[c] = dims_[1 + 2 * c] - 1;
    }
    table.strides.assign(k, 1);
    std::size_t total = 1;
    for (std::size_t c = k; c-- > 0;) {
        table.strides[c] = total;
        total *= static_cast<std::size_t>(table.hi[c] - table.lo[c] + 1);
    }
    table.probs.assign(total, 0.0);
    for (std::size_t idx = 0; idx < static_cast<std::size_t>(psi_.size()); ++idx) {
        double w = std::norm(psi_(static_cast<Eigen::Index>(idx)));
        if (w == 0.0) continue;
        std::size_t f = 0;
        for (std::size_t c = 0; c < k; ++c) {
            int ns = static_cast<int>((idx / strides_[1 + 2 * c]) % dims_[1 + 2 * c]);
            int nz = static_cast<int>((idx / strides_[2 + 2 * c]) % dims_[2 + 2 * c]);
            f += table.strides[c] * static_cast<std::size_t>(ns - nz - table.lo[c]);
        }
        table.probs[f] += w;
    }
    return table;
}

double FockOracle::probability(const OutcomeSet& outcomes) const {
    const std::size_t k = setup_.channels.size();
    double p = 0.0;
    for (std::size_t idx = 0; idx < static_cast<std::size_t>(psi_.size()); ++idx) {
        double w = std::norm(psi_(static_cast<Eigen::Index>(idx)));
        if (w == 0.0) continue;
        bool match = true;
        for (std::size_t c = 0; c < k && match; ++c) {
            int ns = static_cast<int>((idx / strides_[1 + 2 * c]) % dims_[1 + 2 * c]);
            int nz = static_cast<int>((idx / strides_[2 + 2 * c]) % dims_[2 + 2 * c]);
            match = (ns - nz) == outcomes.dn[c];
        }
        if (match) p += w;
    }
    return p;
}

double FockOracle::mean_dn(std::size_t channel) const {
    double m = 0.0;
    for (std::size_t idx = 0; idx < static_cast<std::size_t>(psi_.size()); ++idx) {
        double w = std::norm(psi_(static_cast<Eigen::Index>(idx)));
        if (w == 0.0) continue;
        int ns = static_cast<int>((idx / strides_[1 + 2 * channel]) % dims_[1 + 2 * channel]);
        int nz = static_cast<int>((idx / strides_[2 + 2 * channel]) % dims_[2 + 2 * channel]);
        m += w * (ns - nz);
    }
    return m;
}

Eigen::MatrixXcd FockOracle::post_state(const OutcomeSet& outcomes) const {
    double p = probability(outcomes);
    if (p < 1e-12)
        throw VanishingOutcomeProbability("oracle outcome probability below 1e-12");
    const int d0 = dims_[0];
    const std::size_t s0 = strides_[0];
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d0, d0);
    const std::size_t inner_total = static_cast<std::size_t>(psi_.size()) / d0;
    const std::size_t k = setup_.channels.size();
    for (std::size_t inner = 0; inner < inner_total; ++inner) {
        // inner indexes NIR configuration (strides_ of mode 0 == inner_total)
        bool match = true;
        for (std::size_t c = 0; c < k && match; ++c) {
            int ns = static_cast<int>((inner / strides_[1 + 2 * c]) % dims_[1 + 2 * c]);
            int nz = static_cast<int>((inner / strides_[2 + 2 * c]) % dims_[2 + 2 * c]);
            match = (ns - nz) == outcomes.dn[c];
        }
        if (!match) continue;
        for (int m = 0; m < d0; ++m) {
            cplx am = psi_(static_cast<Eigen::Index>(m * s0 + inner));
            if (am == cplx(0.0)) continue;
            for (int n = 0; n < d0; ++n)
                rho(m, n) += am * std::conj(psi_(static_cast<Eigen::Index>(n * s0 + inner)));
        }
    }
    rho /= p;
    return rho;
}

}  // namespace eoslab
