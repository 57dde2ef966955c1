#include "eoslab/eos_core.hpp"

#include <atomic>
#include <cmath>

#include "eoslab/parallel.hpp"
#include "eoslab/skellam.hpp"
#include "eoslab/special.hpp"

namespace eoslab {

namespace {

constexpr cplx kI{0.0, 1.0};

std::atomic<std::uint64_t> g_negative_clamps{0};

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a > M_PI) a -= 2.0 * M_PI;
    if (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

void require_probe_floor(const EosSetup& setup) {
    for (const auto& ch : setup.channels)
        if (std::abs(ch.probe) < 5.0)
            throw ApproximationDomain(
                "Gaussian count-statistics route requires |beta_i| >= 5 on every channel");
}

void require_both_partitions(const EosSetup& setup) {
    if (!setup.has_x() || !setup.has_y())
        throw UnsupportedConfiguration(
            "both quadrature partitions must carry pump; use marginal_count_probability for "
            "single-quadrature setups");
}

double quadrature_sum(const EosSetup& setup, const OutcomeSet& o, Quadrature q) {
    double s = 0.0;
    for (std::size_t i = 0; i < setup.channels.size(); ++i) {
        if (setup.channels[i].quadrature != q) continue;
        s += std::abs(setup.alpha_tilde[i]) / std::abs(setup.channels[i].probe) *
             static_cast<double>(o.dn[i]);
    }
    return s;
}

}  // namespace

WaveplateSolution solve_waveplate(double pump_phase, double probe_amp, Quadrature quadrature,
                                  double zeta_phase) {
    (void)probe_amp;
    WaveplateSolution sol;
    sol.retardance = M_PI;
    sol.rotation = 0.5 * std::acos(std::sqrt(0.5));
    sol.k1 = sol.k2 = 0;
    double target = (quadrature == Quadrature::X) ? 0.0 : M_PI / 2.0;
    sol.arg_beta = wrap_angle(M_PI + zeta_phase - pump_phase - target);
    return sol;
}

EosSetup EosSetup::derive(cplx zeta, const std::vector<ChannelSpec>& specs) {
    if (specs.empty()) throw EmptySetup("at least one channel is required");
    double pump_norm2 = 0.0;
    for (const auto& s : specs) pump_norm2 += std::norm(s.pump);
    if (pump_norm2 <= 0.0) throw ZeroPump("pumps must not all vanish");

    EosSetup setup;
    setup.zeta = zeta;
    double az = std::abs(zeta);
    setup.mu = std::cosh(az);
    setup.nu = (az > 0.0) ? std::exp(kI * std::arg(zeta)) * std::sinh(az) : cplx(0.0);

    double sx2 = 0.0, sy2 = 0.0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        cplx at = specs[i].pump / std::sqrt(pump_norm2);
        setup.alpha_tilde.push_back(at);
        Channel ch;
        ch.index = static_cast<int>(i);
        ch.pump = specs[i].pump;
        ch.quadrature = specs[i].quadrature;
        auto sol = solve_waveplate(std::arg(at), specs[i].probe_mag, specs[i].quadrature,
                                   std::arg(zeta));
        ch.retardance = sol.retardance;
        ch.rotation = sol.rotation;
        ch.k1 = sol.k1;
        ch.k2 = sol.k2;
        ch.probe = specs[i].probe_mag * std::exp(kI * sol.arg_beta);
        setup.channels.push_back(ch);
        if (specs[i].quadrature == Quadrature::X)
            sx2 += std::norm(at);
        else
            sy2 += std::norm(at);
    }
    double nu2 = std::norm(setup.nu);
    setup.a_x = 2.0 * nu2 * sx2;
    setup.a_y = 2.0 * nu2 * sy2;
    setup.s_tilde_x = (setup.a_x > 0.0) ? -1.0 - 2.0 / setup.a_x : -INFINITY;
    setup.s_tilde_y = (setup.a_y > 0.0) ? -1.0 - 2.0 / setup.a_y : -INFINITY;

    // balanced-signal invariant: e^{i varphi} = 1 (X) or i (Y)
    if (az > 0.0) {
        for (std::size_t i = 0; i < setup.channels.size(); ++i) {
            cplx ph = std::exp(kI * setup.interference_phase(i));
            cplx want = (setup.channels[i].quadrature == Quadrature::X) ? cplx(1.0) : kI;
            if (std::abs(ph - want) > 1e-10)
                throw UnsupportedConfiguration("interference phase violates balanced condition");
        }
    }
    return setup;
}

bool EosSetup::symmetric_xy() const {
    if (channels.size() != 2) return false;
    if (channels[0].quadrature == channels[1].quadrature) return false;
    if (std::abs(std::abs(alpha_tilde[0]) - std::abs(alpha_tilde[1])) > 1e-12) return false;
    return true;
}

double EosSetup::interference_phase(std::size_t i) const {
    const Channel& ch = channels[i];
    double phi = ch.retardance;
    double term = ((ch.k2 % 2) ? -1.0 : 1.0) * std::asin(std::sqrt(2.0) * std::cos(phi / 2.0));
    return wrap_angle((ch.k1 + ch.k2 + 1) * M_PI + term + std::arg(zeta) -
                      std::arg(alpha_tilde[i]) - std::arg(ch.probe));
}

cplx outcome_to_point(const EosSetup& setup, const OutcomeSet& outcomes) {
    if (outcomes.dn.size() != setup.channels.size())
        throw UnsupportedConfiguration("outcome length must match channel count");
    double re = 0.0, im = 0.0;
    if (setup.has_x())
        re = -setup.abs_nu() * 0.5 * (1.0 + setup.s_tilde_x) *
             quadrature_sum(setup, outcomes, Quadrature::X);
    if (setup.has_y())
        im = -setup.abs_nu() * 0.5 * (1.0 + setup.s_tilde_y) *
             quadrature_sum(setup, outcomes, Quadrature::Y);
    return {re, im};
}

double envelope(const EosSetup& setup, const OutcomeSet& outcomes) {
    require_both_partitions(setup);
    cplx z = outcome_to_point(setup, outcomes);
    double lg = std::log(M_PI) +
                0.5 * (std::log1p(-setup.s_tilde_x) + std::log1p(-setup.s_tilde_y)) -
                std::log(2.0) - 0.5 * (std::log1p(setup.a_x) + std::log1p(setup.a_y));
    for (std::size_t i = 0; i < setup.channels.size(); ++i) {
        double b2 = std::norm(setup.channels[i].probe);
        double dn = static_cast<double>(outcomes.dn[i]);
        lg += -dn * dn / (2.0 * b2) - 0.5 * std::log(2.0 * M_PI * b2);
    }
    lg += -2.0 * z.real() * z.real() / (1.0 + setup.s_tilde_x) -
          2.0 * z.imag() * z.imag() / (1.0 + setup.s_tilde_y);
    return std::exp(lg);
}

double count_probability_raw(const EosSetup& setup, const StateModel& state,
                             const OutcomeSet& outcomes) {
    require_both_partitions(setup);
    cplx z = outcome_to_point(setup, outcomes);
    double p = envelope(setup, outcomes) * qpd_eval(state, z, setup.sampled_ordering());
    if (p < 0.0) {
        if (p < -1e-12) throw Error("count probability below the -1e-12 negativity floor");
        g_negative_clamps.fetch_add(1);
        p = 0.0;
    }
    return p;
}

double count_probability(const EosSetup& setup, const StateModel& state,
                         const OutcomeSet& outcomes) {
    require_probe_floor(setup);
    return count_probability_raw(setup, state, outcomes);
}

std::uint64_t negative_probability_clamps() { return g_negative_clamps.load(); }

double CountTable::total() const {
    double s = 0.0;
    for (double v : probs) s += v;
    return s;
}

OutcomeSet CountTable::outcome_at(std::size_t flat) const {
    OutcomeSet o;
    o.dn.resize(lo.size());
    for (std::size_t c = 0; c < lo.size(); ++c) {
        std::size_t span = static_cast<std::size_t>(hi[c] - lo[c] + 1);
        o.dn[c] = lo[c] + static_cast<long long>((flat / strides[c]) % span);
    }
    return o;
}

std::size_t CountTable::flat_index(const OutcomeSet& o) const {
    std::size_t f = 0;
    for (std::size_t c = 0; c < lo.size(); ++c) {
        if (o.dn[c] < lo[c] || o.dn[c] > hi[c]) throw Error("outcome outside table window");
        f += strides[c] * static_cast<std::size_t>(o.dn[c] - lo[c]);
    }
    return f;
}

double CountTable::boundary_mass() const {
    double s = 0.0;
    for (std::size_t f = 0; f < probs.size(); ++f) {
        OutcomeSet o = outcome_at(f);
        for (std::size_t c = 0; c < lo.size(); ++c) {
            if (o.dn[c] == lo[c] || o.dn[c] == hi[c]) {
                s += probs[f];
                break;
            }
        }
    }
    return s;
}

std::vector<ChannelMoments> window_moments(const EosSetup& setup, const StateModel& state) {
    // Exact operator-algebra moments of the outcome distribution; used for
    // window sizing. VarDn_i = b^2 + nu^2 at^2 E|g'|^2 + 4 nu^2 at^2 b^2 (VarQ + 1/4).
    double nu2 = std::norm(setup.nu), mu = setup.mu;
    double vx = state.var_x(), vy = state.var_y();
    double mean2 = std::norm(state.mean_a());
    double eg2 = mu * mu * (vx + vy + 0.5 + mean2);  // E|gamma'|^2
    std::vector<ChannelMoments> out;
    for (std::size_t i = 0; i < setup.channels.size(); ++i) {
        const auto& ch = setup.channels[i];
        double at = std::abs(setup.alpha_tilde[i]);
        double b = std::abs(ch.probe);
        bool isx = ch.quadrature == Quadrature::X;
        double qmean = isx ? state.mean_x() : state.mean_y();
        double qvar = isx ? vx : vy;
        ChannelMoments m;
        m.mean = 2.0 * std::sqrt(nu2) * at * b * qmean;
        m.variance = b * b + nu2 * at * at * eg2 / (mu * mu) +
                     4.0 * nu2 * at * at * b * b * (qvar + 0.25);
        out.push_back(m);
    }
    return out;
}

CountTable count_distribution(const EosSetup& setup, const StateModel& state,
                              const std::vector<long long>& lo,
                              const std::vector<long long>& hi) {
    require_both_partitions(setup);
    require_probe_floor(setup);
    const std::size_t k = setup.channels.size();
    CountTable table;
    table.lo = lo;
    table.hi = hi;
    table.strides.assign(k, 1);
    std::size_t total = 1;
    for (std::size_t c = k; c-- > 0;) {
        table.strides[c] = total;
        total *= static_cast<std::size_t>(hi[c] - lo[c] + 1);
    }
    table.probs.assign(total, 0.0);

    // Tensor fast path: one channel per quadrature makes z({dn}) a grid.
    std::size_t nX = 0, nY = 0;
    for (const auto& ch : setup.channels) (ch.quadrature == Quadrature::X ? nX : nY)++;
    if (nX == 1 && nY == 1 && state.is_numeric()) {
        std::size_t ix = setup.channels[0].quadrature == Quadrature::X ? 0 : 1;
        std::size_t iy = 1 - ix;
        std::vector<double> xs, ys;
        for (long long d = lo[ix]; d <= hi[ix]; ++d) {
            OutcomeSet o;
            o.dn.assign(k, 0);
            o.dn[ix] = d;
            xs.push_back(outcome_to_point(setup, o).real());
        }
        for (long long d = lo[iy]; d <= hi[iy]; ++d) {
            OutcomeSet o;
            o.dn.assign(k, 0);
            o.dn[iy] = d;
            ys.push_back(outcome_to_point(setup, o).imag());
        }
        const auto& num = std::get<states::Numeric>(state.value());
        Eigen::MatrixXd q = detail::numeric_qpd_tensor(num, xs, ys, setup.sampled_ordering());
        parallel_for(table.probs.size(), [&](std::size_t f) {
            OutcomeSet o = table.outcome_at(f);
            double v = envelope(setup, o) *
                       q(static_cast<int>(o.dn[ix] - lo[ix]), static_cast<int>(o.dn[iy] - lo[iy]));
            table.probs[f] = std::max(v, 0.0);
        });
    } else {
        parallel_for(table.probs.size(), [&](std::size_t f) {
            OutcomeSet o = table.outcome_at(f);
            table.probs[f] = count_probability(setup, state, o);
        });
    }

    if (table.boundary_mass() > 1e-4)
        throw WindowTooSmall("count-distribution boundary mass above 1e-4");
    return table;
}

CountTable count_distribution(const EosSetup& setup, const StateModel& state) {
    auto wm = window_moments(setup, state);
    std::vector<long long> lo(wm.size()), hi(wm.size());
    for (std::size_t i = 0; i < wm.size(); ++i) {
        double sigma = std::sqrt(wm[i].variance);
        long long half = static_cast<long long>(std::ceil(6.0 * sigma)) + 2;
        long long center = static_cast<long long>(std::llround(wm[i].mean));
        lo[i] = center - half;
        hi[i] = center + half;
    }
    return count_distribution(setup, state, lo, hi);
}

std::vector<ChannelMoments> moments(const EosSetup& setup, const StateModel& state) {
    if (!setup.symmetric_xy())
        throw UnsupportedConfiguration("moments() is derived for symmetric XY setups only");
    require_probe_floor(setup);
    QpdGrid w = qpd_grid(state, OrderingParams{0.0, 0.0});
    GridMoments gm = grid_moments(w);
    double nu = setup.abs_nu(), nu2 = nu * nu;
    std::vector<ChannelMoments> out;
    for (const auto& ch : setup.channels) {
        double b = std::abs(ch.probe);
        bool isx = ch.quadrature == Quadrature::X;
        double qmean = isx ? gm.mean_x : gm.mean_y;
        double qvar = isx ? gm.var_x : gm.var_y;
        double st = isx ? setup.s_tilde_x : setup.s_tilde_y;
        ChannelMoments m;
        m.mean = std::sqrt(2.0) * nu * b * qmean;
        m.variance = 2.0 * nu2 * b * b * (qvar - st / 4.0);
        out.push_back(m);
    }
    return out;
}

double marginal_count_probability(const EosSetup& setup, const StateModel& state,
                                  const OutcomeSet& outcomes) {
    for (const auto& ch : setup.channels)
        if (ch.quadrature == Quadrature::Y)
            throw PartitionViolation("marginal route requires an X-only partition");
    require_probe_floor(setup);
    if (std::abs(std::arg(setup.zeta)) > 1e-12 && std::abs(setup.zeta) > 0.0)
        throw UnsupportedConfiguration("marginal route requires real zeta");
    double st = setup.s_tilde_x;
    double A = setup.a_x;
    double nu2 = std::norm(setup.nu);
    double SX = quadrature_sum(setup, outcomes, Quadrature::X);
    double x0 = outcome_to_point(setup, outcomes).real();  // nu S_X / A_X

    // N_X = sqrt((1-s)/(-s)) / sqrt(1+A) * prod gauss * exp(nu^2 S_X^2 / A)
    double lg = 0.5 * (std::log1p(-st) - std::log(-st)) - 0.5 * std::log1p(A) +
                nu2 * SX * SX / A;
    for (std::size_t i = 0; i < setup.channels.size(); ++i) {
        double b2 = std::norm(setup.channels[i].probe);
        double dn = static_cast<double>(outcomes.dn[i]);
        lg += -dn * dn / (2.0 * b2) - 0.5 * std::log(2.0 * M_PI * b2);
    }

    // integral of <x|rho|x> exp(2 (x-x0)^2 / s~_X) dx, s~_X < 0
    const auto& rule = gauss_hermite(64);
    double width = std::sqrt(-st / 2.0);
    double integral = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        double x = x0 + width * rule.nodes[i];
        integral += rule.weights[i] * marginal(state, Quadrature::X, x);
    }
    integral *= width;
    return std::exp(lg) * integral;
}

double exact_count_probability_coherent(const EosSetup& setup, cplx alpha,
                                        const OutcomeSet& outcomes) {
    if (outcomes.dn.size() != setup.channels.size())
        throw UnsupportedConfiguration("outcome length must match channel count");
    const double mu = setup.mu;
    const double nu = setup.abs_nu();
    const double ua = alpha.real(), va = alpha.imag();

    auto evaluate = [&](int N) {
        const auto& rule = gauss_hermite(N);
        double tot = 0.0;
        for (int i = 0; i < N; ++i) {
            double u = mu * rule.nodes[i];
            for (int j = 0; j < N; ++j) {
                double v = mu * rule.nodes[j];
                double f = std::exp(2.0 * (rule.nodes[i] * ua + rule.nodes[j] * va));
                for (std::size_t c = 0; c < setup.channels.size() && f != 0.0; ++c) {
                    double at = std::abs(setup.alpha_tilde[c]);
                    double b = std::abs(setup.channels[c].probe);
                    double cc = nu / mu * at;
                    double m1, m2;
                    if (setup.channels[c].quadrature == Quadrature::X) {
                        m1 = 0.5 * ((b + cc * u) * (b + cc * u) + cc * cc * v * v);
                        m2 = 0.5 * ((b - cc * u) * (b - cc * u) + cc * cc * v * v);
                    } else {
                        m1 = 0.5 * ((b + cc * v) * (b + cc * v) + cc * cc * u * u);
                        m2 = 0.5 * ((b - cc * v) * (b - cc * v) + cc * cc * u * u);
                    }
                    f *= skellam_pmf_exact(outcomes.dn[c], SkellamParams{m1, m2});
                }
                tot += rule.weights[i] * rule.weights[j] * f;
            }
        }
        return tot * std::exp(-std::norm(alpha)) / M_PI;
    };

    // adaptive node doubling to relative 1e-8
    int N = 60 + static_cast<int>(8.0 * std::abs(alpha));
    double prev = evaluate(N);
    for (int iter = 0; iter < 4; ++iter) {
        int N2 = N + N / 2;
        double cur = evaluate(N2);
        if (std::abs(cur - prev) <= 1e-8 * std::max({std::abs(cur), std::abs(prev), 1e-300}))
            return cur;
        prev = cur;
        N = N2;
        if (N > 400)
            throw QuadratureNonConvergent("exact count-probability quadrature did not reach 1e-8");
    }
    throw QuadratureNonConvergent("exact count-probability quadrature did not reach 1e-8");
}

}  // namespace eoslab
