#include "eoslab/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eoslab/parallel.hpp"
#include "eoslab/special.hpp"

namespace eoslab {

namespace {

constexpr cplx kI{0.0, 1.0};

// portable uniform in [0, 1)
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct TableSampler {
    std::vector<double> cdf;
    double total = 0.0;

    explicit TableSampler(const std::vector<double>& probs) {
        cdf.resize(probs.size());
        std::partial_sum(probs.begin(), probs.end(), cdf.begin());
        total = cdf.empty() ? 0.0 : cdf.back();
        if (total <= 0.0) throw ZeroEvidence("outcome table has no probability mass");
    }
    std::size_t draw(std::mt19937_64& rng) const {
        double u = uniform01(rng) * total;
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        return static_cast<std::size_t>(it - cdf.begin());
    }
};

cplx coherent_overlap(cplx a, cplx b) {
    // <a|b>
    return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

// |<initial|member>|^2 for a pure analytic initial state and a family member.
double overlap2(const StateModel& initial, const StateModel& member) {
    if (const auto* mc = std::get_if<states::Coherent>(&member.value())) {
        cplx b = mc->alpha;
        struct V {
            cplx b;
            double operator()(const states::Vacuum&) const { return std::exp(-std::norm(b)); }
            double operator()(const states::Coherent& c) const {
                return std::exp(-std::norm(c.alpha - b));
            }
            double operator()(const states::Fock& f) const {
                double lb = -std::norm(b) + f.n * std::log(std::max(std::norm(b), 1e-300)) -
                            log_factorial(f.n);
                return std::exp(lb);
            }
            double operator()(const states::Cat& c) const {
                cplx amp = coherent_overlap(c.alpha, b) +
                           double(c.parity) * coherent_overlap(-c.alpha, b);
                return c.norm2 * std::norm(amp);
            }
            double operator()(const states::Squeezed& s) const {
                // |<b|S(xi)|0>|^2
                cplx amp = std::exp(-0.5 * std::norm(b) -
                                    0.5 * std::exp(kI * s.phase) * std::tanh(s.r) *
                                        std::conj(b) * std::conj(b)) /
                           std::sqrt(std::cosh(s.r));
                return std::norm(amp);
            }
            double operator()(const states::Numeric&) const {
                throw NonPureInitial("initial state must be a pure analytic family");
            }
        };
        return std::visit(V{b}, initial.value());
    }
    const auto* mf = std::get_if<states::Fock>(&member.value());
    if (!mf) throw UnsupportedFamily("family members must be coherent or Fock states");
    Eigen::VectorXcd c = fock_coefficients(initial, std::max(mf->n + 1, 32));
    return std::norm(c(mf->n));
}

}  // namespace

ParameterFamily ParameterFamily::coherent(double alpha_max, int nodes) {
    ParameterFamily fam;
    fam.kind_ = Kind::Coherent;
    fam.alpha_max_ = alpha_max;
    fam.nodes_ = nodes;
    fam.members_.reserve(static_cast<std::size_t>(nodes) * nodes);
    for (int iy = 0; iy < nodes; ++iy)
        for (int ix = 0; ix < nodes; ++ix) {
            double re = -alpha_max + 2.0 * alpha_max * ix / (nodes - 1);
            double im = -alpha_max + 2.0 * alpha_max * iy / (nodes - 1);
            fam.members_.push_back(StateModel::coherent({re, im}));
        }
    return fam;
}

ParameterFamily ParameterFamily::fock(int n_top) {
    ParameterFamily fam;
    fam.kind_ = Kind::Fock;
    fam.nodes_ = n_top + 1;
    for (int n = 0; n <= n_top; ++n) fam.members_.push_back(StateModel::fock(n));
    return fam;
}

cplx ParameterFamily::coherent_node(std::size_t j) const {
    return std::get<states::Coherent>(members_[j].value()).alpha;
}

double PosteriorGrid::entropy() const {
    double h = 0.0;
    for (double w : weights)
        if (w > 0.0) h -= w * std::log(w);
    return h;
}

std::size_t PosteriorGrid::argmax() const {
    return static_cast<std::size_t>(
        std::max_element(weights.begin(), weights.end()) - weights.begin());
}

PosteriorGrid uniform_prior(const ParameterFamily& family) {
    PosteriorGrid p;
    p.family = &family;
    p.weights.assign(family.size(), 1.0 / static_cast<double>(family.size()));
    return p;
}

PosteriorGrid bayes_update(const PosteriorGrid& prior, const EosSetup& setup,
                           const OutcomeSet& outcomes) {
    PosteriorGrid post = prior;
    // count_probability = N({dn}) * rho_lambda(z; s~); the envelope is
    // lambda-independent, so hoist it out of the node loop.
    double nenv = envelope(setup, outcomes);
    cplx z = outcome_to_point(setup, outcomes);
    OrderingParams ord = setup.sampled_ordering();
    double sum = 0.0;
    for (std::size_t j = 0; j < post.weights.size(); ++j) {
        double lik = nenv * qpd_eval(prior.family->member(j), z, ord);
        post.weights[j] *= std::max(lik, 0.0);
        sum += post.weights[j];
    }
    if (!(sum > 0.0)) throw ZeroEvidence("all likelihoods vanished in the Bayesian update");
    for (double& w : post.weights) w /= sum;
    post.history.push_back(outcomes);
    return post;
}

PosteriorGrid bayes_update_consecutive(const PosteriorGrid& prior, const EosSetup& setup,
                                       const OutcomeSet& o1, const OutcomeSet& o2) {
    PostMap pm = make_post_map(setup, o1, setup.sampled_ordering());
    cplx zp = prime_map(pm, outcome_to_point(setup, o2));
    PosteriorGrid post = prior;
    double sum = 0.0;
    for (std::size_t j = 0; j < post.weights.size(); ++j) {
        double lik = qpd_eval(prior.family->member(j), zp, pm.primed);
        post.weights[j] *= std::max(lik, 0.0);
        sum += post.weights[j];
    }
    if (!(sum > 0.0)) throw ZeroEvidence("all likelihoods vanished in the consecutive update");
    for (double& w : post.weights) w /= sum;
    post.history.push_back(o2);
    return post;
}

Eigen::VectorXcd fock_coefficients(const StateModel& pure, int n_max) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n_max + 1);
    struct V {
        Eigen::VectorXcd& c;
        int n_max;
        void operator()(const states::Vacuum&) const { c(0) = 1.0; }
        void operator()(const states::Coherent& s) const {
            if (std::abs(s.alpha) == 0.0) {
                c(0) = 1.0;
                return;
            }
            for (int n = 0; n <= n_max; ++n)
                c(n) = std::exp(-0.5 * std::norm(s.alpha) + double(n) * std::log(cplx(s.alpha)) -
                                0.5 * log_factorial(n));
        }
        void operator()(const states::Fock& f) const {
            if (f.n > n_max) throw TruncationOverflow("Fock state above requested truncation");
            c(f.n) = 1.0;
        }
        void operator()(const states::Cat& s) const {
            for (int n = 0; n <= n_max; ++n) {
                cplx an = (std::abs(s.alpha) == 0.0 && n > 0)
                              ? cplx(0.0)
                              : std::exp(-0.5 * std::norm(s.alpha) +
                                         double(n) * std::log(cplx(s.alpha)) -
                                         0.5 * log_factorial(n));
                if (std::abs(s.alpha) == 0.0) an = (n == 0) ? cplx(1.0) : cplx(0.0);
                c(n) = std::sqrt(s.norm2) * an * (1.0 + double(s.parity) * ((n % 2) ? -1.0 : 1.0));
            }
        }
        void operator()(const states::Squeezed& s) const {
            for (int k = 0; 2 * k <= n_max; ++k) {
                double lb = 0.5 * log_factorial(2 * k) - k * std::log(2.0) - log_factorial(k) -
                            0.5 * std::log(std::cosh(s.r));
                c(2 * k) = std::exp(lb) *
                           std::pow(-std::exp(kI * s.phase) * std::tanh(s.r), k);
            }
        }
        void operator()(const states::Numeric& num) const {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(num.rho);
            int top;
            es.eigenvalues().maxCoeff(&top);
            if (es.eigenvalues()(top) < 1.0 - 1e-8)
                throw NonPureInitial("numeric state is not pure");
            int upto = std::min<int>(n_max, num.n_max);
            c.head(upto + 1) = es.eigenvectors().col(top).head(upto + 1);
        }
    };
    std::visit(V{c, n_max}, pure.value());
    return c;
}

StateModel reconstruct(const PosteriorGrid& posterior, int n_max) {
    const ParameterFamily& fam = *posterior.family;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1);
    double tail = 0.0;
    for (std::size_t j = 0; j < fam.size(); ++j) {
        double w = posterior.weights[j];
        if (w < 1e-16) continue;
        Eigen::VectorXcd c = fock_coefficients(fam.member(j), n_max);
        tail += w * std::max(0.0, 1.0 - c.squaredNorm());
        rho.noalias() += w * (c * c.adjoint());
    }
    if (tail > 1e-6)
        throw TruncationOverflow("family members exceed the reconstruction truncation");
    rho /= rho.trace().real();
    return StateModel::numeric(rho);
}

double fidelity_vs_initial(const StateModel& initial, const StateModel& reconstructed) {
    const auto* num = std::get_if<states::Numeric>(&reconstructed.value());
    if (!num) throw UnsupportedConfiguration("reconstructed state must be Numeric");
    Eigen::VectorXcd psi = fock_coefficients(initial, num->n_max);
    return (psi.adjoint() * num->rho * psi)(0, 0).real();
}

double analytic_avg_fidelity_single(double zeta) {
    if (!(zeta > 0.0)) throw NonFiniteParams("analytic fidelity requires zeta > 0");
    double coth = 1.0 / std::tanh(zeta);
    return 1.0 / (2.0 * coth * coth + 1.0);
}

EosSetup symmetric_xy_setup(double zeta, double beta) {
    return EosSetup::derive(zeta, {{1.0, beta, Quadrature::X}, {1.0, beta, Quadrature::Y}});
}

EosSetup symmetric_xyxy_setup(double zeta, double beta) {
    return EosSetup::derive(zeta, {{1.0, beta, Quadrature::X},
                                   {1.0, beta, Quadrature::X},
                                   {1.0, beta, Quadrature::Y},
                                   {1.0, beta, Quadrature::Y}});
}

namespace {

// ---- stage-2 outcome table for a consecutive measurement --------------------

struct Stage2Table {
    long long lo_x, hi_x, lo_y, hi_y;
    std::vector<double> probs;  // row-major over (dnX, dnY)
    std::size_t span_y() const { return static_cast<std::size_t>(hi_y - lo_y + 1); }
    OutcomeSet outcome_at(std::size_t f) const {
        long long dx = lo_x + static_cast<long long>(f / span_y());
        long long dy = lo_y + static_cast<long long>(f % span_y());
        return OutcomeSet{{dx, dy}};
    }
};

Stage2Table build_stage2_table(const EosSetup& setup, const StateModel& initial,
                               const OutcomeSet& o1) {
    PostMap pm = make_post_map(setup, o1, setup.sampled_ordering());
    // window around the post-state image
    double nu = setup.abs_nu(), mu = setup.mu;
    double beta = std::abs(setup.channels[0].probe);
    double at = std::abs(setup.alpha_tilde[0]);
    double cX = initial.mean_x() / mu + (nu / mu) * pm.y_tilde.real();
    double cY = initial.mean_y() / mu + (nu / mu) * pm.y_tilde.imag();
    double mx = std::sqrt(2.0) * nu * beta * cX;
    double my = std::sqrt(2.0) * nu * beta * cY;
    double var = beta * beta +
                 4.0 * nu * nu * at * at * beta * beta *
                     (std::max(initial.var_x(), initial.var_y()) + 0.5);
    long long half = static_cast<long long>(std::ceil(6.0 * std::sqrt(var))) + 2;

    Stage2Table t;
    t.lo_x = static_cast<long long>(std::llround(mx)) - half;
    t.hi_x = static_cast<long long>(std::llround(mx)) + half;
    t.lo_y = static_cast<long long>(std::llround(my)) - half;
    t.hi_y = static_cast<long long>(std::llround(my)) + half;

    const std::size_t nx = static_cast<std::size_t>(t.hi_x - t.lo_x + 1);
    const std::size_t ny = t.span_y();
    std::vector<double> xs(nx), ys(ny);
    for (std::size_t i = 0; i < nx; ++i) {
        OutcomeSet o{{t.lo_x + static_cast<long long>(i), 0}};
        xs[i] = outcome_to_point(setup, o).real();
    }
    for (std::size_t j = 0; j < ny; ++j) {
        OutcomeSet o{{0, t.lo_y + static_cast<long long>(j)}};
        ys[j] = outcome_to_point(setup, o).imag();
    }

    // rho'(z(o2); s~) on the tensor lattice, times the stage-2 envelope. Both
    // split over the axes; the overall constant cancels in the sampler.
    Eigen::MatrixXd rho = post_qpd_tensor(pm, initial, xs, ys);
    std::vector<double> ex(nx), ey(ny);
    double b2 = beta * beta;
    for (std::size_t i = 0; i < nx; ++i) {
        double dn = static_cast<double>(t.lo_x + static_cast<long long>(i));
        ex[i] = -dn * dn / (2.0 * b2) - 2.0 * xs[i] * xs[i] / (1.0 + setup.s_tilde_x);
    }
    for (std::size_t j = 0; j < ny; ++j) {
        double dn = static_cast<double>(t.lo_y + static_cast<long long>(j));
        ey[j] = -dn * dn / (2.0 * b2) - 2.0 * ys[j] * ys[j] / (1.0 + setup.s_tilde_y);
    }
    double mex = *std::max_element(ex.begin(), ex.end());
    double mey = *std::max_element(ey.begin(), ey.end());
    t.probs.assign(nx * ny, 0.0);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            t.probs[i * ny + j] = std::exp(ex[i] - mex + ey[j] - mey) * std::max(rho(i, j), 0.0);
    return t;
}

struct XyxySampler {
    // symmetric XYXY outcome sampling through the (T, D) change of variables
    long long lo_t, hi_t;
    std::vector<double> qt;        // joint over (T_X, T_Y)
    std::vector<double> d_even, d_odd;  // discrete half-Gaussians over D, by parity
    long long d_max;
    double beta;

    XyxySampler(const EosSetup& setup, const StateModel& initial) {
        beta = std::abs(setup.channels[0].probe);
        double nu = setup.abs_nu();
        // per-channel share 1/2 -> T = dn_1 + dn_2 has mean 2 nu beta <Q>
        double var_t = 2.0 * (beta * beta +
                              nu * nu * beta * beta *
                                  (std::max(initial.var_x(), initial.var_y()) + 0.5) * 2.0);
        long long half = static_cast<long long>(std::ceil(6.0 * std::sqrt(var_t))) + 2;
        double mt = 2.0 * nu * beta * std::max(std::abs(initial.mean_x()),
                                               std::abs(initial.mean_y()));
        lo_t = -half - static_cast<long long>(std::ceil(mt));
        hi_t = half + static_cast<long long>(std::ceil(mt));

        d_max = static_cast<long long>(std::ceil(6.0 * std::sqrt(2.0) * beta)) + 2;
        d_even.assign(static_cast<std::size_t>(2 * d_max + 1), 0.0);
        d_odd.assign(static_cast<std::size_t>(2 * d_max + 1), 0.0);
        double s_even = 0.0, s_odd = 0.0;
        for (long long d = -d_max; d <= d_max; ++d) {
            double w = std::exp(-static_cast<double>(d) * d / (4.0 * beta * beta));
            if (((d % 2) + 2) % 2 == 0)
                d_even[static_cast<std::size_t>(d + d_max)] = w, s_even += w;
            else
                d_odd[static_cast<std::size_t>(d + d_max)] = w, s_odd += w;
        }

        const std::size_t nt = static_cast<std::size_t>(hi_t - lo_t + 1);
        qt.assign(nt * nt, 0.0);
        OrderingParams ord = setup.sampled_ordering();
        double at = std::abs(setup.alpha_tilde[0]);  // = 1/2
        for (std::size_t i = 0; i < nt; ++i) {
            double tx = static_cast<double>(lo_t + static_cast<long long>(i));
            for (std::size_t j = 0; j < nt; ++j) {
                double ty = static_cast<double>(lo_t + static_cast<long long>(j));
                double x = -nu * 0.5 * (1.0 + setup.s_tilde_x) * (at / beta) * tx;
                double y = -nu * 0.5 * (1.0 + setup.s_tilde_y) * (at / beta) * ty;
                cplx z(x, y);
                double lg = -(tx * tx + ty * ty) / (4.0 * beta * beta) -
                            2.0 * x * x / (1.0 + setup.s_tilde_x) -
                            2.0 * y * y / (1.0 + setup.s_tilde_y);
                double rho = qpd_eval(initial, z, ord);
                double se = (((static_cast<long long>(tx) % 2) + 2) % 2 == 0) ? s_even : s_odd;
                double so = (((static_cast<long long>(ty) % 2) + 2) % 2 == 0) ? s_even : s_odd;
                qt[i * nt + j] = std::exp(lg) * std::max(rho, 0.0) * se * so;
            }
        }
    }

    OutcomeSet draw(std::mt19937_64& rng, const TableSampler& ts, const TableSampler& de,
                    const TableSampler& dodd) const {
        const std::size_t nt = static_cast<std::size_t>(hi_t - lo_t + 1);
        std::size_t f = ts.draw(rng);
        long long tx = lo_t + static_cast<long long>(f / nt);
        long long ty = lo_t + static_cast<long long>(f % nt);
        auto draw_d = [&](long long t) {
            bool even = ((t % 2) + 2) % 2 == 0;
            std::size_t k = even ? de.draw(rng) : dodd.draw(rng);
            return static_cast<long long>(k) - d_max;
        };
        long long dx = draw_d(tx), dy = draw_d(ty);
        return OutcomeSet{{(tx + dx) / 2, (tx - dx) / 2, (ty + dy) / 2, (ty - dy) / 2}};
    }
};

}  // namespace

FidelityEstimate avg_fidelity_mc(const StateModel& initial, double zeta, double beta,
                                 Scheme scheme, const ParameterFamily& family, int n_samples,
                                 std::uint64_t seed) {
    if (n_samples < 1) throw NonFiniteParams("n_samples must be >= 1");
    EosSetup setup =
        (scheme == Scheme::XYXY) ? symmetric_xyxy_setup(zeta, beta) : symmetric_xy_setup(zeta, beta);

    // member overlaps with the initial state are sample-independent
    std::vector<double> ov(family.size());
    for (std::size_t j = 0; j < family.size(); ++j) ov[j] = overlap2(initial, family.member(j));

    PosteriorGrid prior = uniform_prior(family);
    std::vector<double> fid(static_cast<std::size_t>(n_samples), 0.0);

    if (scheme == Scheme::XYXY) {
        XyxySampler xy(setup, initial);
        TableSampler ts(xy.qt), de(xy.d_even), dodd(xy.d_odd);
        parallel_for(static_cast<std::size_t>(n_samples), [&](std::size_t t) {
            auto rng = make_rng(seed, t);
            OutcomeSet o = xy.draw(rng, ts, de, dodd);
            PosteriorGrid post = bayes_update(prior, setup, o);
            double f = 0.0;
            for (std::size_t j = 0; j < ov.size(); ++j) f += post.weights[j] * ov[j];
            fid[t] = f;
        });
    } else {
        CountTable table = count_distribution(setup, initial);
        TableSampler ts(table.probs);
        parallel_for(static_cast<std::size_t>(n_samples), [&](std::size_t t) {
            auto rng = make_rng(seed, t);
            OutcomeSet o1 = table.outcome_at(ts.draw(rng));
            PosteriorGrid post = bayes_update(prior, setup, o1);
            if (scheme == Scheme::XYtoXY) {
                Stage2Table t2 = build_stage2_table(setup, initial, o1);
                TableSampler ts2(t2.probs);
                OutcomeSet o2 = t2.outcome_at(ts2.draw(rng));
                post = bayes_update_consecutive(post, setup, o1, o2);
            }
            double f = 0.0;
            for (std::size_t j = 0; j < ov.size(); ++j) f += post.weights[j] * ov[j];
            fid[t] = f;
        });
    }

    FidelityEstimate est;
    est.n_samples = n_samples;
    double mean = 0.0;
    for (double f : fid) mean += f;
    mean /= n_samples;
    double var = 0.0;
    for (double f : fid) var += (f - mean) * (f - mean);
    var /= std::max(1, n_samples - 1);
    est.mean = mean;
    est.stderr_ = std::sqrt(var / n_samples);
    return est;
}

FidelityEstimate eight_port_reference(const StateModel& initial, const ParameterFamily& family,
                                      int n_samples, std::uint64_t seed) {
    if (family.kind() == ParameterFamily::Kind::Coherent) {
        // exact Husimi-sampling limit for the coherent family
        return FidelityEstimate{1.0 / 3.0, 0.0, 0};
    }
    if (family.kind() != ParameterFamily::Kind::Fock)
        throw UnsupportedFamily("eight-port reference supports coherent and Fock families");

    OrderingParams husimi{-1.0, -1.0};
    QpdGrid q = qpd_grid(initial, husimi);
    std::vector<double> cell(static_cast<std::size_t>(q.nx) * q.ny);
    for (int i = 0; i < q.nx; ++i)
        for (int j = 0; j < q.ny; ++j)
            cell[static_cast<std::size_t>(i) * q.ny + j] = std::max(q.values(i, j), 0.0);
    TableSampler ts(cell);

    std::vector<double> ov(family.size());
    for (std::size_t j = 0; j < family.size(); ++j) ov[j] = overlap2(initial, family.member(j));

    std::vector<double> fid(static_cast<std::size_t>(n_samples), 0.0);
    parallel_for(static_cast<std::size_t>(n_samples), [&](std::size_t t) {
        auto rng = make_rng(seed, t);
        std::size_t f = ts.draw(rng);
        cplx z = q.z_at(static_cast<int>(f / q.ny), static_cast<int>(f % q.ny));
        double sum = 0.0;
        std::vector<double> w(family.size());
        for (std::size_t j = 0; j < family.size(); ++j) {
            w[j] = qpd_eval(family.member(j), z, husimi);
            sum += w[j];
        }
        double fi = 0.0;
        for (std::size_t j = 0; j < family.size(); ++j) fi += w[j] / sum * ov[j];
        fid[t] = fi;
    });

    FidelityEstimate est;
    est.n_samples = n_samples;
    double mean = 0.0;
    for (double f : fid) mean += f;
    mean /= n_samples;
    double var = 0.0;
    for (double f : fid) var += (f - mean) * (f - mean);
    var /= std::max(1, n_samples - 1);
    est.mean = mean;
    est.stderr_ = std::sqrt(var / n_samples);
    return est;
}

FidelityEstimate avg_post_measurement_fidelity(const StateModel& initial, double zeta,
                                               double beta, int n_samples, std::uint64_t seed) {
    EosSetup setup = symmetric_xy_setup(zeta, beta);
    QpdGrid w0 = qpd_grid(initial, OrderingParams{0.0, 0.0});
    GridWindow win;
    win.center = {w0.origin.real() + (w0.nx - 1) * w0.dx / 2.0,
                  w0.origin.imag() + (w0.ny - 1) * w0.dy / 2.0};
    win.radius = (w0.nx - 1) * w0.dx / 2.0;
    win.n = w0.nx;

    CountTable table = count_distribution(setup, initial);
    TableSampler ts(table.probs);
    std::vector<double> fid(static_cast<std::size_t>(n_samples), 0.0);
    parallel_for(static_cast<std::size_t>(n_samples), [&](std::size_t t) {
        auto rng = make_rng(seed, t);
        OutcomeSet o = table.outcome_at(ts.draw(rng));
        PostMap pm = make_post_map(setup, o, OrderingParams{0.0, 0.0});
        QpdGrid wp = post_qpd_grid(pm, initial, win);
        fid[t] = wigner_fidelity(w0, wp);
    });

    FidelityEstimate est;
    est.n_samples = n_samples;
    double mean = 0.0;
    for (double f : fid) mean += f;
    mean /= n_samples;
    double var = 0.0;
    for (double f : fid) var += (f - mean) * (f - mean);
    var /= std::max(1, n_samples - 1);
    est.mean = mean;
    est.stderr_ = std::sqrt(var / n_samples);
    return est;
}

}  // namespace eoslab
