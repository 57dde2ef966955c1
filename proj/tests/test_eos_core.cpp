#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eoslab/eos_core.hpp"
#include "oracles.hpp"

using namespace eoslab;

namespace {

EosSetup sym_xy(double zeta, double beta) {
    return EosSetup::derive(zeta, {{1.0, beta, Quadrature::X}, {1.0, beta, Quadrature::Y}});
}

}  // namespace

TEST_CASE("waveplate solution: canonical branch") {
    auto sx = solve_waveplate(0.0, 10.0, Quadrature::X, 0.0);
    CHECK(sx.retardance == doctest::Approx(M_PI));
    CHECK(sx.rotation == doctest::Approx(0.5 * std::acos(std::sqrt(0.5))));
    CHECK(sx.rotation == doctest::Approx(M_PI / 8.0));
    CHECK(sx.k1 == 0);
    CHECK(sx.k2 == 0);
    CHECK(std::abs(std::exp(cplx(0, sx.arg_beta)) - std::exp(cplx(0, M_PI))) < 1e-14);
    auto sy = solve_waveplate(0.0, 10.0, Quadrature::Y, 0.0);
    CHECK(sy.arg_beta == doctest::Approx(M_PI / 2.0));
    // theta satisfies the balanced-signal equation with k1 = k2 = 0
    double phi = sx.retardance;
    double theta = 0.5 * std::acos(std::sqrt(0.5 * (1.0 - std::pow(1.0 / std::tan(phi / 2.0), 2))));
    CHECK(sx.rotation == doctest::Approx(theta).epsilon(1e-14));
}

TEST_CASE("setup invariants") {
    EosSetup s = sym_xy(1.0, 10.0);
    CHECK(s.mu * s.mu - std::norm(s.nu) == doctest::Approx(1.0).epsilon(1e-14));
    double norm2 = 0.0;
    for (auto& a : s.alpha_tilde) norm2 += std::norm(a);
    CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.a_x == doctest::Approx(std::norm(s.nu)));
    CHECK(s.s_tilde_x == doctest::Approx(-1.0 - 2.0 / std::pow(std::sinh(1.0), 2)).epsilon(1e-14));
    CHECK(s.s_tilde_x == doctest::Approx(-2.4481).epsilon(1e-4));
    // interference phases
    CHECK(std::abs(std::exp(cplx(0, s.interference_phase(0))) - cplx(1.0, 0.0)) < 1e-10);
    CHECK(std::abs(std::exp(cplx(0, s.interference_phase(1))) - cplx(0.0, 1.0)) < 1e-10);

    CHECK(sym_xy(20.0, 10.0).s_tilde_x > -1.0 - 1e-10);  // s~ -> -1
    CHECK(sym_xy(1e-6, 10.0).s_tilde_x < -1e9);          // s~ -> -inf

    CHECK_THROWS_AS(EosSetup::derive(1.0, {}), EmptySetup);
    CHECK_THROWS_AS(EosSetup::derive(1.0, {{0.0, 10.0, Quadrature::X}}), ZeroPump);
}

TEST_CASE("outcome map") {
    EosSetup s = sym_xy(1.0, 10.0);
    CHECK(std::abs(outcome_to_point(s, {{0, 0}})) == 0.0);
    // derived value: z = nu * ytilde / A for the symmetric configuration
    double nu = std::sinh(1.0);
    double expect = nu * (std::sqrt(0.5) / 10.0 * 10.0) / (nu * nu);
    cplx z = outcome_to_point(s, {{10, 0}});
    CHECK(z.real() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(z.imag() == 0.0);
    // doubling all probes halves z
    EosSetup s2 = sym_xy(1.0, 20.0);
    CHECK(outcome_to_point(s2, {{10, 0}}).real() == doctest::Approx(z.real() / 2.0).epsilon(1e-12));
}

TEST_CASE("envelope: symmetric closed form and independent re-derivation") {
    EosSetup s = sym_xy(1.0, 10.0);
    double expect = 1.0 / (2.0 * std::pow(std::sinh(1.0), 2) * 100.0);
    CHECK(envelope(s, {{0, 0}}) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(envelope(s, {{17, -23}}) == doctest::Approx(expect).epsilon(1e-12));

    // asymmetric case against a naive reimplementation
    EosSetup a = EosSetup::derive(0.8, {{2.0, 8.0, Quadrature::X}, {1.0, 11.0, Quadrature::Y}});
    OutcomeSet o{{5, -3}};
    cplx z = outcome_to_point(a, o);
    double naive = M_PI * std::sqrt((1.0 - a.s_tilde_x) * (1.0 - a.s_tilde_y)) /
                   (2.0 * std::sqrt((1.0 + a.a_x) * (1.0 + a.a_y)));
    for (std::size_t i = 0; i < 2; ++i) {
        double b2 = std::norm(a.channels[i].probe);
        naive *= std::exp(-double(o.dn[i]) * o.dn[i] / (2.0 * b2)) / std::sqrt(2.0 * M_PI * b2);
    }
    naive *= std::exp(-2.0 * z.real() * z.real() / (1.0 + a.s_tilde_x) -
                      2.0 * z.imag() * z.imag() / (1.0 + a.s_tilde_y));
    CHECK(envelope(a, o) == doctest::Approx(naive).epsilon(1e-12));
    CHECK(envelope(a, o) > 0.0);
}

TEST_CASE("count probability: vacuum peaks at the origin") {
    EosSetup s = sym_xy(1.0, 10.0);
    StateModel vac = StateModel::vacuum();
    double p00 = count_probability(s, vac, {{0, 0}});
    for (auto o : std::vector<OutcomeSet>{{{1, 0}}, {{0, 1}}, {{-1, 0}}, {{0, -1}}, {{7, -4}}})
        CHECK(p00 > count_probability(s, vac, o));
}

TEST_CASE("count probability: cat-state value of the figure caption") {
    EosSetup s = sym_xy(1.0, 10.0);
    StateModel cat = StateModel::cat({3.0, 0.0}, +1);
    double p = count_probability(s, cat, {{10, 0}});
    CHECK(p == doctest::Approx(1.2070e-5).epsilon(1e-3));
}

TEST_CASE("count probability: probe floor") {
    EosSetup s = sym_xy(1.0, 2.0);
    CHECK_THROWS_AS(count_probability(s, StateModel::vacuum(), {{0, 0}}), ApproximationDomain);
}

TEST_CASE("Fock-3 distribution: ring appears at strong squeezing") {
    StateModel f3 = StateModel::fock(3);
    EosSetup weak = sym_xy(0.1, 10.0);
    EosSetup strong = sym_xy(1.0, 10.0);
    // weak squeezing: dominated by the NIR vacuum, maximum at the origin
    CHECK(count_probability(weak, f3, {{0, 0}}) > count_probability(weak, f3, {{4, 0}}));
    // strong squeezing: ring structure, local minimum at the origin
    double c = count_probability(strong, f3, {{0, 0}});
    double r = count_probability(strong, f3, {{22, 0}});
    CHECK(r > c);
}

TEST_CASE("count distribution: completeness and moment consistency") {
    EosSetup s = sym_xy(1.0, 10.0);
    StateModel coh = StateModel::coherent(3.0);
    CountTable t = count_distribution(s, coh);
    CHECK(std::abs(t.total() - 1.0) < 1e-3);

    double mean = 0.0, sq = 0.0;
    for (std::size_t f = 0; f < t.size(); ++f) {
        OutcomeSet o = t.outcome_at(f);
        mean += o.dn[0] * t.probs[f];
        sq += double(o.dn[0]) * o.dn[0] * t.probs[f];
    }
    double nu = std::sinh(1.0);
    CHECK(mean == doctest::Approx(std::sqrt(2.0) * nu * 10.0 * 3.0).epsilon(0.02));
    auto mm = moments(s, coh);
    CHECK(mean == doctest::Approx(mm[0].mean).epsilon(0.02));
    CHECK(sq - mean * mean == doctest::Approx(mm[0].variance).epsilon(0.02));

    CHECK(std::abs(count_distribution(s, StateModel::vacuum()).total() - 1.0) < 1e-3);
}

TEST_CASE("moments: closed forms") {
    EosSetup s = sym_xy(1.0, 10.0);
    double nu = std::sinh(1.0), nu2 = nu * nu, st = s.s_tilde_x;

    auto mv = moments(s, StateModel::vacuum());
    CHECK(mv[0].mean == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(mv[0].variance == doctest::Approx(2.0 * nu2 * 100.0 * (0.25 - st / 4.0)).epsilon(1e-4));

    auto mc = moments(s, StateModel::coherent(3.0));
    CHECK(mc[0].mean == doctest::Approx(3.0 * std::sqrt(2.0) * nu * 10.0).epsilon(1e-5));
    CHECK(std::abs(mc[1].mean) < 1e-6);

    auto mf = moments(s, StateModel::fock(3));
    CHECK(mf[0].variance ==
          doctest::Approx(2.0 * nu2 * 100.0 * (7.0 / 4.0 - st / 4.0)).epsilon(1e-4));

    EosSetup asym = EosSetup::derive(1.0, {{2.0, 10.0, Quadrature::X}, {1.0, 10.0, Quadrature::Y}});
    CHECK_THROWS_AS(moments(asym, StateModel::vacuum()), UnsupportedConfiguration);
}

TEST_CASE("balanced condition: vacuum means vanish") {
    EosSetup s = sym_xy(1.0, 10.0);
    CountTable t = count_distribution(s, StateModel::vacuum());
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t f = 0; f < t.size(); ++f) {
        OutcomeSet o = t.outcome_at(f);
        m0 += o.dn[0] * t.probs[f];
        m1 += o.dn[1] * t.probs[f];
    }
    CHECK(std::abs(m0) < 1e-9);
    CHECK(std::abs(m1) < 1e-9);
}

TEST_CASE("Arthurs-Kelly bound on table variances") {
    EosSetup s = sym_xy(1.0, 10.0);
    double nu2 = std::pow(std::sinh(1.0), 2);
    for (const StateModel& st :
         {StateModel::vacuum(), StateModel::coherent(3.0), StateModel::fock(1),
          StateModel::cat({3.0, 0.0}, +1)}) {
        CountTable t = count_distribution(s, st);
        double mx = 0, my = 0, sx = 0, sy = 0;
        for (std::size_t f = 0; f < t.size(); ++f) {
            OutcomeSet o = t.outcome_at(f);
            mx += o.dn[0] * t.probs[f];
            my += o.dn[1] * t.probs[f];
            sx += double(o.dn[0]) * o.dn[0] * t.probs[f];
            sy += double(o.dn[1]) * o.dn[1] * t.probs[f];
        }
        double vx = sx - mx * mx, vy = sy - my * my;
        double product = (vx / (2.0 * nu2 * 100.0)) * (vy / (2.0 * nu2 * 100.0));
        CHECK(product >= 0.25 * 0.98);
    }
}

TEST_CASE("probe scaling: mean ~ c, variance ~ c^2, s~ unchanged") {
    StateModel coh = StateModel::coherent(2.0);
    EosSetup s1 = sym_xy(1.0, 10.0), s2 = sym_xy(1.0, 20.0);
    CHECK(s1.s_tilde_x == doctest::Approx(s2.s_tilde_x).epsilon(1e-14));
    auto m1 = moments(s1, coh), m2 = moments(s2, coh);
    CHECK(m2[0].mean == doctest::Approx(2.0 * m1[0].mean).epsilon(1e-6));
    CHECK(m2[0].variance == doctest::Approx(4.0 * m1[0].variance).epsilon(1e-6));
}

TEST_CASE("marginal count probability: X-only route") {
    EosSetup xonly = EosSetup::derive(1.0, {{1.0, 10.0, Quadrature::X}});
    StateModel vac = StateModel::vacuum();
    // vacuum: Gaussian in dn with variance beta^2 (1 + A_X)
    double var = 100.0 * (1.0 + xonly.a_x);
    double sum = 0.0, sq = 0.0;
    for (long long dn = -240; dn <= 240; ++dn) {
        double p = marginal_count_probability(xonly, vac, {{dn}});
        sum += p;
        sq += double(dn) * dn * p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sq == doctest::Approx(var).epsilon(1e-3));

    // coherent: centered at sqrt(2) nu beta <X>
    StateModel coh = StateModel::coherent(3.0);
    double nu = std::sinh(1.0);
    double mean = 0.0;
    for (long long dn = -200; dn <= 500; ++dn)
        mean += dn * marginal_count_probability(xonly, coh, {{dn}});
    CHECK(mean == doctest::Approx(2.0 * nu * 1.0 * 10.0 * 3.0).epsilon(0.01));

    // Fock-1: bimodal, matches the numeric Weierstrass transform of |<x|1>|^2
    StateModel f1 = StateModel::fock(1);
    std::vector<double> probs;
    for (long long dn = -240; dn <= 240; ++dn)
        probs.push_back(marginal_count_probability(xonly, f1, {{dn}}));
    int peaks = 0;
    for (std::size_t k = 1; k + 1 < probs.size(); ++k)
        if (probs[k] > probs[k - 1] && probs[k] > probs[k + 1]) ++peaks;
    CHECK(peaks == 2);

    // independent kernel-integration oracle at a few outcomes
    double st = xonly.s_tilde_x;
    for (long long dn : {0LL, 13LL, -31LL}) {
        OutcomeSet o{{dn}};
        cplx z0 = outcome_to_point(xonly, o);
        double acc = 0.0;
        const int n = 4001;
        double L = 8.0, h = 2.0 * L / (n - 1);
        for (int k = 0; k < n; ++k) {
            double x = -L + k * h;
            acc += marginal(f1, Quadrature::X, x) *
                   std::exp(2.0 * (x - z0.real()) * (x - z0.real()) / st);
        }
        acc *= h;
        double pref = std::sqrt((1.0 - st) / (-st)) / std::sqrt(1.0 + xonly.a_x);
        double SX = std::abs(xonly.alpha_tilde[0]) / 10.0 * dn;
        pref *= std::exp(-double(dn) * dn / 200.0) / std::sqrt(2.0 * M_PI * 100.0) *
                std::exp(std::norm(xonly.nu) * SX * SX / xonly.a_x);
        CHECK(marginal_count_probability(xonly, f1, o) ==
              doctest::Approx(pref * acc).epsilon(1e-7));
    }

    CHECK_THROWS_AS(marginal_count_probability(sym_xy(1.0, 10.0), vac, {{0, 0}}),
                    PartitionViolation);
}

TEST_CASE("exact count probability: completeness at small probe") {
    EosSetup s = sym_xy(0.3, 2.0);
    double sum = 0.0;
    for (long long dx = -14; dx <= 14; ++dx)
        for (long long dy = -14; dy <= 14; ++dy)
            sum += exact_count_probability_coherent(s, 0.0, {{dx, dy}});
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("chain equivalence: Gaussian route converges to the exact one in beta") {
    StateModel vac = StateModel::vacuum();
    auto rel_at_peak = [&](double beta) {
        EosSetup s = sym_xy(1.0, beta);
        double pg = count_probability(s, vac, {{0, 0}});
        double pe = exact_count_probability_coherent(s, 0.0, {{0, 0}});
        return std::abs(pe - pg) / pe;
    };
    double r10 = rel_at_peak(10.0), r25 = rel_at_peak(25.0), r50 = rel_at_peak(50.0);
    // measured Gaussian-approximation defect: ~2.8e-3 at beta = 10
    CHECK(r10 < 5e-3);
    CHECK(r25 < 8e-4);
    CHECK(r25 < r10);
    CHECK(r50 < r25);
    CHECK(r25 < 2e-3);
}

TEST_CASE("exact route agrees with the Gaussian route for coherent input at beta=10") {
    EosSetup s = sym_xy(1.0, 10.0);
    cplx al{3.0, 0.0};
    StateModel coh = StateModel::coherent(al);
    // near the distribution center the defect stays at the few-1e-3 level
    for (auto o : std::vector<OutcomeSet>{{{50, 0}}, {{45, 5}}, {{55, -5}}}) {
        double pe = exact_count_probability_coherent(s, al, o);
        double pg = count_probability(s, coh, o);
        CHECK(std::abs(pe - pg) / pe < 0.03);
    }
}
