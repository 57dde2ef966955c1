#include <cstdio>
#include "eoslab/post_measurement.hpp"
using namespace eoslab;
int main() {
    EosSetup s = EosSetup::derive(1.0, {{1.0, 10.0, Quadrature::X}, {1.0, 10.0, Quadrature::Y}});
    StateModel cat = StateModel::cat({3.0, 0.0}, +1);
    try {
        auto stages = chain(s, cat, {OutcomeSet{{10, 0}}, OutcomeSet{{40, 0}}});
        std::printf("p1 = %g p2 = %g\n", stages[0].probability, stages[1].probability);
        std::printf("w1 int = %g w2 int = %g\n", stages[0].post_wigner.integral(),
                    stages[1].post_wigner.integral());
    } catch (const Error& e) {
        std::printf("chain threw: %s\n", e.what());
    }
    // now replicate chain stage 2 manually
    PostMap pm1 = make_post_map(s, {{10, 0}}, {0.0, 0.0});
    QpdGrid w1 = post_qpd_grid(pm1, cat);
    Eigen::MatrixXcd rho = wigner_grid_to_density(w1, 40);
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    rho = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    rho /= rho.trace().real();
    StateModel st2 = StateModel::numeric(rho);
    std::printf("radius2 = %g mean_a = (%g, %g) var = %g %g\n", st2.default_window_radius(),
                st2.mean_a().real(), st2.mean_a().imag(), st2.var_x(), st2.var_y());
    PostMap pm2 = make_post_map(s, {{40, 0}}, {0.0, 0.0});
    std::printf("ztilde2 = %g\n", pm2.z_tilde.real());
    try {
        QpdGrid w2 = post_qpd_grid(pm2, st2);
        std::printf("w2 integral = %g\n", w2.integral());
    } catch (const Error& e) {
        std::printf("post grid threw: %s\n", e.what());
    }
    return 0;
}
