#include <cstdio>

#include "eoslab/post_measurement.hpp"

using namespace eoslab;

int main() {
    EosSetup s = EosSetup::derive(1.0, {{1.0, 10.0, Quadrature::X}, {1.0, 10.0, Quadrature::Y}});
    StateModel cat = StateModel::cat({3.0, 0.0}, +1);
    PostMap pm = make_post_map(s, {{10, 0}}, {0.0, 0.0});
    QpdGrid wp = post_qpd_grid(pm, cat);
    std::printf("stage1 grid: radius window [%g %g] n=%d integral=%g min=%g max=%g\n",
                wp.origin.real(), wp.origin.real() + (wp.nx - 1) * wp.dx, wp.nx, wp.integral(),
                wp.values.minCoeff(), wp.values.maxCoeff());
    Eigen::MatrixXcd rho = wigner_grid_to_density(wp, 40);
    std::printf("trace = %.12f  herm-dev = %g\n", rho.trace().real(),
                (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    std::printf("eig min = %g  eig max = %g\n", es.eigenvalues().minCoeff(),
                es.eigenvalues().maxCoeff());
    std::printf("|rho(40,40)| = %g |rho(40,0)| = %g |rho(20,20)| = %g\n", std::abs(rho(40, 40)),
                std::abs(rho(40, 0)), std::abs(rho(20, 20)));
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXcd rc = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    rc /= rc.trace().real();
    StateModel post = StateModel::numeric(0.5 * (rc + rc.adjoint().eval()));
    std::printf("built numeric state\n");
    try {
        double q = qpd_eval(post, cplx(2.4, 0.0), s.sampled_ordering());
        std::printf("qpd at z2: %g\n", q);
    } catch (const Error& e) {
        std::printf("qpd threw: %s\n", e.what());
    }
    try {
        double p2 = count_probability(s, post, {{40, 0}});
        std::printf("p2(40,0) = %g\n", p2);
    } catch (const Error& e) {
        std::printf("count threw: %s\n", e.what());
    }
    return 0;
}
