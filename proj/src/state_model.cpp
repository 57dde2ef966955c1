#include "eoslab/state_model.hpp"

#include <cmath>

namespace eoslab {

StateModel StateModel::vacuum() { return StateModel(states::Vacuum{}); }

StateModel StateModel::coherent(cplx alpha) { return StateModel(states::Coherent{alpha}); }

StateModel StateModel::fock(int n) {
    if (n < 0) throw InvalidState("Fock photon number must be non-negative");
    return StateModel(states::Fock{n});
}

StateModel StateModel::cat(cplx alpha, int parity) {
    if (parity != 1 && parity != -1) throw InvalidState("cat parity must be +1 or -1");
    double q = std::exp(-2.0 * std::norm(alpha));
    double denom = 2.0 * (1.0 + parity * q);
    if (denom <= 0.0) throw InvalidState("cat state not normalizable (odd cat at alpha = 0)");
    return StateModel(states::Cat{alpha, parity, 1.0 / denom});
}

StateModel StateModel::squeezed(double r, double phase) {
    if (!std::isfinite(r) || !std::isfinite(phase)) throw InvalidState("non-finite squeezing");
    return StateModel(states::Squeezed{r, phase});
}

StateModel StateModel::numeric(Eigen::MatrixXcd rho) {
    if (rho.rows() != rho.cols() || rho.rows() < 1)
        throw InvalidState("density matrix must be square");
    double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12) throw InvalidState("density matrix not Hermitian within 1e-12");
    rho = 0.5 * (rho + rho.adjoint().eval());
    double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > 1e-10) throw InvalidState("density matrix trace not 1 within 1e-10");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw InvalidState("density matrix not positive semidefinite within -1e-10");
    states::Numeric num;
    num.n_max = static_cast<int>(rho.rows()) - 1;
    num.rho = std::move(rho);
    return StateModel(std::move(num));
}

bool StateModel::is_pure() const {
    if (const auto* num = std::get_if<states::Numeric>(&v_)) {
        double purity = (num->rho * num->rho).trace().real();
        return purity > 1.0 - 1e-8;
    }
    return true;  // all analytic families here are pure states
}

cplx StateModel::mean_a() const {
    struct V {
        cplx operator()(const states::Vacuum&) const { return 0.0; }
        cplx operator()(const states::Coherent& c) const { return c.alpha; }
        cplx operator()(const states::Fock&) const { return 0.0; }
        cplx operator()(const states::Cat&) const { return 0.0; }
        cplx operator()(const states::Squeezed&) const { return 0.0; }
        cplx operator()(const states::Numeric& n) const {
            cplx s = 0.0;
            for (int k = 0; k + 1 <= n.n_max; ++k)
                s += std::sqrt(k + 1.0) * n.rho(k + 1, k);  // <a> = sum rho_{k+1,k} sqrt(k+1)
            return s;
        }
    };
    return std::visit(V{}, v_);
}

cplx StateModel::mean_a2() const {
    struct V {
        cplx operator()(const states::Vacuum&) const { return 0.0; }
        cplx operator()(const states::Coherent& c) const { return c.alpha * c.alpha; }
        cplx operator()(const states::Fock&) const { return 0.0; }
        cplx operator()(const states::Cat& c) const { return c.alpha * c.alpha; }
        cplx operator()(const states::Squeezed& s) const {
            return -std::exp(cplx(0.0, s.phase)) * std::sinh(s.r) * std::cosh(s.r);
        }
        cplx operator()(const states::Numeric& n) const {
            cplx s = 0.0;
            for (int k = 0; k + 2 <= n.n_max; ++k)
                s += std::sqrt((k + 1.0) * (k + 2.0)) * n.rho(k + 2, k);
            return s;
        }
    };
    return std::visit(V{}, v_);
}

double StateModel::mean_n() const {
    struct V {
        double operator()(const states::Vacuum&) const { return 0.0; }
        double operator()(const states::Coherent& c) const { return std::norm(c.alpha); }
        double operator()(const states::Fock& f) const { return f.n; }
        double operator()(const states::Cat& c) const {
            double q = std::exp(-2.0 * std::norm(c.alpha));
            double ratio = (c.parity > 0) ? (1.0 - q) / (1.0 + q) : (1.0 + q) / (1.0 - q);
            return std::norm(c.alpha) * ratio;
        }
        double operator()(const states::Squeezed& s) const {
            double sh = std::sinh(s.r);
            return sh * sh;
        }
        double operator()(const states::Numeric& n) const {
            double s = 0.0;
            for (int k = 0; k <= n.n_max; ++k) s += k * n.rho(k, k).real();
            return s;
        }
    };
    return std::visit(V{}, v_);
}

double StateModel::var_x() const {
    // X^2 = (a^2 + a^dag^2 + 2 a^dag a + 1)/4
    double x2 = 0.25 * (1.0 + 2.0 * mean_n() + 2.0 * mean_a2().real());
    double m = mean_x();
    return x2 - m * m;
}

double StateModel::var_y() const {
    double y2 = 0.25 * (1.0 + 2.0 * mean_n() - 2.0 * mean_a2().real());
    double m = mean_y();
    return y2 - m * m;
}

double StateModel::default_window_radius() const {
    double center = std::abs(mean_a());
    double spread = 3.0 * std::sqrt(std::max(var_x(), var_y()));
    double r = std::max(4.0, center + 4.0 + spread);
    if (const auto* num = std::get_if<states::Numeric>(&v_))
        r = std::max(r, center + 4.0 + std::sqrt(static_cast<double>(num->n_max)));
    return r;
}

}  // namespace eoslab
