#include "eoslab/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "eoslab/parallel.hpp"
#include "eoslab/special.hpp"

namespace eoslab {

namespace {

constexpr cplx kI{0.0, 1.0};

// <a|D(gamma)|b> for coherent a, b: exp(-|g|^2/2 - |a|^2/2 - |b|^2/2 + conj(a)b + conj(a)g - conj(g)b)
cplx coherent_pair_element(cplx a, cplx b, cplx g) {
    cplx expo = -0.5 * std::norm(g) - 0.5 * std::norm(a) - 0.5 * std::norm(b) +
                std::conj(a) * b + std::conj(a) * g - std::conj(g) * b;
    return std::exp(expo);
}

cplx char0(const StateModel& state, cplx g);

struct Char0Visitor {
    cplx g;
    cplx operator()(const states::Vacuum&) const { return std::exp(-0.5 * std::norm(g)); }
    cplx operator()(const states::Coherent& c) const {
        return std::exp(-0.5 * std::norm(g) + g * std::conj(c.alpha) - std::conj(g) * c.alpha);
    }
    cplx operator()(const states::Fock& f) const {
        double x = std::norm(g);
        return std::exp(-0.5 * x) * laguerre(f.n, 0, x);
    }
    cplx operator()(const states::Cat& c) const {
        double p = c.parity;
        cplx s = coherent_pair_element(c.alpha, c.alpha, g) +
                 coherent_pair_element(-c.alpha, -c.alpha, g) +
                 p * coherent_pair_element(c.alpha, -c.alpha, g) +
                 p * coherent_pair_element(-c.alpha, c.alpha, g);
        return c.norm2 * s;
    }
    cplx operator()(const states::Squeezed& s) const {
        cplx gp = g * std::cosh(s.r) + std::conj(g) * std::exp(kI * s.phase) * std::sinh(s.r);
        return std::exp(-0.5 * std::norm(gp));
    }
    cplx operator()(const states::Numeric& num) const {
        const double x = std::norm(g);
        const int nmax = num.n_max;
        cplx acc = 0.0;
        // diagonal k = 0
        {
            double lm1 = 0.0, l = 1.0;
            for (int n = 0; n <= nmax; ++n) {
                if (n == 0)
                    l = 1.0;
                else if (n == 1) {
                    lm1 = 1.0;
                    l = 1.0 - x;
                } else {
                    double lp1 = ((2.0 * (n - 1) + 1.0 - x) * l - (n - 1) * lm1) / n;
                    lm1 = l;
                    l = lp1;
                }
                acc += num.rho(n, n) * l;
            }
        }
        for (int k = 1; k <= nmax; ++k) {
            cplx gk = std::pow(g, k);
            cplx gbk = std::pow(-std::conj(g), k);
            double lm1 = 0.0, l = 1.0;
            for (int n = 0; n + k <= nmax; ++n) {
                if (n == 0)
                    l = 1.0;
                else if (n == 1) {
                    lm1 = 1.0;
                    l = 1.0 + k - x;
                } else {
                    double lp1 = ((2.0 * (n - 1) + k + 1.0 - x) * l - (n - 1 + k) * lm1) / n;
                    lm1 = l;
                    l = lp1;
                }
                double c = std::exp(0.5 * (log_factorial(n) - log_factorial(n + k)));
                acc += num.rho(n, n + k) * c * l * gk;    // upper triangle pairs with gamma^k
                acc += num.rho(n + k, n) * c * l * gbk;   // lower with (-conj(gamma))^k
            }
        }
        return acc * std::exp(-0.5 * x);
    }
};

cplx char0(const StateModel& state, cplx g) { return std::visit(Char0Visitor{g}, state.value()); }

void require_ordering_below_one(const OrderingParams& o) {
    if (!(o.s_x < 1.0) || !(o.s_y < 1.0))
        throw OrderingOutOfRange("s_X and s_Y must be < 1 for quasiprobability evaluation");
}

double coherent_qpd(cplx alpha, cplx z, const OrderingParams& o) {
    double wx = 1.0 - o.s_x, wy = 1.0 - o.s_y;
    double dx = z.real() - alpha.real(), dy = z.imag() - alpha.imag();
    return 2.0 / (M_PI * std::sqrt(wx * wy)) * std::exp(-2.0 * dx * dx / wx - 2.0 * dy * dy / wy);
}

double fock_qpd_diag(int n, cplx z, double s) {
    if (std::abs(s + 1.0) < 1e-9) {
        double x = std::norm(z);
        return std::exp(-x + n * std::log(std::max(x, 1e-300)) - log_factorial(n)) / M_PI;
    }
    double tau = (1.0 + s) / (1.0 - s);
    double arg = 4.0 * std::norm(z) / (1.0 - s * s);
    double lag = laguerre(n, 0, arg);
    return 2.0 / (M_PI * (1.0 - s)) * std::pow(-tau, n) * lag *
           std::exp(-2.0 * std::norm(z) / (1.0 - s));
}

double fock_qpd_general(int n, cplx z, const OrderingParams& o) {
    // term-wise Fourier transform of L_n(u^2+v^2) e^{-a_u u^2 - a_v v^2}
    double au = (1.0 - o.s_y) / 2.0, av = (1.0 - o.s_x) / 2.0;
    double x = z.real(), y = z.imag();
    auto lam = laguerre_coeffs(n, 0);
    std::vector<double> hy(2 * n + 1), hx(2 * n + 1);
    for (int j = 0; j <= 2 * n; ++j) {
        hy[j] = hermite_h(j, y / std::sqrt(au));
        hx[j] = hermite_h(j, x / std::sqrt(av));
    }
    double sum = 0.0;
    for (int m = 0; m <= n; ++m) {
        double inner = 0.0;
        for (int j = 0; j <= m; ++j) {
            double lb = log_factorial(m) - log_factorial(j) - log_factorial(m - j) -
                        j * std::log(4.0 * au) - (m - j) * std::log(4.0 * av);
            inner += std::exp(lb) * hy[2 * j] * hx[2 * (m - j)];
        }
        sum += lam[m] * ((m % 2) ? -1.0 : 1.0) * inner;
    }
    return sum / (M_PI * std::sqrt(au * av)) * std::exp(-y * y / au - x * x / av);
}

double cat_qpd(const states::Cat& c, cplx z, const OrderingParams& o) {
    double au = (1.0 - o.s_y) / 2.0, av = (1.0 - o.s_x) / 2.0;
    double x = z.real(), y = z.imag();
    cplx out = 0.0;
    const cplx pairs[4][2] = {{c.alpha, c.alpha},
                              {-c.alpha, -c.alpha},
                              {c.alpha, -c.alpha},
                              {-c.alpha, c.alpha}};
    const double sgn[4] = {1.0, 1.0, double(c.parity), double(c.parity)};
    for (int t = 0; t < 4; ++t) {
        cplx a = pairs[t][0], b = pairs[t][1];
        cplx pref = std::exp(std::conj(a) * b - 0.5 * std::norm(a) - 0.5 * std::norm(b));
        cplx cu = 2.0 * kI * y + (std::conj(a) - b);
        cplx cv = -2.0 * kI * x + kI * (std::conj(a) + b);
        cplx term = M_PI / std::sqrt(au * av) *
                    std::exp(cu * cu / (4.0 * au) + cv * cv / (4.0 * av));
        out += sgn[t] * pref * term;
    }
    out *= c.norm2 / (M_PI * M_PI);
    if (std::abs(out.imag()) > 1e-10)
        throw Error("cat QPD imaginary residue above 1e-10");
    return out.real();
}

double squeezed_qpd(const states::Squeezed& s, cplx z, const OrderingParams& o) {
    double ch = std::cosh(s.r), sh = std::sinh(s.r);
    double ct = std::cos(s.phase), st = std::sin(s.phase);
    Eigen::Matrix2d A;
    A << ch + sh * ct, sh * st, sh * st, ch - sh * ct;
    Eigen::Matrix2d Sig = A * A;
    Sig(0, 0) -= o.s_y;
    Sig(1, 1) -= o.s_x;
    double det = Sig.determinant();
    if (det <= 0.0 || Sig(0, 0) <= 0.0)
        throw OrderingOutOfRange("ordering too large for squeezed-state Gaussian transform");
    Eigen::Vector2d b(2.0 * z.imag(), -2.0 * z.real());
    double quad = b.dot(Sig.inverse() * b);
    return 2.0 / (M_PI * std::sqrt(det)) * std::exp(-0.5 * quad);
}

// ---- Numeric-state machinery ------------------------------------------------

std::mutex g_poly_mutex;

// Coefficient matrix C(ju, jv) of chi(gamma;0) e^{+|gamma|^2/2} = sum C u^ju v^jv.
const Eigen::MatrixXcd& chi_poly(const states::Numeric& num) {
    std::lock_guard<std::mutex> lock(g_poly_mutex);
    if (num.chi_poly) return *num.chi_poly;

    const int nmax = num.n_max;
    const int D = 2 * nmax + 1;
    auto C = std::make_shared<Eigen::MatrixXcd>(Eigen::MatrixXcd::Zero(D, D));

    std::vector<double> binom_row;  // scratch
    for (int k = -nmax; k <= nmax; ++k) {
        int ak = std::abs(k);
        // radial polynomial R(x) = sum_n w_n L_n^{(|k|)}(x), x = u^2+v^2
        std::vector<cplx> Rc(nmax + 1, cplx(0.0));
        bool any = false;
        for (int n = 0; n + ak <= nmax; ++n) {
            cplx w = (k >= 0) ? num.rho(n, n + ak) : num.rho(n + ak, n);
            if (std::abs(w) == 0.0) continue;
            any = true;
            double c = std::exp(0.5 * (log_factorial(n) - log_factorial(n + ak)));
            auto lc = laguerre_coeffs(n, ak);
            for (std::size_t j = 0; j < lc.size(); ++j) Rc[j] += w * c * lc[j];
        }
        if (!any) continue;
        // angular factor: gamma^k for k>=0, (-conj(gamma))^{|k|} for k<0
        // gamma^k   = sum_b binom(k,b) u^b (i v)^{k-b}
        // (-cg)^|k| = (-1)^{|k|} sum_b binom(|k|,b) u^b (-i v)^{|k|-b}
        binom_row.assign(ak + 1, 0.0);
        for (int b = 0; b <= ak; ++b)
            binom_row[b] = std::exp(log_factorial(ak) - log_factorial(b) - log_factorial(ak - b));
        for (int j = 0; j <= nmax; ++j) {
            if (std::abs(Rc[j]) == 0.0) continue;
            for (int t = 0; t <= j; ++t) {
                double bre = std::exp(log_factorial(j) - log_factorial(t) - log_factorial(j - t));
                cplx base = Rc[j] * bre;
                for (int b = 0; b <= ak; ++b) {
                    cplx ang;
                    if (k >= 0)
                        ang = std::pow(kI, ak - b);
                    else
                        ang = std::pow(-kI, ak - b) * ((ak % 2) ? -1.0 : 1.0);
                    (*C)(2 * t + b, 2 * (j - t) + ak - b) += base * binom_row[b] * ang;
                }
            }
        }
    }
    num.chi_poly = C;
    return *num.chi_poly;
}

}  // namespace

namespace detail {

cplx displaced_fock_kernel(int m, int n, cplx z, double s) {
    // m >= n
    if (std::abs(s + 1.0) < 1e-9) {
        double lb = -std::norm(z) - 0.5 * (log_factorial(m) + log_factorial(n));
        return std::pow(z, m) * std::pow(std::conj(z), n) * std::exp(lb) / M_PI;
    }
    double tau = (1.0 + s) / (1.0 - s);
    cplx Z = 2.0 * z / (1.0 - s);
    double arg = 4.0 * std::norm(z) / (1.0 - s * s);
    double lag = laguerre(n, m - n, arg);
    double lb = 0.5 * (log_factorial(n) - log_factorial(m)) - 2.0 * std::norm(z) / (1.0 - s);
    return 2.0 / (M_PI * (1.0 - s)) * std::pow(-tau, n) * std::pow(Z, m - n) * lag * std::exp(lb);
}

// Diagonal orderings evaluate through the displaced-Fock Laguerre kernels:
// the term-wise closed form of the same Fourier integral, stable at any z
// (monomial quadrature loses all precision for wide windows at high photon
// cutoffs).
Eigen::MatrixXd numeric_qpd_kernel_diag(const states::Numeric& num,
                                        const std::vector<double>& xs,
                                        const std::vector<double>& ys, double s) {
    const int nmax = num.n_max;
    const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
    Eigen::MatrixXd out(nx, ny);
    const bool husimi = std::abs(s + 1.0) < 1e-9;
    parallel_for(static_cast<std::size_t>(nx), [&](std::size_t ixs) {
        int ix = static_cast<int>(ixs);
        for (int iy = 0; iy < ny; ++iy) {
            cplx z(xs[ix], ys[iy]);
            double acc;
            if (husimi) {
                // G_mn(z;-1) = e^{-|z|^2} z^m conj(z)^n / (pi sqrt(m! n!))
                cplx zb = std::conj(z);
                double e = -std::norm(z);
                cplx a = 0.0;
                for (int k = 0; k <= nmax; ++k) {
                    cplx zk = std::pow(z, k);
                    for (int n = 0; n + k <= nmax; ++n) {
                        int m = n + k;
                        // z^m conj(z)^n = z^k |z|^{2n}
                        double lb = e - 0.5 * (log_factorial(m) + log_factorial(n)) +
                                    2.0 * n * std::log(std::max(std::abs(z), 1e-300));
                        cplx term = num.rho(n, m) * zk * std::exp(lb);
                        a += (k == 0) ? term : term + std::conj(term);
                    }
                }
                acc = a.real() / M_PI;
            } else {
                double az2 = std::norm(z);
                double escale = -2.0 * az2 / (1.0 - s);
                double tau = (1.0 + s) / (1.0 - s);
                cplx Z = 2.0 * z / (1.0 - s);
                double x4 = 4.0 * az2 / (1.0 - s * s);
                cplx a = 0.0;
                for (int k = 0; k <= nmax; ++k) {
                    cplx zk = std::pow(Z, k);
                    double lm1 = 0.0, l = 1.0;
                    double mt = 1.0;  // (-tau)^n
                    for (int n = 0; n + k <= nmax; ++n) {
                        if (n == 1) {
                            lm1 = 1.0;
                            l = 1.0 + k - x4;
                        } else if (n > 1) {
                            double lp1 =
                                ((2.0 * (n - 1) + k + 1.0 - x4) * l - (n - 1 + k) * lm1) / n;
                            lm1 = l;
                            l = lp1;
                        }
                        int m = n + k;
                        double lb = escale + 0.5 * (log_factorial(n) - log_factorial(m));
                        cplx g = zk * (mt * l * std::exp(lb));
                        cplx term = num.rho(n, m) * g;
                        a += (k == 0) ? term : term + std::conj(term);
                        mt *= -tau;
                    }
                }
                acc = a.real() * 2.0 / (M_PI * (1.0 - s));
            }
            out(ix, iy) = acc;
        }
    });
    return out;
}

Eigen::MatrixXd numeric_qpd_tensor(const states::Numeric& num, const std::vector<double>& xs,
                                   const std::vector<double>& ys,
                                   const OrderingParams& ordering) {
    double au = (1.0 - ordering.s_y) / 2.0, av = (1.0 - ordering.s_x) / 2.0;
    if (au <= 0.0 || av <= 0.0)
        throw OrderingOutOfRange("s_X, s_Y must be < 1 for the quadrature route");

    if (std::abs(ordering.s_x - ordering.s_y) < 1e-12)
        return numeric_qpd_kernel_diag(num, xs, ys, ordering.s_x);

    const Eigen::MatrixXcd& C = chi_poly(num);
    const int D = static_cast<int>(C.rows());

    // The monomial quadrature loses precision on very wide windows; beyond the
    // truncated state's support the distribution vanishes, so clamp there.
    double r_sup = std::sqrt(num.n_max + 1.0) + 6.0 +
                   3.0 * std::sqrt(std::max({-ordering.s_x, -ordering.s_y, 0.0}));
    std::vector<double> xs_in, ys_in;
    std::vector<int> xmapv, ymapv;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i]) <= r_sup) {
            xmapv.push_back(static_cast<int>(i));
            xs_in.push_back(xs[i]);
        }
    for (std::size_t j = 0; j < ys.size(); ++j)
        if (std::abs(ys[j]) <= r_sup) {
            ymapv.push_back(static_cast<int>(j));
            ys_in.push_back(ys[j]);
        }
    if (xs_in.size() != xs.size() || ys_in.size() != ys.size()) {
        Eigen::MatrixXd full = Eigen::MatrixXd::Zero(static_cast<int>(xs.size()),
                                                     static_cast<int>(ys.size()));
        if (!xs_in.empty() && !ys_in.empty()) {
            Eigen::MatrixXd inner = numeric_qpd_tensor(num, xs_in, ys_in, ordering);
            for (std::size_t a = 0; a < xmapv.size(); ++a)
                for (std::size_t b = 0; b < ymapv.size(); ++b)
                    full(xmapv[a], ymapv[b]) = inner(static_cast<int>(a), static_cast<int>(b));
        }
        return full;
    }

    double xmax = 0.0, ymax = 0.0;
    for (double x : xs) xmax = std::max(xmax, std::abs(x));
    for (double y : ys) ymax = std::max(ymax, std::abs(y));
    double c = std::max(2.0 * ymax / std::sqrt(au), 2.0 * xmax / std::sqrt(av));
    int N = std::max(96, static_cast<int>(std::ceil(0.5 * (c + 6.0) * (c + 6.0))) + D + 32);
    N = std::min(N, 2400);

    const auto& rule = gauss_hermite(N);
    Eigen::MatrixXcd U(N, D), V(N, D);
    for (int i = 0; i < N; ++i) {
        double u = rule.nodes[i] / std::sqrt(au);
        double v = rule.nodes[i] / std::sqrt(av);
        double wu = rule.weights[i];
        cplx pu = wu, pv = wu;
        for (int d = 0; d < D; ++d) {
            U(i, d) = pu;
            V(i, d) = pv;
            pu *= u;
            pv *= v;
        }
    }
    Eigen::MatrixXcd P = U * C * V.transpose();  // weights folded in

    const int ny = static_cast<int>(ys.size()), nxp = static_cast<int>(xs.size());
    Eigen::MatrixXcd Ey(ny, N), Ex(nxp, N);
    for (int p = 0; p < ny; ++p)
        for (int i = 0; i < N; ++i)
            Ey(p, i) = std::exp(kI * (2.0 * ys[p] * rule.nodes[i] / std::sqrt(au)));
    for (int q = 0; q < nxp; ++q)
        for (int j = 0; j < N; ++j)
            Ex(q, j) = std::exp(-kI * (2.0 * xs[q] * rule.nodes[j] / std::sqrt(av)));

    Eigen::MatrixXcd vals = Ey * P * Ex.transpose();
    vals *= 1.0 / (M_PI * M_PI * std::sqrt(au * av));

    double resid = vals.imag().cwiseAbs().maxCoeff();
    if (resid > 1e-10)
        throw Error("numeric QPD imaginary residue " + std::to_string(resid) + " above 1e-10");

    Eigen::MatrixXd out(nxp, ny);
    for (int q = 0; q < nxp; ++q)
        for (int p = 0; p < ny; ++p) out(q, p) = vals(p, q).real();
    return out;
}

}  // namespace detail

cplx char_function(const StateModel& state, cplx gamma, const OrderingParams& ordering) {
    double re = gamma.real(), im = gamma.imag();
    cplx base = char0(state, gamma);
    return base * std::exp(0.5 * ordering.s_y * re * re + 0.5 * ordering.s_x * im * im);
}

double qpd_eval(const StateModel& state, cplx z, const OrderingParams& ordering) {
    require_ordering_below_one(ordering);
    struct V {
        cplx z;
        const OrderingParams& o;
        double operator()(const states::Vacuum&) const { return coherent_qpd(0.0, z, o); }
        double operator()(const states::Coherent& c) const { return coherent_qpd(c.alpha, z, o); }
        double operator()(const states::Fock& f) const {
            if (std::abs(o.s_x - o.s_y) < 1e-12) return fock_qpd_diag(f.n, z, o.s_x);
            return fock_qpd_general(f.n, z, o);
        }
        double operator()(const states::Cat& c) const { return cat_qpd(c, z, o); }
        double operator()(const states::Squeezed& s) const { return squeezed_qpd(s, z, o); }
        double operator()(const states::Numeric& n) const {
            return detail::numeric_qpd_tensor(n, {z.real()}, {z.imag()}, o)(0, 0);
        }
    };
    return std::visit(V{z, ordering}, state.value());
}

bool QpdGrid::same_geometry(const QpdGrid& other, double tol) const {
    return nx == other.nx && ny == other.ny && std::abs(dx - other.dx) < tol &&
           std::abs(dy - other.dy) < tol && std::abs(origin - other.origin) < tol;
}

QpdGrid qpd_grid(const StateModel& state, const GridWindow& window,
                 const OrderingParams& ordering) {
    require_ordering_below_one(ordering);
    QpdGrid grid;
    grid.ordering = ordering;
    grid.nx = grid.ny = window.n;
    grid.dx = grid.dy = 2.0 * window.radius / (window.n - 1);
    grid.origin = window.center - cplx(window.radius, window.radius);
    grid.values.resize(grid.nx, grid.ny);

    if (const auto* num = std::get_if<states::Numeric>(&state.value())) {
        std::vector<double> xs(grid.nx), ys(grid.ny);
        for (int i = 0; i < grid.nx; ++i) xs[i] = grid.x_at(i);
        for (int j = 0; j < grid.ny; ++j) ys[j] = grid.y_at(j);
        grid.values = detail::numeric_qpd_tensor(*num, xs, ys, ordering);
    } else {
        parallel_for(grid.nx, [&](std::size_t ix) {
            for (int iy = 0; iy < grid.ny; ++iy)
                grid.values(ix, iy) = qpd_eval(state, grid.z_at(static_cast<int>(ix), iy), ordering);
        });
    }

    double vmax = grid.values.cwiseAbs().maxCoeff();
    double bmax = 0.0;
    for (int i = 0; i < grid.nx; ++i) {
        bmax = std::max({bmax, std::abs(grid.values(i, 0)), std::abs(grid.values(i, grid.ny - 1))});
    }
    for (int j = 0; j < grid.ny; ++j) {
        bmax = std::max({bmax, std::abs(grid.values(0, j)), std::abs(grid.values(grid.nx - 1, j))});
    }
    if (vmax > 0.0 && bmax > 1e-6 * vmax)
        throw WindowTooSmall("boundary-cell maximum exceeds 1e-6 of grid maximum");
    return grid;
}

QpdGrid qpd_grid(const StateModel& state, const OrderingParams& ordering) {
    GridWindow w;
    w.center = state.mean_a();
    w.radius = state.default_window_radius();
    return qpd_grid(state, w, ordering);
}

double marginal(const StateModel& state, Quadrature quad, double q) {
    struct V {
        Quadrature quad;
        double q;
        double operator()(const states::Vacuum&) const {
            return std::sqrt(2.0 / M_PI) * std::exp(-2.0 * q * q);
        }
        double operator()(const states::Coherent& c) const {
            double center = (quad == Quadrature::X) ? c.alpha.real() : c.alpha.imag();
            double d = q - center;
            return std::sqrt(2.0 / M_PI) * std::exp(-2.0 * d * d);
        }
        double operator()(const states::Fock& f) const {
            double psi = oscillator_psi(f.n, q);
            return psi * psi;
        }
        double operator()(const states::Cat& c) const {
            cplx a = (quad == Quadrature::X) ? c.alpha : -kI * c.alpha;
            auto psi_coh = [&](cplx al) {
                double u = al.real(), v = al.imag();
                cplx e = -(q - u) * (q - u) + 2.0 * kI * v * q - kI * u * v;
                return std::pow(2.0 / M_PI, 0.25) * std::exp(e);
            };
            cplx amp = psi_coh(a) + double(c.parity) * psi_coh(-a);
            return c.norm2 * std::norm(amp);
        }
        double operator()(const states::Squeezed& s) const {
            double sgn = (quad == Quadrature::X) ? -1.0 : 1.0;
            double var = (std::cosh(2.0 * s.r) + sgn * std::sinh(2.0 * s.r) * std::cos(s.phase)) / 4.0;
            return std::exp(-q * q / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
        }
        double operator()(const states::Numeric& num) const {
            std::vector<double> psi;
            oscillator_psi_all(num.n_max, q, psi);
            cplx acc = 0.0;
            for (int n = 0; n <= num.n_max; ++n)
                for (int m = 0; m <= num.n_max; ++m) {
                    cplx r = num.rho(n, m);
                    if (quad == Quadrature::Y) r *= std::pow(-kI, n - m);
                    acc += r * psi[n] * psi[m];
                }
            return acc.real();
        }
    };
    return std::visit(V{quad, q}, state.value());
}

double wigner_fidelity(const QpdGrid& a, const QpdGrid& b) {
    if (!a.same_geometry(b)) throw GridMismatch("Wigner grids have different geometry");
    auto wigner = [](const QpdGrid& g) {
        return std::abs(g.ordering.s_x) < 1e-12 && std::abs(g.ordering.s_y) < 1e-12;
    };
    if (!wigner(a) || !wigner(b)) throw GridMismatch("fidelity requires s_X = s_Y = 0 grids");
    double f = M_PI * (a.values.array() * b.values.array()).sum() * a.cell_area();
    return std::clamp(f, 0.0, 1.0 + 1e-6);
}

Eigen::MatrixXcd wigner_grid_to_density(const QpdGrid& wigner, int n_max) {
    const int dim = n_max + 1;
    unsigned nt = thread_count();
    std::vector<Eigen::MatrixXcd> acc(nt, Eigen::MatrixXcd::Zero(dim, dim));
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            Eigen::MatrixXcd& A = acc[t];
            for (;;) {
                std::size_t ix = next.fetch_add(1);
                if (ix >= static_cast<std::size_t>(wigner.nx)) return;
                for (int iy = 0; iy < wigner.ny; ++iy) {
                    double w = wigner.values(static_cast<int>(ix), iy);
                    if (w == 0.0) continue;
                    cplx z = wigner.z_at(static_cast<int>(ix), iy);
                    double x = 4.0 * std::norm(z);
                    double e = std::exp(-2.0 * std::norm(z));
                    for (int k = 0; k <= n_max; ++k) {
                        // L_n^{(k)}(x) recurrence over n, combined scale
                        double lm1 = 0.0, l = 1.0;
                        cplx zk = std::pow(2.0 * z, k);
                        for (int n = 0; n + k <= n_max; ++n) {
                            if (n == 1) {
                                lm1 = 1.0;
                                l = 1.0 + k - x;
                            } else if (n > 1) {
                                double lp1 =
                                    ((2.0 * (n - 1) + k + 1.0 - x) * l - (n - 1 + k) * lm1) / n;
                                lm1 = l;
                                l = lp1;
                            }
                            int m = n + k;
                            double scale = std::exp(0.5 * (log_factorial(n) - log_factorial(m)));
                            double par = (n % 2) ? -1.0 : 1.0;
                            cplx g = 2.0 / M_PI * e * scale * par * zk * l;
                            A(m, n) += w * g;  // rho_mn accumulation, m >= n
                        }
                    }
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    for (auto& A : acc) rho += A;
    rho *= M_PI * wigner.cell_area();
    for (int m = 0; m < dim; ++m)
        for (int n = 0; n < m; ++n) rho(n, m) = std::conj(rho(m, n));
    return rho;
}

GridMoments grid_moments(const QpdGrid& grid) {
    double m0 = 0.0, mx = 0.0, my = 0.0, mxx = 0.0, myy = 0.0;
    for (int i = 0; i < grid.nx; ++i) {
        double x = grid.x_at(i);
        for (int j = 0; j < grid.ny; ++j) {
            double y = grid.y_at(j);
            double w = grid.values(i, j);
            m0 += w;
            mx += w * x;
            my += w * y;
            mxx += w * x * x;
            myy += w * y * y;
        }
    }
    double area = grid.cell_area();
    m0 *= area;
    GridMoments out;
    out.mean_x = mx * area / m0;
    out.mean_y = my * area / m0;
    out.var_x = mxx * area / m0 - out.mean_x * out.mean_x;
    out.var_y = myy * area / m0 - out.mean_y * out.mean_y;
    return out;
}

}  // namespace eoslab
