#include "fracmc/phase_transition.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "fracmc/errors.hpp"

namespace fracmc {

namespace {

constexpr double pi = std::numbers::pi;

// Lagrange basis on the six nodes -2..3, evaluated at t in [0, 1].
double lagrange6(int p, double t) {
    double v = 1.0;
    const double tp = p - 2.0;
    for (int q = 0; q < 6; ++q) {
        if (q == p) continue;
        const double tq = q - 2.0;
        v *= (t - tq) / (tp - tq);
    }
    return v;
}

struct Operator {
    Eigen::MatrixXd M;
    Eigen::VectorXd c;
};

// Discrete I_1^s on the uniform grid with the matched power-tail closure:
// (I_h u)_i = (M u + c)_i.
Operator assemble(double s, double L, int N) {
    const double h = 2.0 * L / (N - 1);
    const double two_s = 2.0 * s;
    const double h2s = std::pow(h, -two_s);
    Operator op;
    op.M = Eigen::MatrixXd::Zero(N, N);
    op.c = Eigen::VectorXd::Zero(N);
    auto xi = [&](long j) { return -L + h * static_cast<double>(j); };

    // Ghost nodes carry tail values, affine in the end unknowns.
    auto add = [&](int i, long j, double w) {
        if (j >= 0 && j < N) {
            op.M(i, j) += w;
        } else if (j >= N) {
            const double a = std::pow(L / xi(j), two_s);
            op.M(i, N - 1) += w * a;
            op.c[i] += w * (1.0 - a);
        } else {
            const double a = std::pow(L / -xi(j), two_s);
            op.M(i, 0) += w * a;
        }
    };

    // Cell weights omega_{m,p} = h^{-2s} int_0^1 l_p(t) (m+t)^{-1-2s} dt.
    const GaussRule gl = gauss_legendre(16);
    std::vector<std::array<double, 6>> omega(static_cast<size_t>(N + 1));
    for (int m = 1; m <= N; ++m)
        for (int p = 0; p < 6; ++p) {
            double acc = 0.0;
            for (size_t g = 0; g < gl.nodes.size(); ++g) {
                const double t = 0.5 * (gl.nodes[g] + 1.0);
                acc += 0.5 * gl.weights[g] * lagrange6(p, t) * std::pow(m + t, -1.0 - two_s);
            }
            omega[static_cast<size_t>(m)][static_cast<size_t>(p)] = h2s * acc;
        }

    // Near zone [0, h]: g(y) = a y^2 + b y^4 + c y^6 through g(h), g(2h), g(3h).
    Eigen::Matrix3d V;
    V << 1, 1, 1, 4, 16, 64, 9, 81, 729;
    const Eigen::RowVector3d moments(1.0 / (2.0 - two_s), 1.0 / (4.0 - two_s), 1.0 / (6.0 - two_s));
    const Eigen::RowVector3d beta = h2s * moments * V.inverse();

    // Tail integrals Q_i = int_a^inf (L / (x_i + y))^{2s} y^{-1-2s} dy.
    std::vector<double> Q(static_cast<size_t>(N));
    AdaptiveOptions ao;
    ao.abs_tol = 1e-15;
    ao.rel_tol = 1e-13;
    for (int i = 0; i < N; ++i) {
        const double x = xi(i);
        const double a = i <= N - 2 ? h * (N - 1 - i) : h;
        Q[static_cast<size_t>(i)] =
            integrate_power_tail([&](double y) { return std::pow(L / (x + y), two_s) * std::pow(y, -1.0 - two_s); },
                                 a, 1.0 + 2.0 * two_s, ao)
                .value;
    }

    for (int i = 0; i < N; ++i) {
        op.M(i, i) -= 2.0 * h2s / two_s;
        for (int k = 1; k <= 3; ++k) {
            const double b = beta[k - 1];
            add(i, i + k, b);
            add(i, i - k, b);
            op.M(i, i) -= 2.0 * b;
        }
        for (int m = 1; m <= N - 2 - i; ++m)
            for (int p = 0; p < 6; ++p) add(i, static_cast<long>(i) + m - 2 + p, omega[m][p]);
        for (int m = 1; m <= i - 1; ++m)
            for (int p = 0; p < 6; ++p) add(i, static_cast<long>(i) - (m - 2 + p), omega[m][p]);
        const double aR = i <= N - 2 ? h * (N - 1 - i) : h;
        const double P = std::pow(aR, -two_s) / two_s;
        const double QR = Q[static_cast<size_t>(i)];
        op.c[i] += P - QR;
        op.M(i, N - 1) += QR;
        op.M(i, 0) += Q[static_cast<size_t>(N - 1 - i)];
    }
    return op;
}

Eigen::VectorXd residual_of(const Operator& op, const Potential& W, const Eigen::VectorXd& u) {
    Eigen::VectorXd F = op.M * u + op.c;
    for (Eigen::Index i = 0; i < u.size(); ++i) F[i] -= W.Wp(u[i]);
    return F;
}

bool strictly_increasing(const Eigen::VectorXd& u) {
    for (Eigen::Index i = 1; i < u.size(); ++i)
        if (!(u[i] > u[i - 1])) return false;
    return true;
}

std::string fmt17(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

PhaseTransition::PhaseTransition(double s, Potential potential, double L, std::vector<double> values,
                                 double residual)
    : s_(s), potential_(potential), L_(L), u_(std::move(values)), residual_(residual) {
    if (u_.size() < 8) throw Error(ErrorKind::invalid_parameter, "profile needs at least 8 nodes");
    h_ = 2.0 * L_ / static_cast<double>(u_.size() - 1);
    const double L2s = std::pow(L_, 2.0 * s_);
    aL_ = u_.front() * L2s;
    aR_ = (1.0 - u_.back()) * L2s;
    build_slopes();
}

double PhaseTransition::tail_theory() const { return 1.0 / (2.0 * s_ * potential_.wpp0()); }

void PhaseTransition::build_slopes() {
    const long N = static_cast<long>(u_.size());
    auto val = [&](long j) {
        if (j < 0) return aL_ * std::pow(-node(static_cast<int>(j)), -2.0 * s_);
        if (j >= N) return 1.0 - aR_ * std::pow(node(static_cast<int>(j)), -2.0 * s_);
        return u_[static_cast<size_t>(j)];
    };
    du_.assign(u_.size(), 0.0);
    for (long j = 1; j < N - 1; ++j)
        du_[static_cast<size_t>(j)] = (-val(j - 3) + 9.0 * val(j - 2) - 45.0 * val(j - 1) + 45.0 * val(j + 1) -
                                       9.0 * val(j + 2) + val(j + 3)) /
                                      (60.0 * h_);
    du_.front() = 2.0 * s_ * aL_ * std::pow(L_, -1.0 - 2.0 * s_);
    du_.back() = 2.0 * s_ * aR_ * std::pow(L_, -1.0 - 2.0 * s_);
    // Fritsch-Carlson limiter keeps the interpolant monotone.
    for (long j = 0; j + 1 < N; ++j) {
        const double delta = (u_[static_cast<size_t>(j + 1)] - u_[static_cast<size_t>(j)]) / h_;
        double& a = du_[static_cast<size_t>(j)];
        double& b = du_[static_cast<size_t>(j + 1)];
        if (delta <= 0.0) {
            a = std::max(a, 0.0);
            b = std::max(b, 0.0);
            continue;
        }
        a = std::max(a, 0.0);
        b = std::max(b, 0.0);
        const double al = a / delta, be = b / delta;
        const double r2 = al * al + be * be;
        if (r2 > 9.0) {
            const double tau = 3.0 / std::sqrt(r2);
            a = tau * al * delta;
            b = tau * be * delta;
        }
    }
}

double PhaseTransition::phi(double xi) const {
    if (xi > L_) return 1.0 - aR_ * std::pow(xi, -2.0 * s_);
    if (xi < -L_) return aL_ * std::pow(-xi, -2.0 * s_);
    const int N = nodes();
    const double q = (xi + L_) / h_;
    int j = static_cast<int>(std::floor(q));
    j = std::clamp(j, 0, N - 2);
    const double t = q - j;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * u_[j] + (t3 - 2 * t2 + t) * h_ * du_[j] + (-2 * t3 + 3 * t2) * u_[j + 1] +
           (t3 - t2) * h_ * du_[j + 1];
}

double PhaseTransition::phi_prime(double xi) const {
    if (xi > L_) return 2.0 * s_ * aR_ * std::pow(xi, -1.0 - 2.0 * s_);
    if (xi < -L_) return 2.0 * s_ * aL_ * std::pow(-xi, -1.0 - 2.0 * s_);
    const int N = nodes();
    const double q = (xi + L_) / h_;
    int j = static_cast<int>(std::floor(q));
    j = std::clamp(j, 0, N - 2);
    const double t = q - j;
    const double t2 = t * t;
    return (6 * t2 - 6 * t) / h_ * u_[j] + (3 * t2 - 4 * t + 1) * du_[j] + (-6 * t2 + 6 * t) / h_ * u_[j + 1] +
           (3 * t2 - 2 * t) * du_[j + 1];
}

void PhaseTransition::write_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw Error(ErrorKind::io, "cannot write " + path);
    f << "xi,phi,phi_prime\n";
    for (int j = 0; j < nodes(); ++j)
        f << fmt17(node(j)) << ',' << fmt17(u_[j]) << ',' << fmt17(du_[j]) << '\n';
    if (!f) throw Error(ErrorKind::io, "write failed for " + path);
}

void PhaseTransition::write_sidecar(const std::string& path) const {
    nlohmann::ordered_json j;
    j["s"] = s_;
    j["potential"] = to_string(potential_.kind());
    j["L"] = L_;
    j["nodes"] = nodes();
    j["residual"] = residual_;
    j["tail_left"] = aL_;
    j["tail_right"] = aR_;
    std::ofstream f(path);
    if (!f) throw Error(ErrorKind::io, "cannot write " + path);
    f << std::setprecision(17) << j.dump(2) << '\n';
}

PhaseTransition PhaseTransition::read(const std::string& csv_path, const std::string& sidecar_path) {
    std::ifstream sj(sidecar_path);
    if (!sj) throw Error(ErrorKind::io, "cannot read " + sidecar_path);
    nlohmann::json meta;
    try {
        sj >> meta;
    } catch (const std::exception& e) {
        throw Error(ErrorKind::validation, std::string("bad profile sidecar: ") + e.what());
    }
    std::ifstream f(csv_path);
    if (!f) throw Error(ErrorKind::io, "cannot read " + csv_path);
    std::string line;
    std::getline(f, line);
    if (line != "xi,phi,phi_prime") throw Error(ErrorKind::validation, "unexpected profile CSV header");
    std::vector<double> vals;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b;
        std::getline(ls, a, ',');
        std::getline(ls, b, ',');
        vals.push_back(std::stod(b));
    }
    const double L = meta.at("L").get<double>();
    if (static_cast<int>(vals.size()) != meta.at("nodes").get<int>())
        throw Error(ErrorKind::validation, "profile CSV row count disagrees with sidecar");
    return PhaseTransition(meta.at("s").get<double>(), make_potential(meta.at("potential").get<std::string>()), L,
                           std::move(vals), meta.at("residual").get<double>());
}

PhaseTransition solve_phase_transition(const Potential& W, double s, const SolverOptions& opt) {
    if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::invalid_parameter, "order s must lie in (0, 1)");
    if (!(opt.L >= 20.0)) throw Error(ErrorKind::invalid_parameter, "profile half-width L must be at least 20");
    if (!(opt.tol >= 1e-8)) throw Error(ErrorKind::invalid_parameter, "solver tolerance must be at least 1e-8");
    if (opt.nodes < 101 || opt.nodes % 2 == 0)
        throw Error(ErrorKind::invalid_parameter, "node count must be odd and at least 101");
    const int N = opt.nodes;
    const double L = opt.L;
    const double h = 2.0 * L / (N - 1);
    const Operator op = assemble(s, L, N);

    Eigen::VectorXd u(N);
    for (int j = 0; j < N; ++j) u[j] = 0.5 + std::atan(-L + h * j) / pi;
    Eigen::VectorXd F = residual_of(op, W, u);
    double fn = F.lpNorm<Eigen::Infinity>();
    double dtau = 1.0;
    // Pseudo-transient continuation: implicit steps of u_tau = I u - W'(u)
    // with a pseudo step grown by the residual ratio (Newton in the limit).
    const double target = 1e-3 * opt.tol;
    int stalls = 0;
    for (int it = 0; it < opt.max_iter && fn > target; ++it) {
        Eigen::MatrixXd A = -op.M;
        for (int i = 0; i < N; ++i) A(i, i) += W.Wpp(u[i]) + 1.0 / dtau;
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
        const Eigen::VectorXd du = lu.solve(F);
        Eigen::VectorXd trial = u + du;
        Eigen::VectorXd Ft = residual_of(op, W, trial);
        double ftn = Ft.lpNorm<Eigen::Infinity>();
        if (!strictly_increasing(trial) || !(ftn < 10.0 * fn)) {
            dtau *= 0.25;
            if (dtau < 1e-8) {
                if (!strictly_increasing(trial))
                    throw Error(ErrorKind::non_monotone, "standing-wave iterate lost monotonicity; refine the grid");
                throw NonConvergence("standing-wave solver diverged", fn);
            }
            continue;
        }
        if (ftn >= fn) {
            if (fn <= opt.tol && ++stalls >= 2) {
                u = trial;
                fn = ftn;
                F = Ft;
                break;
            }
        }
        dtau = std::min(1e14, dtau * std::max(1.0, fn / std::max(ftn, 1e-300)) * 2.0);
        u = trial;
        F = Ft;
        fn = ftn;
    }
    if (!(fn <= opt.tol)) throw NonConvergence("standing-wave solver did not reach tolerance", fn);
    if (!strictly_increasing(u))
        throw Error(ErrorKind::non_monotone, "standing-wave solution is not monotone; refine the grid");

    std::vector<double> vals(u.data(), u.data() + N);
    PhaseTransition pt(s, W, L, vals, fn);
    // Translate so that phi(0) = 1/2.
    double lo = -1.0, hi = 1.0;
    while (pt.phi(lo) > 0.5) lo *= 2.0;
    while (pt.phi(hi) < 0.5) hi *= 2.0;
    for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
        const double mid = 0.5 * (lo + hi);
        (pt.phi(mid) < 0.5 ? lo : hi) = mid;
    }
    const double shift = 0.5 * (lo + hi);
    if (std::abs(shift) > 1e-12) {
        std::vector<double> moved(static_cast<size_t>(N));
        for (int j = 0; j < N; ++j) moved[static_cast<size_t>(j)] = pt.phi(pt.node(j) + shift);
        Eigen::VectorXd mv = Eigen::Map<Eigen::VectorXd>(moved.data(), N);
        const double r = residual_of(op, W, mv).lpNorm<Eigen::Infinity>();
        return PhaseTransition(s, W, L, std::move(moved), r);
    }
    return pt;
}

std::vector<double> standing_wave_residual(const PhaseTransition& pt) {
    const Operator op = assemble(pt.s(), pt.L(), pt.nodes());
    Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(pt.values().data(), pt.nodes());
    const Eigen::VectorXd F = residual_of(op, pt.potential(), u);
    return std::vector<double>(F.data(), F.data() + F.size());
}

namespace {

void require_supercritical(double s) {
    if (!(s > 0.5 && s < 1.0))
        throw Error(ErrorKind::invalid_regime, "c1 is finite only for s in (1/2, 1)");
}

std::vector<double> xi_breaks(double L) { return {-L, -20.0, -5.0, -1.0, 0.0, 1.0, 5.0, 20.0, L}; }

}  // namespace

QuadResult energy_constant_c1(const PhaseTransition& pt, const QuadratureSpec& quad) {
    const double s = pt.s();
    require_supercritical(s);
    RadialOptions ro = quad.radial(0.1 * quad.tolerance);
    ro.rel_tol = 0.1 * quad.tolerance;
    AdaptiveOptions ao;
    ao.abs_tol = quad.tolerance;
    ao.rel_tol = quad.tolerance;
    ao.exec = quad.exec;
    auto inner = [&](double xi) {
        const double p0 = pt.phi(xi);
        const QuadResult r = radial_integral(
            [&](double t) {
                const double d = pt.phi(xi + t) - p0;
                return d * d;
            },
            s, ro);
        return Estimate{r.value, r.error};
    };
    return integrate_line_nested(inner, xi_breaks(pt.L()), 2.0 * s, 6.0 * s, ao);
}

QuadResult energy_double_integral(const PhaseTransition& pt, const QuadratureSpec& quad) {
    const double s = pt.s();
    require_supercritical(s);
    RadialOptions ro = quad.radial(0.1 * quad.tolerance);
    ro.rel_tol = 0.1 * quad.tolerance;
    AdaptiveOptions ao;
    ao.abs_tol = quad.tolerance;
    ao.rel_tol = quad.tolerance;
    ao.exec = quad.exec;
    auto inner = [&](double xi) {
        const double p0 = pt.phi(xi);
        const QuadResult r = radial_integral(
            [&](double t) {
                const double a = pt.phi(xi + t) - p0;
                const double b = pt.phi(xi - t) - p0;
                return a * a + b * b;
            },
            s, ro);
        return Estimate{r.value, r.error};
    };
    return integrate_line_nested(inner, xi_breaks(pt.L()), 2.0 * s, 2.0 * s, ao);
}

}  // namespace fracmc
