#pragma once

#include <functional>
#include <thread>

#include "qbs/hilbert.hpp"
#include "qbs/dynamics.hpp"

namespace qbs {

struct PhasePoint {
    Complex chi = 0.0;
};

struct GridBounds {
    double re_min = -1.5, re_max = 3.5;
    double im_min = -1.5, im_max = 1.5;
};

struct GridResolution {
    int re_samples = 101, im_samples = 61;
};

struct WignerGrid {
    std::vector<double> re_axis;
    std::vector<double> im_axis;
    Eigen::MatrixXd values;  // values(i_re, i_im)
};

struct RabiSignal {
    std::vector<double> tau_axis;  // ns
    std::vector<double> pe_values;
};

namespace detail {

// Exact Fock-basis matrix elements <n|D(beta)|m> of the (un-truncated)
// displacement operator, restricted to a dim x dim block. Built with the
// standard Laguerre-polynomial recurrences: column 0 and row 0 are coherent
// state amplitudes, columns/rows 1 follow from L_1^(k), the diagonal from the
// L_n three-term recurrence, and each off-diagonal d = n-m from
//   D(n,m) = (m+n-1-x)/sqrt(mn) D(n-1,m-1) - sqrt((m-1)(n-1)/(mn)) D(n-2,m-2),
// x = |beta|^2.
inline CMatrix displacement_block_exact(Complex beta, int dim) {
    CMatrix D = CMatrix::Zero(dim, dim);
    const double x = std::norm(beta);
    const double e = std::exp(-x / 2.0);
    const Complex nbc = -std::conj(beta);
    D(0, 0) = e;
    if (dim == 1) return D;

    // column 0 / row 0: coherent amplitudes
    for (int n = 1; n < dim; ++n) D(n, 0) = D(n - 1, 0) * beta / std::sqrt(double(n));
    for (int m = 1; m < dim; ++m) D(0, m) = D(0, m - 1) * nbc / std::sqrt(double(m));
    // column 1 / row 1: <n|D|1> = beta^{n-1}/sqrt(n!) e^{-x/2} (n - x) and the
    // mirrored form with -conj(beta); L_1^(k)(x) = k+1-x.
    D(1, 1) = e * (1.0 - x);
    for (int n = 2; n < dim; ++n)
        D(n, 1) = D(n - 1, 0) / std::sqrt(double(n)) * (double(n) - x);
    for (int m = 2; m < dim; ++m)
        D(1, m) = D(0, m - 1) / std::sqrt(double(m)) * (double(m) - x);
    // diagonal: Laguerre L_n(x)
    for (int n = 2; n < dim; ++n)
        D(n, n) = ((2.0 * n - 1.0 - x) * D(n - 1, n - 1) -
                   (double(n) - 1.0) * D(n - 2, n - 2)) /
                  double(n);
    // remaining off-diagonals, one diagonal stripe at a time
    for (int d = 1; d < dim; ++d) {
        for (int n = d + 2; n < dim; ++n) {
            int m = n - d;
            D(n, m) = (double(m + n) - 1.0 - x) / std::sqrt(double(m) * double(n)) *
                          D(n - 1, m - 1) -
                      std::sqrt((m - 1.0) * (n - 1.0) / (double(m) * double(n))) *
                          D(n - 2, m - 2);
        }
        for (int m = d + 2; m < dim; ++m) {
            int n = m - d;
            D(n, m) = (double(m + n) - 1.0 - x) / std::sqrt(double(m) * double(n)) *
                          D(n - 1, m - 1) -
                      std::sqrt((m - 1.0) * (n - 1.0) / (double(m) * double(n))) *
                          D(n - 2, m - 2);
        }
    }
    return D;
}

}  // namespace detail

// W(chi) = (2/pi) Tr[e^{i pi a^dag a} D(-chi) rho D(chi)]. Using parity
// conjugation P D(-chi) = D(chi) P and cyclic invariance this equals
// (2/pi) Tr[rho D(2 chi) P], evaluated with exact infinite-space matrix
// elements of D(2 chi) on the state's Fock block, so the only truncation
// error left is that of rho itself.
inline double wigner_point(const DensityOperator& rho_res, const PhasePoint& chi) {
    require(rho_res.layout().qubits().empty(), ErrorCode::validation,
            "wigner_point expects a resonator-only density operator");
    int f = rho_res.layout().fock_dim();
    CMatrix D2 = detail::displacement_block_exact(2.0 * chi.chi, f);
    Complex acc = 0.0;
    const CMatrix& r = rho_res.matrix();
    for (int m = 0; m < f; ++m) {
        double sign = (m % 2 == 0) ? 1.0 : -1.0;
        for (int n = 0; n < f; ++n) acc += r(m, n) * sign * D2(n, m);
    }
    require(std::abs(acc.imag()) < 1e-10, ErrorCode::numeric,
            "Wigner value has a non-real residue");
    return (2.0 / kPi) * acc.real();
}

inline WignerGrid wigner_grid(const DensityOperator& rho_res, const GridBounds& bounds,
                              const GridResolution& res, int threads = 1) {
    require(res.re_samples >= 2 && res.im_samples >= 2, ErrorCode::validation,
            "grid needs at least 2 samples per axis");
    WignerGrid g;
    g.re_axis.resize(res.re_samples);
    g.im_axis.resize(res.im_samples);
    for (int i = 0; i < res.re_samples; ++i)
        g.re_axis[i] =
            bounds.re_min + (bounds.re_max - bounds.re_min) * i / (res.re_samples - 1);
    for (int j = 0; j < res.im_samples; ++j)
        g.im_axis[j] =
            bounds.im_min + (bounds.im_max - bounds.im_min) * j / (res.im_samples - 1);
    g.values.resize(res.re_samples, res.im_samples);

    auto run_rows = [&](int row_begin, int row_end) {
        for (int i = row_begin; i < row_end; ++i)
            for (int j = 0; j < res.im_samples; ++j)
                g.values(i, j) =
                    wigner_point(rho_res, {Complex(g.re_axis[i], g.im_axis[j])});
    };
    int nthreads = threads <= 0
                       ? int(std::max(1u, std::thread::hardware_concurrency()))
                       : threads;
    nthreads = std::min(nthreads, res.re_samples);
    if (nthreads <= 1) {
        run_rows(0, res.re_samples);
    } else {
        std::vector<std::thread> pool;
        int chunk = (res.re_samples + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            int b = t * chunk, e = std::min(res.re_samples, b + chunk);
            if (b < e) pool.emplace_back(run_rows, b, e);
        }
        for (auto& th : pool) th.join();
    }
    return g;
}

struct WignerMinimum {
    PhasePoint chi_star;
    double w_star = 0.0;
};

// Smallest sampled value; ties break to the first hit in row-major order.
inline WignerMinimum wigner_min(const WignerGrid& grid) {
    require(grid.values.size() > 0, ErrorCode::validation, "empty grid");
    WignerMinimum best{{Complex(grid.re_axis[0], grid.im_axis[0])}, grid.values(0, 0)};
    for (int i = 0; i < grid.values.rows(); ++i)
        for (int j = 0; j < grid.values.cols(); ++j)
            if (grid.values(i, j) < best.w_star) {
                best.w_star = grid.values(i, j);
                best.chi_star.chi = Complex(grid.re_axis[i], grid.im_axis[j]);
            }
    return best;
}

// Grid minimum plus a deterministic coordinate-descent polish: step starts at
// half the grid spacing and shrinks to 1e-4.
inline WignerMinimum wigner_min(const WignerGrid& grid, const DensityOperator& rho_res,
                                bool refine) {
    WignerMinimum best = wigner_min(grid);
    if (!refine) return best;
    double step = 0.5 * (grid.re_axis.size() > 1 ? grid.re_axis[1] - grid.re_axis[0]
                                                 : 0.05);
    Complex at = best.chi_star.chi;
    double w0 = best.w_star;
    while (step > 1e-4) {
        bool improved = false;
        const Complex moves[4] = {Complex(step, 0), Complex(-step, 0), Complex(0, step),
                                  Complex(0, -step)};
        for (const Complex& dv : moves) {
            double w = wigner_point(rho_res, {at + dv});
            if (w < w0 - 1e-15) {
                w0 = w;
                at += dv;
                improved = true;
                break;
            }
        }
        if (!improved) step /= 2.0;
    }
    return {{at}, w0};
}

// ---------------------------------------------------------------------------
// Simulated ancilla-Rabi tomography of W(chi)
// ---------------------------------------------------------------------------

// Photon-number populations of D(-chi) rho D(chi), evaluated on a padded
// ladder that holds the displaced state.
inline std::vector<double> displaced_populations(const DensityOperator& rho_res,
                                                 Complex chi, int n_levels) {
    int f = rho_res.layout().fock_dim();
    int pad = std::max(n_levels, f);
    CMatrix B = detail::displacement_block_exact(-chi, pad).leftCols(f);  // pad x f
    std::vector<double> p(static_cast<size_t>(n_levels), 0.0);
    for (int k = 0; k < n_levels; ++k) {
        Complex v = B.row(k) * rho_res.matrix() * B.row(k).adjoint();
        p[static_cast<size_t>(k)] = std::max(0.0, v.real());
    }
    return p;
}

inline int tomography_levels(const DensityOperator& rho_res, Complex chi) {
    double root = std::sqrt(double(rho_res.layout().n_cutoff())) + std::abs(chi);
    double mean = root * root;
    return static_cast<int>(std::ceil(mean + 6.0 * std::sqrt(mean + 1.0) + 10.0));
}

// P_e(tau) = sum_{n>=1} p_n sin^2(sqrt(n) W' tau) for the displaced state.
inline RabiSignal rabi_tomography_signal(const DensityOperator& rho_res,
                                         const PhasePoint& chi,
                                         const HardwareParams& params,
                                         std::vector<double> tau_axis) {
    require(rho_res.layout().qubits().empty(), ErrorCode::validation,
            "tomography expects a resonator-only density operator");
    int levels = tomography_levels(rho_res, chi.chi);
    std::vector<double> p = displaced_populations(rho_res, chi.chi, levels);
    RabiSignal sig;
    sig.tau_axis = std::move(tau_axis);
    sig.pe_values.reserve(sig.tau_axis.size());
    for (double tau : sig.tau_axis) {
        double v = 0.0;
        for (size_t n = 1; n < p.size(); ++n) {
            double s = std::sin(std::sqrt(double(n)) * params.omega_ancilla * tau);
            v += p[n] * s * s;
        }
        sig.pe_values.push_back(v);
    }
    return sig;
}

namespace detail {

// Lawson-Hanson non-negative least squares for ||Ax - b||, small dense A.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                            int max_iter = 200) {
    const int n = int(A.cols());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<size_t>(n), false);
    Eigen::VectorXd w = A.transpose() * (b - A * x);
    for (int iter = 0; iter < max_iter; ++iter) {
        int t = -1;
        double wmax = 1e-12;
        for (int j = 0; j < n; ++j)
            if (!passive[static_cast<size_t>(j)] && w[j] > wmax) {
                wmax = w[j];
                t = j;
            }
        if (t < 0) break;
        passive[static_cast<size_t>(t)] = true;
        while (true) {
            std::vector<int> P;
            for (int j = 0; j < n; ++j)
                if (passive[static_cast<size_t>(j)]) P.push_back(j);
            Eigen::MatrixXd Ap(A.rows(), P.size());
            for (size_t k = 0; k < P.size(); ++k) Ap.col(long(k)) = A.col(P[k]);
            Eigen::VectorXd z =
                Ap.colPivHouseholderQr().solve(b);
            bool feasible = true;
            double amin = 1.0;
            for (size_t k = 0; k < P.size(); ++k)
                if (z[long(k)] <= 0) {
                    feasible = false;
                    double d = x[P[k]] / (x[P[k]] - z[long(k)]);
                    amin = std::min(amin, d);
                }
            if (feasible) {
                x.setZero();
                for (size_t k = 0; k < P.size(); ++k) x[P[k]] = z[long(k)];
                break;
            }
            Eigen::VectorXd xp = x;
            for (size_t k = 0; k < P.size(); ++k)
                xp[P[k]] = x[P[k]] + amin * (z[long(k)] - x[P[k]]);
            x = xp;
            for (int j = 0; j < n; ++j)
                if (passive[static_cast<size_t>(j)] && x[j] <= 1e-14) {
                    passive[static_cast<size_t>(j)] = false;
                    x[j] = 0.0;
                }
        }
        w = A.transpose() * (b - A * x);
    }
    return x;
}

}  // namespace detail

// Infer populations p_1..p_nmax from a Rabi trace by non-negative least
// squares over sin^2(sqrt(n) W' tau), with p_0 completing sum p = 1 and a
// final projection enforcing the normalization.
inline std::vector<double> populations_from_rabi(const RabiSignal& signal,
                                                 const HardwareParams& params,
                                                 int n_max) {
    require(n_max >= 1, ErrorCode::validation, "n_max must be >= 1");
    require(signal.tau_axis.size() == signal.pe_values.size() &&
                signal.tau_axis.size() >= static_cast<size_t>(n_max) + 1,
            ErrorCode::validation, "Rabi signal too short for the requested n_max");
    const long rows = long(signal.tau_axis.size());
    Eigen::MatrixXd A(rows, n_max);
    Eigen::VectorXd b(rows);
    for (long i = 0; i < rows; ++i) {
        b[i] = signal.pe_values[static_cast<size_t>(i)];
        for (int n = 1; n <= n_max; ++n) {
            double s = std::sin(std::sqrt(double(n)) * params.omega_ancilla *
                                signal.tau_axis[static_cast<size_t>(i)]);
            A(i, n - 1) = s * s;
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    double cond = svd.singularValues()(0) /
                  svd.singularValues()(svd.singularValues().size() - 1);
    require(cond < 1e6, ErrorCode::numeric,
            "tomography design matrix is ill-conditioned (cond = " +
                std::to_string(cond) + "); lengthen or densify tau_axis");

    Eigen::VectorXd x = detail::nnls(A, b);
    std::vector<double> p(static_cast<size_t>(n_max) + 1, 0.0);
    double sum1 = x.sum();
    if (sum1 <= 1.0) {
        p[0] = 1.0 - sum1;
        for (int n = 1; n <= n_max; ++n) p[static_cast<size_t>(n)] = x[n - 1];
    } else {
        for (int n = 1; n <= n_max; ++n) p[static_cast<size_t>(n)] = x[n - 1] / sum1;
    }
    return p;
}

// (2/pi) sum_n (-1)^n p_n.
inline double wigner_from_populations(const std::vector<double>& populations) {
    double sum = 0.0, alt = 0.0;
    for (size_t n = 0; n < populations.size(); ++n) {
        sum += populations[n];
        alt += (n % 2 == 0 ? 1.0 : -1.0) * populations[n];
    }
    require(std::abs(sum - 1.0) < kTruncationTol, ErrorCode::validation,
            "populations do not sum to 1 (sum = " + std::to_string(sum) + ")");
    return (2.0 / kPi) * alt;
}

}  // namespace qbs
