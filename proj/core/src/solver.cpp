// SPDX-License-Identifier: Apache-2.0
#include "bdris/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace bdris {

namespace {

constexpr double kConstraintTolPerDim = 1e-10;

double dominant_cluster_tol(double lambda_max) { return 1e-12 * (1.0 + std::abs(lambda_max)); }

}  // namespace

ReflectionMatrix ReflectionMatrix::beyond_diagonal(Eigen::MatrixXcd m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("ReflectionMatrix: matrix must be square");
    ReflectionMatrix r(std::move(m), Mode::BeyondDiagonal);
    r.validate();
    return r;
}

ReflectionMatrix ReflectionMatrix::diagonal(const Eigen::VectorXcd& unit_phases) {
    const Eigen::Index n = unit_phases.size();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double mag = std::abs(unit_phases(k));
        if (mag == 0.0)
            throw std::invalid_argument("ReflectionMatrix: diagonal entry with zero magnitude");
        m(k, k) = unit_phases(k) / mag;
    }
    ReflectionMatrix r(std::move(m), Mode::Diagonal);
    r.validate();
    return r;
}

double ReflectionMatrix::symmetry_residual() const {
    return (matrix_ - matrix_.transpose()).norm();
}

double ReflectionMatrix::unitarity_residual() const {
    const Eigen::Index n = matrix_.rows();
    return (matrix_ * matrix_.adjoint() - Eigen::MatrixXcd::Identity(n, n)).norm();
}

void ReflectionMatrix::validate() const {
    const double n = static_cast<double>(matrix_.rows());
    if (mode_ == Mode::BeyondDiagonal) {
        if (symmetry_residual() > kConstraintTolPerDim * n)
            throw std::runtime_error("ReflectionMatrix: symmetry constraint violated");
        if (unitarity_residual() > kConstraintTolPerDim * n)
            throw std::runtime_error("ReflectionMatrix: unitarity constraint violated");
    } else {
        for (Eigen::Index i = 0; i < matrix_.rows(); ++i)
            for (Eigen::Index j = 0; j < matrix_.cols(); ++j) {
                if (i == j) {
                    if (std::abs(std::abs(matrix_(i, i)) - 1.0) > 1e-12)
                        throw std::runtime_error("ReflectionMatrix: diagonal entry not unit modulus");
                } else if (matrix_(i, j) != 0.0) {
                    throw std::runtime_error("ReflectionMatrix: nonzero off-diagonal in diagonal mode");
                }
            }
    }
}

Eigen::VectorXcd vec(const Eigen::MatrixXcd& m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, int n) {
    if (v.size() != static_cast<Eigen::Index>(n) * n)
        throw std::invalid_argument("unvec: vector length must be n^2");
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), n, n);
}

EigenSystem eigensystem(const QuadraticAggregates& agg) {
    EigenSystem out;
    out.ambient_dim = agg.dim();

    if (agg.basis.size() == 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(agg.core);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("eigensystem: dense eigensolver failed to converge");
        out.eigenvalues = es.eigenvalues().reverse().cwiseMax(0.0);
        out.eigenvectors = es.eigenvectors().rowwise().reverse();
        return out;
    }

    // A = basis core basis^H: reduce to the column space of basis through a
    // rank-revealing QR, then solve the small Hermitian problem.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(agg.basis);
    const Eigen::Index rank = qr.rank();
    if (rank == 0) return out;  // A = 0, no retained eigenpairs

    const Eigen::MatrixXcd thin_q =
        qr.householderQ() * Eigen::MatrixXcd::Identity(agg.basis.rows(), rank);
    Eigen::MatrixXcd r = qr.matrixR()
                             .topLeftCorner(rank, agg.basis.cols())
                             .template triangularView<Eigen::Upper>();
    const Eigen::MatrixXcd rp = r * qr.colsPermutation().inverse();
    Eigen::MatrixXcd small = rp * agg.core * rp.adjoint();
    small = 0.5 * (small + small.adjoint().eval());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(small);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigensystem: reduced eigensolver failed to converge");
    out.eigenvalues = es.eigenvalues().reverse().cwiseMax(0.0);
    out.eigenvectors = thin_q * es.eigenvectors().rowwise().reverse();
    return out;
}

double quadratic_objective(const QuadraticAggregates& agg, const Eigen::VectorXcd& psi) {
    if (psi.size() != agg.dim())
        throw std::invalid_argument("quadratic_objective: dimension mismatch");
    std::complex<double> quad;
    if (agg.basis.size() == 0) {
        quad = psi.dot(agg.core * psi);
    } else {
        const Eigen::VectorXcd y = agg.basis.adjoint() * psi;
        quad = y.dot(agg.core * y);
    }
    return quad.real() + 2.0 * psi.dot(agg.b).real() + agg.const_term;
}

namespace {

// f(s) = sum_d proj_d^2 / (s + (lambda_max - lambda_d))^2, the secular
// function in the shifted variable s = gamma - lambda_max. Working in s keeps
// full relative precision arbitrarily close to the pole.
double secular_f(const Eigen::VectorXd& gaps, const Eigen::VectorXd& proj2, double s) {
    double acc = 0.0;
    for (Eigen::Index d = 0; d < gaps.size(); ++d) {
        const double den = s + gaps(d);
        acc += proj2(d) / (den * den);
    }
    return acc;
}

}  // namespace

SecularResult secular_root(const Eigen::VectorXd& eigenvalues, const Eigen::VectorXd& projections,
                           double norm_target) {
    if (eigenvalues.size() != projections.size() || eigenvalues.size() == 0)
        throw std::invalid_argument("secular_root: eigenvalue/projection size mismatch");
    if (norm_target <= 0.0) throw std::invalid_argument("secular_root: norm target must be positive");

    const double lmax = eigenvalues.maxCoeff();
    const double ctol = dominant_cluster_tol(lmax);
    const Eigen::VectorXd gaps = (lmax - eigenvalues.array()).cwiseMax(0.0);
    const Eigen::VectorXd proj2 = projections.array().square();
    const double bnorm2 = proj2.sum();
    if (bnorm2 == 0.0)
        throw std::invalid_argument("secular_root: at least one projection must be positive");

    double dominant_proj2 = 0.0;
    for (Eigen::Index d = 0; d < gaps.size(); ++d)
        if (gaps(d) <= ctol) dominant_proj2 += proj2(d);

    SecularResult out;
    if (dominant_proj2 <= 1e-26 * bnorm2) {
        // Projection onto the dominant eigenspace is negligible; if even the
        // s -> 0 limit cannot reach the norm target there is no root.
        double f0 = 0.0;
        for (Eigen::Index d = 0; d < gaps.size(); ++d)
            if (gaps(d) > ctol) f0 += proj2(d) / (gaps(d) * gaps(d));
        if (f0 < norm_target) {
            out.gamma = lmax;
            out.shift = 0.0;
            out.hard_case = true;
            return out;
        }
    }

    // f(s_hi) <= norm_target by Cauchy-Schwarz; widen defensively against
    // roundoff, shrink s_lo until the root is bracketed.
    double s_hi = std::sqrt(bnorm2 / norm_target);
    for (int i = 0; i < 64 && secular_f(gaps, proj2, s_hi) > norm_target; ++i) s_hi *= 2.0;
    double s_lo = s_hi;
    while (secular_f(gaps, proj2, s_lo) <= norm_target) {
        s_lo *= 0.5;
        if (s_lo < 1e-280) {
            // No crossing at representable s: treat as the hard case.
            out.gamma = lmax;
            out.shift = 0.0;
            out.hard_case = true;
            return out;
        }
    }

    // Geometric-mean bisection: uniform relative resolution across the many
    // orders of magnitude s may span. Runs to interval collapse; the
    // 1e-10-relative residual contract is checked by the callers' tests.
    double s_mid = std::sqrt(s_lo * s_hi);
    for (int i = 0; i < 2000; ++i) {
        const double fm = secular_f(gaps, proj2, s_mid);
        if (std::abs(fm - norm_target) <= 1e-14 * norm_target) break;
        if (fm > norm_target)
            s_lo = s_mid;
        else
            s_hi = s_mid;
        const double next = std::sqrt(s_lo * s_hi);
        if (next == s_mid || next == s_lo || next == s_hi) break;
        s_mid = next;
    }
    out.shift = s_mid;
    out.gamma = lmax + s_mid;
    out.hard_case = false;
    return out;
}

Eigen::VectorXcd solve_relaxed(const QuadraticAggregates& agg, double norm_target,
                               RelaxedSolveInfo* info) {
    if (norm_target <= 0.0) throw std::invalid_argument("solve_relaxed: norm target must be positive");
    const Eigen::Index n = agg.dim();
    const EigenSystem es = eigensystem(agg);
    const double norm_a = es.eigenvalues.norm();  // ||A||_F over the retained spectrum
    const double bnorm = agg.b.norm();
    const double b_zero_tol = 1e-12 * norm_a * std::sqrt(norm_target);

    RelaxedSolveInfo local;
    Eigen::VectorXcd psi;

    if (bnorm <= b_zero_tol) {
        local.eigenvector_branch = true;
        if (es.retained() == 0) {
            psi = Eigen::VectorXcd::Zero(n);
            psi(0) = std::sqrt(norm_target);
            local.gamma = 0.0;
        } else {
            psi = std::sqrt(norm_target) * es.eigenvectors.col(0);
            local.gamma = es.eigenvalues(0);
        }
    } else {
        // Assemble the spectral data, with the component of b outside the
        // retained eigenvectors carried as one synthetic zero-eigenvalue pair.
        const Eigen::Index m = es.retained();
        Eigen::VectorXcd coeffs = es.eigenvectors.adjoint() * agg.b;
        Eigen::VectorXcd b_perp = agg.b - es.eigenvectors * coeffs;
        const double perp_norm = b_perp.norm();
        const bool with_perp = perp_norm > 1e-14 * bnorm;

        const Eigen::Index total = m + (with_perp ? 1 : 0);
        Eigen::VectorXd lambda(total), proj(total);
        lambda.head(m) = es.eigenvalues;
        proj.head(m) = coeffs.cwiseAbs();
        if (with_perp) {
            lambda(total - 1) = 0.0;
            proj(total - 1) = perp_norm;
        }

        const SecularResult sr = secular_root(lambda, proj, norm_target);
        local.gamma = sr.gamma;
        local.hard_case = sr.hard_case;
        const double lmax = total > 0 ? lambda.maxCoeff() : 0.0;
        const double ctol = dominant_cluster_tol(lmax);

        psi = Eigen::VectorXcd::Zero(n);
        if (!sr.hard_case) {
            for (Eigen::Index d = 0; d < m; ++d) {
                const double den = sr.shift + std::max(lmax - lambda(d), 0.0);
                psi += es.eigenvectors.col(d) * (coeffs(d) / den);
            }
            if (with_perp) psi += b_perp / (sr.shift + lmax);
        } else {
            // Fill the orthogonal complement of the dominant eigenspace, then
            // reach the norm constraint along the dominant eigenvector.
            for (Eigen::Index d = 0; d < m; ++d) {
                const double gap = lmax - lambda(d);
                if (gap > ctol) psi += es.eigenvectors.col(d) * (coeffs(d) / gap);
            }
            if (with_perp && lmax > ctol) psi += b_perp / lmax;
            const double reach2 = norm_target - psi.squaredNorm();
            const double t = std::sqrt(std::max(reach2, 0.0));
            if (m > 0)
                psi += t * es.eigenvectors.col(0);
            else
                psi(0) += t;
        }
    }

    local.objective = quadratic_objective(agg, psi);
    if (info) *info = local;
    return psi;
}

namespace {

// Multiplication by i in the realified representation: [u; v] -> [-v; u].
Eigen::VectorXd apply_j(const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size() / 2;
    Eigen::VectorXd y(x.size());
    y.head(n) = -x.tail(n);
    y.tail(n) = x.head(n);
    return y;
}

}  // namespace

TakagiFactors takagi(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("takagi: matrix must be square");
    const Eigen::Index n = m.rows();
    const double mnorm = m.norm();
    if ((m - m.transpose()).norm() > 1e-9 * std::max(mnorm, 1e-300))
        throw std::invalid_argument("takagi: input is not complex symmetric");
    const Eigen::MatrixXcd ms = 0.5 * (m + m.transpose());

    Eigen::MatrixXd k(2 * n, 2 * n);
    k.topLeftCorner(n, n) = ms.real();
    k.topRightCorner(n, n) = ms.imag();
    k.bottomLeftCorner(n, n) = ms.imag();
    k.bottomRightCorner(n, n) = -ms.real();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("takagi: realified eigensolver failed to converge");
    const Eigen::VectorXd evals = es.eigenvalues();  // ascending, symmetric about 0
    const double smax = std::max(std::abs(evals(0)), std::abs(evals(2 * n - 1)));

    TakagiFactors out;
    out.vectors.resize(n, n);
    out.values.resize(n);

    double ztol = smax > 0.0 ? 1e-12 * smax : 0.0;
    Eigen::Index n_pos = 0;
    for (Eigen::Index i = 2 * n - 1; i >= 0 && evals(i) > ztol && n_pos < n; --i, ++n_pos) {
        const Eigen::VectorXd x = es.eigenvectors().col(i);
        out.vectors.col(n_pos) = x.head(n) + std::complex<double>(0, 1) * x.tail(n);
        out.values(n_pos) = evals(i);
    }

    // Complete the zero singular space. J maps it to itself, so vectors are
    // chosen pairwise: each pick excludes its own J-image, which keeps the
    // complex columns orthonormal.
    Eigen::Index zero_needed = n - n_pos;
    if (zero_needed > 0) {
        std::vector<Eigen::VectorXd> cluster;
        for (int widen = 0; widen < 8; ++widen) {
            cluster.clear();
            for (Eigen::Index i = 0; i < 2 * n; ++i)
                if (std::abs(evals(i)) <= ztol) cluster.push_back(es.eigenvectors().col(i));
            if (static_cast<Eigen::Index>(cluster.size()) >= zero_needed) break;
            ztol = ztol > 0.0 ? ztol * 10.0 : 1e-300;
        }
        if (static_cast<Eigen::Index>(cluster.size()) < zero_needed)
            throw std::runtime_error("takagi: zero singular space smaller than expected");

        std::vector<Eigen::VectorXd> span;  // orthonormal: {x_1, J x_1, x_2, ...}
        auto project_out = [&span](Eigen::VectorXd v) {
            for (const Eigen::VectorXd& w : span) v -= w * w.dot(v);
            return v;
        };
        for (Eigen::Index t = 0; t < zero_needed; ++t) {
            double best_norm = -1.0;
            Eigen::VectorXd best;
            for (const Eigen::VectorXd& c : cluster) {
                Eigen::VectorXd r = project_out(c);
                const double rn = r.norm();
                if (rn > best_norm) {
                    best_norm = rn;
                    best = std::move(r);
                }
            }
            if (best_norm <= 1e-8)
                throw std::runtime_error("takagi: degenerate zero-space completion");
            const Eigen::VectorXd x = best / best_norm;
            Eigen::VectorXd jx = project_out(apply_j(x));
            jx -= x * x.dot(jx);
            const double jn = jx.norm();
            if (jn <= 1e-8) throw std::runtime_error("takagi: lost pairing in zero space");
            span.push_back(x);
            span.push_back(jx / jn);
            out.vectors.col(n_pos + t) = x.head(n) + std::complex<double>(0, 1) * x.tail(n);
            out.values(n_pos + t) = 0.0;
        }
    }

    // Eigenvectors of near-touching +sigma/-sigma pairs (sigma tiny relative
    // to ||M||) mix across the J-structure by ~eps ||K|| / sigma, which leaks
    // into the complex orthonormality of the extracted columns. The polar
    // correction S <- S (S^H S)^{-1/2} restores unitarity; it only rotates
    // within that near-degenerate small-sigma subspace, so S Sigma S^T is
    // unchanged to first order.
    {
        const Eigen::MatrixXcd gram = out.vectors.adjoint() * out.vectors;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ges(gram);
        if (ges.info() != Eigen::Success || ges.eigenvalues().minCoeff() < 0.5)
            throw std::runtime_error("takagi: factor columns collapsed");
        const Eigen::MatrixXcd inv_sqrt = ges.eigenvectors() *
                                          ges.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                          ges.eigenvectors().adjoint();
        out.vectors = out.vectors * inv_sqrt;
    }

    const double unit_res =
        (out.vectors.adjoint() * out.vectors - Eigen::MatrixXcd::Identity(n, n)).norm();
    if (unit_res > 1e-10 * static_cast<double>(n))
        throw std::runtime_error("takagi: factor lost unitarity");
    const double rec_res =
        (out.vectors * out.values.asDiagonal() * out.vectors.transpose() - ms).norm();
    if (rec_res > 1e-9 * std::max(mnorm, 1e-300) && rec_res > 1e-14)
        throw std::runtime_error("takagi: reconstruction residual too large");
    return out;
}

TakagiFactors nearest_symmetric_unitary_factors(const Eigen::MatrixXcd& psi_bar) {
    if (psi_bar.rows() != psi_bar.cols())
        throw std::invalid_argument("nearest_symmetric_unitary: matrix must be square");
    return takagi(0.5 * (psi_bar + psi_bar.transpose()));
}

ReflectionMatrix nearest_symmetric_unitary(const Eigen::MatrixXcd& psi_bar) {
    const TakagiFactors tf = nearest_symmetric_unitary_factors(psi_bar);
    return ReflectionMatrix::beyond_diagonal(tf.vectors * tf.vectors.transpose());
}

Eigen::MatrixXcd refinement_matrix(const Eigen::MatrixXcd& s_matrix, const SubcarrierChannel& chan) {
    const int n = chan.num_elements();
    if (s_matrix.rows() != n || s_matrix.cols() != n)
        throw std::invalid_argument("refinement_matrix: S dimension mismatch");
    const int s_count = chan.num_subcarriers();

    // f_nu = [h_nu; diag(S^T H_nu S)] with H_nu = inc C_nu out^T:
    // S^T H_nu S = (S^T inc) C_nu (out^T S).
    const Eigen::MatrixXcd p = s_matrix.transpose() * chan.incident;   // N x L_t
    const Eigen::MatrixXcd q = chan.outgoing.transpose() * s_matrix;   // L_r x N

    Eigen::MatrixXcd f(n + 1, s_count);
    for (int nu = 0; nu < s_count; ++nu) {
        f(0, nu) = chan.static_coeffs(nu);
        const Eigen::MatrixXcd m1 = p * chan.coeff_matrix(nu);  // N x L_r
        for (int k = 0; k < n; ++k) f(k + 1, nu) = m1.row(k) * q.col(k);
    }
    // Conjugate so that d^H Abar d = sum_nu |f_nu^T d|^2, the physical gain.
    const Eigen::MatrixXcd fc = f.conjugate();
    Eigen::MatrixXcd abar = fc * fc.adjoint();
    return 0.5 * (abar + abar.adjoint().eval());
}

PhaseIterationResult power_iterate_phases(const Eigen::MatrixXcd& a_bar, int max_iterations) {
    if (a_bar.rows() != a_bar.cols())
        throw std::invalid_argument("power_iterate_phases: matrix must be square");
    const Eigen::Index dim = a_bar.rows();
    auto objective = [&a_bar](const Eigen::VectorXcd& d) { return d.dot(a_bar * d).real(); };

    PhaseIterationResult out;
    Eigen::VectorXcd d = Eigen::VectorXcd::Ones(dim);
    out.initial_objective = objective(d);
    out.d = d;
    out.objective = out.initial_objective;

    if (dim == 2) {
        // Two-entry case has a closed-form optimum: align against the
        // off-diagonal coupling. Joins the keep-best candidate set.
        const std::complex<double> c = a_bar(1, 0);
        if (std::abs(c) > 0.0) {
            Eigen::VectorXcd cand(2);
            cand << 1.0, c / std::abs(c);
            const double obj = objective(cand);
            if (obj > out.objective) {
                out.objective = obj;
                out.d = cand;
            }
        }
    }

    double prev = out.initial_objective;
    for (int it = 0; it < max_iterations; ++it) {
        Eigen::VectorXcd w = a_bar * d;
        const double wn = w.norm();
        if (wn <= 0.0) break;
        const double phi = std::arg(w(0));
        d(0) = 1.0;
        for (Eigen::Index k = 1; k < dim; ++k) d(k) = std::polar(1.0, std::arg(w(k)) - phi);
        const double obj = objective(d);
        out.iterations = it + 1;
        if (obj > out.objective) {
            out.objective = obj;
            out.d = d;
        }
        if (obj - prev < 1e-10 * std::max(std::abs(obj), 1e-300)) break;
        prev = obj;
    }
    return out;
}

Eigen::VectorXcd refine_diagonal(const Eigen::MatrixXcd& s_matrix, const SubcarrierChannel& chan,
                                 int iterations) {
    return power_iterate_phases(refinement_matrix(s_matrix, chan), iterations).d;
}

double total_gain(const Eigen::MatrixXcd& psi, const SubcarrierChannel& chan) {
    return channel_gains(psi, chan).sum();
}

ReflectionMatrix optimize(const SubcarrierChannel& chan, int power_iterations,
                          SolveDiagnostics* diagnostics) {
    const int n = chan.num_elements();
    const QuadraticAggregates agg = aggregate_quadratic(chan);

    RelaxedSolveInfo rinfo;
    const Eigen::VectorXcd psi_star = solve_relaxed(agg, static_cast<double>(n), &rinfo);
    const TakagiFactors tf = nearest_symmetric_unitary_factors(unvec(psi_star, n));

    const Eigen::MatrixXcd abar = refinement_matrix(tf.vectors, chan);
    const PhaseIterationResult pr = power_iterate_phases(abar, power_iterations);

    const Eigen::VectorXcd d = pr.d.tail(n);
    Eigen::MatrixXcd psi = tf.vectors * d.asDiagonal() * tf.vectors.transpose();

    if (diagnostics) {
        diagnostics->relaxed_objective = rinfo.objective;
        diagnostics->projected_gain = pr.initial_objective;
        diagnostics->refined_gain = pr.objective;
        diagnostics->hard_case = rinfo.hard_case;
        diagnostics->eigenvector_branch = rinfo.eigenvector_branch;
    }
    return ReflectionMatrix::beyond_diagonal(std::move(psi));
}

}  // namespace bdris
