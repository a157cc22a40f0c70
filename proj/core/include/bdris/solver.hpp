// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "bdris/channel.hpp"

namespace bdris {

// RIS reflection matrix. Beyond-diagonal mode is symmetric unitary
// (lossless reciprocal fully-connected network); diagonal mode is the
// conventional per-element phase shifter with unit-modulus diagonal.
class ReflectionMatrix {
public:
    enum class Mode { BeyondDiagonal, Diagonal };

    static ReflectionMatrix beyond_diagonal(Eigen::MatrixXcd m);
    static ReflectionMatrix diagonal(const Eigen::VectorXcd& unit_phases);

    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    Mode mode() const { return mode_; }
    Eigen::Index size() const { return matrix_.rows(); }

    double symmetry_residual() const;   // ||Psi - Psi^T||_F
    double unitarity_residual() const;  // ||Psi Psi^H - I||_F
    void validate() const;

private:
    ReflectionMatrix(Eigen::MatrixXcd m, Mode mode) : matrix_(std::move(m)), mode_(mode) {}
    Eigen::MatrixXcd matrix_;
    Mode mode_;
};

// vec / unvec, fixed column-major end to end.
Eigen::VectorXcd vec(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, int n);

// Spectral decomposition of the quadratic form A. Only eigenpairs spanning
// the range of A are retained when A is held in factored form; the implicit
// complement carries eigenvalue zero. ambient_dim is the full dimension.
struct EigenSystem {
    Eigen::VectorXd eigenvalues;    // descending, >= 0
    Eigen::MatrixXcd eigenvectors;  // ambient_dim x retained, orthonormal columns
    Eigen::Index ambient_dim = 0;

    Eigen::Index retained() const { return eigenvalues.size(); }
};
EigenSystem eigensystem(const QuadraticAggregates& agg);

// psi^H A psi + 2 Re(psi^H b) + const_term.
double quadratic_objective(const QuadraticAggregates& agg, const Eigen::VectorXcd& psi);

struct SecularResult {
    double gamma = 0.0;
    double shift = 0.0;  // gamma - lambda_max, kept separately: it can be far
                         // below the floating-point resolution of gamma itself
    bool hard_case = false;
};

// Root of f(gamma) = sum_d proj_d^2 / (gamma - lambda_d)^2 = norm_target on
// gamma > max_d lambda_d. f is strictly decreasing there, so the root is
// unique when it exists. If the projection onto the dominant eigenspace
// vanishes and f(lambda_max+) < norm_target there is no root (the hard case);
// gamma = lambda_max is returned with the flag set and the caller completes
// the solution with a dominant-eigenvector component.
SecularResult secular_root(const Eigen::VectorXd& eigenvalues, const Eigen::VectorXd& projections,
                           double norm_target);

struct RelaxedSolveInfo {
    double gamma = 0.0;
    double objective = 0.0;      // value of the relaxed quadratic at the solution
    bool hard_case = false;
    bool eigenvector_branch = false;  // b ~ 0, dominant-eigenvector solution
};

// Maximizer of psi^H A psi + 2 Re(psi^H b) subject to ||psi||^2 = norm_target.
// For b = 0 this is sqrt(norm_target) times the dominant eigenvector;
// otherwise psi = sum_d u_d (u_d^H b) / (gamma* - lambda_d) with gamma* from
// the secular equation, which also satisfies (gamma* I - A) psi = b.
Eigen::VectorXcd solve_relaxed(const QuadraticAggregates& agg, double norm_target,
                               RelaxedSolveInfo* info = nullptr);

// Takagi factorization M = S Sigma S^T of a complex symmetric matrix, with S
// unitary and Sigma real nonnegative (descending). Computed through the real
// symmetric eigenproblem of [[Re M, Im M], [Im M, -Re M]], whose eigenpairs
// at +sigma map to Takagi vectors s = u + i v; the zero singular space is
// completed pairwise so the complex columns stay orthonormal.
struct TakagiFactors {
    Eigen::MatrixXcd vectors;  // unitary S
    Eigen::VectorXd values;    // sigma, descending
};
TakagiFactors takagi(const Eigen::MatrixXcd& m);

// Frobenius-nearest symmetric unitary matrix: S S^T from the Takagi factors
// of the symmetrized input.
ReflectionMatrix nearest_symmetric_unitary(const Eigen::MatrixXcd& psi_bar);
TakagiFactors nearest_symmetric_unitary_factors(const Eigen::MatrixXcd& psi_bar);

// Phase refinement operator: Abar = sum_nu conj(f_nu) conj(f_nu)^H with
// f_nu = [h_nu; diag(S^T H_nu S)], so that for d = [1; diag(D)] the value
// d^H Abar d equals the total channel gain of Psi = S D S^T. Pass the
// identity for S to obtain the conventional diagonal-RIS operator.
Eigen::MatrixXcd refinement_matrix(const Eigen::MatrixXcd& s_matrix, const SubcarrierChannel& chan);

struct PhaseIterationResult {
    Eigen::VectorXcd d;              // best unit-modulus iterate, d(0) = 1
    double objective = 0.0;          // d^H Abar d at the best iterate
    double initial_objective = 0.0;  // objective of the all-ones start
    int iterations = 0;
};

// Anchored phase-projected power iteration: w = Abar d / ||Abar d||, phases
// re-anchored to entry 0, entries projected to unit modulus. The iteration is
// not provably monotone, so the best iterate seen (including the all-ones
// start) is returned. Dimension 2 additionally admits a closed-form optimum,
// which joins the candidate set.
PhaseIterationResult power_iterate_phases(const Eigen::MatrixXcd& a_bar, int max_iterations);

// Diagonal phase refinement of Psi = S D S^T (Algorithm lines after the
// projection step): returns d in C^{N+1} with d(0) = 1.
Eigen::VectorXcd refine_diagonal(const Eigen::MatrixXcd& s_matrix, const SubcarrierChannel& chan,
                                 int iterations);

// Total channel gain sum_nu |h_nu + tr(Psi H_nu)|^2.
double total_gain(const Eigen::MatrixXcd& psi, const SubcarrierChannel& chan);

struct SolveDiagnostics {
    double relaxed_objective = 0.0;  // upper bound from the norm-relaxed problem
    double projected_gain = 0.0;     // total gain of S S^T
    double refined_gain = 0.0;       // total gain after diagonal refinement
    bool hard_case = false;
    bool eigenvector_branch = false;
};

// Full pipeline: aggregates -> relaxed solve -> nearest symmetric unitary ->
// diagonal refinement. Output satisfies the beyond-diagonal constraints.
ReflectionMatrix optimize(const SubcarrierChannel& chan, int power_iterations = 100,
                          SolveDiagnostics* diagnostics = nullptr);

}  // namespace bdris
