#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qrx::sdp {

/// One scalar coefficient of a symmetric matrix: sets A[row][col] and
/// A[col][row] to value (duplicates accumulate). <A,X> = sum_ij A_ij X_ij.
struct Triplet {
    int block = 0;
    int row = 0;
    int col = 0;
    double value = 0.0;
};

/// max <C,X>  s.t.  <A_i,X> = b_i,  X psd on each block.
struct SdpProblem {
    std::vector<int> block_dims;
    std::vector<Triplet> objective;
    struct Constraint {
        std::vector<Triplet> coeffs;
        double rhs = 0.0;
    };
    std::vector<Constraint> constraints;

    int total_dim() const;
    void validate() const;

    std::string dump() const;
    static SdpProblem load(const std::string& text);
};

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };

const char* to_string(SolveStatus s);

struct SdpSolution {
    SolveStatus status = SolveStatus::numerical_failure;
    std::vector<Eigen::MatrixXd> X;   // primal blocks
    Eigen::VectorXd y;                // one multiplier per constraint
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double primal_residual = 0.0;     // ||b - A(X)||_inf / (1 + ||b||_inf)
    double dual_residual = 0.0;       // max block ||C - At(y) + Z||_max / (1 + ||C||_max)
    double relative_gap = 0.0;
    int iterations = 0;
};

struct SolverOptions {
    double eps_feasibility = 1e-8;
    double eps_gap = 1e-7;
    int max_iterations = 200;
    bool verbose = false;
};

/// Mehrotra predictor-corrector interior point (HKM direction, dense
/// Cholesky on the Schur complement). Deterministic for identical inputs.
SdpSolution solve(const SdpProblem& p, const SolverOptions& opts = {});

struct DualCheck {
    bool feasible = false;
    double bound = 0.0;      // dual objective b'y, an upper bound when feasible
    double residual = 0.0;   // max(0, -min eigenvalue of any slack block)
};

/// Checks Z = sum_i y_i A_i - C >= -1e-9 per block; independent of solve().
DualCheck verify_dual_bound(const SdpProblem& p, const Eigen::VectorXd& y,
                            double tolerance = 1e-9);

/// Dense symmetric coefficient matrices of a problem (test/verification aid).
std::vector<Eigen::MatrixXd> assemble(const SdpProblem& p, const std::vector<Triplet>& t);

}  // namespace qrx::sdp
