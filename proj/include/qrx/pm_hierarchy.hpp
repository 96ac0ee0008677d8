#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrx/constellation.hpp"
#include "qrx/game_spec.hpp"
#include "qrx/honest_model.hpp"
#include "qrx/sdp_core.hpp"

namespace qrx::pm {

/// Raised when the requested relaxation exceeds the dense-solver budget.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when the underlying SDP solve or dual verification fails.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- operator words -------------------------------------------------------
//
// Letters: one Hermitian POVM element per measurement setting y (lowercase
// 'a'+y, the outcome-0 element; outcome 1 is eliminated by completeness) and
// one for the adversary's binary guess ('Z'). Adversary letters commute with
// measurement letters; nothing is assumed projective.

char bob_letter(std::size_t y);
constexpr char kEveLetter = 'Z';

/// Stable two-party normal form: measurement letters in order, then
/// adversary letters.
std::string canonical_word(const std::string& w);

/// Adjoint: each party subword reversed (letters are Hermitian).
std::string adjoint_word(const std::string& w);

/// All canonical words of length <= level over ny measurement letters plus
/// the adversary letter; identity first, then by length.
std::vector<std::string> monomial_basis(int level, std::size_t ny);

// ---- score weights --------------------------------------------------------

/// Scoring coefficients w_{b,x,y} of a game: w = q(x,y) on the winning
/// outcome, 0 elsewhere. Arbitrary nonnegative tables are also accepted.
struct ScoreWeights {
    std::size_t nx = 0, ny = 0;
    std::vector<double> w0, w1;  // weight on outcome 0 / 1, row-major [x*ny+y]

    static ScoreWeights from_game(const GameSpec& g);
    double offset() const;  // sum of w1 (constant term after eliminating b=1)
};

// ---- relaxation -----------------------------------------------------------

/// A moment-matrix relaxation, realified to a block-diagonal real SDP.
/// Block 0 is the main moment matrix over (state, word<=k) columns; then for
/// each POVM letter O two localizing blocks (O and I-O) over words <= k-1.
struct MomentProblem {
    int level = 0;
    std::size_t nx = 0, ny = 0;
    std::vector<std::string> monomials;
    std::vector<std::string> loc_monomials;
    std::vector<char> ops;               // letters with 0 <= O <= I blocks
    std::size_t main_dim = 0;            // complex dimension of block 0
    std::size_t loc_dim = 0;             // complex dimension of each localizing block

    sdp::SdpProblem sdp;
    int score_constraint = -1;           // index into sdp.constraints (game form)
    double score_offset = 0.0;           // rhs = nu - score_offset
    std::vector<int> stat_constraints;   // per (x,y), full-distribution form

    /// Representative location of each distinct moment: main-block complex
    /// entry (i,j) and whether the entry stores the conjugate of the keyed value.
    struct Rep {
        int i = 0, j = 0;
        bool conj = false;
    };
    std::map<std::tuple<int, int, std::string>, Rep> reps;

    /// Column labels of block 0: (state, monomial index).
    std::pair<std::size_t, std::size_t> main_col(std::size_t c) const {
        return {c / monomials.size(), c % monomials.size()};
    }
};

/// Realify a Hermitian matrix H -> [[Re, -Im], [Im, Re]] (symmetric).
Eigen::MatrixXd realify(const Eigen::MatrixXcd& H);

/// Moment relaxation with the winning-probability equality
/// sum_{b,x,y} w_{b,x,y} <phi_x|M_{b|y}|phi_x> = nu.
MomentProblem build_guessing_sdp(const GramMatrix& G, const ScoreWeights& w, double nu,
                                 int level);

/// Moment relaxation constrained by the full table <phi_x|M_{0|y}|phi_x> = P(0|x,y).
MomentProblem build_full_dist_sdp(const GramMatrix& G, const ConditionalDistribution& P,
                                  int level);

// ---- certificates ---------------------------------------------------------

/// Verified affine upper bound on the guessing probability:
/// p_g <= c + lambda . p for the score distribution p = (1-p1, p1).
struct DualCertificate {
    double c = 0.0;
    std::array<double, 2> lambda{0.0, 0.0};
    double nu = 0.0;
    int level = 0;
    double residual = 0.0;          // verified dual-feasibility slack
    double primal_value = 0.0;      // solved relaxation optimum at nu
    Eigen::VectorXd multipliers;    // full dual vector (re-verifiable)

    double bound_at(double win_prob) const {
        return c + lambda[0] * (1.0 - win_prob) + lambda[1] * win_prob;
    }
    double lambda_min() const { return std::min(lambda[0], lambda[1]); }
    double lambda_max() const { return std::max(lambda[0], lambda[1]); }
};

/// Verified affine witness from the full-distribution program:
/// p_g <= xi0 + sum_{b,x,y} xi(b,x,y) P(b|x,y).
struct DistributionWitness {
    std::size_t nx = 0, ny = 0;
    double xi0 = 0.0;
    std::vector<double> xi0_table;  // xi(0,x,y), row-major; xi(1,x,y) = 0
    int level = 0;
    double residual = 0.0;
    double primal_value = 0.0;

    double xi(int b, std::size_t x, std::size_t y) const {
        return b == 0 ? xi0_table[x * ny + y] : 0.0;
    }
    double value_at(const ConditionalDistribution& P) const;
};

/// Solve the game-form relaxation and package the verified dual certificate.
DualCertificate guessing_bound(const GramMatrix& G, const ScoreWeights& w, double nu,
                               int level, const sdp::SolverOptions& opts = {});

/// Solve the full-distribution relaxation; throws SolverError carrying status
/// "infeasible" when the statistics lie outside the relaxation.
DistributionWitness distribution_witness(const GramMatrix& G, const ConditionalDistribution& P,
                                         int level, const sdp::SolverOptions& opts = {});

/// Primal status of the full-distribution program (feasibility probe).
sdp::SolveStatus full_dist_status(const GramMatrix& G, const ConditionalDistribution& P,
                                  int level, const sdp::SolverOptions& opts = {});

}  // namespace qrx::pm
