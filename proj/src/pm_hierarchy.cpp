#include "qrx/pm_hierarchy.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace qrx::pm {

namespace {
constexpr int kMaxRealifiedDim = 520;
}

char bob_letter(std::size_t y) {
    if (y >= 25) throw std::invalid_argument("bob_letter: too many settings");
    return char('a' + y);
}

static bool is_eve(char c) { return c == kEveLetter; }

std::string canonical_word(const std::string& w) {
    std::string bob, eve;
    for (char c : w) (is_eve(c) ? eve : bob).push_back(c);
    return bob + eve;
}

std::string adjoint_word(const std::string& w) {
    std::string bob, eve;
    for (char c : w) (is_eve(c) ? eve : bob).push_back(c);
    std::reverse(bob.begin(), bob.end());
    std::reverse(eve.begin(), eve.end());
    return bob + eve;
}

std::vector<std::string> monomial_basis(int level, std::size_t ny) {
    std::vector<char> letters;
    for (std::size_t y = 0; y < ny; ++y) letters.push_back(bob_letter(y));
    letters.push_back(kEveLetter);
    std::vector<std::string> out{""};
    std::set<std::string> seen{""};
    std::vector<std::string> frontier{""};
    for (int l = 0; l < level; ++l) {
        std::vector<std::string> next;
        for (const auto& w : frontier)
            for (char c : letters) {
                std::string cand = canonical_word(w + c);
                if (seen.insert(cand).second) {
                    out.push_back(cand);
                    next.push_back(cand);
                }
            }
        frontier = std::move(next);
    }
    return out;
}

ScoreWeights ScoreWeights::from_game(const GameSpec& g) {
    g.validate();
    ScoreWeights w;
    w.nx = g.nx;
    w.ny = g.ny;
    w.w0.assign(g.nx * g.ny, 0.0);
    w.w1.assign(g.nx * g.ny, 0.0);
    for (std::size_t i = 0; i < g.q.size(); ++i) {
        if (g.q[i] == 0.0) continue;
        (g.win[i] == 0 ? w.w0 : w.w1)[i] = g.q[i];
    }
    return w;
}

double ScoreWeights::offset() const {
    double s = 0.0;
    for (double v : w1) s += v;
    return s;
}

Eigen::MatrixXd realify(const Eigen::MatrixXcd& H) {
    const Eigen::Index n = H.rows();
    Eigen::MatrixXd X(2 * n, 2 * n);
    X.topLeftCorner(n, n) = H.real();
    X.bottomRightCorner(n, n) = H.real();
    X.topRightCorner(n, n) = -H.imag();
    X.bottomLeftCorner(n, n) = H.imag();
    return X;
}

namespace {

using sdp::Triplet;

// moment key: (x, x2, word) identified with the conjugate (x2, x, adj(word))
using Key = std::tuple<int, int, std::string>;

struct KeyedRef {
    Key key;
    bool conj;  // stored value is the conjugate of the keyed moment
};

KeyedRef make_key(int x, int x2, const std::string& w) {
    Key k1{x, x2, w};
    Key k2{x2, x, adjoint_word(w)};
    if (k2 < k1) return {k2, true};
    return {k1, false};
}

bool self_adjoint(const Key& k) {
    return std::get<0>(k) == std::get<1>(k) && std::get<2>(k) == adjoint_word(std::get<2>(k));
}

// Coefficient emission for realified blocks: the complex dim of the block is
// cdim, entry (i,j) with i <= j. Functionals are expressed on Re/Im of H[i,j].
void add_re(std::vector<Triplet>& out, int block, int i, int j, int cdim, double a) {
    if (i == j) {
        out.push_back({block, i, i, a / 2});
        out.push_back({block, i + cdim, i + cdim, a / 2});
    } else {
        out.push_back({block, i, j, a / 4});
        out.push_back({block, i + cdim, j + cdim, a / 4});
    }
}

void add_im(std::vector<Triplet>& out, int block, int i, int j, int cdim, double b) {
    // Im H[i,i] = 0 structurally; callers never emit it
    out.push_back({block, i + cdim, j, b / 4});
    out.push_back({block, i, j + cdim, -b / 4});
}

struct Builder {
    const GramMatrix& G;
    int level;
    std::size_t nx, ny;
    MomentProblem mp;

    Builder(const GramMatrix& g, std::size_t ny_, int level_) : G(g), level(level_), ny(ny_) {
        G.validate();
        nx = std::size_t(G.entries.rows());
        if (level < 1 || level > 3)
            throw std::invalid_argument("moment relaxation: level must be in {1,2,3}");
        mp.level = level;
        mp.nx = nx;
        mp.ny = ny;
        mp.monomials = monomial_basis(level, ny);
        mp.loc_monomials = monomial_basis(level - 1, ny);
        for (std::size_t y = 0; y < ny; ++y) mp.ops.push_back(bob_letter(y));
        mp.ops.push_back(kEveLetter);
        mp.main_dim = nx * mp.monomials.size();
        mp.loc_dim = nx * mp.loc_monomials.size();
        const std::size_t total =
            2 * mp.main_dim + mp.ops.size() * 2 * (2 * mp.loc_dim);
        if (total > kMaxRealifiedDim)
            throw CapacityError("moment relaxation: realified dimension " +
                                std::to_string(total) + " exceeds budget " +
                                std::to_string(kMaxRealifiedDim) +
                                " (lower the level or the state count)");
        mp.sdp.block_dims.push_back(int(2 * mp.main_dim));
        for (std::size_t o = 0; o < mp.ops.size(); ++o) {
            mp.sdp.block_dims.push_back(int(2 * mp.loc_dim));
            mp.sdp.block_dims.push_back(int(2 * mp.loc_dim));
        }
    }

    // one signed moment term of an entry equation
    struct Term {
        int x, x2;
        std::string word;
        double coeff;
    };

    const MomentProblem::Rep& rep_of(const KeyedRef& kr) const {
        auto it = mp.reps.find(kr.key);
        if (it == mp.reps.end())
            throw std::logic_error("moment builder: missing representative for a moment");
        return it->second;
    }

    // emit H_block[i,j] = sum of terms, each term referencing its main-block rep
    void link_entry(int block, int i, int j, int cdim, const std::vector<Term>& terms) {
        sdp::SdpProblem::Constraint re;
        add_re(re.coeffs, block, i, j, cdim, 1.0);
        bool any_im = false;
        for (const auto& t : terms) {
            const KeyedRef kr = make_key(t.x, t.x2, t.word);
            const auto& r = rep_of(kr);
            add_re(re.coeffs, 0, r.i, r.j, int(mp.main_dim), -t.coeff);
            if (!self_adjoint(kr.key)) any_im = true;
        }
        re.rhs = 0.0;
        mp.sdp.constraints.push_back(std::move(re));

        if (i == j) return;
        sdp::SdpProblem::Constraint im;
        add_im(im.coeffs, block, i, j, cdim, 1.0);
        if (any_im) {
            for (const auto& t : terms) {
                const KeyedRef kr = make_key(t.x, t.x2, t.word);
                if (self_adjoint(kr.key)) continue;
                const auto& r = rep_of(kr);
                const double s = (kr.conj == r.conj) ? 1.0 : -1.0;
                if (r.i == r.j)
                    throw std::logic_error("moment builder: rep of non-self-adjoint moment on diagonal");
                add_im(im.coeffs, 0, r.i, r.j, int(mp.main_dim), -t.coeff * s);
            }
        }
        im.rhs = 0.0;
        mp.sdp.constraints.push_back(std::move(im));
    }

    void build_main() {
        const std::size_t M = mp.main_dim;
        const std::size_t nm = mp.monomials.size();
        for (std::size_t i = 0; i < M; ++i) {
            const int x = int(i / nm);
            const std::string& u = mp.monomials[i % nm];
            const std::string ua = adjoint_word(u);
            for (std::size_t j = i; j < M; ++j) {
                const int x2 = int(j / nm);
                const std::string& v = mp.monomials[j % nm];
                const std::string w = canonical_word(ua + v);
                const KeyedRef kr = make_key(x, x2, w);
                auto it = mp.reps.find(kr.key);
                if (it == mp.reps.end()) {
                    mp.reps.emplace(kr.key, MomentProblem::Rep{int(i), int(j), kr.conj});
                    if (self_adjoint(kr.key) && i != j) {
                        sdp::SdpProblem::Constraint im;
                        add_im(im.coeffs, 0, int(i), int(j), int(M), 1.0);
                        im.rhs = 0.0;
                        mp.sdp.constraints.push_back(std::move(im));
                    }
                } else {
                    link_entry(0, int(i), int(j), int(M), {{x, x2, w, 1.0}});
                }
            }
        }
    }

    void build_localizing() {
        const std::size_t L = mp.loc_dim;
        const std::size_t nl = mp.loc_monomials.size();
        int block = 1;
        for (char op : mp.ops) {
            for (int variant = 0; variant < 2; ++variant, ++block) {
                for (std::size_t i = 0; i < L; ++i) {
                    const int x = int(i / nl);
                    const std::string ua = adjoint_word(mp.loc_monomials[i % nl]);
                    for (std::size_t j = i; j < L; ++j) {
                        const int x2 = int(j / nl);
                        const std::string& v = mp.loc_monomials[j % nl];
                        const std::string w_op = canonical_word(ua + std::string(1, op) + v);
                        if (variant == 0) {
                            link_entry(block, int(i), int(j), int(L), {{x, x2, w_op, 1.0}});
                        } else {
                            const std::string w_id = canonical_word(ua + v);
                            link_entry(block, int(i), int(j), int(L),
                                       {{x, x2, w_id, 1.0}, {x, x2, w_op, -1.0}});
                        }
                    }
                }
            }
        }
    }

    void pin_gram() {
        for (int x = 0; x < int(nx); ++x)
            for (int x2 = x; x2 < int(nx); ++x2) {
                const auto& r = rep_of(make_key(x, x2, ""));
                sdp::SdpProblem::Constraint re;
                add_re(re.coeffs, 0, r.i, r.j, int(mp.main_dim), 1.0);
                re.rhs = G.entries(x, x2).real();
                mp.sdp.constraints.push_back(std::move(re));
                if (x != x2) {
                    sdp::SdpProblem::Constraint im;
                    add_im(im.coeffs, 0, r.i, r.j, int(mp.main_dim), 1.0);
                    im.rhs = G.entries(x, x2).imag();
                    mp.sdp.constraints.push_back(std::move(im));
                }
            }
    }

    void set_objective() {
        // p_g = <I> - <M_{0|0}> - <Pi_0> + 2 <M_{0|0} Pi_0> on the x = 0 state,
        // with <I> written through the (pinned) unit norm moment
        auto add_obj = [&](const std::string& w, double coeff) {
            const auto& r = rep_of(make_key(0, 0, w));
            add_re(mp.sdp.objective, 0, r.i, r.j, int(mp.main_dim), coeff);
        };
        add_obj("", 1.0);
        add_obj(std::string(1, bob_letter(0)), -1.0);
        add_obj(std::string(1, kEveLetter), -1.0);
        add_obj(canonical_word(std::string(1, bob_letter(0)) + kEveLetter), 2.0);
    }

    void add_score_constraint(const ScoreWeights& w, double nu) {
        sdp::SdpProblem::Constraint sc;
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) {
                const double coeff = w.w0[x * ny + y] - w.w1[x * ny + y];
                if (coeff == 0.0) continue;
                const auto& r = rep_of(make_key(int(x), int(x), std::string(1, bob_letter(y))));
                add_re(sc.coeffs, 0, r.i, r.j, int(mp.main_dim), coeff);
            }
        if (sc.coeffs.empty())
            throw std::invalid_argument("score constraint: all weights zero");
        mp.score_offset = w.offset();
        sc.rhs = nu - mp.score_offset;
        mp.score_constraint = int(mp.sdp.constraints.size());
        mp.sdp.constraints.push_back(std::move(sc));
    }

    void add_stat_constraints(const ConditionalDistribution& P) {
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) {
                const auto& r = rep_of(make_key(int(x), int(x), std::string(1, bob_letter(y))));
                sdp::SdpProblem::Constraint sc;
                add_re(sc.coeffs, 0, r.i, r.j, int(mp.main_dim), 1.0);
                sc.rhs = P.p(0, x, y);
                mp.stat_constraints.push_back(int(mp.sdp.constraints.size()));
                mp.sdp.constraints.push_back(std::move(sc));
            }
    }

    MomentProblem finish() {
        mp.sdp.validate();
        return std::move(mp);
    }
};

}  // namespace

MomentProblem build_guessing_sdp(const GramMatrix& G, const ScoreWeights& w, double nu,
                                 int level) {
    if (!(nu >= 0.0 && nu <= 1.0))
        throw std::invalid_argument("build_guessing_sdp: nu outside [0,1]");
    if (w.nx != std::size_t(G.entries.rows()))
        throw std::invalid_argument("build_guessing_sdp: weight table does not match gram size");
    Builder b(G, w.ny, level);
    b.build_main();
    b.build_localizing();
    b.pin_gram();
    b.set_objective();
    b.add_score_constraint(w, nu);
    return b.finish();
}

MomentProblem build_full_dist_sdp(const GramMatrix& G, const ConditionalDistribution& P,
                                  int level) {
    P.validate();
    if (P.nx != std::size_t(G.entries.rows()))
        throw std::invalid_argument("build_full_dist_sdp: table does not match gram size");
    Builder b(G, P.ny, level);
    b.build_main();
    b.build_localizing();
    b.pin_gram();
    b.set_objective();
    b.add_stat_constraints(P);
    return b.finish();
}

namespace {

sdp::SdpSolution solve_checked(const MomentProblem& mp, const sdp::SolverOptions& opts,
                               const char* what) {
    auto sol = sdp::solve(mp.sdp, opts);
    if (sol.status != sdp::SolveStatus::optimal) {
        std::ostringstream os;
        os << what << ": solver returned " << sdp::to_string(sol.status) << " after "
           << sol.iterations << " iterations (pinf " << sol.primal_residual << ", dinf "
           << sol.dual_residual << ", gap " << sol.relative_gap << ")";
        throw SolverError(os.str());
    }
    return sol;
}

double verified_residual(const MomentProblem& mp, const Eigen::VectorXd& y, const char* what) {
    auto chk = sdp::verify_dual_bound(mp.sdp, y, 1e-8);
    if (!chk.feasible) {
        std::ostringstream os;
        os << what << ": dual certificate failed verification (residual " << chk.residual << ")";
        throw SolverError(os.str());
    }
    return chk.residual;
}

}  // namespace

DualCertificate guessing_bound(const GramMatrix& G, const ScoreWeights& w, double nu,
                               int level, const sdp::SolverOptions& opts) {
    const MomentProblem mp = build_guessing_sdp(G, w, nu, level);
    const auto sol = solve_checked(mp, opts, "guessing_bound");
    DualCertificate cert;
    cert.residual = verified_residual(mp, sol.y, "guessing_bound");
    const double slope = sol.y(mp.score_constraint);
    cert.nu = nu;
    cert.level = level;
    cert.lambda = {0.0, slope};
    cert.c = sol.dual_objective - slope * nu;
    cert.primal_value = sol.primal_objective;
    cert.multipliers = sol.y;
    return cert;
}

double DistributionWitness::value_at(const ConditionalDistribution& P) const {
    double v = xi0;
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) v += xi(0, x, y) * P.p(0, x, y);
    return v;
}

DistributionWitness distribution_witness(const GramMatrix& G, const ConditionalDistribution& P,
                                         int level, const sdp::SolverOptions& opts) {
    const MomentProblem mp = build_full_dist_sdp(G, P, level);
    const auto sol = solve_checked(mp, opts, "distribution_witness");
    DistributionWitness wit;
    wit.residual = verified_residual(mp, sol.y, "distribution_witness");
    wit.nx = mp.nx;
    wit.ny = mp.ny;
    wit.level = level;
    wit.primal_value = sol.primal_objective;
    wit.xi0_table.resize(mp.nx * mp.ny);
    double stat_part = 0.0;
    for (std::size_t x = 0; x < mp.nx; ++x)
        for (std::size_t y = 0; y < mp.ny; ++y) {
            const int ci = mp.stat_constraints[x * mp.ny + y];
            wit.xi0_table[x * mp.ny + y] = sol.y(ci);
            stat_part += sol.y(ci) * P.p(0, x, y);
        }
    wit.xi0 = sol.dual_objective - stat_part;
    return wit;
}

sdp::SolveStatus full_dist_status(const GramMatrix& G, const ConditionalDistribution& P,
                                  int level, const sdp::SolverOptions& opts) {
    const MomentProblem mp = build_full_dist_sdp(G, P, level);
    return sdp::solve(mp.sdp, opts).status;
}

}  // namespace qrx::pm
