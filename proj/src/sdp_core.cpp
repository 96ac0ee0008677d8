#include "qrx/sdp_core.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace qrx::sdp {

namespace {

constexpr int kMaxTotalDim = 1024;

struct Entry {
    int row, col;
    double value;
};

// triplets expanded to full (both-orientation) entries, grouped by block
struct ExpandedMat {
    std::vector<std::vector<Entry>> per_block;
    std::vector<std::vector<int>> row_support;
    double fnorm = 1.0;

    void build(const std::vector<Triplet>& ts, const std::vector<int>& dims) {
        per_block.assign(dims.size(), {});
        row_support.assign(dims.size(), {});
        for (const auto& t : ts) {
            per_block[std::size_t(t.block)].push_back({t.row, t.col, t.value});
            if (t.row != t.col)
                per_block[std::size_t(t.block)].push_back({t.col, t.row, t.value});
        }
        double f2 = 0.0;
        for (std::size_t b = 0; b < per_block.size(); ++b) {
            for (const auto& e : per_block[b]) {
                f2 += e.value * e.value;
                bool seen = false;
                for (int r : row_support[b]) seen = seen || r == e.row;
                if (!seen) row_support[b].push_back(e.row);
            }
        }
        fnorm = std::sqrt(f2);
    }

    // tr(A M); equals <A, sym(M)> for the symmetric A this represents
    double dot(const std::vector<Eigen::MatrixXd>& M) const {
        double s = 0.0;
        for (std::size_t b = 0; b < per_block.size(); ++b)
            for (const auto& e : per_block[b]) s += e.value * M[b](e.col, e.row);
        return s;
    }

    void add_to(std::vector<Eigen::MatrixXd>& M, double w) const {
        for (std::size_t b = 0; b < per_block.size(); ++b)
            for (const auto& e : per_block[b]) M[b](e.row, e.col) += w * e.value;
    }

    void scale(double s) {
        for (auto& blk : per_block)
            for (auto& e : blk) e.value *= s;
    }
};

std::vector<Eigen::MatrixXd> zeros_like(const std::vector<int>& dims) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(dims.size());
    for (int d : dims) out.push_back(Eigen::MatrixXd::Zero(d, d));
    return out;
}

double max_abs(const std::vector<Eigen::MatrixXd>& M) {
    double m = 0.0;
    for (const auto& blk : M) m = std::max(m, blk.cwiseAbs().maxCoeff());
    return m;
}

double inner(const std::vector<Eigen::MatrixXd>& A, const std::vector<Eigen::MatrixXd>& B) {
    double s = 0.0;
    for (std::size_t b = 0; b < A.size(); ++b) s += (A[b].array() * B[b].array()).sum();
    return s;
}

// largest step a keeping S + a*D psd; S = L L'
double max_step(const std::vector<Eigen::LLT<Eigen::MatrixXd>>& llt,
                const std::vector<Eigen::MatrixXd>& D) {
    double amax = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < D.size(); ++b) {
        const auto& L = llt[b].matrixL();
        Eigen::MatrixXd M = L.solve(D[b]);
        M = L.solve(M.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        if (lmin < 0.0) amax = std::min(amax, -1.0 / lmin);
    }
    return amax;
}

}  // namespace

int SdpProblem::total_dim() const {
    int n = 0;
    for (int d : block_dims) n += d;
    return n;
}

void SdpProblem::validate() const {
    if (block_dims.empty()) throw std::invalid_argument("sdp: no blocks");
    for (int d : block_dims)
        if (d < 1) throw std::invalid_argument("sdp: block size < 1");
    if (total_dim() > kMaxTotalDim)
        throw std::invalid_argument("sdp: total dimension " + std::to_string(total_dim()) +
                                    " exceeds the dense-solver cap " + std::to_string(kMaxTotalDim));
    if (constraints.empty()) throw std::invalid_argument("sdp: need at least one constraint");
    auto check = [&](const std::vector<Triplet>& ts) {
        for (const auto& t : ts) {
            if (t.block < 0 || t.block >= int(block_dims.size()))
                throw std::invalid_argument("sdp: triplet block out of range");
            const int d = block_dims[std::size_t(t.block)];
            if (t.row < 0 || t.row >= d || t.col < 0 || t.col >= d)
                throw std::invalid_argument("sdp: triplet index out of range");
            if (!std::isfinite(t.value)) throw std::invalid_argument("sdp: non-finite coefficient");
        }
    };
    check(objective);
    for (const auto& c : constraints) check(c.coeffs);
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        default: return "numerical-failure";
    }
}

std::vector<Eigen::MatrixXd> assemble(const SdpProblem& p, const std::vector<Triplet>& ts) {
    auto M = zeros_like(p.block_dims);
    for (const auto& t : ts) {
        M[std::size_t(t.block)](t.row, t.col) += t.value;
        if (t.row != t.col) M[std::size_t(t.block)](t.col, t.row) += t.value;
    }
    return M;
}

SdpSolution solve(const SdpProblem& prob, const SolverOptions& opts) {
    prob.validate();
    const auto& dims = prob.block_dims;
    const std::size_t nb = dims.size();
    const int m = int(prob.constraints.size());
    const int N = prob.total_dim();

    ExpandedMat C;
    C.build(prob.objective, dims);
    std::vector<ExpandedMat> A;
    A.resize(std::size_t(m));
    Eigen::VectorXd b(m), scale(m);
    for (int i = 0; i < m; ++i) {
        A[std::size_t(i)].build(prob.constraints[std::size_t(i)].coeffs, dims);
        const double s = std::max(A[std::size_t(i)].fnorm, 1e-12);
        A[std::size_t(i)].scale(1.0 / s);
        scale(i) = s;
        b(i) = prob.constraints[std::size_t(i)].rhs / s;
    }
    const double bnorm_orig = [&] {
        double v = 0.0;
        for (const auto& c : prob.constraints) v = std::max(v, std::abs(c.rhs));
        return v;
    }();
    const double cnorm = std::max(1.0, max_abs(assemble(prob, prob.objective)));

    // identity start
    double xi = std::max({10.0, std::sqrt(double(N))});
    for (int i = 0; i < m; ++i) xi = std::max(xi, 10.0 * std::abs(b(i)));
    double eta = 10.0 + std::max(C.fnorm, 1.0);
    auto X = zeros_like(dims);
    auto Z = zeros_like(dims);
    for (std::size_t k = 0; k < nb; ++k) {
        X[k] = xi * Eigen::MatrixXd::Identity(dims[k], dims[k]);
        Z[k] = eta * Eigen::MatrixXd::Identity(dims[k], dims[k]);
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

    SdpSolution sol;
    sol.y = y;
    const double mu0 = inner(X, Z) / N;
    double pinf_hist = std::numeric_limits<double>::infinity();
    int stall = 0;

    auto eval_A = [&](const std::vector<Eigen::MatrixXd>& M) {
        Eigen::VectorXd v(m);
        for (int i = 0; i < m; ++i) v(i) = A[std::size_t(i)].dot(M);
        return v;
    };
    auto At = [&](const Eigen::VectorXd& w) {
        auto M = zeros_like(dims);
        for (int i = 0; i < m; ++i) A[std::size_t(i)].add_to(M, w(i));
        return M;
    };

    auto finalize = [&](SolveStatus st, int iters) {
        sol.status = st;
        sol.iterations = iters;
        sol.X = X;
        sol.y = y;
        for (int i = 0; i < m; ++i) sol.y(i) /= scale(i);
        // residuals against the original-scale problem
        double pr = 0.0;
        for (int i = 0; i < m; ++i)
            pr = std::max(pr, std::abs(b(i) - A[std::size_t(i)].dot(X)) * scale(i));
        sol.primal_residual = pr / (1.0 + bnorm_orig);
        auto Rd = At(y);
        for (std::size_t k = 0; k < nb; ++k) Rd[k] = Rd[k] - Z[k];
        C.add_to(Rd, -1.0);  // Rd = At(y) - Z - C; want 0
        sol.dual_residual = max_abs(Rd) / cnorm;
        sol.primal_objective = C.dot(X);
        sol.dual_objective = b.dot(y);  // scaled b with scaled y equals original b'y
        sol.relative_gap = std::abs(sol.primal_objective - sol.dual_objective) /
                           (1.0 + std::abs(sol.primal_objective) + std::abs(sol.dual_objective));
        return sol;
    };

    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        // residuals
        Eigen::VectorXd rp = b - eval_A(X);
        auto Rd = At(y);  // Rd = C - At(y) + Z
        for (std::size_t k = 0; k < nb; ++k) Rd[k] = -Rd[k] + Z[k];
        C.add_to(Rd, 1.0);

        const double pobj = C.dot(X);
        const double dobj = b.dot(y);
        double pinf = 0.0;
        for (int i = 0; i < m; ++i) pinf = std::max(pinf, std::abs(rp(i)) * scale(i));
        pinf /= 1.0 + bnorm_orig;
        const double dinf = max_abs(Rd) / cnorm;
        const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        const double mu = inner(X, Z) / N;
        if (!std::isfinite(pobj) || !std::isfinite(mu))
            return finalize(SolveStatus::numerical_failure, iter - 1);

        // primal improving ray => unbounded
        if (max_abs(X) > 1e9) {
            const double s = max_abs(X);
            auto U = X;
            for (auto& blk : U) blk /= s;
            if (eval_A(U).cwiseAbs().maxCoeff() <= 1e-6 && C.dot(U) > 1e-8)
                return finalize(SolveStatus::unbounded, iter - 1);
        }

        if (opts.verbose)
            std::fprintf(stderr, "it %3d  mu %9.2e  pinf %9.2e  dinf %9.2e  gap %9.2e  pobj %.9e\n",
                         iter, mu, pinf, dinf, gap, pobj);

        if (pinf <= opts.eps_feasibility && dinf <= opts.eps_feasibility && gap <= opts.eps_gap)
            return finalize(SolveStatus::optimal, iter - 1);

        // divergence heuristics with certificate checks
        const double ynorm = y.size() ? y.cwiseAbs().maxCoeff() : 0.0;
        if (ynorm > 1e9 || dobj < -1e10 * (1.0 + bnorm_orig) ||
            (mu < 1e-9 * mu0 && pinf > 1e4 * opts.eps_feasibility)) {
            Eigen::VectorXd u = y / std::max(1.0, y.norm());
            auto Au = At(u);
            double lmin = 0.0, amax = 0.0;
            for (std::size_t k = 0; k < nb; ++k) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Au[k], Eigen::EigenvaluesOnly);
                lmin = std::min(lmin, es.eigenvalues().minCoeff());
                amax = std::max(amax, Au[k].cwiseAbs().maxCoeff());
            }
            if (lmin >= -1e-7 * std::max(1.0, amax) && b.dot(u) < -1e-9)
                return finalize(SolveStatus::infeasible, iter - 1);
        }
        if (pobj > 1e12 && pinf <= 1e2 * opts.eps_feasibility)
            return finalize(SolveStatus::unbounded, iter - 1);
        if (pinf > 0.5 * pinf_hist) {
            if (++stall > 40 && pinf > 1e3 * opts.eps_feasibility && iter > 60)
                return finalize(SolveStatus::numerical_failure, iter - 1);
        } else {
            stall = 0;
            pinf_hist = pinf;
        }

        // factor X, Z
        std::vector<Eigen::LLT<Eigen::MatrixXd>> lltX(nb), lltZ(nb);
        std::vector<Eigen::MatrixXd> Zinv(nb);
        bool ok = true;
        for (std::size_t k = 0; k < nb; ++k) {
            lltX[k].compute(X[k]);
            lltZ[k].compute(Z[k]);
            if (lltX[k].info() != Eigen::Success || lltZ[k].info() != Eigen::Success) {
                ok = false;
                break;
            }
            Zinv[k] = lltZ[k].solve(Eigen::MatrixXd::Identity(dims[k], dims[k]));
        }
        if (!ok) return finalize(SolveStatus::numerical_failure, iter - 1);

        // Schur complement O_ij = tr(A_i Z^-1 A_j X)
        Eigen::MatrixXd O = Eigen::MatrixXd::Zero(m, m);
        {
            std::vector<Eigen::MatrixXd> W(nb);
            for (int j = 0; j < m; ++j) {
                const auto& Aj = A[std::size_t(j)];
                for (std::size_t k = 0; k < nb; ++k) {
                    const auto& rows = Aj.row_support[k];
                    if (rows.empty()) {
                        W[k].resize(0, 0);
                        continue;
                    }
                    const int d = dims[k];
                    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(int(rows.size()), d);
                    for (const auto& e : Aj.per_block[k]) {
                        int ri = 0;
                        while (rows[std::size_t(ri)] != e.row) ++ri;
                        T.row(ri) += e.value * X[k].row(e.col);
                    }
                    Eigen::MatrixXd Zcols(d, int(rows.size()));
                    for (std::size_t c = 0; c < rows.size(); ++c)
                        Zcols.col(Eigen::Index(c)) = Zinv[k].col(rows[c]);
                    W[k].noalias() = Zcols * T;
                }
                for (int i = 0; i <= j; ++i) {
                    double s = 0.0;
                    for (std::size_t k = 0; k < nb; ++k) {
                        if (W[k].size() == 0) continue;
                        for (const auto& e : A[std::size_t(i)].per_block[k])
                            s += e.value * W[k](e.col, e.row);
                    }
                    O(i, j) = s;
                    O(j, i) = s;
                }
            }
        }
        Eigen::LLT<Eigen::MatrixXd> lltO;
        {
            double ridge = 1e-14 * std::max(1.0, O.diagonal().maxCoeff());
            for (int attempt = 0; attempt < 4; ++attempt) {
                Eigen::MatrixXd Or = O + ridge * Eigen::MatrixXd::Identity(m, m);
                lltO.compute(Or);
                if (lltO.info() == Eigen::Success) break;
                ridge *= 1e3;
            }
            if (lltO.info() != Eigen::Success)
                return finalize(SolveStatus::numerical_failure, iter - 1);
        }

        // common pieces: A(Z^-1) and A(X Rd Z^-1)
        std::vector<Eigen::MatrixXd> XRdZ(nb);
        for (std::size_t k = 0; k < nb; ++k) XRdZ[k].noalias() = X[k] * Rd[k] * Zinv[k];
        const Eigen::VectorXd aZinv = eval_A(Zinv);
        const Eigen::VectorXd aXRdZ = eval_A(XRdZ);

        auto directions = [&](double mut, const std::vector<Eigen::MatrixXd>* corr,
                              Eigen::VectorXd& dy, std::vector<Eigen::MatrixXd>& dX,
                              std::vector<Eigen::MatrixXd>& dZ) {
            Eigen::VectorXd rhs = mut * aZinv + aXRdZ - b;
            std::vector<Eigen::MatrixXd> corrZ(nb);
            if (corr) {
                for (std::size_t k = 0; k < nb; ++k) corrZ[k].noalias() = (*corr)[k] * Zinv[k];
                rhs -= eval_A(corrZ);
            }
            dy = lltO.solve(rhs);
            dZ = At(dy);
            for (std::size_t k = 0; k < nb; ++k) dZ[k] -= Rd[k];
            dX = zeros_like(dims);
            for (std::size_t k = 0; k < nb; ++k) {
                dX[k].noalias() = -(X[k] * dZ[k] * Zinv[k]);
                dX[k] += mut * Zinv[k] - X[k] + XRdZ[k];
                if (corr) dX[k] -= corrZ[k];
                dX[k] = 0.5 * (dX[k] + dX[k].transpose()).eval();
            }
        };

        const double tau = gap < 1e-3 ? 0.98 : 0.95;

        // predictor
        Eigen::VectorXd dy_a;
        std::vector<Eigen::MatrixXd> dX_a, dZ_a;
        directions(0.0, nullptr, dy_a, dX_a, dZ_a);
        const double ap_a = std::min(1.0, tau * max_step(lltX, dX_a));
        const double ad_a = std::min(1.0, tau * max_step(lltZ, dZ_a));
        double mu_aff = 0.0;
        for (std::size_t k = 0; k < nb; ++k)
            mu_aff += ((X[k] + ap_a * dX_a[k]).array() * (Z[k] + ad_a * dZ_a[k]).array()).sum();
        mu_aff /= N;
        double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);
        sigma = std::clamp(sigma, 1e-10, 1.0);

        // corrector
        std::vector<Eigen::MatrixXd> corr(nb);
        for (std::size_t k = 0; k < nb; ++k) corr[k].noalias() = dX_a[k] * dZ_a[k];
        Eigen::VectorXd dy;
        std::vector<Eigen::MatrixXd> dX, dZ;
        directions(sigma * mu, &corr, dy, dX, dZ);

        double ap = std::min(1.0, tau * max_step(lltX, dX));
        double ad = std::min(1.0, tau * max_step(lltZ, dZ));
        for (std::size_t k = 0; k < nb; ++k) {
            X[k] += ap * dX[k];
            Z[k] += ad * dZ[k];
        }
        y += ad * dy;
    }
    return finalize(SolveStatus::numerical_failure, opts.max_iterations);
}

DualCheck verify_dual_bound(const SdpProblem& p, const Eigen::VectorXd& y, double tolerance) {
    p.validate();
    if (y.size() != Eigen::Index(p.constraints.size()))
        throw std::invalid_argument("verify_dual_bound: multiplier count mismatch");
    auto Z = assemble(p, p.objective);
    for (auto& blk : Z) blk = -blk;
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
        for (const auto& t : p.constraints[i].coeffs) {
            Z[std::size_t(t.block)](t.row, t.col) += y(Eigen::Index(i)) * t.value;
            if (t.row != t.col)
                Z[std::size_t(t.block)](t.col, t.row) += y(Eigen::Index(i)) * t.value;
        }
    }
    double lmin = 0.0;
    for (const auto& blk : Z) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blk, Eigen::EigenvaluesOnly);
        lmin = std::min(lmin, es.eigenvalues().minCoeff());
    }
    DualCheck out;
    out.residual = std::max(0.0, -lmin);
    out.feasible = lmin >= -tolerance;
    out.bound = 0.0;
    for (std::size_t i = 0; i < p.constraints.size(); ++i)
        out.bound += y(Eigen::Index(i)) * p.constraints[i].rhs;
    return out;
}

std::string SdpProblem::dump() const {
    std::ostringstream os;
    os.precision(17);
    os << "qrx-sdp 1\n";
    os << "blocks " << block_dims.size() << "\n";
    for (std::size_t i = 0; i < block_dims.size(); ++i)
        os << block_dims[i] << (i + 1 == block_dims.size() ? "\n" : " ");
    os << "objective " << objective.size() << "\n";
    for (const auto& t : objective)
        os << t.block << " " << t.row << " " << t.col << " " << t.value << "\n";
    os << "constraints " << constraints.size() << "\n";
    for (const auto& c : constraints) {
        os << "constraint " << c.rhs << " " << c.coeffs.size() << "\n";
        for (const auto& t : c.coeffs)
            os << t.block << " " << t.row << " " << t.col << " " << t.value << "\n";
    }
    return os.str();
}

SdpProblem SdpProblem::load(const std::string& text) {
    std::istringstream is(text);
    std::string tag;
    int version = 0;
    if (!(is >> tag >> version) || tag != "qrx-sdp" || version != 1)
        throw std::runtime_error("sdp load: not a qrx-sdp v1 dump");
    SdpProblem p;
    std::size_t nblocks = 0, nnz = 0, m = 0;
    if (!(is >> tag >> nblocks) || tag != "blocks") throw std::runtime_error("sdp load: blocks");
    p.block_dims.resize(nblocks);
    for (auto& d : p.block_dims)
        if (!(is >> d)) throw std::runtime_error("sdp load: block dims");
    if (!(is >> tag >> nnz) || tag != "objective") throw std::runtime_error("sdp load: objective");
    p.objective.resize(nnz);
    for (auto& t : p.objective)
        if (!(is >> t.block >> t.row >> t.col >> t.value))
            throw std::runtime_error("sdp load: objective triplet");
    if (!(is >> tag >> m) || tag != "constraints") throw std::runtime_error("sdp load: constraints");
    p.constraints.resize(m);
    for (auto& c : p.constraints) {
        if (!(is >> tag >> c.rhs >> nnz) || tag != "constraint")
            throw std::runtime_error("sdp load: constraint header");
        c.coeffs.resize(nnz);
        for (auto& t : c.coeffs)
            if (!(is >> t.block >> t.row >> t.col >> t.value))
                throw std::runtime_error("sdp load: constraint triplet");
    }
    p.validate();
    return p;
}

}  // namespace qrx::sdp
