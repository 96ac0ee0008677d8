#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qrx {

/// A prepare-and-measure game: input distribution q(x,y), the winning outcome
/// b_xy wherever q(x,y) > 0, the expected winning probability and the
/// confidence-interval width used by the abort rule.
struct GameSpec {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> q;    // row-major [x*ny + y]
    std::vector<int> win;     // winning outcome in {0,1}; -1 where q == 0
    double omega = 0.0;       // expected Pr[B = b_xy] on test rounds
    double delta = 0.0;       // confidence width

    double q_at(std::size_t x, std::size_t y) const { return q[x * ny + y]; }
    int win_at(std::size_t x, std::size_t y) const { return win[x * ny + y]; }

    /// q normalized, wins defined on the support, 0 < delta < min(omega, 1-omega).
    /// The omega/delta check is skipped while both are still unset (0).
    void validate() const {
        if (nx == 0 || ny == 0 || q.size() != nx * ny || win.size() != nx * ny)
            throw std::invalid_argument("game: inconsistent table sizes");
        double s = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (q[i] < 0.0) throw std::invalid_argument("game: negative q entry");
            if (q[i] > 0.0 && win[i] != 0 && win[i] != 1)
                throw std::invalid_argument("game: winning outcome undefined on support");
            s += q[i];
        }
        if (std::abs(s - 1.0) > 1e-12)
            throw std::invalid_argument("game: q does not sum to 1");
        if (omega != 0.0 || delta != 0.0) {
            const double lim = omega < 1.0 - omega ? omega : 1.0 - omega;
            if (!(delta > 0.0 && delta < lim))
                throw std::invalid_argument("game: delta outside (0, min(omega, 1-omega))");
        }
    }
};

}  // namespace qrx
