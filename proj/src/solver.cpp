#include "noembed/solver.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace noembed {

namespace {

struct Level {
    GridSpec s;
    std::vector<std::size_t> idx;   // interior nodes
    std::vector<double> diag;       // scaled operator diagonal (0 off the interior)
    std::vector<char> active;
};

Level make_level(const MaskedGrid& g)
{
    Level L;
    L.s = g.spec();
    L.idx = g.interior();
    L.diag.assign(L.s.size(), 0.0);
    L.active.assign(L.s.size(), 0);
    for (std::size_t k : L.idx) {
        L.diag[k] = 4.0;
        L.active[k] = 1;
    }
    for (const BoundaryLink& l : g.links()) L.diag[l.node] += 1.0 / l.frac - 1.0;
    return L;
}

// y = A x on the interior; x must vanish off the interior.
void apply(const Level& L, const std::vector<double>& x, std::vector<double>& y)
{
    const std::size_t nx = static_cast<std::size_t>(L.s.nx);
    for (std::size_t k : L.idx)
        y[k] = L.diag[k] * x[k] - (x[k - 1] + x[k + 1] + x[k - nx] + x[k + nx]);
}

double dot_interior(const Level& L, const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t k : L.idx) s += a[k] * b[k];
    return s;
}

class Multigrid {
public:
    Multigrid(const MaskedGrid& fine, bool enabled)
    {
        levels_.push_back(make_level(fine));
        if (!enabled) return;
        GridSpec s = fine.spec();
        while (levels_.size() < 14) {
            if (s.nx < 9 || s.ny < 9 || levels_.back().idx.size() < 400) break;
            GridSpec c;
            c.origin = s.origin;
            c.h = 2.0 * s.h;
            c.nx = s.nx / 2 + 1;
            c.ny = s.ny / 2 + 1;
            std::unique_ptr<MaskedGrid> cg;
            try {
                cg = std::make_unique<MaskedGrid>(c, fine.region(), BoundaryData{});
            } catch (const DomainError&) {
                break;
            }
            if (cg->interior().empty()) break;
            levels_.push_back(make_level(*cg));
            s = c;
        }
        work_.resize(levels_.size());
        for (std::size_t l = 0; l < levels_.size(); ++l) {
            const std::size_t n = levels_[l].s.size();
            work_[l].x.assign(n, 0.0);
            work_[l].b.assign(n, 0.0);
            work_[l].r.assign(n, 0.0);
        }
    }

    std::size_t depth() const { return levels_.size(); }
    const Level& finest() const { return levels_.front(); }

    // z = M^{-1} r
    void precondition(const std::vector<double>& r, std::vector<double>& z)
    {
        const Level& L = levels_[0];
        if (levels_.size() == 1) {
            for (std::size_t k : L.idx) z[k] = r[k] / L.diag[k];
            return;
        }
        work_[0].b = r;
        vcycle(0);
        z = work_[0].x;
    }

private:
    struct Work {
        std::vector<double> x, b, r;
    };

    void smooth(std::size_t l, int sweeps)
    {
        const Level& L = levels_[l];
        Work& w = work_[l];
        const double omega = 0.8;
        for (int s = 0; s < sweeps; ++s) {
            apply(L, w.x, w.r);
            for (std::size_t k : L.idx) w.r[k] = w.x[k] + omega * (w.b[k] - w.r[k]) / L.diag[k];
            for (std::size_t k : L.idx) w.x[k] = w.r[k];
        }
    }

    void coarse_solve(std::size_t l)
    {
        // Jacobi-preconditioned CG to near machine precision: acts as an exact solve.
        const Level& L = levels_[l];
        Work& w = work_[l];
        std::fill(w.x.begin(), w.x.end(), 0.0);
        std::vector<double> r = w.b, p(L.s.size(), 0.0), q(L.s.size(), 0.0), z(L.s.size(), 0.0);
        for (std::size_t k : L.idx) z[k] = r[k] / L.diag[k];
        p = z;
        double rz = dot_interior(L, r, z);
        const double bnorm = std::sqrt(dot_interior(L, w.b, w.b));
        if (bnorm == 0.0) return;
        for (int it = 0; it < 20000; ++it) {
            apply(L, p, q);
            const double alpha = rz / dot_interior(L, p, q);
            for (std::size_t k : L.idx) {
                w.x[k] += alpha * p[k];
                r[k] -= alpha * q[k];
            }
            if (std::sqrt(dot_interior(L, r, r)) <= 1e-14 * bnorm) break;
            for (std::size_t k : L.idx) z[k] = r[k] / L.diag[k];
            const double rz2 = dot_interior(L, r, z);
            const double beta = rz2 / rz;
            rz = rz2;
            for (std::size_t k : L.idx) p[k] = z[k] + beta * p[k];
        }
    }

    void vcycle(std::size_t l)
    {
        if (l + 1 == levels_.size()) {
            coarse_solve(l);
            return;
        }
        const Level& F = levels_[l];
        const Level& C = levels_[l + 1];
        Work& w = work_[l];
        Work& wc = work_[l + 1];
        std::fill(w.x.begin(), w.x.end(), 0.0);
        smooth(l, 2);
        apply(F, w.x, w.r);
        for (std::size_t k : F.idx) w.r[k] = w.b[k] - w.r[k];
        // Restriction: transpose of bilinear prolongation.
        const std::size_t fnx = static_cast<std::size_t>(F.s.nx);
        std::fill(wc.b.begin(), wc.b.end(), 0.0);
        for (std::size_t K : C.idx) {
            const std::size_t I = K % static_cast<std::size_t>(C.s.nx), J = K / static_cast<std::size_t>(C.s.nx);
            const std::size_t c = (2 * J) * fnx + 2 * I;
            double s = w.r[c];
            s += 0.5 * (w.r[c - 1] + w.r[c + 1] + w.r[c - fnx] + w.r[c + fnx]);
            s += 0.25 * (w.r[c - fnx - 1] + w.r[c - fnx + 1] + w.r[c + fnx - 1] + w.r[c + fnx + 1]);
            wc.b[K] = s;
        }
        vcycle(l + 1);
        const std::size_t cnx = static_cast<std::size_t>(C.s.nx);
        for (std::size_t k : F.idx) {
            const std::size_t i = k % fnx, j = k / fnx;
            const std::size_t I = i / 2, J = j / 2;
            const bool ox = i % 2, oy = j % 2;
            const std::size_t c = J * cnx + I;
            double e;
            if (!ox && !oy) e = wc.x[c];
            else if (ox && !oy) e = 0.5 * (wc.x[c] + wc.x[c + 1]);
            else if (!ox && oy) e = 0.5 * (wc.x[c] + wc.x[c + cnx]);
            else e = 0.25 * (wc.x[c] + wc.x[c + 1] + wc.x[c + cnx] + wc.x[c + cnx + 1]);
            w.x[k] += e;
        }
        smooth(l, 2);
    }

    std::vector<Level> levels_;
    std::vector<Work> work_;
};

std::vector<double> assemble_rhs(const MaskedGrid& g, const std::vector<double>& f)
{
    const double h2 = g.spec().h * g.spec().h;
    std::vector<double> b(g.spec().size(), 0.0);
    if (!f.empty()) {
        if (f.size() != g.spec().size()) throw DomainError("solver: rhs size mismatch");
        for (std::size_t k : g.interior()) b[k] = h2 * f[k];
    }
    for (const BoundaryLink& l : g.links()) b[l.node] += l.value / l.frac;
    return b;
}

} // namespace

std::vector<double> solve_dirichlet_system(const MaskedGrid& g, const std::vector<double>& f,
                                           const SolverOptions& opt, SolveStats* stats)
{
    if (!(opt.tol > 0.0)) throw DomainError("solver: tol must be positive");
    Multigrid mg(g, opt.multigrid);
    const Level& L = mg.finest();
    const std::size_t n = L.s.size();
    const std::vector<double> b = assemble_rhs(g, f);
    std::vector<double> x(n, 0.0), r = b, z(n, 0.0), p(n, 0.0), q(n, 0.0);
    const double bnorm = std::sqrt(dot_interior(L, b, b));
    SolveStats st;
    st.levels = static_cast<int>(mg.depth());
    if (bnorm > 0.0) {
        mg.precondition(r, z);
        p = z;
        double rz = dot_interior(L, r, z);
        long it = 0;
        double checkpoint = 1.0;
        while (true) {
            apply(L, p, q);
            const double alpha = rz / dot_interior(L, p, q);
            for (std::size_t k : L.idx) {
                x[k] += alpha * p[k];
                r[k] -= alpha * q[k];
            }
            ++it;
            double rel = std::sqrt(dot_interior(L, r, r)) / bnorm;
            if (rel <= opt.tol) {
                // Confirm on the true residual.
                apply(L, x, q);
                for (std::size_t k : L.idx) r[k] = b[k] - q[k];
                rel = std::sqrt(dot_interior(L, r, r)) / bnorm;
                if (rel <= opt.tol) {
                    st.relative_residual = rel;
                    break;
                }
            }
            if (it % 25 == 0) {
                // Stagnation: accept only when the true residual sits at the rounding floor of A x.
                if (rel > 0.5 * checkpoint) {
                    apply(L, x, q);
                    for (std::size_t k : L.idx) r[k] = b[k] - q[k];
                    const double true_rel = std::sqrt(dot_interior(L, r, r)) / bnorm;
                    double diag_max = 0.0;
                    for (std::size_t k : L.idx) diag_max = std::max(diag_max, L.diag[k]);
                    const double floor = 2.0 * diag_max * std::sqrt(dot_interior(L, x, x))
                                         * std::numeric_limits<double>::epsilon() / bnorm;
                    if (true_rel <= 1000.0 * floor) {
                        st.relative_residual = true_rel;
                        st.at_rounding_floor = true;
                        break;
                    }
                }
                checkpoint = rel;
            }
            if (it >= opt.max_iterations) {
                std::ostringstream msg;
                msg << "solver: no convergence after " << it << " iterations, relative residual " << rel;
                throw ConvergenceError(msg.str());
            }
            mg.precondition(r, z);
            const double rz2 = dot_interior(L, r, z);
            const double beta = rz2 / rz;
            rz = rz2;
            for (std::size_t k : L.idx) p[k] = z[k] + beta * p[k];
        }
        st.iterations = it;
    }
    if (stats) *stats = st;
    for (std::size_t k = 0; k < n; ++k)
        if (g.kind(k) == NodeKind::Boundary) x[k] = g.boundary_values()[k];
    return x;
}

std::vector<double> dirichlet_residual(const MaskedGrid& g, const std::vector<double>& u, const std::vector<double>& f)
{
    const GridSpec& s = g.spec();
    const double h2 = s.h * s.h;
    std::vector<double> res(s.size(), 0.0);
    std::vector<double> diag(s.size(), 4.0), bl(s.size(), 0.0);
    std::vector<char> cut(s.size() * 4, 0);
    for (const BoundaryLink& l : g.links()) {
        diag[l.node] += 1.0 / l.frac - 1.0;
        bl[l.node] += l.value / l.frac;
        cut[l.node * 4 + l.dir] = 1;
    }
    const std::size_t nx = static_cast<std::size_t>(s.nx);
    const std::size_t nb[4] = {1, static_cast<std::size_t>(-1), nx, static_cast<std::size_t>(-static_cast<long>(nx))};
    for (std::size_t k : g.interior()) {
        double a = diag[k] * u[k] - bl[k];
        for (int d = 0; d < 4; ++d)
            if (!cut[k * 4 + d]) a -= u[k + nb[d]];
        res[k] = (f.empty() ? 0.0 : f[k]) - a / h2;
    }
    return res;
}

} // namespace noembed
