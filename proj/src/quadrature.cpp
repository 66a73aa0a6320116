#include "noembed/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>
#include <sstream>

#include "noembed/vec.hpp"

namespace noembed {

namespace {

GaussRule build_rule(int n)
{
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

struct Panel {
    double a, b;
    int depth;
    LogScaledReal value;   // two-half estimate
    LogScaledReal l1;
    LogScaledReal err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

struct PanelSum {
    LogScaledReal value, l1;
};

PanelSum apply_rule(const LogIntegrand& f, double a, double b, const GaussRule& rule, long& evals)
{
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    PanelSum s;
    const LogScaledReal scale = LogScaledReal::from_double(half);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const LogScaledReal v = f(mid + half * rule.nodes[i]) * rule.weights[i];
        s.value += v;
        s.l1 += v.abs();
    }
    evals += static_cast<long>(rule.nodes.size());
    s.value = s.value * scale;
    s.l1 = s.l1 * scale.abs();
    return s;
}

Panel make_panel(const LogIntegrand& f, double a, double b, int depth, long& evals)
{
    const GaussRule& rule = gauss_legendre(15);
    const double m = 0.5 * (a + b);
    const PanelSum whole = apply_rule(f, a, b, rule, evals);
    const PanelSum left = apply_rule(f, a, m, rule, evals);
    const PanelSum right = apply_rule(f, m, b, rule, evals);
    Panel p{a, b, depth, left.value + right.value, left.l1 + right.l1, {}};
    p.err = (p.value - whole.value).abs();
    return p;
}

} // namespace

const GaussRule& gauss_legendre(int n)
{
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

QuadratureResult integrate(const LogIntegrand& f, double a, double b, const QuadratureOptions& opt)
{
    if (!(opt.tol > 0.0)) throw DomainError("integrate: tol must be positive");
    QuadratureResult res;
    if (a == b) return res;
    const double sgn = b > a ? 1.0 : -1.0;
    const double lo = std::min(a, b), hi = std::max(a, b);

    std::vector<double> edges{lo};
    std::vector<double> br = opt.breakpoints;
    std::sort(br.begin(), br.end());
    for (double x : br)
        if (x > lo && x < hi && x > edges.back()) edges.push_back(x);
    edges.push_back(hi);

    std::priority_queue<Panel> heap;
    std::vector<Panel> done;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const int n0 = std::max(1, opt.initial_panels);
        for (int k = 0; k < n0; ++k) {
            const double pa = edges[i] + (edges[i + 1] - edges[i]) * k / n0;
            const double pb = k + 1 == n0 ? edges[i + 1] : edges[i] + (edges[i + 1] - edges[i]) * (k + 1) / n0;
            heap.push(make_panel(f, pa, pb, 0, res.n_evals));
        }
    }

    auto totals = [&](LogScaledReal& value, LogScaledReal& l1, LogScaledReal& err) {
        value = l1 = err = LogScaledReal::zero();
        // Sum in parameter order for reproducibility.
        std::vector<Panel> all(done);
        auto copy = heap;
        while (!copy.empty()) { all.push_back(copy.top()); copy.pop(); }
        std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
        for (const Panel& p : all) { value += p.value; l1 += p.l1; err += p.err; }
    };

    LogScaledReal value, l1, err;
    long panels = static_cast<long>(heap.size());
    while (true) {
        totals(value, l1, err);
        LogScaledReal target = value.abs();
        const LogScaledReal floor = l1 * 1e-3;
        if (target < floor) target = floor;
        target = target * opt.tol;
        if (!(target < err) || heap.empty()) break;
        // Refine the worst panels in a batch to keep the bookkeeping cheap.
        const std::size_t batch = std::max<std::size_t>(1, heap.size() / 8);
        for (std::size_t k = 0; k < batch && !heap.empty(); ++k) {
            Panel p = heap.top();
            heap.pop();
            if (p.err.is_zero()) { done.push_back(p); continue; }
            if (p.depth >= opt.max_depth || panels >= opt.max_panels) {
                std::ostringstream msg;
                msg << "integrate: no convergence on [" << lo << ", " << hi << "]; worst panel ["
                    << p.a << ", " << p.b << "] depth " << p.depth << ", error " << err.str()
                    << ", value " << value.str();
                throw ConvergenceError(msg.str());
            }
            const double m = 0.5 * (p.a + p.b);
            heap.push(make_panel(f, p.a, m, p.depth + 1, res.n_evals));
            heap.push(make_panel(f, m, p.b, p.depth + 1, res.n_evals));
            ++panels;
        }
    }
    res.value = value * sgn;
    res.l1_norm = l1;
    res.est_error = err.to_double();
    return res;
}

LogScaledReal integrate_fixed(const LogIntegrand& f, const std::vector<double>& panel_edges, int n)
{
    const GaussRule& rule = gauss_legendre(n);
    LogScaledReal total;
    long evals = 0;
    for (std::size_t i = 0; i + 1 < panel_edges.size(); ++i)
        total += apply_rule(f, panel_edges[i], panel_edges[i + 1], rule, evals).value;
    return total;
}

} // namespace noembed
