#include "pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "noembed/assembly.hpp"
#include "noembed/conformal.hpp"
#include "noembed/io.hpp"
#include "noembed/ruled.hpp"
#include "noembed/trees.hpp"

namespace noembed::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int n_max_or(const RunConfig& cfg, int fallback) { return cfg.n_max > 0 ? cfg.n_max : fallback; }

// Field on the lattice spec sampled from a function, every node Interior.
ScalarField sample_field(const GridSpec& spec, const std::function<double(Vec2)>& f)
{
    std::vector<double> v(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) v[k] = f(spec.node(k));
    return ScalarField(spec, std::vector<NodeKind>(spec.size(), NodeKind::Interior), std::move(v));
}

ScalarField subsample(const ScalarField& f, int stride)
{
    GridSpec s;
    s.origin = f.spec.origin;
    s.h = f.spec.h * stride;
    s.nx = (f.spec.nx - 1) / stride + 1;
    s.ny = (f.spec.ny - 1) / stride + 1;
    std::vector<NodeKind> m(s.size());
    std::vector<double> v(s.size());
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            const std::size_t src = f.spec.index(i * stride, j * stride);
            m[s.index(i, j)] = f.mask.empty() ? NodeKind::Interior : f.mask[src];
            v[s.index(i, j)] = f.values[src];
        }
    return ScalarField(s, std::move(m), std::move(v));
}

fs::path out_path(const RunConfig& cfg, const std::string& name) { return fs::path(cfg.out_dir) / name; }

} // namespace

Json config_json(const RunConfig& cfg)
{
    Json j = Json::object();
    for (const auto& [k, v] : cfg.entries()) j[k] = v;
    return j;
}

TailState& Context::tail(Report& rep)
{
    if (tail_) return *tail_;
    Stopwatch sw;
    auto st = std::make_unique<TailState>();
    const PentagonGeometry geo = PentagonGeometry::from_K(cfg_.tail_K);
    st->h = cfg_.grid_h > 0.0 ? cfg_.grid_h : geo.short_side() / 512.0;
    st->delta_schedule = default_delta_schedule(cfg_.tail_K, st->h, cfg_.delta_count);
    if (st->delta_schedule.empty()) throw ResolutionError("tail: grid too coarse for any mollifier radius");
    TailGridOptions opt;
    opt.K = cfg_.tail_K;
    opt.h = st->h;
    opt.pad_nodes = static_cast<int>(std::ceil(st->delta_schedule.front() / st->h)) + 4;
    st->sol = solve_tail_problems(opt);
    rep.add_runtime("tail.solve", sw.seconds());
    st->n_sel = select_N(st->sol, geometric_schedule(cfg_.N_first, cfg_.N_ratio, cfg_.N_count), cfg_.N_margin);
    if (st->n_sel.N) st->delta_sel = select_tail_delta(st->sol, *st->n_sel.N, st->delta_schedule);
    rep.add_runtime("tail.total", sw.seconds());
    tail_ = std::move(st);
    return *tail_;
}

void verify_moon(Context& ctx, Report& rep)
{
    const RunConfig& cfg = ctx.config();
    MoonField u;
    {
        Stopwatch sw;
        Check& c = rep.add("moon.harmonicity", "u is harmonic on the sectors");
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> ur(0.2, 0.9), ut(0.0, kTwoPi);
        const SteinerTree T = build_steiner_tree(std::exp(-static_cast<double>(kPinnedMinK)));
        double lo = kInf, hi = -kInf;
        int n = 0;
        while (n < 100) {
            const PolarPoint pp(ur(rng), std::max(1e-3, ut(rng)));
            const Vec2 p = pp.cartesian();
            if (eval_angle_field(T.a, T.a1, p) > 4.0 * kPi / 3.0) continue;
            const double ratio = laplacian_residual(u, p, 1.0 / 128.0) / laplacian_residual(u, p, 1.0 / 256.0);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            ++n;
        }
        c.inputs = {{"points", n}, {"h", {1.0 / 128.0, 1.0 / 256.0}}, {"r_range", {0.2, 0.9}}};
        c.values = {{"ratio_min", lo}, {"ratio_max", hi}};
        c.margins = {{"low", lo - 3.5}, {"high", 4.5 - hi}};
        c.pass = lo >= 3.5 && hi <= 4.5;
        c.seconds = sw.seconds();
    }
    {
        Stopwatch sw;
        Check& c = rep.add("moon.boundary", "u vanishes on the unit circle with u_r < 0");
        double max_u = 0.0, max_rel = 0.0, max_ur = -kInf;
        for (int k = 1; k <= 50; ++k) {
            const double th = kTwoPi * k / 51.0;
            max_u = std::max(max_u, std::abs(eval_u(PolarPoint(1.0, th)).to_double()));
            const double step = 1e-4;
            const double fd = (eval_u(PolarPoint(1.0 + step, th)) - eval_u(PolarPoint(1.0 - step, th))).to_double() / (2.0 * step);
            const double ex = -2.0 * th * std::exp(-th * th);
            max_rel = std::max(max_rel, std::abs(fd - ex) / std::abs(ex));
            max_rel = std::max(max_rel, std::abs(radial_derivative_u(th) - ex) / std::abs(ex));
            max_ur = std::max(max_ur, radial_derivative_u(th));
        }
        c.inputs = {{"thetas", 50}, {"fd_step", 1e-4}};
        c.values = {{"max_abs_u", max_u}, {"max_rel_ur_error", max_rel}, {"max_ur", max_ur}};
        c.margins = {{"u", 1e-14 - max_u}, {"ur", 1e-6 - max_rel}};
        c.pass = max_u <= 1e-14 && max_rel <= 1e-6 && max_ur < 0.0;
        c.seconds = sw.seconds();
    }
    int K_star = 0;
    {
        Stopwatch sw;
        Check& c = rep.add("moon.min_K", "smallest K with negative AA2 integral and Green right-hand side");
        const MinKResult m = find_min_K(cfg.K_max, cfg.quad_tol);
        Json scan = Json::array();
        for (const MinKRecord& r : m.scan)
            scan.push_back({{"K", r.K}, {"aa2", to_json(r.aa2)}, {"rhs", to_json(r.rhs)}, {"satisfied", r.satisfied}});
        c.inputs = {{"K_max", cfg.K_max}, {"tol", cfg.quad_tol}};
        c.values = {{"K_star", m.K ? Json(*m.K) : Json(nullptr)}, {"pinned", kPinnedMinK}, {"scan", scan}};
        K_star = m.K ? *m.K : 0;
        c.pass = cfg.K_max >= kPinnedMinK ? K_star == kPinnedMinK : !m.K;
        c.seconds = sw.seconds();
    }
    {
        Stopwatch sw;
        Check& c = rep.add("moon.aa2_cancellation", "AA2 integral vanishes at K = 1");
        const double v = aa2_integral_scaled(1, 1e-12).to_double() * std::exp(-1.0);
        c.values = {{"aa2_scaled", v}};
        c.margins = {{"abs", 1e-10 - std::abs(v)}};
        c.pass = std::abs(v) <= 1e-10;
        c.seconds = sw.seconds();
    }
    {
        Stopwatch sw;
        Check& c = rep.add("moon.tree_sign", "tree integral of u is negative at the minimal K");
        if (K_star > 0) {
            const SteinerTree T = build_steiner_tree(std::exp(-static_cast<double>(K_star)));
            const QuadratureResult q = tree_integral(u, T, cfg.quad_tol);
            c.inputs = {{"K", K_star}};
            c.values = {{"tree_integral", to_json(q.value)}, {"est_error", q.est_error}};
            c.pass = q.value.sign() < 0;
        } else {
            c.values = {{"tree_integral", nullptr}, {"reason", "no minimal K"}};
        }
        c.seconds = sw.seconds();
    }
    {
        Stopwatch sw;
        Check& c = rep.add("moon.green_identity", "Green identity for u and the angle field");
        Json res = Json::array();
        double worst = 0.0;
        for (int K = 2; K <= 6; ++K) {
            const GreenIdentity g = green_identity_terms(K, std::min(cfg.quad_tol, 1e-12));
            res.push_back({{"K", K}, {"residual", g.residual}, {"residual_plain_ds", g.residual_ds}});
            worst = std::max(worst, g.residual);
        }
        c.values = {{"per_K", res}, {"max_residual", worst}};
        c.margins = {{"residual", 1e-4 - worst}};
        c.pass = worst <= 1e-4;
        c.seconds = sw.seconds();
    }
    {
        Stopwatch sw;
        Check& c = rep.add("moon.chord_positivity", "chords of the sectors carry positive integrals");
        const SteinerTree T = build_steiner_tree(std::exp(-static_cast<double>(K_star > 0 ? K_star : kPinnedMinK)));
        std::mt19937_64 rng(cfg.seed + 1);
        std::uniform_real_distribution<double> ut(0.0, kTwoPi);
        int n = 0, positive = 0;
        long attempts = 0;
        LogScaledReal smallest;
        bool have = false;
        while (n < 100 && attempts < 100000) {
            ++attempts;
            const double a = ut(rng), b = ut(rng);
            const Segment s({std::cos(a), std::sin(a)}, {std::cos(b), std::sin(b)});
            if (s.length() < 1e-3 || !segment_in_sectors(s, T)) continue;
            const SegmentSign sg = check_segment_positivity(s, T, cfg.quad_tol);
            ++n;
            positive += sg.sign > 0;
            if (!have || sg.value < smallest) smallest = sg.value;
            have = true;
        }
        c.inputs = {{"seed", cfg.seed + 1}, {"chords", n}};
        c.values = {{"positive", positive}, {"smallest", to_json(smallest)}};
        c.pass = n == 100 && positive == 100;
        c.seconds = sw.seconds();
    }
}

void verify_tail(Context& ctx, Report& rep)
{
    const RunConfig& cfg = ctx.config();
    Stopwatch sw;
    TailState& t = ctx.tail(rep);
    const double setup = sw.seconds();
    {
        Check& c = rep.add("tail.select_N", "end datum N making w exceed u on the slants and stay positive on the sides");
        Json sweep = Json::array();
        for (const MarginRecord& r : t.n_sel.sweep)
            sweep.push_back({{"N", r.N}, {"min_slant", r.min_slant}, {"min_side", r.min_side}, {"ok", r.ok}});
        c.inputs = {{"K", cfg.tail_K}, {"h", t.h}, {"nodes", t.sol.spec.size()},
                    {"slant_samples", t.n_sel.slant_samples}, {"side_samples", t.n_sel.side_samples}};
        c.values = {{"N", t.n_sel.N ? Json(*t.n_sel.N) : Json(nullptr)}, {"sweep_length", t.n_sel.sweep.size()}};
        if (t.n_sel.N) {
            const MarginRecord& r = t.n_sel.sweep.back();
            c.margins = {{"min_slant", r.min_slant}, {"min_side", r.min_side}, {"scale", r.scale}};
        }
        c.pass = t.n_sel.N.has_value();
        c.seconds = setup;
    }
    {
        Stopwatch s2;
        Check& c = rep.add("tail.subharmonic", "v is subharmonic on the unit disc");
        if (t.delta_sel) {
            const SubharmonicReport sh = t.delta_sel->v->subharmonic_on_unit_disc();
            c.inputs = {{"delta", t.delta_sel->v->delta}, {"nodes", sh.nodes}};
            c.values = {{"min_laplacian", sh.min_laplacian}, {"scale", sh.max_abs}, {"relative", sh.relative()},
                        {"worst", {sh.worst.x, sh.worst.y}}, {"max_outside_support", t.delta_sel->v->max_outside_support()}};
            c.margins = {{"relative", sh.relative() + 1e-8}};
            c.pass = sh.relative() >= -1e-8;
        } else {
            c.values = {{"reason", "no N selected"}};
        }
        c.seconds = s2.seconds();
    }
    {
        Check& c = rep.add("tail.tree_sign", "tree integral of v is negative for the selected mollifier radius");
        if (t.delta_sel) {
            Json scan = Json::array();
            for (const DeltaRecord& r : t.delta_sel->scan)
                scan.push_back({{"delta", r.delta}, {"tree_integral", r.tree_integral}, {"error_margin", r.error_margin},
                                {"subharmonic_relative", r.subharmonic.relative()}});
            c.inputs = {{"schedule", t.delta_schedule}};
            c.values = {{"selected_delta", t.delta_sel->selected ? Json(t.delta_sel->scan[*t.delta_sel->selected].delta) : Json(nullptr)},
                        {"unmollified_integral", t.delta_sel->unmollified_integral}, {"scan", scan}};
            c.pass = t.delta_sel->selected.has_value();
        } else {
            c.values = {{"reason", "no N selected"}};
        }
    }
    if (t.delta_sel) {
        const TailFunction& v = *t.delta_sel->v;
        GridSpec g = GridSpec::covering({-1.0, -1.0}, {1.0, 1.0}, 1.0 / 128.0, 0);
        write_grid_csv(out_path(cfg, "tail_v.csv"), sample_field(g, [&](Vec2 x) { return v.value(x); }));
    }
}

void verify_corollary(Context& ctx, Report& rep)
{
    const RunConfig& cfg = ctx.config();
    TailState& t = ctx.tail(rep);
    if (!t.delta_sel) {
        Check& c = rep.add("corollary.delta0", "conformal deformation shortens the minimal tree");
        c.values = {{"reason", "no N selected"}};
        return;
    }
    const TailFunction& v = *t.delta_sel->v;
    const SteinerTree T = tail_tree(cfg.tail_K);
    std::optional<double> delta0;
    {
        Stopwatch sw;
        Check& c = rep.add("corollary.delta0", "conformal deformation shortens the minimal tree");
        const Delta0Scan d = find_delta0(v, T, log_delta_scan(1.0, 20));
        Json scan = Json::array();
        for (const auto& [dl, diff] : d.scan) scan.push_back({{"delta", dl}, {"length_change", diff}});
        c.inputs = {{"mollifier_delta", v.delta}, {"scan_max", 1.0}, {"scan_count", 20}};
        c.values = {{"delta0", d.delta0 ? Json(*d.delta0) : Json(nullptr)}, {"scan", scan}};
        c.pass = d.delta0.has_value();
        delta0 = d.delta0;
        c.seconds = sw.seconds();
    }
    {
        Stopwatch sw;
        Check& c = rep.add("corollary.half_delta0", "at delta0 / 2 the tree is shorter and curvature is nonpositive");
        if (delta0) {
            const double d = 0.5 * *delta0;
            const ConformalMetric g = ConformalMetric::tail(v, d);
            const double L0 = curve_length(ConformalMetric::from_function([](Vec2) { return 0.0; }), T);
            const double L = curve_length(g, T);
            const CurvatureField K = gaussian_curvature(g, {}, [](Vec2 x) { return norm(x) < 1.0; });
            double kmax = -kInf, kabs = 0.0;
            for (std::size_t k = 0; k < K.K.values.size(); ++k)
                if (K.K.mask[k] == NodeKind::Interior) {
                    kmax = std::max(kmax, K.K.values[k]);
                    kabs = std::max(kabs, std::abs(K.K.values[k]));
                }
            c.inputs = {{"delta", d}};
            c.values = {{"length", L}, {"flat_length", L0}, {"max_curvature", kmax}, {"curvature_scale", kabs}};
            c.margins = {{"shortening", L0 - L}, {"curvature", 1e-8 * kabs - kmax}};
            c.pass = L < L0 && kmax <= 1e-8 * kabs;
        } else {
            c.values = {{"reason", "no delta0"}};
        }
        c.seconds = sw.seconds();
    }
    {
        Stopwatch sw;
        Check& c = rep.add("corollary.length_derivative", "first variation of tree length equals the tree integral of v");
        const LengthDerivative ld = length_derivative_check(v, T);
        const double rel = std::abs(ld.lhs - ld.rhs) / std::abs(ld.rhs);
        c.values = {{"dL_ddelta", ld.lhs}, {"tree_integral", ld.rhs}, {"relative_error", rel}};
        c.margins = {{"relative", 1e-6 - rel}};
        c.pass = rel <= 1e-6;
        c.seconds = sw.seconds();
    }
    {
        Stopwatch sw;
        Check& c = rep.add("conformal.poincare", "Poincare disc factor has curvature -1");
        double err[2];
        const double hs[2] = {1.0 / 256.0, 1.0 / 512.0};
        for (int k = 0; k < 2; ++k) {
            const ConformalMetric g = ConformalMetric::from_function([](Vec2 p) { return std::log(2.0 / (1.0 - dot(p, p))); });
            const CurvatureField K = gaussian_curvature(g, GridSpec::covering({-1, -1}, {1, 1}, hs[k], 2),
                                                        [](Vec2 p) { return norm(p) < 0.95; });
            err[k] = 0.0;
            for (std::size_t i = 0; i < K.K.values.size(); ++i)
                if (K.K.mask[i] == NodeKind::Interior) err[k] = std::max(err[k], std::abs(K.K.values[i] + 1.0));
        }
        c.inputs = {{"h", {hs[0], hs[1]}}, {"radius", 0.95}};
        c.values = {{"max_error", err[0]}, {"max_error_half_h", err[1]}, {"ratio", err[1] / err[0]}};
        c.margins = {{"error", 1e-3 - err[0]}};
        c.pass = err[0] <= 1e-3;
        c.seconds = sw.seconds();
    }
    {
        Stopwatch sw;
        Check& c = rep.add("conformal.scaling", "adding c to the factor scales lengths by e^c");
        const ConformalMetric g = ConformalMetric::tail(v, 1e-3);
        double worst = 0.0;
        for (double s : {-0.5, 0.3, 0.7}) {
            const double ratio = curve_length(g.shifted(s), T) / curve_length(g, T);
            worst = std::max(worst, std::abs(ratio / std::exp(s) - 1.0));
        }
        c.values = {{"max_relative_error", worst}};
        c.margins = {{"relative", 1e-12 - worst}};
        c.pass = worst <= 1e-12;
        c.seconds = sw.seconds();
    }
}

void verify_g1(Context& ctx, Report& rep)
{
    const RunConfig& cfg = ctx.config();
    Stopwatch sw;
    Check& c = rep.add("g1.curvature", "negative curvature inside the bumps, flat outside");
    const int n_max = n_max_or(cfg, 3);
    const StepOneMetric g = build_g1(n_max);
    const CurvatureField K = gaussian_curvature(g.metric());
    std::vector<double> kin(n_max, -kInf);
    std::vector<std::size_t> nin(n_max, 0);
    double kout = 0.0, kabs = 0.0;
    for (std::size_t k = 0; k < K.K.values.size(); ++k) {
        if (K.K.mask[k] != NodeKind::Interior) continue;
        const Vec2 p = K.K.spec.node(k);
        const double v = K.K.values[k];
        kabs = std::max(kabs, std::abs(v));
        bool inside = false;
        for (int n = 0; n < n_max; ++n)
            if (norm(p - g.centers[n]) < g.radii[n]) {
                kin[n] = std::max(kin[n], v);
                ++nin[n];
                inside = true;
            }
        if (!inside && !g.in_bump(p, 2.0 * K.h)) kout = std::max(kout, std::abs(v));
    }
    bool ok = true;
    Json bumps = Json::array();
    for (int n = 0; n < n_max; ++n) {
        bumps.push_back({{"n", n + 1}, {"nodes", nin[n]}, {"max_curvature", kin[n]}});
        ok = ok && nin[n] > 0 && kin[n] < 0.0;
    }
    c.inputs = {{"n_max", n_max}, {"h", K.h}, {"lambda", g.lambda}};
    c.values = {{"bumps", bumps}, {"max_abs_outside", kout}, {"scale", kabs}, {"cg_iterations", g.stats.iterations},
                {"relative_residual", g.stats.relative_residual}};
    c.margins = {{"outside", 1e-8 * kabs - kout}};
    c.pass = ok && kout <= 1e-8 * kabs;
    c.seconds = sw.seconds();
    write_grid_csv(out_path(cfg, "g1_curvature.csv"), subsample(K.K, 4));
}

void verify_annulus(Context& ctx, Report& rep)
{
    const RunConfig& cfg = ctx.config();
    const int n_max = n_max_or(cfg, 8);
    Stopwatch sw;
    const MuSchedule mu = measure_mu_schedule(n_max);
    {
        Check& c = rep.add("annulus.mu_schedule", "cutoff tails are summable in C^4");
        Json rows = Json::array();
        double worst = kInf;
        for (int n = 1; n <= n_max; ++n) {
            const double b = mu.mu[n - 1] * mu.c4[n - 1];
            rows.push_back({{"n", n}, {"mu", mu.mu[n - 1]}, {"c4", mu.c4[n - 1]}, {"product", b}});
            worst = std::min(worst, std::ldexp(1.0, -n) - b);
        }
        c.inputs = {{"n_max", n_max}, {"h", mu.h}};
        c.values = {{"schedule", rows}};
        c.margins = {{"min_bound_gap", worst}};
        c.pass = worst >= 0.0;
        c.seconds = sw.seconds();
    }
    std::vector<double> eta(n_max);
    for (int n = 0; n < n_max; ++n) eta[n] = cfg.annulus_eta[std::min<std::size_t>(n, cfg.annulus_eta.size() - 1)];
    Stopwatch s2;
    const AnnulusStack st = build_annulus_stack(eta, n_max, mu);
    {
        Check& c = rep.add("annulus.curvature", "negative curvature on the annuli");
        Json rows = Json::array();
        bool ok = true;
        const int rings = std::min(6, n_max);
        for (int n = 1; n <= rings; ++n) {
            double kmx = -kInf;
            const double ri = 1.0 / (n + 1), ro = 1.0 / n;
            for (int a = 1; a <= 7; ++a)
                for (int b = 0; b < 16; ++b) {
                    const double r = ri + (ro - ri) * a / 8.0;
                    kmx = std::max(kmx, st.curvature({r * std::cos(b * kPi / 8.0), r * std::sin(b * kPi / 8.0)}));
                }
            rows.push_back({{"annulus", n}, {"max_curvature", kmx}});
            ok = ok && kmx < 0.0;
        }
        c.inputs = {{"n_max", n_max}, {"eta", eta}, {"samples_per_annulus", 112}};
        c.values = {{"annuli", rows}};
        c.pass = ok;
        c.seconds = s2.seconds();
    }
    {
        Stopwatch s3;
        Check& c = rep.add("annulus.origin_flatness", "factor derivatives vanish at the origin");
        const std::vector<double> od = origin_derivatives([&](Vec2 p) { return st.factor(p); });
        const double worst = *std::max_element(od.begin() + 1, od.end());
        c.values = {{"derivatives", std::vector<double>(od.begin() + 1, od.end())}, {"curvature_at_origin", st.curvature({0.0, 0.0})}};
        c.margins = {{"max", 1e-8 - worst}};
        c.pass = worst <= 1e-8;
        c.seconds = s3.seconds();
    }
}

void verify_ruled(Context& ctx, Report& rep)
{
    const RunConfig& cfg = ctx.config();
    const double tau = cfg.ruled_tau;
    const GridSpec spec = pi_grid(0.01);
    {
        Stopwatch sw;
        Check& c = rep.add("ruled.cylinder_round_trip", "rulings of the cylinder are recovered exactly");
        const RuledGenerator g = RuledGenerator::cylinder(tau);
        const RuledSurface r = extract_rulings(sample_graph(g, spec));
        double err = 0.0;
        for (std::size_t i = 0; i < r.s.size(); ++i)
            err = std::max({err, (r.c[i] - g.c(r.s[i])).norm(), (r.d[i] - g.d(r.s[i])).norm()});
        c.values = {{"max_error", err}, {"levels", r.s.size()}};
        c.margins = {{"error", 1e-10 - err}};
        c.pass = err <= 1e-10;
        c.seconds = sw.seconds();
    }
    {
        Stopwatch sw;
        Check& c = rep.add("ruled.extension", "flat concave extension with curvature approaching the cylinder's");
        Json rows = Json::array();
        double prev_dev = kInf, dev_025 = kInf, worst_det = 0.0;
        bool decreasing = true, concave = true;
        for (double eps : {0.1, 0.05, 0.025}) {
            const RuledGenerator g = RuledGenerator::random(tau, eps, cfg.seed);
            const FlatGraph f = sample_graph(g, spec);
            const GraphHypotheses hyp = check_hypotheses(f);
            const RuledSurface r = extract_rulings(f);
            double round_trip = 0.0;
            for (std::size_t i = 0; i < r.s.size(); ++i)
                round_trip = std::max({round_trip, (r.c[i] - g.c(r.s[i])).norm(), (r.d[i] - g.d(r.s[i])).norm()});
            const RuledSurface e = extend_ruled(r);
            double kdev = 0.0, det = 0.0;
            for (std::size_t i = 2; i + 2 < e.s.size(); ++i)
                for (int k = 0; k <= 12; ++k) {
                    const double t = -1.0 + 0.25 * k;
                    const FundamentalForms F = second_fundamental_form(e, t, i);
                    const double ex = -tau / std::pow(1.0 + e.s[i] * e.s[i], 1.5);
                    kdev = std::max(kdev, std::abs(F.principal() - ex) / std::abs(ex));
                    det = std::max(det, std::abs(F.II.determinant()) / F.II.norm());
                }
            const ConcavityReport cc = concavity_check(e);
            rows.push_back({{"eps", eps}, {"hypothesis_deviation", hyp.max_deviation}, {"flat", hyp.flat},
                            {"round_trip", round_trip}, {"fit_residual", r.fit_residual},
                            {"independence_spread", r.independence_spread}, {"kappa_relative_deviation", kdev},
                            {"det_II_relative", det}, {"concavity_max", cc.max_value}, {"concave", cc.concave}});
            decreasing = decreasing && kdev < prev_dev;
            prev_dev = kdev;
            dev_025 = kdev;
            worst_det = std::max(worst_det, det);
            concave = concave && cc.concave;
        }
        c.inputs = {{"tau", tau}, {"seed", cfg.seed}, {"h", spec.h}};
        c.values = {{"per_eps", rows}, {"deviation_decreasing", decreasing}};
        c.margins = {{"kappa", 0.2 - dev_025}, {"det_II", 1e-8 - worst_det}};
        c.pass = decreasing && dev_025 <= 0.2 && worst_det <= 1e-8 && concave;
        c.seconds = sw.seconds();
    }
    {
        Stopwatch sw;
        Check& c = rep.add("ruled.comparison", "graphs with det D^2 w <= 0 agreeing on F lie above the extension");
        const GridSpec pspec = pi_grid(0.02, 0.0, 0.0);
        double worst = kInf;
        int satisfied = 0, flagged = 0;
        for (int k = 0; k < 20; ++k) {
            const RuledGenerator g = RuledGenerator::random(tau, 0.05, cfg.seed + 100 + k);
            const RuledSurface e = extend_ruled(extract_rulings(sample_graph(g, spec)));
            const FlatGraph fe = sample_extension(e, pspec, tau, 0.05);
            const double eta = 0.01 + 0.01 * (k % 10);
            const ComparisonResult res = comparison_check(fe, comparison_instance(g, pspec, eta), 1e-9);
            const ComparisonResult bad = comparison_check(fe, comparison_instance(g, pspec, -eta), 1e-9);
            if (res.hypothesis_ok) {
                ++satisfied;
                worst = std::min(worst, res.margin);
            }
            flagged += !bad.hypothesis_ok;
        }
        c.inputs = {{"instances", 20}, {"eps", 0.05}, {"seed", cfg.seed + 100}};
        c.values = {{"hypothesis_satisfied", satisfied}, {"violations_flagged", flagged}, {"min_margin", worst}};
        c.margins = {{"margin", worst + 1e-8}};
        c.pass = satisfied == 20 && flagged == 20 && worst >= -1e-8;
        c.seconds = sw.seconds();
    }
    {
        Stopwatch sw;
        Check& c = rep.add("ruled.projection", "nearest-point projection onto the concave surface shortens curves");
        const RuledGenerator g = RuledGenerator::random(tau, 0.05, cfg.seed);
        const RuledSurface r = ruled_from_generator(g, -1.5, 1.5, 301, -1.0, 2.0);
        double slack = kInf;
        for (int k = 0; k < 50; ++k) {
            const ProjectionResult p = project_and_compare(lifted_curve(r, cfg.seed + 1000 + k), r);
            slack = std::min(slack, p.len_curve - p.len_projected);
        }
        c.inputs = {{"curves", 50}, {"seed", cfg.seed + 1000}};
        c.values = {{"min_length_gap", slack}};
        c.margins = {{"gap", slack + 1e-8}};
        c.pass = slack >= -1e-8;
        c.seconds = sw.seconds();
        write_surface_csv(out_path(cfg, "ruled_surface.csv"), r, {tau, 0.05, cfg.seed, -1.0, 2.0});
    }
}

Report run_verify(const std::string& target, const RunConfig& cfg)
{
    Report rep("verify", target);
    rep.set_config(config_json(cfg));
    Context ctx(cfg);
    const bool all = target == "all";
    if (all || target == "moon") verify_moon(ctx, rep);
    if (all || target == "tail") verify_tail(ctx, rep);
    if (all || target == "corollary") verify_corollary(ctx, rep);
    if (all || target == "g1") verify_g1(ctx, rep);
    if (all || target == "annulus") verify_annulus(ctx, rep);
    if (all || target == "ruled") verify_ruled(ctx, rep);
    if (rep.checks().empty()) throw ConfigError("unknown verify target '" + target + "'");
    return rep;
}

fs::path run_assemble(const std::string& target, const RunConfig& cfg)
{
    Json m;
    m["target"] = target;
    m["config"] = config_json(cfg);
    Json files = Json::array();
    auto emit = [&](const std::string& name, const ScalarField& f) {
        write_grid_csv(out_path(cfg, name), f);
        files.push_back(name);
    };
    if (target == "g1") {
        const int n_max = n_max_or(cfg, 3);
        const StepOneMetric g = build_g1(n_max);
        const CurvatureField K = gaussian_curvature(g.metric());
        emit("g1_factor.csv", subsample(g.u1, 4));
        emit("g1_curvature.csv", subsample(K.K, 4));
        Json bumps = Json::array();
        for (int n = 0; n < n_max; ++n)
            bumps.push_back({{"n", n + 1}, {"center", {g.centers[n].x, g.centers[n].y}}, {"radius", g.radii[n]}});
        m["n_max"] = n_max;
        m["lambda"] = g.lambda;
        m["bumps"] = bumps;
        m["stride"] = 4;
    } else if (target == "annulus") {
        const int n_max = n_max_or(cfg, 8);
        const MuSchedule mu = measure_mu_schedule(n_max);
        std::vector<double> eta(n_max);
        for (int n = 0; n < n_max; ++n) eta[n] = cfg.annulus_eta[std::min<std::size_t>(n, cfg.annulus_eta.size() - 1)];
        const AnnulusStack st = build_annulus_stack(eta, n_max, mu);
        const GridSpec g = GridSpec::covering({-1.0, -1.0}, {1.0, 1.0}, 1.0 / 128.0, 0);
        emit("annulus_factor.csv", sample_field(g, [&](Vec2 x) { return st.factor(x); }));
        emit("annulus_curvature.csv", sample_field(g, [&](Vec2 x) { return st.curvature(x); }));
        Json rows = Json::array();
        for (int n = 0; n < n_max; ++n) rows.push_back({{"n", n + 1}, {"mu", mu.mu[n]}, {"eta", eta[n]}});
        Json planted = Json::array();
        for (const PlantedBump& b : st.bumps)
            planted.push_back({{"center", {b.center.x, b.center.y}}, {"radius", b.radius}, {"sigma", b.sigma}});
        m["n_max"] = n_max;
        m["schedule"] = rows;
        m["planted"] = planted;
    } else if (target == "gII") {
        Report scratch("assemble", target);
        Context ctx(cfg);
        TailState& t = ctx.tail(scratch);
        if (!t.delta_sel) throw ResolutionError("assemble gII: no N selected for the tail");
        const TailFunction& v = *t.delta_sel->v;
        const int n_max = n_max_or(cfg, 3);
        const BumpSchedule s = build_bump_schedule(v, n_max);
        const GridSpec g = GridSpec::covering({0.0, -0.1}, {0.6, 0.3}, 1.0 / 512.0, 0);
        const ScalarField phi = sample_field(g, [&](Vec2 x) { return eval_gII_factor(s, v, x); });
        emit("gII_factor.csv", phi);
        emit("gII_curvature.csv", gaussian_curvature(ConformalMetric::from_samples(phi)).K);
        Json rows = Json::array();
        for (int n = 0; n < n_max; ++n)
            rows.push_back({{"n", n + 1}, {"z", {s.z[n].x, s.z[n].y}}, {"rho", s.rho[n]}, {"delta", s.delta[n]}, {"D", s.D[n]}});
        m["n_max"] = n_max;
        m["tail"] = {{"K", cfg.tail_K}, {"N", *t.n_sel.N}, {"delta", v.delta}};
        m["bumps"] = rows;
    } else {
        throw ConfigError("unknown assemble target '" + target + "'");
    }
    m["files"] = files;
    const fs::path path = out_path(cfg, target + "_manifest.json");
    write_atomic(path, m.dump(1) + "\n");
    return path;
}

} // namespace noembed::cli
