#include "shapeinv/fitter.hpp"

#include "shapeinv/forward_map.hpp"
#include "shapeinv/metrics.hpp"
#include "shapeinv/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace shapeinv {

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& body) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    unsigned t = threads > 0 ? static_cast<unsigned>(threads) : hw;
    t = std::min<unsigned>(t, n == 0 ? 1 : static_cast<unsigned>(n));
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Puts the f'-side transform values into Phi units: Laplace values are
// divided by z (the fitted equation reads integral e^{-zE} f' = z Phi), the
// z = 0 sample carrying a zero residual by construction.
void to_phi_units(const SampledInput& input, std::vector<double>& model) {
    if (input.kernel.family != KernelFamily::Laplace) return;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (input.sigma[i] == 0.0)
            model[i] = input.phi[i];
        else
            model[i] /= input.sigma[i];
    }
}

double weighted_sq(const SampledInput& input, const std::vector<double>& model) {
    double s = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) {
        const double r = input.phi[i] - model[i];
        s += input.weights[i] * r * r;
    }
    return s;
}

struct CellEval {
    ShapeAnsatz ansatz;
    double objective = kInf;
    bool ok = false;
};

// Builds the constrained ansatz for a parameter template: eliminates root 0
// for the normalization condition, then fixes C from the sum rule or by the
// closed-form least-squares amplitude.
CellEval evaluate_template(ShapeAnsatz a, const SampledInput& input,
                           const ScanConfig& cfg, double tol) {
    CellEval out;
    try {
        a.validate(cfg.sum_rule_active);
        a = eliminate_root(a, 0);
        if (cfg.sum_rule_active) {
            a = normalize_C(a, cfg.sum_rule_value);
            if (cfg.fprime_cap > 0.0) {
                for (double r : a.roots)
                    if (r > a.E_thr &&
                        std::abs(eval_f(a, r)) > cfg.fprime_cap)
                        return out;  // uniform-boundedness guard
            }
            auto model = apply_ktilde_on(a, input.kernel, input.sigma, tol);
            to_phi_units(input, model);
            out.objective = weighted_sq(input, model);
        } else {
            a.C = 1.0;
            auto u = apply_ktilde_on(a, input.kernel, input.sigma, tol);
            to_phi_units(input, u);
            if (input.kernel.family == KernelFamily::Laplace)
                for (std::size_t i = 0; i < u.size(); ++i)
                    if (input.sigma[i] == 0.0) u[i] = 0.0;  // no amplitude info
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                num += input.weights[i] * input.phi[i] * u[i];
                den += input.weights[i] * u[i] * u[i];
            }
            if (den == 0.0) return out;
            a.C = num / den;
            if (cfg.fprime_cap > 0.0) {
                for (double r : a.roots)
                    if (r > a.E_thr &&
                        std::abs(eval_f(a, r)) > cfg.fprime_cap)
                        return out;
            }
            std::vector<double> model(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) {
                model[i] = a.C * u[i];
                if (input.kernel.family == KernelFamily::Laplace &&
                    input.sigma[i] == 0.0)
                    model[i] = input.phi[i];
            }
            out.objective = weighted_sq(input, model);
        }
        out.ansatz = a;
        out.ok = std::isfinite(out.objective);
    } catch (const std::exception&) {
        out.ok = false;
    }
    return out;
}

ShapeAnsatz make_template(double ebar, double beta, const ScanConfig& cfg) {
    ShapeAnsatz a;
    a.Ebar = ebar;
    a.beta = beta;
    a.threshold_exponent = cfg.threshold_exponent;
    a.E_thr = cfg.E_thr;
    a.roots.assign(cfg.extrema, 0.0);
    // free roots (index > 0) spread over the scale; root 0 is eliminated
    for (int i = 1; i < cfg.extrema; ++i)
        a.roots[i] = cfg.E_thr + ebar * (static_cast<double>(i) + 0.5) /
                                     static_cast<double>(cfg.extrema);
    a.gamma_coeffs.assign(cfg.k_gamma, 0.0);
    return a;
}

double default_energy_scale(const SampledInput& input) {
    const auto& k = input.kernel;
    const double span = k.sigma_max - k.sigma_min;
    if (k.family == KernelFamily::Laplace) return 20.0 / span;
    return 0.5 * span;
}

std::vector<double> geom_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    const double r = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) g[i] = lo * std::exp(r * i);
    g.front() = lo;
    g.back() = hi;
    return g;
}

struct GridBounds {
    double ebar_lo, ebar_hi, beta_lo, beta_hi;
};

GridBounds initial_bounds(const SampledInput& input, const ScanConfig& cfg,
                          double beta_floor) {
    GridBounds b;
    const double scale = default_energy_scale(input);
    b.ebar_lo = cfg.ebar_min > 0.0 ? cfg.ebar_min : scale / 16.0;
    b.ebar_hi = cfg.ebar_max > 0.0 ? cfg.ebar_max : scale * 16.0;
    b.beta_lo = cfg.beta_min > 0.0 ? cfg.beta_min : beta_floor + 1.25;
    b.beta_hi = cfg.beta_max;
    if (!(b.ebar_lo < b.ebar_hi) || !(b.beta_lo < b.beta_hi))
        throw std::invalid_argument("grid_scan: empty grid bounds");
    if (b.beta_lo <= beta_floor)
        throw std::invalid_argument("grid_scan: beta grid below the moment floor");
    return b;
}

}  // namespace

double effective_quad_tol(const SampledInput& input, const ScanConfig& config) {
    if (config.quad_tol > 0.0) return config.quad_tol;
    double scale = config.sum_rule_active ? std::abs(config.sum_rule_value) : 0.0;
    if (scale == 0.0) scale = std::abs(input.sum_rule);
    if (scale == 0.0)
        for (double v : input.phi) scale = std::max(scale, std::abs(v));
    return 1e-11 * scale;
}

double objective(const ShapeAnsatz& a, const SampledInput& input,
                 double quad_tol) {
    input.validate();
    return weighted_sq(input, model_phi(a, input, quad_tol));
}

std::vector<double> model_phi(const ShapeAnsatz& a, const SampledInput& input,
                              double quad_tol) {
    auto values = apply_ktilde_on(a, input.kernel, input.sigma, quad_tol);
    if (input.kernel.family == KernelFamily::Laplace) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (input.sigma[i] == 0.0)
                values[i] = input.phi[i];  // residual defined as zero at z = 0
            else
                values[i] /= input.sigma[i];
        }
    }
    return values;
}

std::vector<double> fit_residuals(const ShapeAnsatz& a,
                                  const SampledInput& input, double quad_tol) {
    const auto model = model_phi(a, input, quad_tol);
    std::vector<double> r(model.size());
    for (std::size_t i = 0; i < model.size(); ++i)
        r[i] = (input.phi[i] - model[i]) / input.phi[i];
    return r;
}

std::vector<FitResult> grid_scan(const SampledInput& input,
                                 const ScanConfig& cfg) {
    input.validate();
    if (cfg.ebar_points < 2 || cfg.beta_points < 2)
        throw std::invalid_argument("grid_scan: need at least 2 points per axis");
    if (cfg.extrema < 1)
        throw std::invalid_argument("grid_scan: extrema count must be >= 1");
    const double nu = cfg.threshold_exponent;
    const double beta_floor =
        cfg.extrema + nu + (cfg.sum_rule_active ? 1.0 : 0.0);
    const double tol = effective_quad_tol(input, cfg);
    const GridBounds b0 = initial_bounds(input, cfg, beta_floor);

    // the scan stage always runs with gamma == 0
    ScanConfig scan_cfg = cfg;
    scan_cfg.k_gamma = 0;

    struct Entry {
        double ebar, beta, objective;
        ShapeAnsatz ansatz;
        bool ok;
    };
    std::vector<Entry> all;
    std::vector<FitResult::TracePoint> trace;

    // nested 1D beta scan at a fixed Ebar; refines around the best beta
    auto beta_nested = [&](double ebar, std::vector<FitResult::TracePoint>& tr) {
        Entry best{ebar, 0.0, kInf, {}, false};
        double lo = b0.beta_lo, hi = b0.beta_hi;
        for (int lvl = 0; lvl < std::max(cfg.beta_inner_levels, 1); ++lvl) {
            const auto bvals = geom_grid(lo, hi, cfg.beta_points);
            const double rb = std::log(hi / lo) / (cfg.beta_points - 1);
            const Entry* level_best = nullptr;
            std::vector<Entry> cells(bvals.size());
            for (std::size_t i = 0; i < bvals.size(); ++i) {
                auto cell = evaluate_template(
                    make_template(ebar, bvals[i], scan_cfg), input, scan_cfg,
                    tol);
                cells[i] = {ebar, bvals[i], cell.objective,
                            std::move(cell.ansatz), cell.ok};
                tr.push_back({ebar, bvals[i], cell.objective});
                const auto& c = cells[i];
                if (c.ok && (!level_best || c.objective < level_best->objective ||
                             (c.objective == level_best->objective &&
                              c.beta < level_best->beta)))
                    level_best = &cells[i];
            }
            if (!level_best) break;
            if (level_best->objective < best.objective ||
                (level_best->objective == best.objective &&
                 level_best->beta < best.beta))
                best = *level_best;
            lo = std::max(level_best->beta * std::exp(-rb),
                          beta_floor + 1e-6 * (1.0 + beta_floor));
            hi = level_best->beta * std::exp(rb);
        }
        return best;
    };

    double e_lo = b0.ebar_lo, e_hi = b0.ebar_hi;
    double p_lo = b0.beta_lo, p_hi = b0.beta_hi;
    for (int level = 0; level < std::max(cfg.levels, 1); ++level) {
        const auto evals = geom_grid(e_lo, e_hi, cfg.ebar_points);
        std::vector<Entry> cells;
        if (cfg.beta_inner_levels > 1) {
            cells.resize(evals.size());
            std::vector<std::vector<FitResult::TracePoint>> traces(evals.size());
            parallel_for(evals.size(), cfg.threads, [&](std::size_t idx) {
                cells[idx] = beta_nested(evals[idx], traces[idx]);
            });
            for (auto& t : traces)
                trace.insert(trace.end(), t.begin(), t.end());
        } else {
            const auto bvals = geom_grid(p_lo, p_hi, cfg.beta_points);
            cells.resize(evals.size() * bvals.size());
            parallel_for(cells.size(), cfg.threads, [&](std::size_t idx) {
                const double ebar = evals[idx / bvals.size()];
                const double beta = bvals[idx % bvals.size()];
                auto cell = evaluate_template(make_template(ebar, beta, scan_cfg),
                                              input, scan_cfg, tol);
                cells[idx] = {ebar, beta, cell.objective, std::move(cell.ansatz),
                              cell.ok};
            });
            for (const auto& c : cells) trace.push_back({c.ebar, c.beta, c.objective});
        }
        const Entry* best = nullptr;
        for (const auto& c : cells) {
            if (!c.ok) continue;
            if (!best || c.objective < best->objective ||
                (c.objective == best->objective &&
                 (c.ebar < best->ebar ||
                  (c.ebar == best->ebar && c.beta < best->beta))))
                best = &c;
        }
        if (!best)
            throw std::runtime_error("grid_scan: every grid cell failed");
        // next level: one previous cell on each side of the best point
        const double re = std::log(e_hi / e_lo) / (cfg.ebar_points - 1);
        const double rb = std::log(p_hi / p_lo) / (cfg.beta_points - 1);
        const double best_ebar = best->ebar;
        const double best_beta = best->beta;
        all.insert(all.end(), std::make_move_iterator(cells.begin()),
                   std::make_move_iterator(cells.end()));
        e_lo = best_ebar * std::exp(-re);
        e_hi = best_ebar * std::exp(re);
        if (cfg.beta_inner_levels <= 1) {
            p_lo = std::max(best_beta * std::exp(-rb),
                            beta_floor + 1e-6 * (1.0 + beta_floor));
            p_hi = best_beta * std::exp(rb);
        }
    }

    std::stable_sort(all.begin(), all.end(), [](const Entry& x, const Entry& y) {
        if (x.ok != y.ok) return x.ok;
        if (x.objective != y.objective) return x.objective < y.objective;
        if (x.ebar != y.ebar) return x.ebar < y.ebar;
        return x.beta < y.beta;
    });

    std::vector<FitResult> seeds;
    const int k = std::max(cfg.top_k, 1);
    for (const auto& e : all) {
        if (!e.ok) break;
        if (static_cast<int>(seeds.size()) >= k) break;
        FitResult r;
        r.ansatz = e.ansatz;
        r.objective = e.objective;
        r.grid_only = true;
        r.converged = true;
        seeds.push_back(std::move(r));
    }
    if (seeds.empty()) throw std::runtime_error("grid_scan: no usable seed");
    seeds.front().scan_trace = std::move(trace);
    return seeds;
}

// ---------------------------------------------------------------------------
// local refinement
// ---------------------------------------------------------------------------

namespace {

struct Parametrization {
    double beta_floor;
    int n_free_roots;
    int k_gamma;

    int size() const { return 2 + n_free_roots + k_gamma; }

    std::vector<double> pack(const ShapeAnsatz& a) const {
        std::vector<double> x(size());
        x[0] = std::log(a.Ebar);
        x[1] = std::log(a.beta - beta_floor);
        for (int i = 0; i < n_free_roots; ++i) x[2 + i] = a.roots[i + 1];
        for (int i = 0; i < k_gamma; ++i)
            x[2 + n_free_roots + i] =
                i < static_cast<int>(a.gamma_coeffs.size()) ? a.gamma_coeffs[i]
                                                            : 0.0;
        return x;
    }

    ShapeAnsatz unpack(const std::vector<double>& x, const ShapeAnsatz& like) const {
        ShapeAnsatz a = like;
        a.Ebar = std::exp(x[0]);
        a.beta = beta_floor + std::exp(x[1]);
        a.roots.resize(n_free_roots + 1);
        for (int i = 0; i < n_free_roots; ++i) a.roots[i + 1] = x[2 + i];
        a.gamma_coeffs.assign(k_gamma, 0.0);
        for (int i = 0; i < k_gamma; ++i)
            a.gamma_coeffs[i] = x[2 + n_free_roots + i];
        return a;
    }
};

// Brent line minimization on a bracket (a < b < c with f(b) < f(a), f(c)).
template <typename F>
std::pair<double, double> brent_min(F&& f, double ax, double bx, double cx,
                                    double fb, int max_iter = 60) {
    constexpr double cgold = 0.3819660112501051;
    const double eps = 1e-12;
    double a = std::min(ax, cx), b = std::max(ax, cx);
    double x = bx, w = bx, v = bx;
    double fx = fb, fw = fb, fv = fb;
    double d = 0.0, e = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const double xm = 0.5 * (a + b);
        const double tol1 = eps * std::abs(x) + 1e-300;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
        bool golden = true;
        if (std::abs(e) > tol1) {
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double etemp = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * etemp) && p > q * (a - x) &&
                p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2)
                    d = std::copysign(tol1, xm - x);
                golden = false;
            }
        }
        if (golden) {
            e = x >= xm ? a - x : b - x;
            d = cgold * e;
        }
        const double u = std::abs(d) >= tol1 ? x + d : x + std::copysign(tol1, d);
        const double fu = f(u);
        if (fu <= fx) {
            if (u >= x) a = x; else b = x;
            v = w; w = x; x = u;
            fv = fw; fw = fx; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; w = u; fv = fw; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return {x, fx};
}

// minimize t -> F(x + t d); returns (t, F) with F <= F(0)
template <typename F>
std::pair<double, double> line_minimize(F&& fn, double f0) {
    double t1 = 1.0;
    double f1 = fn(t1);
    int guard = 0;
    while (f1 >= f0 && guard++ < 60) {
        t1 *= 0.25;
        if (t1 < 1e-14) return {0.0, f0};
        f1 = fn(t1);
    }
    // expand until the objective turns back up
    double t2 = t1 * 2.618;
    double f2 = fn(t2);
    guard = 0;
    while (f2 < f1 && guard++ < 60) {
        t1 = t2; f1 = f2;
        t2 *= 2.618;
        f2 = fn(t2);
    }
    auto [t, f] = brent_min(fn, 0.0, t1, t2, f1);
    if (f < f0) return {t, f};
    return {0.0, f0};
}

}  // namespace

FitResult refine(const FitResult& seed, const SampledInput& input,
                 const ScanConfig& cfg) {
    if (cfg.skip_refine) return seed;
    input.validate();
    const double tol = effective_quad_tol(input, cfg);
    const double nu = cfg.threshold_exponent;
    Parametrization par{cfg.extrema + nu + (cfg.sum_rule_active ? 1.0 : 0.0),
                        cfg.extrema - 1, cfg.k_gamma};

    ShapeAnsatz like = seed.ansatz;
    like.gamma_coeffs.resize(cfg.k_gamma, 0.0);
    std::vector<double> x = par.pack(like);

    ShapeAnsatz best_ansatz = seed.ansatz;
    double best_f = seed.objective;

    auto eval_x = [&](const std::vector<double>& xv) -> double {
        ShapeAnsatz a = par.unpack(xv, like);
        auto cell = evaluate_template(std::move(a), input, cfg, tol);
        if (!cell.ok) return kInf;
        if (cell.objective < best_f) {
            best_f = cell.objective;
            best_ansatz = cell.ansatz;
        }
        return cell.objective;
    };

    const int n = par.size();
    double fx = eval_x(x);
    if (!std::isfinite(fx)) fx = kInf;

    auto grad = [&](const std::vector<double>& xv) {
        std::vector<double> g(n);
        for (int i = 0; i < n; ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(xv[i]));
            auto xp = xv; xp[i] += h;
            auto xm = xv; xm[i] -= h;
            const double fp = eval_x(xp);
            const double fm = eval_x(xm);
            g[i] = (fp - fm) / (2.0 * h);
        }
        return g;
    };

    FitResult out = seed;
    out.grid_only = false;
    out.converged = false;

    std::vector<double> g = grad(x), d(n);
    for (int i = 0; i < n; ++i) d[i] = -g[i];

    for (int iter = 0; iter < cfg.max_refine_iterations; ++iter) {
        auto along = [&](double t) {
            auto xt = x;
            for (int i = 0; i < n; ++i) xt[i] += t * d[i];
            return eval_x(xt);
        };
        auto [t, ft] = line_minimize(along, fx);
        double step = 0.0, xnorm = 0.0;
        for (int i = 0; i < n; ++i) {
            step += t * d[i] * t * d[i];
            xnorm += x[i] * x[i];
            x[i] += t * d[i];
        }
        step = std::sqrt(step);
        xnorm = std::sqrt(xnorm);
        const double decrease = fx - ft;
        fx = ft;
        if (decrease <= 1e-12 * std::max(std::abs(fx), 1e-300) ||
            step <= 1e-10 * (1.0 + xnorm)) {
            out.converged = true;
            break;
        }
        auto gn = grad(x);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n; ++i) {
            num += gn[i] * (gn[i] - g[i]);
            den += g[i] * g[i];
        }
        const double beta_pr = den > 0.0 ? std::max(0.0, num / den) : 0.0;
        double descent = 0.0;
        for (int i = 0; i < n; ++i) {
            d[i] = -gn[i] + beta_pr * d[i];
            descent += d[i] * gn[i];
        }
        if (!(descent < 0.0))
            for (int i = 0; i < n; ++i) d[i] = -gn[i];
        g = std::move(gn);
    }

    out.ansatz = best_ansatz;
    out.objective = best_f;
    if (!(best_f <= seed.objective)) {  // never worse than the seed
        out.ansatz = seed.ansatz;
        out.objective = seed.objective;
    }
    return out;
}

FitResult fit(const SampledInput& input, const ScanConfig& cfg) {
    auto seeds = grid_scan(input, cfg);
    auto trace = std::move(seeds.front().scan_trace);
    FitResult best;
    bool have = false;
    for (auto& s : seeds) {
        FitResult r = refine(s, input, cfg);
        if (!have || r.objective < best.objective ||
            (r.objective == best.objective &&
             (r.ansatz.Ebar < best.ansatz.Ebar ||
              (r.ansatz.Ebar == best.ansatz.Ebar &&
               r.ansatz.beta < best.ansatz.beta)))) {
            best = std::move(r);
            have = true;
        }
    }
    best.scan_trace = std::move(trace);
    const double tol = effective_quad_tol(input, cfg);
    best.residuals = fit_residuals(best.ansatz, input, tol);
    double ss = 0.0;
    for (double r : best.residuals) ss += r * r;
    best.chi_fit = std::sqrt(ss / static_cast<double>(best.residuals.size()));
    if (count_sign_changes(best.ansatz, best.ansatz.E_thr,
                           std::numeric_limits<double>::infinity()) !=
        cfg.extrema)
        best.converged = false;
    return best;
}

}  // namespace shapeinv
