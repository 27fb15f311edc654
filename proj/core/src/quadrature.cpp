#include "shapeinv/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shapeinv {

namespace {

// Gauss-Kronrod (7,15) abscissae and weights on [-1,1] (QUADPACK dqk15).
// Even-index abscissae carry the embedded 7-point Gauss rule.
constexpr int kGK = 8;
constexpr double kXgk[kGK] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[kGK] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Gk15 {
    double integral;
    double error;
    double resabs;  // integral of |f|, the round-off reference scale
};

template <typename Eval>
Gk15 gk15(Eval&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    double resabs = kWgk[7] * std::abs(fc);
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    resk *= h;
    resg *= h;
    resabs *= std::abs(h);
    return {resk, std::abs(resk - resg), resabs};
}

// below this the error estimate is round-off, not truncation
inline double rounding_floor(double resabs) { return 5e-15 * resabs; }

struct Accum {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
    long evaluations = 0;
};

// Globally adaptive worklist: always bisect the segment with the largest
// error until the summed error meets the tolerance, every remaining segment
// is round-off limited, or the budget runs out. Deterministic: the worst
// segment is chosen by (error desc, left end asc).
template <typename Eval>
void adapt_global(Eval&& f, double a, double b, double tol, int max_segments,
                  Accum& acc) {
    struct Seg {
        double a, b;
        Gk15 r;
        bool improvable;
    };
    std::vector<Seg> segs;
    auto make_seg = [&](double lo, double hi) {
        Gk15 r = gk15(f, lo, hi);
        acc.evaluations += 15;
        const double mid = 0.5 * (lo + hi);
        const bool splittable = mid > lo && mid < hi;
        const bool rounded_out = r.error <= rounding_floor(r.resabs);
        return Seg{lo, hi, r, splittable && !rounded_out};
    };
    segs.push_back(make_seg(a, b));
    for (;;) {
        double err_total = 0.0;
        const Seg* worst = nullptr;
        for (const auto& s : segs) {
            err_total += s.r.error;
            if (!s.improvable) continue;
            if (!worst || s.r.error > worst->r.error ||
                (s.r.error == worst->r.error && s.a < worst->a))
                worst = &s;
        }
        if (err_total <= tol) break;
        if (!worst) {
            // every segment is round-off limited or unsplittable; accept if
            // the leftover error is indeed at the rounding scale
            double floor_total = 0.0;
            for (const auto& s : segs)
                floor_total += rounding_floor(s.r.resabs);
            if (err_total > std::max(tol, 2.0 * floor_total))
                acc.converged = false;
            break;
        }
        if (static_cast<int>(segs.size()) >= max_segments) {
            acc.converged = false;
            break;
        }
        Seg picked = *worst;
        segs.erase(segs.begin() + (worst - segs.data()));
        const double mid = 0.5 * (picked.a + picked.b);
        segs.push_back(make_seg(picked.a, mid));
        segs.push_back(make_seg(mid, picked.b));
    }
    // sum in a fixed order for bitwise reproducibility
    std::sort(segs.begin(), segs.end(),
              [](const Seg& x, const Seg& y) { return x.a < y.a; });
    for (const auto& s : segs) {
        acc.value += s.r.integral;
        acc.error += s.r.error;
    }
}

// Exponent q of the substitution E = lower + t^q that regularizes an
// integrand behaving like (E-lower)^(p-1): transformed behavior t^(q*p-1).
int threshold_map_exponent(double p) {
    if (p >= 1.0 && p == std::floor(p)) return 1;
    if (p >= 0.5) return 2;
    int q = static_cast<int>(std::ceil(1.0 / p));
    return q + (q % 2);
}

struct Panel {
    double a, b;        // in the panel's own variable
    int map;            // 0 identity, 1 threshold power map, 2 tail map
    int power = 1;      // threshold map exponent
    double origin = 0;  // E offset for maps
    double scale = 1;   // tail map scale
};

std::vector<Panel> build_panels(const SemiInfiniteDomain& dom) {
    if (dom.tail_scale <= 0.0)
        throw std::invalid_argument("semi-infinite quadrature: tail_scale must be > 0");
    std::vector<double> splits(dom.splits.begin(), dom.splits.end());
    std::erase_if(splits, [&](double s) { return !(s > dom.lower); });
    std::sort(splits.begin(), splits.end());
    splits.erase(std::unique(splits.begin(), splits.end()), splits.end());

    double tail_start = dom.tail_start;
    if (tail_start <= dom.lower) tail_start = dom.lower + 4.0 * dom.tail_scale;
    if (!splits.empty()) tail_start = std::max(tail_start, splits.back());
    splits.erase(std::remove_if(splits.begin(), splits.end(),
                                [&](double s) { return s >= tail_start; }),
                 splits.end());

    std::vector<Panel> panels;
    const int q = threshold_map_exponent(dom.threshold_exponent);
    double first_end = splits.empty() ? tail_start : splits.front();
    first_end = std::min(first_end, std::min(dom.lower + dom.tail_scale, tail_start));
    if (first_end > dom.lower) {
        if (q == 1) {
            panels.push_back({dom.lower, first_end, 0});
        } else {
            panels.push_back({0.0, std::pow(first_end - dom.lower, 1.0 / q), 1, q, dom.lower});
        }
    }
    double prev = first_end;
    for (double s : splits) {
        if (s > prev) panels.push_back({prev, s, 0});
        prev = std::max(prev, s);
    }
    if (tail_start > prev) panels.push_back({prev, tail_start, 0});
    panels.push_back({0.0, 1.0, 2, 1, tail_start, dom.tail_scale});
    return panels;
}

// Wraps the user's integrand in the panel's change of variables. Exact
// endpoints of the maps (t = 0, u = 1) can be reached by rounding in deep
// subdivisions; the transformed integrand tends to zero there for any
// integrable input, so they evaluate to zero rather than touching the
// original integrand outside its domain.
template <typename Body>
auto panel_integrand(const Panel& p, Body&& body) {
    return [&p, body = std::forward<Body>(body)](double t) -> double {
        switch (p.map) {
            case 1: {
                if (t <= 0.0) return 0.0;
                const double tq = std::pow(t, p.power - 1);
                const double e = p.origin + tq * t;
                if (e <= p.origin) return 0.0;
                return body(e) * p.power * tq;
            }
            case 2: {
                const double om = 1.0 - t;
                if (om <= 0.0) return 0.0;
                const double jac = p.scale / (om * om);
                return body(p.origin + p.scale * t / om) * jac;
            }
            default:
                return body(t);
        }
    };
}

int segment_budget(int max_depth) {
    return 1 << std::clamp(max_depth, 3, 12);
}

}  // namespace

double QuadratureResult::require() const {
    if (!converged)
        throw std::runtime_error("quadrature did not converge: best estimate " +
                                 std::to_string(value) + " +- " +
                                 std::to_string(error_estimate));
    return value;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_depth) {
    Accum acc;
    if (a == b) return {0.0, 0.0, true, 0};
    adapt_global(f, a, b, abs_tol, segment_budget(max_depth), acc);
    return {acc.value, acc.error, acc.converged, acc.evaluations};
}

QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         const SemiInfiniteDomain& dom,
                                         double abs_tol, int max_depth) {
    const auto panels = build_panels(dom);
    const double tol = abs_tol / static_cast<double>(panels.size());
    QuadratureResult total;
    for (const auto& p : panels) {
        Accum acc;
        adapt_global(panel_integrand(p, f), p.a, p.b, tol,
                     segment_budget(max_depth), acc);
        total.value += acc.value;
        total.error_estimate += acc.error;
        total.converged = total.converged && acc.converged;
        total.evaluations += acc.evaluations;
    }
    return total;
}

QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         double singular_at,
                                         std::span<const double> split_points,
                                         double tail_scale, double abs_tol) {
    SemiInfiniteDomain dom;
    dom.lower = singular_at;
    dom.threshold_exponent = 0.5;
    dom.splits.assign(split_points.begin(), split_points.end());
    dom.tail_scale = tail_scale;
    return integrate_semi_infinite(f, dom, abs_tol);
}

namespace {

// one evaluated segment of the vector integrand
struct VecSeg {
    double a, b;
    std::vector<double> val, err, floor;
    double worst_err;  // max over components
    bool improvable;
};

void vec_gk15(const std::function<void(double, double*)>& f, int m,
              const Panel& p, VecSeg& seg, std::vector<double>& buf) {
    const double c = 0.5 * (seg.a + seg.b);
    const double h = 0.5 * (seg.b - seg.a);
    auto eval_at = [&](double t, double* out) {
        switch (p.map) {
            case 1: {
                const double tq = t > 0.0 ? std::pow(t, p.power - 1) : 0.0;
                const double e = p.origin + tq * t;
                if (t <= 0.0 || e <= p.origin) {
                    std::fill(out, out + m, 0.0);
                    break;
                }
                f(e, out);
                const double jac = p.power * tq;
                for (int j = 0; j < m; ++j) out[j] *= jac;
                break;
            }
            case 2: {
                const double om = 1.0 - t;
                if (om <= 0.0) {
                    std::fill(out, out + m, 0.0);
                    break;
                }
                const double jac = p.scale / (om * om);
                f(p.origin + p.scale * t / om, out);
                for (int j = 0; j < m; ++j) out[j] *= jac;
                break;
            }
            default:
                f(t, out);
        }
    };

    seg.val.assign(m, 0.0);
    seg.err.assign(m, 0.0);   // holds resg during accumulation
    seg.floor.assign(m, 0.0); // holds resabs during accumulation
    buf.resize(m);

    eval_at(c, buf.data());
    for (int j = 0; j < m; ++j) {
        seg.val[j] += kWgk[7] * buf[j];
        seg.err[j] += kWg[3] * buf[j];
        seg.floor[j] += kWgk[7] * std::abs(buf[j]);
    }
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        for (double x : {c - dx, c + dx}) {
            eval_at(x, buf.data());
            for (int j = 0; j < m; ++j) {
                seg.val[j] += kWgk[i] * buf[j];
                seg.floor[j] += kWgk[i] * std::abs(buf[j]);
                if (i % 2 == 1) seg.err[j] += kWg[i / 2] * buf[j];
            }
        }
    }
    seg.worst_err = 0.0;
    bool rounded_out = true;
    for (int j = 0; j < m; ++j) {
        seg.val[j] *= h;
        seg.err[j] = std::abs(seg.val[j] - seg.err[j] * h);
        seg.floor[j] = rounding_floor(seg.floor[j] * std::abs(h));
        if (seg.err[j] > seg.floor[j]) rounded_out = false;
        seg.worst_err = std::max(seg.worst_err, seg.err[j]);
    }
    const double mid = 0.5 * (seg.a + seg.b);
    seg.improvable = mid > seg.a && mid < seg.b && !rounded_out;
}

void vec_adapt_global(const std::function<void(double, double*)>& f, int m,
                      const Panel& p, double tol, int max_segments,
                      VectorQuadratureResult& acc) {
    std::vector<VecSeg> segs;
    std::vector<double> buf;
    auto make_seg = [&](double lo, double hi) {
        VecSeg s;
        s.a = lo;
        s.b = hi;
        vec_gk15(f, m, p, s, buf);
        acc.evaluations += 15;
        return s;
    };
    std::vector<double> err_total(m, 0.0);
    auto add_seg = [&](VecSeg s) {
        for (int j = 0; j < m; ++j) err_total[j] += s.err[j];
        segs.push_back(std::move(s));
    };
    add_seg(make_seg(p.a, p.b));
    for (;;) {
        const double worst_total =
            *std::max_element(err_total.begin(), err_total.end());
        if (worst_total <= tol) break;
        const VecSeg* worst = nullptr;
        for (const auto& s : segs) {
            if (!s.improvable) continue;
            if (!worst || s.worst_err > worst->worst_err ||
                (s.worst_err == worst->worst_err && s.a < worst->a))
                worst = &s;
        }
        if (!worst) {
            std::vector<double> floor_total(m, 0.0);
            for (const auto& s : segs)
                for (int j = 0; j < m; ++j) floor_total[j] += s.floor[j];
            for (int j = 0; j < m; ++j)
                if (err_total[j] > std::max(tol, 2.0 * floor_total[j]))
                    acc.converged = false;
            break;
        }
        if (static_cast<int>(segs.size()) >= max_segments) {
            acc.converged = false;
            break;
        }
        VecSeg picked = std::move(*const_cast<VecSeg*>(worst));
        for (int j = 0; j < m; ++j) err_total[j] -= picked.err[j];
        segs.erase(segs.begin() + (worst - segs.data()));
        const double mid = 0.5 * (picked.a + picked.b);
        add_seg(make_seg(picked.a, mid));
        add_seg(make_seg(mid, picked.b));
    }
    std::sort(segs.begin(), segs.end(),
              [](const VecSeg& x, const VecSeg& y) { return x.a < y.a; });
    for (const auto& s : segs)
        for (int j = 0; j < m; ++j) {
            acc.values[j] += s.val[j];
            acc.errors[j] += s.err[j];
        }
}

}  // namespace

VectorQuadratureResult integrate_semi_infinite_vector(
    const std::function<void(double, double*)>& f, int m,
    const SemiInfiniteDomain& dom, double abs_tol, int max_depth) {
    const auto panels = build_panels(dom);
    const double tol = abs_tol / static_cast<double>(panels.size());
    VectorQuadratureResult acc;
    acc.values.assign(m, 0.0);
    acc.errors.assign(m, 0.0);
    for (const auto& p : panels)
        vec_adapt_global(f, m, p, tol, segment_budget(max_depth), acc);
    return acc;
}

namespace {

// e^{-x/2} L_k(x) for k = n-1, n, n+1 by the scaled three-term recurrence;
// the scaling keeps every intermediate within double range for x up to ~1400.
struct ScaledLaguerre {
    double lnm1, ln, lnp1;
};

ScaledLaguerre scaled_laguerre(int n, double x) {
    double lkm1 = std::exp(-0.5 * x);  // Lhat_0
    double lk = (1.0 - x) * lkm1;      // Lhat_1
    if (n == 0) return {0.0, lkm1, lk};
    double lprev = lkm1;
    for (int k = 1; k < n; ++k) {
        const double lnext = ((2.0 * k + 1.0 - x) * lk - k * lkm1) / (k + 1.0);
        lkm1 = lk;
        lk = lnext;
        lprev = lkm1;
    }
    const double lnp1 = ((2.0 * n + 1.0 - x) * lk - n * lkm1) / (n + 1.0);
    return {lprev, lk, lnp1};
}

}  // namespace

GaussLaguerreRule gauss_laguerre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_laguerre: n must be >= 1");
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
    for (int k = 0; k < n; ++k) diag[k] = 2.0 * k + 1.0;
    for (int k = 1; k < n; ++k) sub[k - 1] = k;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(std::max(n - 1, 0)),
                              Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("gauss_laguerre: eigen decomposition failed");
    GaussLaguerreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double np1 = static_cast<double>(n) + 1.0;
    for (int k = 0; k < n; ++k) {
        double x = es.eigenvalues()[k];
        // Newton polish: L_n/L'_n = x Lhat_n / (n (Lhat_n - Lhat_{n-1}))
        for (int it = 0; it < 3; ++it) {
            const auto l = scaled_laguerre(n, x);
            const double denom = n * (l.ln - l.lnm1);
            if (denom == 0.0) break;
            const double dx = x * l.ln / denom;
            x -= dx;
            if (std::abs(dx) <= 1e-15 * x) break;
        }
        const auto l = scaled_laguerre(n, x);
        rule.nodes[k] = x;
        // w_k e^{x_k} = x_k / ((n+1) Lhat_{n+1}(x_k))^2
        const double d = np1 * l.lnp1;
        rule.weights[k] = d != 0.0 ? x / (d * d) : 0.0;
    }
    return rule;
}

}  // namespace shapeinv
