#include "p4ip/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <string>

#include "p4ip/errors.hpp"

namespace p4ip {

namespace {

double dot(const Image& a, const Image& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        acc += a.data[i] * b.data[i];
    }
    return acc;
}

double inf_norm(const Image& a) {
    double m = 0.0;
    for (double v : a.data) {
        m = std::max(m, std::fabs(v));
    }
    return m;
}

double two_norm(const Image& a) { return std::sqrt(dot(a, a)); }

struct Pair {
    Image s, y;
    double rho;
};

// Two-loop recursion: returns H*g with H0 = gamma*I from the newest pair.
Image two_loop(const Image& g, const std::deque<Pair>& hist) {
    Image q = g;
    std::vector<double> alpha(hist.size());
    for (std::size_t i = hist.size(); i-- > 0;) {
        alpha[i] = hist[i].rho * dot(hist[i].s, q);
        for (std::size_t k = 0; k < q.data.size(); ++k) {
            q.data[k] -= alpha[i] * hist[i].y.data[k];
        }
    }
    if (!hist.empty()) {
        const Pair& last = hist.back();
        const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
        for (double& v : q.data) {
            v *= gamma;
        }
    }
    for (std::size_t i = 0; i < hist.size(); ++i) {
        const double beta = hist[i].rho * dot(hist[i].y, q);
        for (std::size_t k = 0; k < q.data.size(); ++k) {
            q.data[k] += (alpha[i] - beta) * hist[i].s.data[k];
        }
    }
    return q;
}

} // namespace

LbfgsResult minimize(const std::function<double(const Image&)>& value_fn,
                     const std::function<Image(const Image&)>& grad_fn, Image x0,
                     const LbfgsConfig& cfg) {
    if (cfg.memory < 1 || cfg.grad_tol <= 0.0) {
        throw data_error("LbfgsConfig: memory >= 1 and grad_tol > 0 required");
    }
    require_finite(x0, "lbfgs x0");

    LbfgsResult res;
    res.x = std::move(x0);
    double f = value_fn(res.x);
    Image g = grad_fn(res.x);
    ++res.evaluations;
    if (!std::isfinite(f)) {
        throw solver_error("lbfgs: non-finite objective at the starting point");
    }
    require_finite(g, "lbfgs gradient at the starting point");

    const double tol = cfg.grad_tol * (1.0 + inf_norm(g));
    std::deque<Pair> hist;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        res.grad_inf_norm = inf_norm(g);
        if (res.grad_inf_norm <= tol) {
            res.converged = true;
            break;
        }

        Image dir = two_loop(g, hist);
        double dg = -dot(dir, g); // directional derivative along -dir
        bool steepest = false;
        if (!(dg < 0.0)) {
            dir = g; // fall back to steepest descent
            dg = -dot(g, g);
            steepest = true;
        }

        // First iteration has no curvature information; start conservatively.
        double step = hist.empty() ? 1.0 / std::max(1.0, inf_norm(dir)) : 1.0;

        double f_new = 0.0;
        Image x_new;
        bool accepted = false;
        for (int ls = 0; ls < cfg.max_line_search_steps; ++ls) {
            x_new = res.x;
            for (std::size_t k = 0; k < x_new.data.size(); ++k) {
                x_new.data[k] -= step * dir.data[k];
            }
            f_new = value_fn(x_new);
            ++res.evaluations;
            if (std::isfinite(f_new) && f_new <= f + cfg.armijo_c1 * step * dg) {
                accepted = true;
                break;
            }
            step *= cfg.backtrack;
        }
        if (!accepted) {
            if (!steepest && !hist.empty()) {
                hist.clear(); // stale curvature; retry as steepest descent
                continue;
            }
            break; // no further progress measurable
        }

        Image g_new = grad_fn(x_new);
        if (!std::isfinite(f_new)) {
            throw solver_error("lbfgs: non-finite objective at iteration " + std::to_string(iter));
        }
        require_finite(g_new, "lbfgs gradient at iteration " + std::to_string(iter));

        Image s = x_new;
        for (std::size_t k = 0; k < s.data.size(); ++k) {
            s.data[k] -= res.x.data[k];
        }
        Image yv = g_new;
        for (std::size_t k = 0; k < yv.data.size(); ++k) {
            yv.data[k] -= g.data[k];
        }
        const double sy = dot(s, yv);
        if (sy > 1e-10 * two_norm(s) * two_norm(yv)) {
            hist.push_back({std::move(s), std::move(yv), 1.0 / sy});
            if (static_cast<int>(hist.size()) > cfg.memory) {
                hist.pop_front();
            }
        }

        res.x = std::move(x_new);
        f = f_new;
        g = std::move(g_new);
        res.iterations = iter + 1;
    }

    res.value = f;
    res.grad_inf_norm = inf_norm(g);
    if (!res.converged) {
        res.converged = res.grad_inf_norm <= tol;
    }
    return res;
}

} // namespace p4ip
