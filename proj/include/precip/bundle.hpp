#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "precip/errors.hpp"
#include "precip/grid.hpp"
#include "precip/kinetics.hpp"
#include "precip/nominal.hpp"
#include "precip/sensitivity.hpp"
#include "precip/uncertainty.hpp"

namespace precip {

struct BundleConfig {
    double serious_threshold = 0.1;       // rho >= this accepts the trial
    double richness_threshold = 0.15;     // model-richness test on null steps
    double tau_decrease_threshold = 0.2;  // rho >= this halves tau
    double tau_init = 1.0;
    double tau_max = 1e100;
    double downshift = 1e-6;              // quadratic downshift constant
    double eps_stop = 1e-3;               // stationarity: pred <= eps*(1+|h|)
    std::size_t max_inner = 50;
    std::size_t max_outer = 100;
    double eps_sub = 1e-8;                // prox subproblem absolute accuracy
    std::size_t max_planes = 100;
};

inline void validate(const BundleConfig& c) {
    if (!(c.serious_threshold > 0.0) ||
        !(c.serious_threshold < c.richness_threshold) ||
        !(c.richness_threshold < 1.0))
        throw ConfigError(
            "bundle thresholds must satisfy 0 < serious < richness < 1");
    if (!(c.tau_decrease_threshold > 0.0) ||
        !(c.tau_decrease_threshold < 1.0))
        throw ConfigError("tau_decrease_threshold must lie in (0, 1)");
    if (!(c.tau_init > 0.0) || !(c.tau_max >= c.tau_init))
        throw ConfigError("need 0 < tau_init <= tau_max");
    if (!(c.downshift >= 0.0) || !(c.eps_stop > 0.0) || !(c.eps_sub > 0.0))
        throw ConfigError("downshift, eps_stop, eps_sub must be positive");
    if (c.max_inner == 0 || c.max_outer == 0 || c.max_planes < 2)
        throw ConfigError("iteration caps must be positive, max_planes >= 2");
}

// Affine minorant of the worst-case function.  raw = h at the anchor where
// the subgradient was collected; the intercept a is rebuilt against each
// serious iterate so that a + g.v_j <= h(v_j) (downshift):
//   s = max(0, raw + g.(v_j - anchor) - h(v_j)) + downshift*||anchor - v_j||^2
//   a = raw - g.anchor - s
struct CuttingPlane {
    std::vector<double> anchor;
    double raw = 0.0;
    std::vector<double> g;
    double a = 0.0;
    bool from_null = false;

    void reanchor(const std::vector<double>& v_j, double h_j,
                  double downshift) {
        double travel = 0.0, at_vj = raw, ga = 0.0;
        for (std::size_t i = 0; i < anchor.size(); ++i) {
            at_vj += g[i] * (v_j[i] - anchor[i]);
            travel += (anchor[i] - v_j[i]) * (anchor[i] - v_j[i]);
            ga += g[i] * anchor[i];
        }
        const double s = std::max(0.0, at_vj - h_j) + downshift * travel;
        a = raw - ga - s;
    }
};

namespace detail {

// Euclidean projection onto the unit simplex {w >= 0, sum w = 1}.
// Sort-based: theta is the multiplier for the largest support whose
// entries stay positive after the shift; i = 0 always qualifies.
inline void project_simplex(std::vector<double>& w) {
    std::vector<double> u(w);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, css_at_rho = 1.0;
    std::size_t support = 1;
    for (std::size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        if (u[i] * static_cast<double>(i + 1) > css - 1.0) {
            support = i + 1;
            css_at_rho = css;
        }
    }
    const double theta = (css_at_rho - 1.0) / static_cast<double>(support);
    for (auto& wi : w)
        wi = std::max(wi - theta, 0.0);
}

// Largest singular value of the m x n plane matrix by power iteration on
// G^T G; padded so the FISTA step stays conservative.
inline double spectral_norm(const std::vector<std::vector<double>>& G) {
    const std::size_t m = G.size();
    if (m == 0)
        return 0.0;
    const std::size_t n = G[0].size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = 1.0 + 1e-3 * static_cast<double>(i % 7);
    double lambda = 0.0;
    std::vector<double> gx(m), y(n);
    for (int it = 0; it < 100; ++it) {
        for (std::size_t r = 0; r < m; ++r) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += G[r][i] * x[i];
            gx[r] = s;
        }
        std::fill(y.begin(), y.end(), 0.0);
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t i = 0; i < n; ++i)
                y[i] += G[r][i] * gx[r];
        double norm = std::sqrt(
            std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
        if (norm == 0.0)
            return 0.0;
        lambda = norm;
        for (std::size_t i = 0; i < n; ++i)
            x[i] = y[i] / norm;
    }
    return std::sqrt(lambda);
}

// Dense Gaussian elimination with partial pivoting; A and b are consumed.
// Declines (near-)singular systems instead of dividing through noise.
inline bool solve_linear(std::vector<std::vector<double>>& A,
                         std::vector<double>& b,
                         std::vector<double>& x) {
    const std::size_t d = A.size();
    double amax = 0.0;
    for (const auto& row : A)
        for (double e : row)
            amax = std::max(amax, std::abs(e));
    if (amax == 0.0)
        return false;
    for (std::size_t c = 0; c < d; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < d; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c]))
                piv = r;
        if (std::abs(A[piv][c]) <= amax * 1e-13)
            return false;
        std::swap(A[piv], A[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = c + 1; r < d; ++r) {
            const double f = A[r][c] / A[c][c];
            if (f == 0.0)
                continue;
            for (std::size_t k = c; k < d; ++k)
                A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    x.assign(d, 0.0);
    for (std::size_t c = d; c-- > 0;) {
        double s = b[c];
        for (std::size_t k = c + 1; k < d; ++k)
            s -= A[c][k] * x[k];
        x[c] = s / A[c][c];
        if (!std::isfinite(x[c]))
            return false;
    }
    return true;
}

} // namespace detail

struct ProxSolution {
    ControlVector v;              // approximate subproblem minimizer
    std::vector<double> weights;  // simplex weights over the planes
    double model_value = 0.0;     // max_i (a_i + g_i . v), no prox term
    std::size_t iterations = 0;
};

// min over the admissible set of max_i (a_i + g_i.v) + tau/2 ||v - v_j||^2,
// solved in the dual: maximize over simplex weights w the concave C^1
//   theta(w) = a.w + (G v*(w)).w + tau/2 ||v*(w) - v_j||^2,
//   v*(w)    = project(v_j - G^T w / tau)
// by accelerated projected ascent with gradient-scheme adaptive restart.
// Stops when the primal-dual gap (best primal prox value minus best dual
// value) falls below eps_sub.
inline ProxSolution solve_prox_subproblem(const std::vector<CuttingPlane>& planes,
                                          const ControlVector& v_j,
                                          double tau,
                                          const AdmissibleSet& set,
                                          double eps_sub = 1e-8,
                                          const std::vector<double>* warm = nullptr,
                                          std::size_t max_iter = 200000) {
    const std::size_t m = planes.size();
    const std::size_t n = v_j.size();
    std::vector<double> a(m);
    std::vector<std::vector<double>> G(m);
    for (std::size_t r = 0; r < m; ++r) {
        a[r] = planes[r].a;
        G[r] = planes[r].g;
    }

    auto vstar = [&](const std::vector<double>& w) {
        ControlVector y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t r = 0; r < m; ++r)
                s += G[r][i] * w[r];
            y[i] = v_j[i] - s / tau;
        }
        return project_to_admissible(y, set);
    };
    auto model_at = [&](const ControlVector& v) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < m; ++r) {
            double s = a[r];
            for (std::size_t i = 0; i < n; ++i)
                s += G[r][i] * v[i];
            best = std::max(best, s);
        }
        return best;
    };
    auto prox_term = [&](const ControlVector& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += (v[i] - v_j[i]) * (v[i] - v_j[i]);
        return 0.5 * tau * s;
    };
    ProxSolution out;
    std::vector<double> w(m, 1.0 / static_cast<double>(m));
    if (warm && !warm->empty()) {
        // Weights from the previous subproblem land near the new optimum
        // when the plane list changed by one entry; pad or truncate, then
        // repair onto the simplex.
        for (std::size_t r = 0; r < m; ++r)
            w[r] = r < warm->size() ? (*warm)[r] : 0.0;
        detail::project_simplex(w);
    }
    if (m == 1) {
        w = {1.0};
        out.v = vstar(w);
        out.weights = w;
        out.model_value = model_at(out.v);
        out.iterations = 1;
        return out;
    }

    // Global curvature bound for the dual gradient.  At small tau it is
    // loose by orders of magnitude: most coordinates of v*(w) sit clamped
    // at the box, where they contribute nothing to the curvature.  The
    // ascent loop therefore backtracks a local estimate instead of
    // stepping with the global bound.
    const double gnorm = detail::spectral_norm(G);
    const double L_max = std::max(1.05 * gnorm * gnorm / tau, 1e-300);

    std::vector<double> y = w, w_new(m), grad(m), vals(m);
    double t = 1.0;
    ControlVector best_v;
    double best_psi = std::numeric_limits<double>::infinity();
    double best_theta = -std::numeric_limits<double>::infinity();
    std::vector<double> best_w = w;

    auto plane_values = [&](const ControlVector& v) {
        for (std::size_t r = 0; r < m; ++r) {
            double s = a[r];
            for (std::size_t i = 0; i < n; ++i)
                s += G[r][i] * v[i];
            vals[r] = s;
        }
    };
    // Dual value at wi; one projection evaluation also yields the primal
    // value at v*(wi), so every feasible evaluation tightens the duality
    // gap that certifies best_v.  Momentum points can leave the simplex;
    // their values feed the line search only, never the certificate.
    auto theta_at = [&](const std::vector<double>& wi, bool feasible) {
        const ControlVector v = vstar(wi);
        plane_values(v);
        const double px = prox_term(v);
        double th = px;
        double psi = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < m; ++r) {
            th += wi[r] * vals[r];
            psi = std::max(psi, vals[r]);
        }
        psi += px;
        if (feasible) {
            if (psi < best_psi) {
                best_psi = psi;
                best_v = v;
            }
            if (th > best_theta) {
                best_theta = th;
                best_w = wi;
            }
        }
        return th;
    };

    // Active-face polish.  On a fixed support of planes and clamp pattern
    // of v*(w), the optimum solves a small square system: equal plane
    // values across the support, weights summing to one, and the dosing
    // budget over the unclamped coordinates.  The ascent iteration only
    // has to identify the pattern; the solve then lands on the exact face
    // optimum and the certificate accepts it, or rejects a wrong guess at
    // the cost of one evaluation.
    auto polish = [&](const std::vector<double>& wi) {
        const ControlVector v = vstar(wi);
        std::vector<std::size_t> S;
        for (std::size_t r = 0; r < m; ++r)
            if (wi[r] > 1e-12)
                S.push_back(r);
        if (S.empty())
            return;
        const std::size_t s = S.size();
        const bool budget = set.has_budget;
        const std::size_t dim = s + (budget ? 1 : 0);
        const std::vector<double>& deltas = set.grid.deltas;
        std::vector<char> free_coord(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            free_coord[i] = v[i] > set.lower && v[i] < set.upper;

        std::vector<std::vector<double>> A(dim, std::vector<double>(dim, 0.0));
        std::vector<double> b(dim, 0.0);
        // rows 0..s-2: plane S[k+1] matches plane S[0] at v(x)
        for (std::size_t k = 0; k + 1 < s; ++k) {
            const std::size_t p0 = S[0], p = S[k + 1];
            double rhs = a[p0] - a[p];
            for (std::size_t i = 0; i < n; ++i) {
                const double dg = G[p][i] - G[p0][i];
                if (dg == 0.0)
                    continue;
                if (free_coord[i]) {
                    rhs -= dg * v_j[i];
                    for (std::size_t r = 0; r < s; ++r)
                        A[k][r] -= dg * G[S[r]][i] / tau;
                    if (budget)
                        A[k][s] -= dg * deltas[i];
                } else {
                    rhs -= dg * v[i];
                }
            }
            b[k] = rhs;
        }
        for (std::size_t r = 0; r < s; ++r)
            A[s - 1][r] = 1.0;
        b[s - 1] = 1.0;
        if (budget) {
            double rhs = set.budget;
            for (std::size_t i = 0; i < n; ++i) {
                if (free_coord[i]) {
                    rhs -= deltas[i] * v_j[i];
                    for (std::size_t r = 0; r < s; ++r)
                        A[s][r] -= deltas[i] * G[S[r]][i] / tau;
                    A[s][s] -= deltas[i] * deltas[i];
                } else {
                    rhs -= deltas[i] * v[i];
                }
            }
            b[s] = rhs;
        }

        std::vector<double> x;
        if (!detail::solve_linear(A, b, x))
            return;
        std::vector<double> w_cand(m, 0.0);
        double sum = 0.0;
        for (std::size_t r = 0; r < s; ++r) {
            if (x[r] < -1e-9)
                return; // support guess was wrong
            w_cand[S[r]] = std::max(x[r], 0.0);
            sum += w_cand[S[r]];
        }
        if (!(sum > 0.0) || !std::isfinite(sum))
            return;
        for (double& e : w_cand)
            e /= sum;
        theta_at(w_cand, true);
    };

    std::size_t used = 0;
    theta_at(w, true);
    if (best_psi - best_theta > eps_sub)
        polish(w);
    double L = L_max * 1e-6;
    for (std::size_t it = 1;
         it <= max_iter && best_psi - best_theta > eps_sub; ++it) {
        const ControlVector v_y = vstar(y);
        plane_values(v_y);
        grad = vals;
        double th_y = prox_term(v_y);
        for (std::size_t r = 0; r < m; ++r)
            th_y += y[r] * grad[r];

        L = std::max(0.5 * L, 1e-300); // probe a longer step each iteration
        for (;;) {
            for (std::size_t r = 0; r < m; ++r)
                w_new[r] = y[r] + grad[r] / L;
            detail::project_simplex(w_new);
            double lin = 0.0, sq = 0.0;
            for (std::size_t r = 0; r < m; ++r) {
                const double d = w_new[r] - y[r];
                lin += grad[r] * d;
                sq += d * d;
            }
            const double th_new = theta_at(w_new, true);
            if (L >= L_max ||
                th_new >= th_y + lin - 0.5 * L * sq -
                              1e-14 * (1.0 + std::abs(th_y)))
                break; // majorant holds (guaranteed at the global bound)
            L = std::min(2.0 * L, L_max);
        }

        double ascent = 0.0;
        for (std::size_t r = 0; r < m; ++r)
            ascent += grad[r] * (w_new[r] - w[r]);
        if (ascent < 0.0)
            t = 1.0; // adaptive restart: momentum left the ascent cone
        const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        for (std::size_t r = 0; r < m; ++r)
            y[r] = w_new[r] + ((t - 1.0) / t_new) * (w_new[r] - w[r]);
        w.swap(w_new);
        t = t_new;
        used = it;
        if (it % 25 == 0 && best_psi - best_theta > eps_sub)
            polish(w);
    }
    // Ascent can stall a small factor above eps_sub when the certificate
    // tightens slowly; the gap still certifies best_v, so return it rather
    // than abort the surrounding bundle run.
    if (!std::isfinite(best_psi) || !std::isfinite(best_theta))
        throw NumericalBlowup("prox subproblem produced non-finite values");
    out.v = best_v;
    out.weights = best_w;
    out.model_value = model_at(best_v);
    out.iterations = used;
    return out;
}

// One row per inner iteration; the stationarity row carries NaNs in the
// trial/rho columns.
struct BundleTraceRow {
    std::size_t outer = 0;
    std::size_t inner = 0;
    double h_center = 0.0;
    double h_trial = 0.0;
    double rho = 0.0;
    double tau = 0.0;
    std::size_t planes = 0;
    bool serious = false;
    long long scenario_id = -1;
};

struct BundleResult {
    ControlVector v;
    double value = 0.0;
    std::string status; // stationary | inner_cap | outer_cap
    std::vector<BundleTraceRow> trace;
    std::size_t inner_evaluations = 0;
    std::vector<CuttingPlane> planes;
};

// Evaluation of the max-type objective at one point: value, a subgradient,
// and which scenario attained the max (bookkeeping only).
struct WorstEval {
    double value = 0.0;
    std::vector<double> subgradient;
    long long scenario_id = -1;
};

namespace detail {

inline void evict_planes(std::vector<CuttingPlane>& planes,
                         const BundleConfig& cfg,
                         const std::vector<double>& weights,
                         const ControlVector& v_hat,
                         std::vector<double>* hint = nullptr) {
    if (planes.size() <= cfg.max_planes)
        return;
    // Aggregate plane: the weight-averaged model linearization at v_hat.
    // weights refer to the plane list as it was when the subproblem ran
    // (before the newest plane was appended).
    CuttingPlane agg;
    agg.anchor = v_hat;
    agg.g.assign(v_hat.size(), 0.0);
    agg.raw = 0.0;
    for (std::size_t r = 0; r < weights.size(); ++r) {
        double gv = planes[r].a;
        for (std::size_t i = 0; i < v_hat.size(); ++i) {
            gv += planes[r].g[i] * v_hat[i];
            agg.g[i] += weights[r] * planes[r].g[i];
        }
        agg.raw += weights[r] * gv;
    }
    agg.from_null = true;
    // Drop oldest planes (null ones first, never the newest) until the
    // aggregate push lands the list back at the cap; the aggregate
    // represents everything evicted, so this keeps a valid lower model.
    double mass = 0.0;
    while (planes.size() >= cfg.max_planes && planes.size() > 1) {
        auto victim = std::find_if(planes.begin(), planes.end() - 1,
                                   [](const CuttingPlane& p) {
                                       return p.from_null;
                                   });
        if (victim == planes.end() - 1)
            victim = planes.begin(); // all serious: drop the oldest
        const auto at = victim - planes.begin();
        planes.erase(victim);
        if (hint && static_cast<std::size_t>(at) < hint->size()) {
            mass += (*hint)[static_cast<std::size_t>(at)];
            hint->erase(hint->begin() + at);
        }
    }
    planes.push_back(std::move(agg));
    if (hint)
        hint->push_back(mass); // the aggregate inherits the evicted mass
}

} // namespace detail

// Proximal bundle loop for min over the admissible set of a max-type
// function h given through `oracle(v) -> WorstEval`.  Serious steps move the
// center and halve tau on strong agreement; null steps enrich the model and
// double tau when the enriched model already explains the failure
// (richness ratio).  Stops when the predicted decrease falls below
// eps_stop*(1+|h|), or at the iteration caps.
template <class Oracle>
BundleResult run_bundle(Oracle&& oracle, const ControlVector& start,
                        const AdmissibleSet& set, const BundleConfig& cfg) {
    BundleResult res;
    ControlVector v_j = project_to_admissible(start, set);
    WorstEval cur = oracle(v_j);
    double h_j = cur.value;

    std::vector<CuttingPlane> planes;
    planes.push_back({v_j, h_j, cur.subgradient, 0.0, false});
    planes.back().reanchor(v_j, h_j, cfg.downshift);
    double tau = cfg.tau_init;
    res.status = "outer_cap";

    std::vector<double> w_hint; // dual weights carried across subproblems
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 1; j <= cfg.max_outer; ++j) {
        bool serious = false;
        for (std::size_t k = 1; k <= cfg.max_inner; ++k) {
            ProxSolution sub = solve_prox_subproblem(
                planes, v_j, tau, set, cfg.eps_sub,
                w_hint.empty() ? nullptr : &w_hint);
            double pred = h_j - sub.model_value;
            // the dual solver certifies the subproblem only to its gap, so
            // pred may dip slightly negative at near-stationarity; anything
            // beyond that scale is a broken model
            if (pred < -std::max(1e-6, 10.0 * cfg.eps_sub))
                throw ModelInconsistency("negative predicted decrease " +
                                         std::to_string(pred));
            pred = std::max(pred, 0.0);
            if (pred <= cfg.eps_stop * (1.0 + std::abs(h_j))) {
                res.status = "stationary";
                res.trace.push_back(
                    {j, k, h_j, nan, nan, tau, planes.size(), false, -1});
                res.v = v_j;
                res.value = h_j;
                res.planes = std::move(planes);
                return res;
            }
            WorstEval trial = oracle(sub.v);
            ++res.inner_evaluations;
            const double rho = (h_j - trial.value) / pred;
            if (rho >= cfg.serious_threshold) {
                serious = true;
                res.trace.push_back({j, k, h_j, trial.value, rho, tau,
                                     planes.size(), true, trial.scenario_id});
                if (rho >= cfg.tau_decrease_threshold)
                    tau = std::max(tau / 2.0, cfg.tau_init * 1e-6);
                v_j = sub.v;
                h_j = trial.value;
                planes.push_back(
                    {v_j, h_j, trial.subgradient, 0.0, false});
                w_hint = sub.weights;
                w_hint.push_back(0.0);
                detail::evict_planes(planes, cfg, sub.weights, v_j, &w_hint);
                for (auto& p : planes)
                    p.reanchor(v_j, h_j, cfg.downshift);
                break;
            }
            res.trace.push_back({j, k, h_j, trial.value, rho, tau,
                                 planes.size(), false, trial.scenario_id});
            CuttingPlane np{sub.v, trial.value, trial.subgradient, 0.0, true};
            np.reanchor(v_j, h_j, cfg.downshift);
            double pi_new = np.a;
            for (std::size_t i = 0; i < sub.v.size(); ++i)
                pi_new += np.g[i] * sub.v[i];
            // richness: would the model including the new plane have
            // predicted this failure?
            const double rho_tilde =
                (h_j - std::max(sub.model_value, pi_new)) / pred;
            if (rho_tilde >= cfg.richness_threshold)
                tau = std::min(2.0 * tau, cfg.tau_max);
            planes.push_back(std::move(np));
            w_hint = sub.weights;
            w_hint.push_back(0.0);
            detail::evict_planes(planes, cfg, sub.weights, sub.v, &w_hint);
        }
        if (!serious) {
            res.status = "inner_cap";
            break;
        }
    }
    res.v = v_j;
    res.value = h_j;
    res.planes = std::move(planes);
    return res;
}

struct RobustResult {
    ControlVector v_nominal;   // warm-start point from the nominal solve
    OptTrace nominal_trace;
    BundleResult bundle;
};

// Robust synthesis optimization: solve the nominal problem from the uniform
// start, then run the bundle method on the exact worst-case oracle from that
// point.  Degenerate single-scenario sets reduce to the nominal problem.
inline RobustResult optimize_robust(const AdmissibleSet& set,
                                    const UncertaintySet& uset,
                                    const KineticsModel& model,
                                    const KineticsParams& params,
                                    const ObjectiveSpec& spec,
                                    const BundleConfig& bundle_cfg,
                                    const NominalConfig& nominal_cfg,
                                    double m0_min = 1e-12) {
    RobustResult out;
    auto nominal_objective = [&](const ControlVector& v) {
        GradientResult g =
            gradient_objective(v, set.grid, model, params, spec, m0_min);
        return std::make_pair(g.value, std::move(g.gradient));
    };
    auto [v_nom, ntrace] = optimize_nominal(
        nominal_objective, set, nominal_cfg, uniform_start(set));
    out.v_nominal = std::move(v_nom);
    out.nominal_trace = std::move(ntrace);

    auto oracle = [&](const ControlVector& v) {
        WorstCaseResult wc = worst_case(v, uset, set.grid, model, params,
                                        spec, m0_min);
        return WorstEval{wc.value, std::move(wc.subgradient),
                         static_cast<long long>(wc.scenario_id)};
    };
    out.bundle = run_bundle(oracle, out.v_nominal, set, bundle_cfg);
    return out;
}

} // namespace precip
