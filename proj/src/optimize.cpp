#include "nonlinfo/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nonlinfo {

void OptimizerConfig::validate() const {
    if (grid_points < 2) throw std::invalid_argument("optimizer: grid_points must be >= 2");
    if (!(refine_tol > 0.0) || !(ba_tol > 0.0))
        throw std::invalid_argument("optimizer: tolerances must be positive");
    if (ba_max_iter < 1) throw std::invalid_argument("optimizer: ba_max_iter must be >= 1");
    if (theta_grid < 2 || lambda_grid < 2)
        throw std::invalid_argument("optimizer: family grids must have >= 2 points");
    if (shards < 1) throw std::invalid_argument("optimizer: shards must be >= 1");
}

std::pair<double, double> golden_section(const std::function<double(double)>& f, double a,
                                         double b, double tol) {
    if (!(a < b)) throw std::invalid_argument("golden_section: need a < b");
    constexpr double invphi = 0.6180339887498949;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    double x = 0.5 * (a + b);
    return {x, f(x)};
}

namespace {

// Grid scan of [lo, hi] followed by golden-section inside the bracketing
// cell of the best grid point. Local refinement is valid for any smooth
// objective; callers gate it with the unimodality hint.
FamilySupResult scan_interval(double lo, double hi, const std::function<double(double)>& eval,
                              const OptimizerConfig& config, bool refine) {
    FamilySupResult result;
    if (hi - lo <= 0.0) {
        result.value = eval(lo);
        result.param = lo;
        return result;
    }
    const std::size_t n = config.grid_points;
    const double step = (hi - lo) / static_cast<double>(n - 1);
    std::size_t best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double q = lo + step * static_cast<double>(i);
        double v = eval(q);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    result.value = best_val;
    result.param = lo + step * static_cast<double>(best);
    result.grid_resolution = step;
    if (refine) {
        double a = (best == 0) ? lo : lo + step * static_cast<double>(best - 1);
        double b = (best == n - 1) ? hi : lo + step * static_cast<double>(best + 1);
        auto [x, fx] = golden_section(eval, a, b, config.refine_tol);
        if (fx > result.value) {
            result.value = fx;
            result.param = x;
        }
        result.refined = true;
    }
    return result;
}

}  // namespace

FamilySupResult sup_over_family(const DistributionFamily& family,
                                const std::function<double(const FiniteDistribution&)>& objective,
                                const OptimizerConfig& config, bool unimodal_hint) {
    config.validate();
    switch (family.kind()) {
        case FamilyKind::Enumerated:
        case FamilyKind::Grid: {
            FamilySupResult result;
            for (std::size_t i = 0; i < family.member_count(); ++i) {
                double v = objective(family.member(i));
                if (v > result.value) {
                    result.value = v;
                    result.member_index = i;
                }
            }
            return result;
        }
        case FamilyKind::IntervalBernoulli: {
            auto eval = [&](double q) { return objective(family.at_param(q)); };
            return scan_interval(family.q_lo(), family.q_hi(), eval, config, unimodal_hint);
        }
        case FamilyKind::IntervalCategorical:
            throw std::logic_error(
                "sup_over_family: box credal sets need a structured objective "
                "(see credal_box_* helpers)");
    }
    throw std::logic_error("sup_over_family: unknown family kind");
}

FamilySupResult sup_over_channel(const ChannelFamily& channel,
                                 const std::function<double(const Matrix&)>& objective,
                                 const OptimizerConfig& config, bool unimodal_hint) {
    config.validate();
    if (channel.kind() == ChannelKind::Enumerated) {
        FamilySupResult result;
        for (std::size_t i = 0; i < channel.member_count(); ++i) {
            double v = objective(channel.member(i));
            if (v > result.value) {
                result.value = v;
                result.member_index = i;
            }
        }
        return result;
    }
    auto eval = [&](double q) { return objective(channel.at_param(q)); };
    return scan_interval(channel.q_lo(), channel.q_hi(), eval, config, unimodal_hint);
}

BlahutResult blahut_arimoto(const Matrix& channel, const OptimizerConfig& config) {
    config.validate();
    const std::size_t nx = channel.size();
    if (nx == 0) throw std::invalid_argument("blahut_arimoto: empty channel");
    const std::size_t ny = channel[0].size();
    for (const auto& row : channel) {
        if (row.size() != ny) throw std::invalid_argument("blahut_arimoto: ragged channel matrix");
        double s = 0.0;
        for (double w : row) {
            if (!(w >= 0.0) || !(w <= 1.0 + kSimplexTol))
                throw std::invalid_argument("blahut_arimoto: entries must lie in [0, 1]");
            s += w;
        }
        if (std::abs(s - 1.0) > 1e-9)
            throw std::invalid_argument("blahut_arimoto: rows must sum to 1");
    }

    BlahutResult result;
    std::vector<double> p(nx, 1.0 / static_cast<double>(nx));
    std::vector<double> q(ny), c(nx);
    for (int iter = 1; iter <= config.ba_max_iter; ++iter) {
        std::fill(q.begin(), q.end(), 0.0);
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) q[y] += p[x] * channel[x][y];
        double lower = 0.0, upper = -std::numeric_limits<double>::infinity();
        for (std::size_t x = 0; x < nx; ++x) {
            double cx = 0.0;
            for (std::size_t y = 0; y < ny; ++y)
                if (channel[x][y] > 0.0) cx += channel[x][y] * std::log2(channel[x][y] / q[y]);
            c[x] = cx;
            lower += p[x] * cx;
            upper = std::max(upper, cx);
        }
        result.capacity_bits = lower;
        result.input = p;
        result.bracket = upper - lower;
        result.iterations = iter;
        if (result.bracket <= config.ba_tol) {
            result.converged = true;
            return result;
        }
        double norm = 0.0;
        for (std::size_t x = 0; x < nx; ++x) norm += (p[x] *= std::exp2(c[x]));
        for (std::size_t x = 0; x < nx; ++x) p[x] /= norm;
    }
    return result;  // converged = false, bracket reported
}

namespace {

double expected_distortion(const std::vector<double>& p, const Matrix& q, const Matrix& d) {
    double acc = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x)
        for (std::size_t m = 0; m < q[x].size(); ++m) acc += p[x] * q[x][m] * d[x][m];
    return acc;
}

void check_distortion_matrix(const Matrix& d, std::size_t nx) {
    if (d.size() != nx) throw std::invalid_argument("distortion: row count does not match source");
    const std::size_t nm = d.empty() ? 0 : d[0].size();
    if (nm == 0) throw std::invalid_argument("distortion: empty matrix");
    for (const auto& row : d) {
        if (row.size() != nm) throw std::invalid_argument("distortion: ragged matrix");
        for (double x : row)
            if (!(x >= 0.0) || !std::isfinite(x))
                throw std::invalid_argument("distortion: entries must be finite and >= 0");
    }
}

// One parametric-Blahut fixed point at slope s (bits); returns (rate, distortion, Q).
std::tuple<double, double, Matrix> blahut_rd_at_slope(const std::vector<double>& p, const Matrix& d,
                                                      double s) {
    const std::size_t nx = p.size(), nm = d[0].size();
    std::vector<double> r(nm, 1.0 / static_cast<double>(nm));
    Matrix q(nx, std::vector<double>(nm, 0.0));
    for (int iter = 0; iter < 20000; ++iter) {
        for (std::size_t x = 0; x < nx; ++x) {
            double row_sum = 0.0;
            for (std::size_t m = 0; m < nm; ++m)
                row_sum += (q[x][m] = r[m] * std::exp2(s * d[x][m]));
            for (std::size_t m = 0; m < nm; ++m) q[x][m] /= row_sum;
        }
        double delta = 0.0;
        for (std::size_t m = 0; m < nm; ++m) {
            double rm = 0.0;
            for (std::size_t x = 0; x < nx; ++x) rm += p[x] * q[x][m];
            delta = std::max(delta, std::abs(rm - r[m]));
            r[m] = rm;
        }
        if (delta < 1e-15) break;
    }
    double rate = 0.0, dist = 0.0;
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t m = 0; m < nm; ++m) {
            if (q[x][m] > 0.0 && r[m] > 0.0) rate += p[x] * q[x][m] * std::log2(q[x][m] / r[m]);
            dist += p[x] * q[x][m] * d[x][m];
        }
    return {rate, dist, q};
}

}  // namespace

double classical_rate_distortion(const std::vector<double>& p, const Matrix& distortion, double D,
                                 Matrix* q_out, const OptimizerConfig& config) {
    config.validate();
    check_distortion_matrix(distortion, p.size());
    if (!(D >= 0.0)) throw std::invalid_argument("classical_rate_distortion: D must be >= 0");
    const std::size_t nx = p.size(), nm = distortion[0].size();

    // Zero-rate threshold: best constant reproduction.
    double d_max = std::numeric_limits<double>::infinity();
    std::size_t best_col = 0;
    for (std::size_t m = 0; m < nm; ++m) {
        double col = 0.0;
        for (std::size_t x = 0; x < nx; ++x) col += p[x] * distortion[x][m];
        if (col < d_max) {
            d_max = col;
            best_col = m;
        }
    }
    if (D >= d_max - 1e-13) {
        if (q_out) {
            *q_out = Matrix(nx, std::vector<double>(nm, 0.0));
            for (std::size_t x = 0; x < nx; ++x) (*q_out)[x][best_col] = 1.0;
        }
        return 0.0;
    }

    // Minimal-distortion floor: per-row best reproduction.
    double d_min = 0.0;
    for (std::size_t x = 0; x < nx; ++x)
        d_min += p[x] * *std::min_element(distortion[x].begin(), distortion[x].end());
    if (D <= d_min + 1e-13) {
        Matrix q(nx, std::vector<double>(nm, 0.0));
        std::vector<double> image(nm, 0.0);
        for (std::size_t x = 0; x < nx; ++x) {
            std::size_t m = static_cast<std::size_t>(
                std::min_element(distortion[x].begin(), distortion[x].end()) -
                distortion[x].begin());
            q[x][m] = 1.0;
            image[m] += p[x];
        }
        if (q_out) *q_out = q;
        return entropy_bits(image);  // I(p, q) for a deterministic map
    }

    double s_lo = -80.0, s_hi = -1e-9;
    Matrix q;
    double rate = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        double s = 0.5 * (s_lo + s_hi);
        auto [r, dist, qq] = blahut_rd_at_slope(p, distortion, s);
        rate = r;
        q = std::move(qq);
        if (std::abs(dist - D) < 1e-13) break;
        (dist > D ? s_hi : s_lo) = s;
    }
    if (q_out) *q_out = q;
    return rate;
}

namespace {

struct MinimaxContext {
    std::vector<std::vector<double>> members;  // explicit source members
    const Matrix* distortion;
    double D;

    double objective(const Matrix& q) const {
        double best = 0.0;
        for (const auto& p : members) best = std::max(best, mutual_information_bits(p, q));
        return best;
    }
    double worst_distortion(const Matrix& q) const {
        double worst = 0.0;
        for (const auto& p : members) worst = std::max(worst, expected_distortion(p, q, *distortion));
        return worst;
    }
    bool feasible(const Matrix& q) const { return worst_distortion(q) <= D + 1e-12; }
};

// Transfer-move pattern search over row-stochastic matrices, restricted to
// the feasible set. Polishes a starting point to ~1e-9 parameter resolution.
double pattern_polish(const MinimaxContext& ctx, Matrix& q) {
    const std::size_t nx = q.size(), nm = q[0].size();
    double best = ctx.objective(q);
    double step = 0.02;
    while (step > 1e-9) {
        bool improved = false;
        for (std::size_t x = 0; x < nx; ++x) {
            for (std::size_t a = 0; a < nm; ++a) {
                for (std::size_t b = 0; b < nm; ++b) {
                    if (a == b) continue;
                    double delta = std::min(step, std::min(1.0 - q[x][a], q[x][b]));
                    if (delta <= 0.0) continue;
                    q[x][a] += delta;
                    q[x][b] -= delta;
                    double v = ctx.feasible(q) ? ctx.objective(q)
                                               : std::numeric_limits<double>::infinity();
                    if (v < best - 1e-15) {
                        best = v;
                        improved = true;
                    } else {
                        q[x][a] -= delta;
                        q[x][b] += delta;
                    }
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

// Exact solution of the 2x2 kernel. With Q = [[1-a, a], [b, 1-b]], the
// objective max_theta I(p_theta; Q) is jointly convex in (a, b), each
// distortion constraint is linear, and the partial minimum over b is convex
// in a; nested golden sections therefore find the global constrained
// minimum.
std::pair<double, Matrix> exact_2x2(const MinimaxContext& ctx) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const Matrix& d = *ctx.distortion;
    auto value = [&](double a, double b) {
        Matrix q{{1.0 - a, a}, {b, 1.0 - b}};
        return ctx.objective(q);
    };
    // Feasible b-range at fixed a (intersection of per-member half planes).
    auto b_range = [&](double a) -> std::pair<double, double> {
        double lo = 0.0, hi = 1.0;
        for (const auto& p : ctx.members) {
            double base = p[0] * ((1.0 - a) * d[0][0] + a * d[0][1]) + p[1] * d[1][1];
            double coef = p[1] * (d[1][0] - d[1][1]);
            double slack = ctx.D + 1e-12 - base;
            if (std::abs(coef) < 1e-15) {
                if (slack < 0.0) return {1.0, -1.0};
            } else if (coef > 0.0) {
                hi = std::min(hi, slack / coef);
            } else {
                lo = std::max(lo, slack / coef);
            }
        }
        return {lo, hi};
    };
    auto phi = [&](double a) {
        auto [blo, bhi] = b_range(a);
        if (blo > bhi) return std::make_pair(inf, 0.0);
        blo = std::clamp(blo, 0.0, 1.0);
        bhi = std::clamp(bhi, 0.0, 1.0);
        if (blo > bhi) return std::make_pair(inf, 0.0);
        if (bhi - blo < 1e-13) return std::make_pair(value(a, blo), blo);
        auto [b, neg] = golden_section([&](double bb) { return -value(a, bb); }, blo, bhi, 1e-11);
        double best = -neg, best_b = b;
        for (double bb : {blo, bhi}) {
            double v = value(a, bb);
            if (v < best) {
                best = v;
                best_b = bb;
            }
        }
        return std::make_pair(best, best_b);
    };

    // Coarse scan locates the feasible stripe and the convex minimum's cell.
    const int steps = 400;
    double best = inf, best_a = 0.0, best_b = 0.0;
    int best_i = -1;
    for (int i = 0; i <= steps; ++i) {
        double a = static_cast<double>(i) / steps;
        auto [v, b] = phi(a);
        if (v < best) {
            best = v;
            best_a = a;
            best_b = b;
            best_i = i;
        }
    }
    if (best_i >= 0) {
        double lo = std::max(0.0, (best_i - 1.0) / steps);
        double hi = std::min(1.0, (best_i + 1.0) / steps);
        auto [a, neg] = golden_section([&](double aa) { return -phi(aa).first; }, lo, hi, 1e-11);
        auto [v, b] = phi(a);
        if (v < best) {
            best = v;
            best_a = a;
            best_b = b;
        }
    }
    Matrix q{{1.0 - best_a, best_a}, {best_b, 1.0 - best_b}};
    return {best, q};
}

// Largest target t <= D whose classical R(t) solution for member p is
// feasible for the whole family; returns that solution.
Matrix feasible_classical_solution(const MinimaxContext& ctx, const std::vector<double>& p,
                                   const OptimizerConfig& config) {
    Matrix q;
    classical_rate_distortion(p, *ctx.distortion, ctx.D, &q, config);
    if (ctx.feasible(q)) return q;
    double lo = 0.0, hi = ctx.D;
    Matrix best = q;
    bool have = false;
    for (int iter = 0; iter < 60; ++iter) {
        double t = 0.5 * (lo + hi);
        classical_rate_distortion(p, *ctx.distortion, t, &q, config);
        if (ctx.feasible(q)) {
            best = q;
            have = true;
            lo = t;
        } else {
            hi = t;
        }
    }
    if (!have) {
        // Fall back to the per-row minimal-distortion map (always feasible
        // when the problem itself is feasible).
        const std::size_t nx = p.size(), nm = ctx.distortion->at(0).size();
        best = Matrix(nx, std::vector<double>(nm, 0.0));
        for (std::size_t x = 0; x < nx; ++x) {
            const auto& row = (*ctx.distortion)[x];
            best[x][static_cast<std::size_t>(std::min_element(row.begin(), row.end()) -
                                             row.begin())] = 1.0;
        }
    }
    return best;
}

}  // namespace

MinimaxResult minimax_over_q(const DistributionFamily& source, const Matrix& distortion, double D,
                             const OptimizerConfig& config) {
    config.validate();
    const std::size_t nx = source.alphabet().size();
    check_distortion_matrix(distortion, nx);
    if (!(D >= 0.0)) throw std::invalid_argument("minimax_over_q: D must be >= 0");
    const std::size_t nm = distortion[0].size();

    MinimaxResult result;
    std::vector<double> row_min(nx);
    for (std::size_t x = 0; x < nx; ++x)
        row_min[x] = *std::min_element(distortion[x].begin(), distortion[x].end());
    result.min_achievable_distortion = sublinear_expectation(source, row_min);
    if (D < result.min_achievable_distortion - 1e-12) {
        result.feasible = false;
        return result;
    }

    MinimaxContext ctx;
    for (const auto& m : source.materialize(config.theta_grid)) ctx.members.push_back(m.probs);
    ctx.distortion = &distortion;
    ctx.D = D;

    // Zero-rate shortcut: any feasible constant reproduction ends the search.
    for (std::size_t m = 0; m < nm; ++m) {
        Matrix q(nx, std::vector<double>(nm, 0.0));
        for (std::size_t x = 0; x < nx; ++x) q[x][m] = 1.0;
        if (ctx.feasible(q)) {
            result.value_bits = result.alternating_value = 0.0;
            result.q_star = q;
            if (nx == 2 && nm == 2) {
                result.oracle_used = true;
                result.oracle_value = 0.0;
            }
            return result;
        }
    }

    // Fast path: per-member classical solutions, witness alternation, polish.
    Matrix best_q;
    double best_val = std::numeric_limits<double>::infinity();
    for (const auto& p : ctx.members) {
        Matrix q = feasible_classical_solution(ctx, p, config);
        double v = ctx.objective(q);
        if (v < best_val) {
            best_val = v;
            best_q = q;
        }
    }
    for (int round = 0; round < 50; ++round) {
        std::size_t witness = 0;
        double worst = -1.0;
        for (std::size_t i = 0; i < ctx.members.size(); ++i) {
            double v = mutual_information_bits(ctx.members[i], best_q);
            if (v > worst) {
                worst = v;
                witness = i;
            }
        }
        Matrix q = feasible_classical_solution(ctx, ctx.members[witness], config);
        double v = ctx.objective(q);
        if (v < best_val - 1e-12) {
            best_val = v;
            best_q = q;
        } else {
            break;
        }
    }
    best_val = pattern_polish(ctx, best_q);
    result.alternating_value = best_val;
    result.value_bits = best_val;
    result.q_star = best_q;

    if (nx == 2 && nm == 2) {
        auto [grid_val, grid_q] = exact_2x2(ctx);
        if (std::isfinite(grid_val)) {
            result.oracle_used = true;
            result.oracle_value = grid_val;
            result.mismatch_flagged = std::abs(grid_val - result.alternating_value) > 1e-4;
            if (grid_val < result.value_bits) {
                result.value_bits = grid_val;
                result.q_star = grid_q;
            }
        }
    }
    return result;
}

}  // namespace nonlinfo
