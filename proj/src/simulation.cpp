#include "pcd/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace pcd {

namespace {
const double kSqrt3 = std::sqrt(3.0);
const double kEpsMax = kSqrt3 / 3.0;

const Barycentric kE0{1.0, 0.0, 0.0};
const Barycentric kE1{0.0, 1.0, 0.0};
const Barycentric kE2{0.0, 0.0, 1.0};

Barycentric mix(const Barycentric& a, const Barycentric& b, double s) {
    return {(1.0 - s) * a.b1 + s * b.b1, (1.0 - s) * a.b2 + s * b.b2,
            (1.0 - s) * a.b3 + s * b.b3};
}

Barycentric combine(const BaryTriangle& t, const Barycentric& l) {
    return {l.b1 * t.a.b1 + l.b2 * t.b.b1 + l.b3 * t.c.b1,
            l.b1 * t.a.b2 + l.b2 * t.b.b2 + l.b3 * t.c.b2,
            l.b1 * t.a.b3 + l.b2 * t.b.b3 + l.b3 * t.c.b3};
}

double bary_area_fraction(const Barycentric& a, const Barycentric& b, const Barycentric& c) {
    const double u1 = b.b2 - a.b2, u2 = b.b3 - a.b3;
    const double v1 = c.b2 - a.b2, v2 = c.b3 - a.b3;
    return std::fabs(u1 * v2 - u2 * v1);
}

void push_tri(SupportMesh& mesh, const Barycentric& a, const Barycentric& b,
              const Barycentric& c) {
    const double f = bary_area_fraction(a, b, c);
    if (f <= 0.0) return;
    mesh.tris.push_back({a, b, c, f});
}

void check_epsilon(double eps) {
    if (!(eps > 0.0 && eps < kEpsMax))
        fail(errc::epsilon_out_of_range, "epsilon must lie in (0, sqrt(3)/3)");
}

} // namespace

AlternativeSpec AlternativeSpec::segregation(double eps) {
    check_epsilon(eps);
    return {Kind::segregation, eps};
}

AlternativeSpec AlternativeSpec::association(double eps) {
    check_epsilon(eps);
    return {Kind::association, eps};
}

const char* pattern_name(AlternativeSpec::Kind k) {
    switch (k) {
        case AlternativeSpec::Kind::csr: return "csr";
        case AlternativeSpec::Kind::segregation: return "segregation";
        case AlternativeSpec::Kind::association: return "association";
    }
    return "?";
}

double segregation_corner_ratio(double eps) { return 2.0 * eps / kSqrt3; }

double association_corner_ratio(double eps) { return 2.0 * (kEpsMax - eps) / kSqrt3; }

SupportMesh alternative_support(const AlternativeSpec& spec) {
    SupportMesh mesh;
    switch (spec.kind) {
        case AlternativeSpec::Kind::csr:
            push_tri(mesh, kE0, kE1, kE2);
            break;
        case AlternativeSpec::Kind::segregation: {
            check_epsilon(spec.epsilon);
            const double s = segregation_corner_ratio(spec.epsilon);
            if (s < 0.5) {
                // hexagon left after chopping three disjoint corners; fan from
                // the first boundary vertex
                const Barycentric h[6] = {mix(kE0, kE1, s), mix(kE1, kE0, s), mix(kE1, kE2, s),
                                          mix(kE2, kE1, s), mix(kE2, kE0, s), mix(kE0, kE2, s)};
                for (int k = 1; k + 1 < 6; ++k) push_tri(mesh, h[0], h[k], h[k + 1]);
            } else {
                // overlapping corners leave the inner inverted triangle
                const double t = 1.0 - s;
                const Barycentric w0{1.0 - 2.0 * t, t, t};
                const Barycentric w1{t, 1.0 - 2.0 * t, t};
                const Barycentric w2{t, t, 1.0 - 2.0 * t};
                push_tri(mesh, w0, w1, w2);
            }
            break;
        }
        case AlternativeSpec::Kind::association: {
            check_epsilon(spec.epsilon);
            const double s = association_corner_ratio(spec.epsilon);
            if (s <= 0.5) {
                // three disjoint corner triangles
                push_tri(mesh, kE0, mix(kE0, kE1, s), mix(kE0, kE2, s));
                push_tri(mesh, kE1, mix(kE1, kE2, s), mix(kE1, kE0, s));
                push_tri(mesh, kE2, mix(kE2, kE0, s), mix(kE2, kE1, s));
            } else {
                // corner union = triangle minus the inner inverted triangle;
                // six-triangle ring
                const double t = 1.0 - s;
                const Barycentric w0{1.0 - 2.0 * t, t, t};
                const Barycentric w1{t, 1.0 - 2.0 * t, t};
                const Barycentric w2{t, t, 1.0 - 2.0 * t};
                push_tri(mesh, kE0, kE1, w2);
                push_tri(mesh, kE1, w0, w2);
                push_tri(mesh, kE1, kE2, w0);
                push_tri(mesh, kE2, w1, w0);
                push_tri(mesh, kE2, kE0, w1);
                push_tri(mesh, kE0, w2, w1);
            }
            break;
        }
    }
    mesh.area_fraction = 0.0;
    for (const BaryTriangle& t : mesh.tris) mesh.area_fraction += t.area_fraction;
    double acc = 0.0;
    for (const BaryTriangle& t : mesh.tris) {
        acc += t.area_fraction / mesh.area_fraction;
        mesh.cum.push_back(acc);
    }
    mesh.cum.back() = 1.0;
    return mesh;
}

bool in_support(const AlternativeSpec& spec, const Barycentric& b, double tol) {
    if (!b.inside(std::max(tol, kInsideTol))) return false;
    switch (spec.kind) {
        case AlternativeSpec::Kind::csr:
            return true;
        case AlternativeSpec::Kind::segregation:
            return b.max() <= 1.0 - segregation_corner_ratio(spec.epsilon) + tol;
        case AlternativeSpec::Kind::association:
            return b.max() >= 1.0 - association_corner_ratio(spec.epsilon) - tol;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

Barycentric sample_uniform_bary(Rng& rng) {
    const double su = std::sqrt(rng.uniform());
    const double v = rng.uniform();
    return {1.0 - su, su * (1.0 - v), su * v};
}

Barycentric sample_support(const SupportMesh& mesh, Rng& rng) {
    size_t k = 0;
    if (mesh.tris.size() > 1) {
        const double u = rng.uniform();
        k = std::lower_bound(mesh.cum.begin(), mesh.cum.end(), u) - mesh.cum.begin();
        if (k >= mesh.tris.size()) k = mesh.tris.size() - 1;
    }
    return combine(mesh.tris[k], sample_uniform_bary(rng));
}

TriangleAreas triangle_areas(const Triangulation& tri) {
    TriangleAreas areas;
    double acc = 0.0;
    for (int j = 0; j < tri.j_m(); ++j) {
        acc += tri.triangle(j).area();
        areas.cum.push_back(acc);
    }
    areas.total = acc;
    return areas;
}

int pick_triangle(const TriangleAreas& areas, Rng& rng) {
    if (areas.cum.size() == 1) return 0;
    const double u = rng.uniform() * areas.total;
    const auto it = std::lower_bound(areas.cum.begin(), areas.cum.end(), u);
    return std::min<int>(static_cast<int>(it - areas.cum.begin()),
                         static_cast<int>(areas.cum.size()) - 1);
}

std::vector<Point2> sample_uniform_hull(const Triangulation& tri, int n, Rng& rng) {
    return sample_alternative(tri, n, AlternativeSpec::csr(), rng);
}

std::vector<Point2> sample_alternative(const Triangulation& tri, int n,
                                       const AlternativeSpec& spec, Rng& rng) {
    const SupportMesh mesh = alternative_support(spec);
    const TriangleAreas areas = triangle_areas(tri);
    std::vector<Triangle> tris;
    for (int j = 0; j < tri.j_m(); ++j) tris.push_back(tri.triangle(j));

    std::vector<Point2> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        const int j = pick_triangle(areas, rng);
        out.push_back(tris[j].point_at(sample_support(mesh, rng)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parallel replicate loop
// ---------------------------------------------------------------------------

void parallel_for(int n_items, int threads, const std::function<void(int)>& body) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n_items));
    if (threads == 1) {
        for (int i = 0; i < n_items; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n_items; i = next.fetch_add(1)) body(i);
        });
    for (std::thread& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Shared per-replicate machinery: sample once, evaluate gamma at every r.
// ---------------------------------------------------------------------------

namespace {

struct ReplicateSampler {
    const Triangulation& tri;
    TriangleAreas areas;
    SupportMesh mesh;

    ReplicateSampler(const Triangulation& t, const AlternativeSpec& spec)
        : tri(t), areas(triangle_areas(t)), mesh(alternative_support(spec)) {}

    // buckets[j] = barycentric coordinates of the points landing in triangle j
    void sample(int n, Rng& rng, std::vector<std::vector<Barycentric>>& buckets) const {
        buckets.assign(tri.j_m(), {});
        for (int i = 0; i < n; ++i) {
            const int j = pick_triangle(areas, rng);
            buckets[j].push_back(sample_support(mesh, rng));
        }
    }
};

long gamma_total_at(const std::vector<std::vector<Barycentric>>& buckets,
                    const CenterSpec& center, const Expansion& r) {
    const Barycentric m = resolve_center(center, r.value());
    long total = 0;
    for (const auto& pts : buckets) total += gamma_of_barycentric(pts, m, r);
    return total;
}

} // namespace

// ---------------------------------------------------------------------------
// Frequency experiment
// ---------------------------------------------------------------------------

FrequencyTable gamma_frequency_experiment(const Triangulation& tri, const CenterSpec& center,
                                          std::span<const double> r_values,
                                          std::span<const int> n_grid,
                                          const AlternativeSpec& pattern, int n_mc,
                                          std::uint64_t seed, int threads) {
    if (n_mc < 1) fail(errc::invalid_argument, "n_mc must be >= 1");
    FrequencyTable table;
    table.r_values.assign(r_values.begin(), r_values.end());
    std::sort(table.r_values.begin(), table.r_values.end());
    table.n_grid.assign(n_grid.begin(), n_grid.end());
    table.j_m = tri.j_m();
    table.n_mc = n_mc;
    table.seed = seed;
    table.pattern = pattern;

    const int nr = static_cast<int>(table.r_values.size());
    const int nn = static_cast<int>(table.n_grid.size());
    const int gmax = 3 * tri.j_m();
    table.counts.assign(nr, std::vector<std::vector<long>>(nn, std::vector<long>(gmax + 1, 0)));

    std::vector<Expansion> rs;
    for (double r : table.r_values) rs.push_back(Expansion(r));

    const ReplicateSampler sampler(tri, pattern);
    const Rng root(seed);

    // gamma[rep][ni*nr + ri]
    std::vector<std::vector<long>> gamma(n_mc);
    parallel_for(n_mc, threads, [&](int rep) {
        std::vector<std::vector<Barycentric>> buckets;
        std::vector<long>& out = gamma[rep];
        out.resize(static_cast<size_t>(nn) * nr);
        for (int ni = 0; ni < nn; ++ni) {
            Rng rng = root.substream(static_cast<std::uint64_t>(ni) * 0x10000000ULL + rep);
            sampler.sample(table.n_grid[ni], rng, buckets);
            for (int ri = 0; ri < nr; ++ri)
                out[static_cast<size_t>(ni) * nr + ri] = gamma_total_at(buckets, center, rs[ri]);
        }
    });

    // Pointwise monotonicity in r holds for a fixed center; tau centers move
    // with r, so the audit only applies to the r-independent kinds.
    const bool audit = center.kind != CenterKind::tau_vertex;
    for (int rep = 0; rep < n_mc; ++rep)
        for (int ni = 0; ni < nn; ++ni)
            for (int ri = 0; ri < nr; ++ri) {
                const long g = gamma[rep][static_cast<size_t>(ni) * nr + ri];
                ++table.counts[ri][ni][g];
                if (audit && ri > 0 &&
                    g > gamma[rep][static_cast<size_t>(ni) * nr + ri - 1])
                    ++table.monotonicity_violations;
            }
    return table;
}

// ---------------------------------------------------------------------------
// Size / power experiment
// ---------------------------------------------------------------------------

double SizePowerResult::standard_error(double f, int n_mc) {
    return std::sqrt(std::max(f * (1.0 - f), 0.0) / n_mc);
}

const char* SizePowerResult::size_classification(double f) {
    if (f < 0.039) return "conservative";
    if (f > 0.061) return "liberal";
    return "nominal";
}

SizePowerResult size_power_experiment(const Triangulation& tri, const SizePowerConfig& cfg) {
    if (cfg.r_grid.empty()) fail(errc::invalid_argument, "empty r grid");
    SizePowerResult result;
    result.n = cfg.n;
    result.n_mc = cfg.n_mc;
    result.j_m = tri.j_m();
    result.alpha = cfg.alpha;
    result.seed = cfg.seed;

    std::vector<double> grid = cfg.r_grid;
    std::sort(grid.begin(), grid.end());

    struct PerR {
        Expansion r{1.5};
        NullDistribution null;
        long b_lower_crit = 0;
        long b_upper_crit = 0;
        double z_lower = 0.0, z_upper = 0.0;
    };
    std::vector<PerR> per_r;
    for (double r : grid) {
        PerR p{Expansion(r), {}, 0, 0, 0.0, 0.0};
        p.null = null_distribution({p.r, cfg.center}, tri.j_m(), cfg.quad);
        const double q = 1.0 - p.null.p_r;
        p.b_lower_crit = binomial_critical(tri.j_m(), q, cfg.alpha, Side::lower);
        p.b_upper_crit = binomial_critical(tri.j_m(), q, cfg.alpha, Side::upper);
        p.z_lower = normal_quantile(cfg.alpha);
        p.z_upper = normal_quantile(1.0 - cfg.alpha);
        per_r.push_back(p);
    }

    const ReplicateSampler sampler(tri, cfg.pattern);
    const Rng root(cfg.seed);
    const int nr = static_cast<int>(grid.size());

    // decisions[rep]: packed 4 bits per r (bl, bu, nl, nu) plus gamma for the
    // monotonicity audit
    std::vector<std::vector<unsigned char>> decisions(cfg.n_mc);
    std::vector<std::vector<long>> gammas(cfg.n_mc);

    parallel_for(cfg.n_mc, cfg.threads, [&](int rep) {
        std::vector<std::vector<Barycentric>> buckets;
        Rng rng = root.substream(static_cast<std::uint64_t>(rep));
        sampler.sample(cfg.n, rng, buckets);
        auto& dec = decisions[rep];
        auto& gam = gammas[rep];
        dec.resize(nr);
        gam.resize(nr);
        for (int ri = 0; ri < nr; ++ri) {
            const PerR& pr = per_r[ri];
            const long gamma = gamma_total_at(buckets, cfg.center, pr.r);
            gam[ri] = gamma;
            const long u = gamma - 2L * tri.j_m();
            const double gbar = static_cast<double>(gamma) / tri.j_m();
            const double s = (gbar - pr.null.mu) / std::sqrt(pr.null.sigma2 / tri.j_m());
            unsigned char bits = 0;
            if (u <= pr.b_lower_crit) bits |= 1;
            if (u >= pr.b_upper_crit) bits |= 2;
            if (s < pr.z_lower) bits |= 4;
            if (s > pr.z_upper) bits |= 8;
            dec[ri] = bits;
        }
    });

    std::vector<std::array<long, 4>> tallies(nr, {0, 0, 0, 0});
    const bool audit = cfg.center.kind != CenterKind::tau_vertex;
    for (int rep = 0; rep < cfg.n_mc; ++rep)
        for (int ri = 0; ri < nr; ++ri) {
            const unsigned char bits = decisions[rep][ri];
            for (int b = 0; b < 4; ++b)
                if (bits & (1 << b)) ++tallies[ri][b];
            if (audit && ri > 0 && gammas[rep][ri] > gammas[rep][ri - 1])
                ++result.monotonicity_violations;
        }

    for (int ri = 0; ri < nr; ++ri) {
        SizePowerRow row;
        row.r = grid[ri];
        row.p_r = per_r[ri].null.p_r;
        row.binom_lower = static_cast<double>(tallies[ri][0]) / cfg.n_mc;
        row.binom_upper = static_cast<double>(tallies[ri][1]) / cfg.n_mc;
        row.norm_lower = static_cast<double>(tallies[ri][2]) / cfg.n_mc;
        row.norm_upper = static_cast<double>(tallies[ri][3]) / cfg.n_mc;
        result.rows.push_back(row);
    }
    return result;
}

// ---------------------------------------------------------------------------
// pi_out experiment (both classes uniform on the unit square)
// ---------------------------------------------------------------------------

std::vector<PiOutRow> pi_out_experiment(const PiOutConfig& cfg) {
    std::vector<PiOutRow> rows;
    const Rng root(cfg.seed);
    for (size_t mi = 0; mi < cfg.m_grid.size(); ++mi) {
        const int m = cfg.m_grid[mi];
        if (m < 4) fail(errc::invalid_argument, "pi_out experiment needs m >= 4");
        std::vector<double> fractions(cfg.n_mc, 0.0);
        parallel_for(cfg.n_mc, cfg.threads, [&](int rep) {
            Rng rng = root.substream((static_cast<std::uint64_t>(mi) << 32) | rep);
            std::vector<Point2> hull;
            for (int attempt = 0; attempt < 100 && hull.empty(); ++attempt) {
                std::vector<Point2> y(m);
                for (Point2& p : y) p = {rng.uniform(), rng.uniform()};
                try {
                    hull = convex_hull(y);
                } catch (const Error&) {
                    // degenerate draw (measure zero); redraw from the stream
                }
            }
            int outside = 0;
            for (int i = 0; i < cfg.n; ++i) {
                const Point2 p{rng.uniform(), rng.uniform()};
                if (!point_in_convex_polygon(hull, p)) ++outside;
            }
            fractions[rep] = static_cast<double>(outside) / cfg.n;
        });
        PiOutRow row;
        row.m = m;
        double mean = 0.0;
        for (double f : fractions) mean += f;
        mean /= cfg.n_mc;
        double var = 0.0;
        for (double f : fractions) var += (f - mean) * (f - mean);
        var /= std::max(cfg.n_mc - 1, 1);
        row.pi_out = mean;
        row.se = std::sqrt(var / cfg.n_mc);
        row.fitted = 1.7932 / m + 1.2229 / std::sqrt(static_cast<double>(m));
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// G-bar histogram
// ---------------------------------------------------------------------------

double GbarHistogram::mean_of(int n) const {
    double tot = 0.0, weight = 0.0;
    for (const Cell& c : cells)
        if (c.n == n) {
            tot += 0.5 * (c.lo + c.hi) * c.count;
            weight += c.count;
        }
    return weight > 0 ? tot / weight : 0.0;
}

GbarHistogram gbar_histogram(const Triangulation& tri, const PcdParams& params,
                             std::span<const int> n_grid, int n_mc, std::uint64_t seed,
                             int bins, int threads) {
    GbarHistogram hist;
    hist.n_grid.assign(n_grid.begin(), n_grid.end());
    const ReplicateSampler sampler(tri, AlternativeSpec::csr());
    const Rng root(seed);

    for (size_t ni = 0; ni < hist.n_grid.size(); ++ni) {
        const int n = hist.n_grid[ni];
        std::vector<double> gbar(n_mc, 0.0);
        parallel_for(n_mc, threads, [&](int rep) {
            std::vector<std::vector<Barycentric>> buckets;
            Rng rng = root.substream((static_cast<std::uint64_t>(ni) << 32) | rep);
            sampler.sample(n, rng, buckets);
            gbar[rep] =
                static_cast<double>(gamma_total_at(buckets, params.center, params.r)) / tri.j_m();
        });
        const auto [lo_it, hi_it] = std::minmax_element(gbar.begin(), gbar.end());
        double lo = *lo_it, hi = *hi_it;
        if (hi <= lo) hi = lo + 1e-9;
        const double width = (hi - lo) / bins;
        std::vector<long> counts(bins, 0);
        for (double g : gbar) {
            int b = static_cast<int>((g - lo) / width);
            if (b >= bins) b = bins - 1;
            ++counts[b];
        }
        for (int b = 0; b < bins; ++b)
            hist.cells.push_back({n, lo + b * width, lo + (b + 1) * width, counts[b]});
    }
    return hist;
}

} // namespace pcd
