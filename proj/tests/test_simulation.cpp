#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "pcd/io.hpp"
#include "pcd/simulation.hpp"

using namespace pcd;

namespace {
const double kSqrt3 = std::sqrt(3.0);

Triangulation te_triangulation() {
    const Triangle& te = standard_triangle();
    return single_triangle(std::vector<Point2>{te.v(0), te.v(1), te.v(2)});
}

// Sutherland-Hodgman clip of a polygon against the half-plane left of a->b.
std::vector<Point2> clip_halfplane(const std::vector<Point2>& poly, Point2 a, Point2 b) {
    std::vector<Point2> out;
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Point2 p = poly[i];
        const Point2 q = poly[(i + 1) % n];
        const double sp = signed_area2(a, b, p);
        const double sq = signed_area2(a, b, q);
        if (sp >= 0) out.push_back(p);
        if ((sp > 0 && sq < 0) || (sp < 0 && sq > 0)) {
            const double t = sp / (sp - sq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

double cell_hull_area(const std::vector<Point2>& hull, double x0, double y0, double x1,
                      double y1) {
    std::vector<Point2> poly = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    for (size_t i = 0; i < hull.size() && !poly.empty(); ++i)
        poly = clip_halfplane(poly, hull[i], hull[(i + 1) % hull.size()]);
    return poly.size() >= 3 ? polygon_area(poly) : 0.0;
}

double chi_squared_sf(double x, int df) {
    return boost::math::gamma_q(df / 2.0, x / 2.0);
}
} // namespace

TEST_CASE("rng determinism and substreams") {
    Rng a(12345), b(12345), c(54321);
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next();
        CHECK(va == b.next());
        CHECK(va != c.next());
    }
    Rng r(7);
    Rng s1 = r.substream(1), s1b = r.substream(1), s2 = r.substream(2);
    CHECK(s1.next() == s1b.next());
    CHECK(r.substream(1).next() != s2.next());
    double u = Rng(1).uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
}

TEST_CASE("alternative spec validation") {
    CHECK_THROWS_AS(AlternativeSpec::segregation(0.0), Error);
    CHECK_THROWS_AS(AlternativeSpec::segregation(kSqrt3 / 3), Error);
    CHECK_THROWS_AS(AlternativeSpec::association(-0.1), Error);
    CHECK(AlternativeSpec::segregation(0.2).epsilon == 0.2);
}

TEST_CASE("support meshes have the right area") {
    // three disjoint corners chopped: 1 - 3 s^2 with s = 2 eps / sqrt(3)
    auto seg = alternative_support(AlternativeSpec::segregation(kSqrt3 / 8));
    CHECK(seg.area_fraction == doctest::Approx(13.0 / 16).epsilon(1e-12));
    // overlapping corners leave the inner inverted triangle
    auto seg_big = alternative_support(AlternativeSpec::segregation(0.55));
    const double s = 2 * 0.55 / kSqrt3;
    CHECK(seg_big.area_fraction == doctest::Approx(std::pow(2.0 - 3.0 * (1.0 - (1 - s)) , 2)).epsilon(1e-9));
    CHECK(seg_big.tris.size() == 1);
    // association corner union, disjoint and overlapping
    auto a1 = alternative_support(AlternativeSpec::association(5 * kSqrt3 / 24));
    CHECK(a1.area_fraction == doctest::Approx(3.0 / 16).epsilon(1e-12));
    auto a2 = alternative_support(AlternativeSpec::association(kSqrt3 / 21));
    CHECK(a2.area_fraction == doctest::Approx(45.0 / 49).epsilon(1e-12));
    // epsilon -> 0 recovers (almost) the whole triangle under either class
    auto tiny_s = alternative_support(AlternativeSpec::segregation(1e-9));
    CHECK(tiny_s.area_fraction == doctest::Approx(1.0).epsilon(1e-12));
    auto tiny_a = alternative_support(AlternativeSpec::association(1e-9));
    CHECK(tiny_a.area_fraction == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sampled points satisfy the support predicate") {
    Rng rng(8);
    for (double eps : {0.05, kSqrt3 / 8, 0.4, 0.55}) {
        auto spec = AlternativeSpec::segregation(eps);
        auto mesh = alternative_support(spec);
        for (int i = 0; i < 20000; ++i) {
            const Barycentric b = sample_support(mesh, rng);
            CHECK(in_support(spec, b));
        }
    }
    for (double eps : {0.05, kSqrt3 / 21, kSqrt3 / 12, 5 * kSqrt3 / 24, 0.5}) {
        auto spec = AlternativeSpec::association(eps);
        auto mesh = alternative_support(spec);
        for (int i = 0; i < 20000; ++i) {
            const Barycentric b = sample_support(mesh, rng);
            CHECK(in_support(spec, b));
        }
    }
}

TEST_CASE("mesh sampling agrees with the rejection-sampling oracle") {
    Rng rng(515);
    for (auto spec : {AlternativeSpec::segregation(kSqrt3 / 8),
                      AlternativeSpec::association(kSqrt3 / 12)}) {
        auto mesh = alternative_support(spec);
        const int N = 200000;

        // acceptance fraction of uniform proposals matches the support area
        int accepted = 0;
        double rx = 0.0, ry = 0.0, rxx = 0.0;
        while (accepted < N / 4) {
            const Barycentric b = sample_uniform_bary(rng);
            if (!in_support(spec, b, 0.0)) continue;
            ++accepted;
            rx += b.b1;
            ry += b.b2;
            rxx += b.b1 * b.b1;
        }

        double mx = 0.0, my = 0.0, mxx = 0.0;
        for (int i = 0; i < N / 4; ++i) {
            const Barycentric b = sample_support(mesh, rng);
            mx += b.b1;
            my += b.b2;
            mxx += b.b1 * b.b1;
        }
        const double k = 4.0 / N;
        // first and second moments agree within Monte Carlo noise (~4 SE)
        CHECK(std::fabs(rx * k - mx * k) < 0.005);
        CHECK(std::fabs(ry * k - my * k) < 0.005);
        CHECK(std::fabs(rxx * k - mxx * k) < 0.005);
    }

    // acceptance rate itself: binomial check against the mesh area
    auto spec = AlternativeSpec::segregation(kSqrt3 / 4);
    auto mesh = alternative_support(spec);
    int acc = 0;
    const int M = 100000;
    for (int i = 0; i < M; ++i)
        if (in_support(spec, sample_uniform_bary(rng), 0.0)) ++acc;
    const double f = static_cast<double>(acc) / M;
    const double se = std::sqrt(mesh.area_fraction * (1 - mesh.area_fraction) / M);
    CHECK(std::fabs(f - mesh.area_fraction) < 4 * se);
}

TEST_CASE("uniform hull sampling: vertex regions and triangle weights") {
    // single triangle: the three M_C vertex regions each get a third
    auto tri = te_triangulation();
    Rng rng(99);
    auto pts = sample_uniform_hull(tri, 100000, rng);
    const Triangle& te = standard_triangle();
    const Barycentric mc{1.0 / 3, 1.0 / 3, 1.0 / 3};
    long counts[3] = {0, 0, 0};
    for (const Point2& p : pts) ++counts[vertex_region_of(mc, te.barycentric(p))];
    for (long c : counts) CHECK(std::fabs(c / 100000.0 - 1.0 / 3) < 0.01);

    // two equal-area triangles split the sample evenly
    std::vector<Point2> sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    auto sq_tri = delaunay_triangulate(sq);
    auto pts2 = sample_uniform_hull(sq_tri, 100000, rng);
    long in0 = 0;
    for (const Point2& p : pts2)
        if (sq_tri.locate(p) == 0) ++in0;
    CHECK(std::fabs(in0 / 100000.0 - 0.5) < 0.01);
}

TEST_CASE("chi-squared uniformity over the hull") {
    Rng rng(123);
    std::vector<Point2> y(10);
    for (auto& p : y) p = {rng.uniform(), rng.uniform()};
    auto tri = delaunay_triangulate(y);
    const auto hull = tri.hull_points();
    const double hull_area = polygon_area(hull);

    const int N = 100000;
    auto pts = sample_uniform_hull(tri, N, rng);

    // 10x10 grid over the unit square, cells clipped to the hull
    long counts[10][10] = {};
    for (const Point2& p : pts) {
        int i = std::min(9, std::max(0, static_cast<int>(p.x * 10)));
        int j = std::min(9, std::max(0, static_cast<int>(p.y * 10)));
        ++counts[i][j];
    }
    double chi2 = 0.0;
    int df = 0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const double frac =
                cell_hull_area(hull, i / 10.0, j / 10.0, (i + 1) / 10.0, (j + 1) / 10.0) /
                hull_area;
            const double expect = frac * N;
            if (expect < 5.0) continue;
            chi2 += (counts[i][j] - expect) * (counts[i][j] - expect) / expect;
            ++df;
        }
    REQUIRE(df > 20);
    CHECK(chi_squared_sf(chi2, df - 1) > 0.001);
}

TEST_CASE("frequency experiment is reproducible and thread-invariant") {
    auto tri = te_triangulation();
    std::vector<double> rs = {1.25, 1.5};
    std::vector<int> ns = {20, 100};
    auto a = gamma_frequency_experiment(tri, CenterSpec::mass_center(), rs, ns,
                                        AlternativeSpec::csr(), 200, 33, 1);
    auto b = gamma_frequency_experiment(tri, CenterSpec::mass_center(), rs, ns,
                                        AlternativeSpec::csr(), 200, 33, 4);
    CHECK(a.counts == b.counts);
    CHECK(a.monotonicity_violations == 0);
    for (size_t ri = 0; ri < rs.size(); ++ri)
        for (size_t ni = 0; ni < ns.size(); ++ni) {
            long tot = 0;
            for (long c : a.counts[ri][ni]) tot += c;
            CHECK(tot == 200);
        }
}

TEST_CASE("degenerate limits under the alternatives") {
    auto tri = te_triangulation();
    std::vector<int> ns = {100, 1000, 5000};

    // segregation at the nondegenerate boundary r = 3/2 - eps sqrt(3)/2 = 21/16
    std::vector<double> r_seg = {21.0 / 16};
    auto seg = gamma_frequency_experiment(tri, CenterSpec::mass_center(), r_seg, ns,
                                          AlternativeSpec::segregation(kSqrt3 / 8), 400, 11, 4);
    double prev = 0.0;
    for (size_t ni = 0; ni < ns.size(); ++ni) {
        const double frac = seg.fraction(0, ni, 2) + seg.fraction(0, ni, 3);
        CHECK(frac >= prev - 0.02);
        prev = frac;
    }
    CHECK(prev >= 0.99);

    // association with r above sqrt(3) / (2 * corner level): gamma -> 1
    std::vector<double> r_assoc = {2.5};
    auto assoc = gamma_frequency_experiment(tri, CenterSpec::mass_center(), r_assoc, ns,
                                            AlternativeSpec::association(kSqrt3 / 12), 400, 11, 4);
    prev = 0.0;
    for (size_t ni = 0; ni < ns.size(); ++ni) {
        const double frac = assoc.fraction(0, ni, 1);
        CHECK(frac >= prev - 0.02);
        prev = frac;
    }
    CHECK(prev >= 0.99);
}

TEST_CASE("stochastic ordering in epsilon under segregation") {
    // Larger epsilon pushes gamma down. The two r values pick up the
    // separation where each lives: near the epsilon_2 boundary (k = 2) and at
    // r = 3/2 (k = 1); dominance must hold everywhere.
    auto tri = te_triangulation();
    std::vector<int> n1000 = {1000};
    const int n_mc = 1000;
    const double se3 = 3.0 * std::sqrt(0.25 / n_mc);
    for (double r : {1.30, 1.5}) {
        std::vector<double> rv = {r};
        auto wide = gamma_frequency_experiment(tri, CenterSpec::mass_center(), rv, n1000,
                                               AlternativeSpec::segregation(kSqrt3 / 4), n_mc,
                                               5, 4);
        auto narrow = gamma_frequency_experiment(tri, CenterSpec::mass_center(), rv, n1000,
                                                 AlternativeSpec::segregation(kSqrt3 / 8), n_mc,
                                                 5, 4);
        auto cdf = [&](const FrequencyTable& t, int k) {
            long c = 0;
            for (int g = 0; g <= k; ++g) c += t.counts[0][0][g];
            return static_cast<double>(c) / n_mc;
        };
        for (int k : {1, 2}) CHECK(cdf(wide, k) >= cdf(narrow, k) - 2e-3);
        if (r == 1.30) CHECK(cdf(wide, 2) - cdf(narrow, 2) >= se3);
        if (r == 1.5) CHECK(cdf(wide, 1) - cdf(narrow, 1) >= se3);
    }
}

TEST_CASE("size classification bands") {
    CHECK(std::string(SizePowerResult::size_classification(0.03)) == "conservative");
    CHECK(std::string(SizePowerResult::size_classification(0.05)) == "nominal");
    CHECK(std::string(SizePowerResult::size_classification(0.062)) == "liberal");
    CHECK(SizePowerResult::standard_error(0.5, 100) == doctest::Approx(0.05));
}

TEST_CASE("size-power experiment runs and is reproducible") {
    auto y = read_points_csv(std::string(PCD_DATA_DIR) + "/y_layout_13.csv");
    auto tri = delaunay_triangulate(y);
    SizePowerConfig cfg;
    cfg.center = CenterSpec::tau(0);
    cfg.r_grid = {1.30};
    cfg.pattern = AlternativeSpec::segregation(kSqrt3 / 8);
    cfg.n = 500;
    cfg.n_mc = 300;
    cfg.seed = 77;
    cfg.threads = 4;
    auto a = size_power_experiment(tri, cfg);
    cfg.threads = 1;
    auto b = size_power_experiment(tri, cfg);
    REQUIRE(a.rows.size() == 1);
    CHECK(a.rows[0].norm_lower == b.rows[0].norm_lower);
    CHECK(a.rows[0].binom_lower == b.rows[0].binom_lower);
    CHECK(a.rows[0].norm_lower > 0.9); // strong segregation signal already at n=500
}

TEST_CASE("pi_out experiment matches the fitted curve") {
    PiOutConfig cfg;
    cfg.m_grid = {10, 20};
    cfg.n = 400;
    cfg.n_mc = 300;
    cfg.seed = 5150;
    cfg.threads = 4;
    auto rows = pi_out_experiment(cfg);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(std::fabs(row.pi_out - row.fitted) < 0.03);
        CHECK(row.se < 0.01);
    }
    // the fitted expectation decreases in m
    double prev = 1.0;
    for (int m : {10, 20, 30, 40, 50}) {
        const double fit = 1.7932 / m + 1.2229 / std::sqrt((double)m);
        CHECK(fit < prev);
        prev = fit;
    }
}

TEST_CASE("gbar histogram structure") {
    auto y = read_points_csv(std::string(PCD_DATA_DIR) + "/y_layout_13.csv");
    auto tri = delaunay_triangulate(y);
    std::vector<int> ns = {200};
    auto hist = gbar_histogram(tri, {Expansion(1.5), CenterSpec::mass_center()}, ns, 200, 9, 20,
                               4);
    long total = 0;
    for (const auto& c : hist.cells) {
        CHECK(c.lo < c.hi);
        total += c.count;
    }
    CHECK(total == 200);
    CHECK(hist.mean_of(200) > 1.5);
    CHECK(hist.mean_of(200) < 3.0);
}
