#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "genbound/finite_diff.hpp"
#include "genbound/param_vector.hpp"
#include "genbound/seeded_stream.hpp"

using namespace genbound;

TEST_CASE("seeded stream replays bit-identically for a fixed seed") {
    SeededStream s(42);
    CHECK(s.next_u64() == 13679457532755275413ULL);
    CHECK(s.next_u64() == 2949826092126892291ULL);
    CHECK(s.next_u64() == 5139283748462763858ULL);
    CHECK(s.next_u64() == 6349198060258255764ULL);
    CHECK(s.counter() == 4);

    SeededStream g(42);
    CHECK(g.next_gaussian() == 0.41471975043153048);
    CHECK(g.next_gaussian() == -0.89188621362775622);
    CHECK(g.next_gaussian() == 1.7295930879374015);

    SeededStream d = SeededStream(42).derive("batch", 3);
    CHECK(d.seed() == 17574842979071088803ULL);
    CHECK(d.next_u64() == 4244906731404720490ULL);
}

TEST_CASE("two streams with the same seed stay in lockstep") {
    SeededStream a(977), b(977);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("derived substreams are independent of the parent and each other") {
    SeededStream parent(5);
    SeededStream x = parent.derive("init");
    SeededStream y = parent.derive("batch");
    CHECK(parent.counter() == 0);  // deriving never advances the parent
    CHECK(x.seed() != y.seed());
    CHECK(x.next_u64() != y.next_u64());

    // label+index pairs must all land on distinct seeds
    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 200; ++i) seeds.insert(parent.derive("epoch", i).seed());
    for (std::uint64_t i = 0; i < 200; ++i) seeds.insert(parent.derive("probe", i).seed());
    CHECK(seeds.size() == 400);

    // drawing from one substream does not disturb a sibling
    SeededStream z1 = parent.derive("noise");
    SeededStream z2 = parent.derive("noise");
    (void)x.next_u64();
    for (int i = 0; i < 50; ++i) REQUIRE(z1.next_u64() == z2.next_u64());
}

TEST_CASE("uniforms live in [0,1) and positive uniforms in (0,1]") {
    SeededStream s(1);
    for (int i = 0; i < 10000; ++i) {
        double u = s.next_uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        double p = s.next_uniform_pos();
        REQUIRE(p > 0.0);
        REQUIRE(p <= 1.0);
    }
}

TEST_CASE("bounded draws cover the whole range without escaping it") {
    SeededStream s(9);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        std::uint64_t v = s.next_below(7);
        REQUIRE(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
    CHECK_THROWS_AS(s.next_below(0), std::invalid_argument);
}

TEST_CASE("gaussian_vector seed 7 dim 1e5 std 2 has the expected moments") {
    SeededStream s(7);
    ParamVector v = gaussian_vector(s, 100000, 2.0);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.dim());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.dim());
    CHECK(std::fabs(mean) <= 4.0 * 2.0 / std::sqrt(100000.0));
    CHECK(std::fabs(var - 4.0) <= 0.05 * 4.0);
    CHECK(s.counter() == 200000);  // exactly two words per coordinate
}

TEST_CASE("gaussian_vector moment sanity holds at 5 sigma across seeds") {
    for (std::uint64_t seed : {11ULL, 222ULL, 3333ULL, 44444ULL}) {
        SeededStream s(seed);
        const std::size_t dim = 20000;
        const double sd = 0.5;
        ParamVector v = gaussian_vector(s, dim, sd);
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(dim);
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(dim);
        REQUIRE(std::fabs(mean) <= 5.0 * sd / std::sqrt(static_cast<double>(dim)));
        REQUIRE(std::fabs(var - sd * sd) <=
                5.0 * sd * sd * std::sqrt(2.0 / static_cast<double>(dim)));
    }
}

TEST_CASE("gaussian_vector with std 0 gives zeros but advances the stream") {
    SeededStream a(13), b(13);
    ParamVector z = gaussian_vector(a, 64, 0.0);
    for (double x : z) REQUIRE(x == 0.0);
    (void)gaussian_vector(b, 64, 1.0);
    CHECK(a.counter() == b.counter());
}

TEST_CASE("gaussian_vector rejects bad arguments") {
    SeededStream s(1);
    CHECK_THROWS_AS(gaussian_vector(s, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_vector(s, 4, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_vector(s, 4, std::nan("")), std::invalid_argument);
}

TEST_CASE("rademacher_vector entries are +-1 with near-zero mean") {
    SeededStream s(3);
    const std::size_t dim = 40000;
    ParamVector v = rademacher_vector(s, dim);
    double sum = 0.0;
    for (double x : v) {
        REQUIRE((x == 1.0 || x == -1.0));
        sum += x;
    }
    CHECK(std::fabs(sum / static_cast<double>(dim)) <= 5.0 / std::sqrt(static_cast<double>(dim)));
    CHECK(s.counter() == dim);
}

TEST_CASE("param vector arithmetic and dimension checks") {
    ParamVector a(std::vector<double>{1.0, 2.0, 3.0});
    ParamVector b(std::vector<double>{0.5, -1.0, 4.0});
    ParamVector c = a + b;
    CHECK(c[0] == 1.5);
    CHECK(c[1] == 1.0);
    CHECK(c[2] == 7.0);
    c -= a;
    CHECK(c == b);
    CHECK(a.dot(b) == 0.5 - 2.0 + 12.0);
    CHECK(a.squared_norm() == 14.0);
    a.axpy(2.0, b);
    CHECK(a[1] == 0.0);

    ParamVector wrong(2);
    CHECK_THROWS_AS(a += wrong, std::invalid_argument);
    CHECK_THROWS_AS(a.dot(wrong), std::invalid_argument);

    ParamVector fin(std::vector<double>{1.0, 2.0});
    CHECK(fin.is_finite());
    fin[0] = std::numeric_limits<double>::infinity();
    CHECK_FALSE(fin.is_finite());
}

TEST_CASE("central difference is exact on quadratics") {
    // f(w) = a.w + 0.5 * sum_i d_i w_i^2 has gradient a + D w; the second
    // difference of a quadratic is linear in eps^2 with zero coefficient, so
    // the estimate matches analytically up to rounding.
    ParamVector a(std::vector<double>{0.3, -1.2, 2.0, 0.7});
    ParamVector d(std::vector<double>{1.0, 4.0, -2.0, 0.5});
    auto f = [&](const ParamVector& w) {
        double val = a.dot(w);
        for (std::size_t i = 0; i < w.dim(); ++i) val += 0.5 * d[i] * w[i] * w[i];
        return val;
    };
    ParamVector w(std::vector<double>{0.1, -0.4, 0.9, 1.3});
    ParamVector g = central_diff_gradient(f, w);
    for (std::size_t i = 0; i < w.dim(); ++i)
        REQUIRE(std::fabs(g[i] - (a[i] + d[i] * w[i])) <= 1e-10);
}

TEST_CASE("central difference flags non-finite evaluations with the coordinate") {
    auto f = [](const ParamVector& w) { return w[1] > 0.0 ? std::nan("") : 0.0; };
    ParamVector w(std::vector<double>{0.0, 0.0});
    try {
        central_diff_gradient(f, w, 0.1);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("coordinate 1") != std::string::npos);
    }
    CHECK_THROWS_AS(central_diff_gradient([](const ParamVector&) { return 0.0; }, w, 0.0),
                    std::invalid_argument);
}
