#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "risklab/interpolation.hpp"
#include "risklab/quadrature.hpp"
#include "risklab/random.hpp"
#include "risklab/roots.hpp"
#include "risklab/special.hpp"
#include "risklab/stats.hpp"

using namespace risklab;

TEST_SUITE("numerics") {
    TEST_CASE("adaptive quadrature on smooth and peaked integrands") {
        auto res = integrate([](double x) { return std::sin(x); }, 0.0, kPi);
        CHECK(res.converged);
        CHECK(res.value == doctest::Approx(2.0).epsilon(1e-13));

        QuadratureOptions opt;
        opt.initial_panels = 16;
        auto peak = integrate([](double x) { return std::exp(-1e6 * (x - 0.3) * (x - 0.3)); }, 0.0,
                              1.0, opt);
        CHECK(peak.value == doctest::Approx(std::sqrt(kPi / 1e6)).epsilon(1e-10));

        auto gauss = integrate_real_line([](double x) { return std::exp(-0.5 * x * x); });
        CHECK(gauss.value == doctest::Approx(std::sqrt(2 * kPi)).epsilon(1e-11));
    }

    TEST_CASE("root finder") {
        auto r = find_root([](double x) { return x * x - 2.0; }, 0.0, 2.0, {.f_tol = 1e-15});
        CHECK(r.x == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
        CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0),
                        NumericalError);
    }

    TEST_CASE("rng streams are reproducible and independent of siblings") {
        auto a = Rng::stream(42, {3, 1});
        auto b = Rng::stream(42, {3, 1});
        auto c = Rng::stream(42, {3, 2});
        for (int i = 0; i < 100; ++i) {
            const auto x = a();
            CHECK(x == b());
            CHECK(x != c());
        }
        // split() depends on the key only, not on consumed variates
        auto d = Rng::stream(7, {});
        const auto child_before = d.split(5)();
        for (int i = 0; i < 10; ++i) d();
        CHECK(d.split(5)() == child_before);
    }

    TEST_CASE("rng variates have the right moments") {
        auto rng = Rng::stream(1, {});
        std::vector<double> u, z;
        for (int i = 0; i < 200000; ++i) {
            u.push_back(rng.uniform());
            z.push_back(rng.normal());
        }
        auto mu = mean_and_stderr(u);
        auto mz = mean_and_stderr(z);
        CHECK(std::abs(mu.mean - 0.5) < 4 * mu.stderr_);
        CHECK(std::abs(mz.mean) < 4 * mz.stderr_);
        double v = 0;
        for (double x : z) v += x * x;
        CHECK(v / z.size() == doctest::Approx(1.0).epsilon(0.02));
        std::vector<int> counts(7, 0);
        for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
        for (int c : counts) CHECK(std::abs(c - 10000) < 400);
    }

    TEST_CASE("isotonic pooling") {
        std::vector<double> y = {5, 4, 4.5, 3, 3.2, 1};
        auto iso = isotonic_nonincreasing(y);
        CHECK(iso.pooled);
        CHECK(iso.values == std::vector<double>{5, 4.25, 4.25, 3.1, 3.1, 1});
        auto clean = isotonic_nonincreasing(std::vector<double>{3, 2, 1});
        CHECK_FALSE(clean.pooled);
    }

    TEST_CASE("batch means inflates the error of a correlated series") {
        auto rng = Rng::stream(9, {});
        std::vector<double> ar(100000);
        double x = 0;
        for (auto& v : ar) {
            x = 0.95 * x + rng.normal();
            v = x;
        }
        const auto naive = mean_and_stderr(ar);
        const auto bm = batch_means(ar, 20);
        // AR(1) inflation factor sqrt((1+phi)/(1-phi)) = 6.24
        CHECK(bm.stderr_ / naive.stderr_ > 4.0);
        CHECK(bm.effective_samples < 10000);
    }

    TEST_CASE("polynomial fit recovers a quadratic") {
        std::vector<double> xs = {0.1, 0.2, 0.35, 0.5, 0.9};
        std::vector<double> ys;
        for (double x : xs) ys.push_back(1 - 2 * x + 3 * x * x);
        auto c = polynomial_fit(xs, ys, 2);
        CHECK(c[0] == doctest::Approx(1).epsilon(1e-12));
        CHECK(c[1] == doctest::Approx(-2).epsilon(1e-12));
        CHECK(c[2] == doctest::Approx(3).epsilon(1e-12));
    }

    TEST_CASE("monotone cubic reproduces data and slopes of a line") {
        std::vector<double> xs = {0, 1, 2, 4}, ys = {1, 3, 5, 9};
        MonotoneCubic f(xs, ys);
        CHECK(f(3.0) == doctest::Approx(7.0));
        CHECK(f.derivative(0.5) == doctest::Approx(2.0));
        CHECK_THROWS(f(5.0));
        // monotone data stay monotone between nodes
        MonotoneCubic g(std::vector<double>{0, 1, 2, 3}, std::vector<double>{0, 0.1, 5, 5.1});
        double prev = -1;
        for (double x = 0; x <= 3; x += 0.01) {
            CHECK(g(x) >= prev - 1e-12);
            prev = g(x);
        }
    }
}
