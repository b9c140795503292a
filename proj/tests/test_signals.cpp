#include "bcx/fd.hpp"
#include "bcx/signals.hpp"

#include <doctest.h>

#include <cmath>

using namespace bcx;

TEST_CASE("fd_weights reproduce derivatives of polynomials exactly") {
    std::vector<double> nodes = {0.0, 0.5, 1.0, 1.5, 2.0};
    for (int m = 0; m <= 3; ++m) {
        auto w = fd_weights(0.0, nodes, m);
        // apply to x^3 + 2x^2 - x + 5
        auto f = [](double x) { return x * x * x + 2.0 * x * x - x + 5.0; };
        double d = 0.0;
        for (size_t i = 0; i < nodes.size(); ++i) d += w[i] * f(nodes[i]);
        const double want = m == 0 ? 5.0 : (m == 1 ? -1.0 : (m == 2 ? 4.0 : 6.0));
        CHECK(d == doctest::Approx(want).epsilon(1e-11));
    }
}

TEST_CASE("signal derivatives of callables") {
    TimeSignal s([](double t) { return std::exp(-0.7 * t) * std::sin(2.0 * t); });
    auto d1 = [](double t) {
        return std::exp(-0.7 * t) * (2.0 * std::cos(2.0 * t) - 0.7 * std::sin(2.0 * t));
    };
    for (double t : {0.0, 0.3, 1.7})
        CHECK(signal_derivative(s, t, 1) == doctest::Approx(d1(t)).epsilon(1e-8));
    CHECK(s.deriv0(1) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(s.deriv0(2) == doctest::Approx(-2.8).epsilon(1e-7));
    const double a = 0.7, b = 2.0;
    const double d3 = 3.0 * a * a * b - b * b * b; // f'''(0)
    CHECK(s.deriv0(3) == doctest::Approx(d3).epsilon(1e-5));
}

TEST_CASE("sampled signals: interpolation and one-sided grid derivatives") {
    TimeGrid g{0.0, 0.01, 400};
    std::vector<double> v(g.size());
    for (int i = 0; i < g.size(); ++i) {
        const double t = g.time(i);
        v[i] = 1.0 + 2.0 * t + 0.5 * t * t;
    }
    auto s = TimeSignal::sampled(g, v);
    CHECK(s(0.505) == doctest::Approx(1.0 + 2.0 * 0.505 + 0.5 * 0.505 * 0.505).epsilon(1e-4));
    CHECK(s.deriv0(1) == doctest::Approx(2.0).epsilon(1e-10)); // exact for quadratics
    CHECK(s.deriv0(2) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.deriv(2.0) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("series derivative is fourth order") {
    auto make_err = [](double dt) {
        TimeGrid g{0.0, dt, static_cast<int>(2.0 / dt)};
        std::vector<double> f(g.size());
        for (int i = 0; i < g.size(); ++i) f[i] = std::sin(3.0 * g.time(i));
        auto d = series_derivative(g, f);
        double err = 0.0;
        for (int i = 0; i < g.size(); ++i)
            err = std::max(err, std::abs(d[i] - 3.0 * std::cos(3.0 * g.time(i))));
        return err;
    };
    const double e1 = make_err(0.02);
    const double e2 = make_err(0.01);
    CHECK(e1 / e2 > 12.0); // ~16 for fourth order
}

TEST_CASE("cumulative integral: exact on cubics, fourth order on smooth") {
    TimeGrid g{0.0, 0.1, 50};
    std::vector<double> f(g.size());
    for (int i = 0; i < g.size(); ++i) {
        const double t = g.time(i);
        f[i] = t * t * t - 2.0 * t + 1.0;
    }
    auto I = cumulative_integral(g, f);
    for (int i = 0; i < g.size(); ++i) {
        const double t = g.time(i);
        const double want = t * t * t * t / 4.0 - t * t + t;
        CHECK(I[i] == doctest::Approx(want).epsilon(1e-11).scale(1.0));
    }

    auto make_err = [](double dt) {
        TimeGrid gg{0.0, dt, static_cast<int>(4.0 / dt)};
        std::vector<double> ff(gg.size());
        for (int i = 0; i < gg.size(); ++i) ff[i] = std::exp(std::sin(gg.time(i)));
        auto II = cumulative_integral(gg, ff);
        double err = 0.0;
        double acc = 0.0;
        const int sub = 64;
        for (int i = 1; i < gg.size(); ++i) {
            const double aa = gg.time(i - 1);
            const double h = (gg.time(i) - aa) / sub;
            for (int q = 0; q < sub; q += 2)
                acc += h / 3.0 *
                       (std::exp(std::sin(aa + q * h)) +
                        4.0 * std::exp(std::sin(aa + (q + 1) * h)) +
                        std::exp(std::sin(aa + (q + 2) * h)));
            err = std::max(err, std::abs(II[i] - acc));
        }
        return err;
    };
    const double e1 = make_err(0.05);
    const double e2 = make_err(0.025);
    CHECK(e1 / e2 > 10.0);

    std::vector<double> zeros(g.size(), 0.0);
    for (double v2 : cumulative_integral(g, zeros)) CHECK(v2 == 0.0);
}
