#include "arhmm/optim.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

using arhmm::minimize;
using arhmm::MinimizeOptions;

TEST_CASE("minimize solves a separable quadratic") {
    const arhmm::Objective f = [](const std::vector<double>& x) {
        double v = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - static_cast<double>(i);
            v += (1.0 + static_cast<double>(i)) * d * d;
        }
        return v;
    };
    const auto res = minimize(f, std::vector<double>(6, 5.0));
    CHECK(res.converged);
    CHECK(res.f < 1e-10);
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(res.x[i] == doctest::Approx(static_cast<double>(i)).epsilon(1e-4));
}

TEST_CASE("minimize solves Rosenbrock from the classic start") {
    const arhmm::Objective rosen = [](const std::vector<double>& x) {
        const double a = 1.0 - x[0];
        const double b = x[1] - x[0] * x[0];
        return a * a + 100.0 * b * b;
    };
    MinimizeOptions opts;
    opts.max_iters = 5000;
    opts.tol = 1e-14;
    const auto res = minimize(rosen, {-1.2, 1.0}, opts);
    CHECK(res.f < 1e-8);
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("minimize reports failure at a non-finite start") {
    const arhmm::Objective f = [](const std::vector<double>& x) {
        return std::sqrt(x[0]); // NaN for negative input
    };
    const auto res = minimize(f, {-1.0});
    CHECK_FALSE(res.converged);
    CHECK(!res.message.empty());
}

TEST_CASE("minimize never increases the objective") {
    // A mildly ill-conditioned quartic valley; track best-seen value.
    const arhmm::Objective f = [](const std::vector<double>& x) {
        double v = 0.0;
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            v += std::pow(x[i] + 2.0 * x[i + 1], 2.0) +
                 0.01 * std::pow(x[i] - 3.0, 4.0);
        }
        return v;
    };
    const std::vector<double> x0 = {4.0, -3.0, 2.5, -1.0};
    const double f0 = f(x0);
    const auto res = minimize(f, x0);
    CHECK(res.f <= f0);
    CHECK(res.n_evals > 0);
    CHECK(res.iterations > 0);
}

TEST_CASE("fd_gradient matches an analytic gradient") {
    const arhmm::Objective f = [](const std::vector<double>& x) {
        return std::sin(x[0]) * std::exp(x[1]) + x[0] * x[0];
    };
    const std::vector<double> x = {0.7, -0.3};
    long evals = 0;
    const auto g = arhmm::fd_gradient(f, x, 1e-6, &evals);
    CHECK(evals == 4); // two evaluations per coordinate
    CHECK(g[0] == doctest::Approx(std::cos(0.7) * std::exp(-0.3) + 1.4).epsilon(1e-8));
    CHECK(g[1] == doctest::Approx(std::sin(0.7) * std::exp(-0.3)).epsilon(1e-8));
}

TEST_CASE("fd_gradient falls back to one-sided differences at a boundary") {
    // Infinite on one side of zero: the central probe at x[0] - h is lost,
    // so the component must come from the one-sided difference instead.
    const arhmm::Objective f = [](const std::vector<double>& x) {
        if (x[0] < 0.0) return std::numeric_limits<double>::infinity();
        return x[0] * x[0] + 3.0 * x[1];
    };
    const std::vector<double> x = {1e-7, 2.0};
    long evals = 0;
    const auto g = arhmm::fd_gradient(f, x, 1e-6, &evals);
    CHECK(std::isfinite(g[0]));
    // One-sided through the centre: (f(x+h) - f(x)) / h = 2 x + h with h = 1e-6.
    // The subtraction cancels against the 3 * x[1] = 6 offset, which costs
    // roughly eps * 6 / h ~ 1e-9 of absolute precision, so compare loosely.
    CHECK(g[0] == doctest::Approx(2.0 * 1e-7 + 1e-6).epsilon(1e-2));
    CHECK(g[1] == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(evals == 5); // four probes plus the lazily-added centre evaluation

    // Both sides lost: the component flattens to zero rather than poisoning
    // the direction.
    const arhmm::Objective spike = [](const std::vector<double>& x) {
        if (std::fabs(x[0]) > 1e-9) return std::numeric_limits<double>::infinity();
        return x[1] * x[1];
    };
    const auto g2 = arhmm::fd_gradient(spike, {0.0, 1.5}, 1e-6, nullptr);
    CHECK(g2[0] == 0.0);
    CHECK(g2[1] == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("minimize stays inside a feasible region walled off by infinities") {
    // Quadratic bowl whose minimizer sits outside the feasible box; the line
    // search must reject infeasible trials and settle near the wall instead
    // of aborting.
    const arhmm::Objective f = [](const std::vector<double>& x) {
        for (double v : x)
            if (v < -1.0) return std::numeric_limits<double>::infinity();
        const double a = x[0] + 3.0;
        const double b = x[1] - 0.5;
        return a * a + b * b;
    };
    const auto res = minimize(f, {0.0, 0.0});
    CHECK(std::isfinite(res.f));
    CHECK(res.x[0] >= -1.0);
    CHECK(res.x[0] == doctest::Approx(-1.0).epsilon(1e-3));
    CHECK(res.x[1] == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("convergence respects the objective-change tolerance") {
    // With a loose tolerance the optimizer stops early but still flags
    // convergence; with a tight budget it reports non-convergence.
    const arhmm::Objective rosen = [](const std::vector<double>& x) {
        const double a = 1.0 - x[0];
        const double b = x[1] - x[0] * x[0];
        return a * a + 100.0 * b * b;
    };
    MinimizeOptions tight;
    tight.max_iters = 3;
    const auto budget = minimize(rosen, {-1.2, 1.0}, tight);
    CHECK_FALSE(budget.converged);

    MinimizeOptions loose;
    loose.tol = 1e-2;
    const auto early = minimize(rosen, {-1.2, 1.0}, loose);
    CHECK(early.converged);
    CHECK(early.iterations <= budget.iterations + 200);
}
