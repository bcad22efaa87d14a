#include "arhmm/core.hpp"
#include "arhmm/dists.hpp"
#include "arhmm/special.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using arhmm::GammaMeanSd;
using arhmm::VonMises;

// Reference values computed with mpmath at 40 decimal digits.

TEST_CASE("gamma_logpdf matches high-precision references") {
    const struct {
        double mean, sd, x, expected;
    } cases[] = {
        {20, 5, 17.3, -2.548970682312248715},
        {40, 7, 52.1, -4.379506763482073965},
        {1, 2, 0.03, 0.9878223080119361454}, // shape < 1
        {5, 0.5, 5, -0.226624683200362347},
    };
    for (const auto& c : cases) {
        CAPTURE(c.mean);
        CAPTURE(c.x);
        CHECK(arhmm::gamma_logpdf(c.x, {c.mean, c.sd}) ==
              doctest::Approx(c.expected).epsilon(1e-12));
    }
}

TEST_CASE("gamma_cdf matches high-precision references") {
    const struct {
        double mean, sd, x, expected;
    } cases[] = {
        {20, 5, 17.3, 0.3149076222643348503},
        {40, 7, 52.1, 0.9491629427300514509},
        {1, 2, 0.03, 0.3241855538553507244},
        {5, 0.5, 6.2, 0.9882068405865994202},
    };
    for (const auto& c : cases) {
        CAPTURE(c.mean);
        CAPTURE(c.x);
        CHECK(arhmm::gamma_cdf(c.x, {c.mean, c.sd}) ==
              doctest::Approx(c.expected).epsilon(1e-12));
    }
    CHECK(arhmm::gamma_cdf(0.0, {20, 5}) == 0.0);
    CHECK(arhmm::gamma_cdf(-1.0, {20, 5}) == 0.0);
}

TEST_CASE("gamma density integrates to one") {
    // Shapes >= 1 so the density is bounded at the origin.
    const GammaMeanSd cases[] = {{20, 5}, {8, 4}, {5, 0.5}};
    for (const auto& d : cases) {
        const double mass = arhmm::adaptive_simpson(
            [&](double x) { return x <= 0.0 ? 0.0 : std::exp(arhmm::gamma_logpdf(x, d)); },
            0.0, d.mean + 40.0 * d.sd, 1e-12);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("gamma pdf and cdf agree away from the origin") {
    // Covers shape < 1 (singular at zero) on an interior interval, where the
    // integral of the density must match the cdf increment.
    const GammaMeanSd d{1, 2};
    const double lo = 0.5, hi = 6.0;
    const double mass = arhmm::adaptive_simpson(
        [&](double x) { return std::exp(arhmm::gamma_logpdf(x, d)); }, lo, hi, 1e-12);
    CHECK(mass ==
          doctest::Approx(arhmm::gamma_cdf(hi, d) - arhmm::gamma_cdf(lo, d)).epsilon(1e-9));
}

TEST_CASE("vonmises_logpdf matches high-precision references") {
    const struct {
        double mu, kappa, x, expected;
    } cases[] = {
        {0, 2, 0.7, -1.132186233323324914},
        {1.2, 12, -2.9, -18.58526692391141627},
        {-2.5, 0.5, 3.1, -1.511643846339701889},
        {0, 1e-8, 1, -1.83787706100632245}, // effectively circular uniform
    };
    for (const auto& c : cases) {
        CAPTURE(c.mu);
        CAPTURE(c.x);
        CHECK(arhmm::vonmises_logpdf(c.x, {c.mu, c.kappa}) ==
              doctest::Approx(c.expected).epsilon(1e-12));
    }
}

TEST_CASE("vonmises_cdf matches high-precision references") {
    const struct {
        double mu, kappa, x, expected;
    } cases[] = {
        {0, 2, 0.7, 0.8109027971871798524},
        {1.2, 12, -2.9, 9.257548556828378788e-9},
        {-2.5, 0.5, 3.1, 0.9907674268211839013},
        {0.3, 4, 0.3, 0.5000822575994620905},
    };
    for (const auto& c : cases) {
        CAPTURE(c.mu);
        CAPTURE(c.x);
        CHECK(arhmm::vonmises_cdf(c.x, {c.mu, c.kappa}) ==
              doctest::Approx(c.expected).epsilon(1e-8));
    }
}

TEST_CASE("vonmises_cdf endpoints and uniform limit") {
    CHECK(arhmm::vonmises_cdf(arhmm::pi, {0.4, 3.0}) == doctest::Approx(1.0).epsilon(1e-9));
    // Angles live on the half-open interval (-pi, pi]: just above -pi the
    // cdf vanishes, while -pi itself wraps around to +pi.
    CHECK(arhmm::vonmises_cdf(std::nextafter(-arhmm::pi, 0.0), {0.4, 3.0}) ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(arhmm::vonmises_cdf(-arhmm::pi, {0.4, 3.0}) == doctest::Approx(1.0).epsilon(1e-9));
    // kappa = 0 is the circular uniform: cdf(x) = (x + pi) / (2 pi).
    for (double x = -3.0; x <= 3.0; x += 0.7) {
        CHECK(arhmm::vonmises_cdf(x, {0.0, 0.0}) ==
              doctest::Approx((x + arhmm::pi) / arhmm::two_pi).epsilon(1e-9));
    }
}

TEST_CASE("vonmises density integrates to one over the circle") {
    const VonMises cases[] = {{0, 2}, {1.2, 12}, {-2.5, 0.5}};
    for (const auto& d : cases) {
        const double mass = arhmm::adaptive_simpson(
            [&](double x) { return std::exp(arhmm::vonmises_logpdf(x, d)); },
            -arhmm::pi, arhmm::pi, 1e-12);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("ar_step_mean blends history toward the steady-state mean") {
    // Most-recent-first history.
    const std::vector<double> h = {10.0, 20.0};
    const std::vector<double> phi = {0.3, 0.2};
    CHECK(arhmm::ar_step_mean(h, phi, 40.0) ==
          doctest::Approx(0.3 * 10 + 0.2 * 20 + 0.5 * 40).epsilon(1e-15));
    // No AR terms: the steady-state mean itself.
    CHECK(arhmm::ar_step_mean({}, {}, 17.0) == doctest::Approx(17.0));
    // Full persistence copies the last value.
    const std::vector<double> one = {1.0};
    const std::vector<double> h1 = {12.5};
    CHECK(arhmm::ar_step_mean(h1, one, 40.0) == doctest::Approx(12.5).epsilon(1e-12));
}

TEST_CASE("ar_turn_mean is the argument of the blended resultant") {
    // Arg(0.5 e^{i pi/2} + 0.5 e^{i 0}) = pi / 4.
    const std::vector<double> h = {arhmm::pi / 2.0};
    const std::vector<double> phi = {0.5};
    CHECK(arhmm::ar_turn_mean(h, phi, 0.0) == doctest::Approx(arhmm::pi / 4).epsilon(1e-12));
    // Full persistence copies the last angle; no AR terms gives the steady mean.
    const std::vector<double> one = {1.0};
    CHECK(arhmm::ar_turn_mean(h, one, 0.0) == doctest::Approx(arhmm::pi / 2).epsilon(1e-12));
    CHECK(arhmm::ar_turn_mean({}, {}, -1.1) == doctest::Approx(-1.1));
    // Antipodal cancellation falls back to the steady-state mean.
    const std::vector<double> opposite = {arhmm::pi};
    const std::vector<double> half = {0.5};
    const double m = arhmm::ar_turn_mean(opposite, half, 0.0);
    CHECK((m == doctest::Approx(0.0).epsilon(1e-9) ||
           m == doctest::Approx(arhmm::pi).epsilon(1e-9) ||
           m == doctest::Approx(-arhmm::pi).epsilon(1e-9)));
}

TEST_CASE("gamma moments under the mean/sd parameterization") {
    // E[X] and SD[X] recovered by quadrature.
    const GammaMeanSd d{20, 5};
    const auto pdf = [&](double x) {
        return x <= 0.0 ? 0.0 : std::exp(arhmm::gamma_logpdf(x, d));
    };
    const double m1 = arhmm::adaptive_simpson([&](double x) { return x * pdf(x); }, 0.0,
                                              d.mean + 40 * d.sd, 1e-11);
    const double m2 = arhmm::adaptive_simpson([&](double x) { return x * x * pdf(x); },
                                              0.0, d.mean + 40 * d.sd, 1e-11);
    CHECK(m1 == doctest::Approx(20.0).epsilon(1e-8));
    CHECK(std::sqrt(m2 - m1 * m1) == doctest::Approx(5.0).epsilon(1e-6));
}
