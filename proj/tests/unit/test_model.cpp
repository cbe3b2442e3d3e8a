#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "thermalsum/errors.hpp"
#include "thermalsum/model.hpp"

using namespace thermalsum;

TEST_CASE("deterministic cumulative sum")
{
    CHECK(deterministic_cumsum(RegimeParams{4.0, 0.0, 0.0, 1.0}, 10L) == doctest::Approx(40.0));
    CHECK(deterministic_cumsum(RegimeParams{4.0, 0.2, 0.0, 1.0}, 10L) == doctest::Approx(51.0));
    CHECK(deterministic_cumsum(RegimeParams{7.0, 0.3, 2.0, 5.0}, 0L) == 0.0);
    CHECK_THROWS_AS(deterministic_cumsum(RegimeParams{4.0, 0.0, 0.0, 1.0}, -1L), PreconditionError);
}

TEST_CASE("crossing time matches an independent root finder")
{
    const RegimeParams p{4.0, 0.8, 20.0, 2000.0};
    const CrossingTime ct = crossing_time(p);
    REQUIRE(ct.gamma);
    CHECK(*ct.gamma == doctest::Approx(5.5));

    const double root = oracle::bisect([](double m) { return 0.4 * m * m + 4.4 * m - 2000.0; }, 0.0, 1000.0);
    CHECK(root == doctest::Approx(65.42425537148769).epsilon(1e-12));
    CHECK(ct.m_tau == doctest::Approx(root).epsilon(1e-12));
    // xi(m) == tau at the real root
    CHECK(deterministic_cumsum(p, ct.m_tau) == doctest::Approx(p.tau).epsilon(1e-9));
}

TEST_CASE("crossing time edge cases")
{
    const CrossingTime winter = crossing_time(RegimeParams{4.0, 0.0, 0.0, 1000.0});
    CHECK(winter.m_tau == doctest::Approx(250.0));
    CHECK_FALSE(winter.gamma);

    CHECK(crossing_time(RegimeParams{4.0, 0.8, 0.0, 1e-6}).m_tau < 1e-3);

    CHECK_THROWS_AS(crossing_time(RegimeParams{0.0, 0.8, 0.0, 10.0}), PreconditionError);
    CHECK_THROWS_AS(crossing_time(RegimeParams{4.0, 0.8, 0.0, 0.0}), PreconditionError);
}

TEST_CASE("winter approximation")
{
    auto a = approx_winter(RegimeParams{4.0, 0.0, 20.0, 1000.0});
    CHECK(a.mean == doctest::Approx(250.0));
    CHECK(a.variance == doctest::Approx(6250.0));
    CHECK(a.regime == Regime::Winter);

    a = approx_winter(RegimeParams{4.0, 0.0, 20.0, 2000.0});
    CHECK(a.mean == doctest::Approx(500.0));
    CHECK(a.variance == doctest::Approx(12500.0));

    a = approx_winter(RegimeParams{4.0, 0.0, 0.0, 1000.0});
    CHECK(a.variance == 0.0);

    CHECK_THROWS_AS(approx_winter(RegimeParams{4.0, 0.1, 20.0, 1000.0}), PreconditionError);
}

TEST_CASE("spring approximation")
{
    auto a = approx_spring(RegimeParams{4.0, 0.8, 20.0, 2000.0});
    CHECK(a.regime == Regime::Spring);
    CHECK(a.mean == doctest::Approx(std::sqrt(5000.0) - 5.5));
    CHECK(a.mean == doctest::Approx(65.2107).epsilon(1e-6));
    CHECK(a.variance == doctest::Approx(400.0 / (std::pow(0.8, 1.5) * std::sqrt(4000.0))));
    CHECK(a.variance == doctest::Approx(8.8388).epsilon(1e-4));
    REQUIRE(a.linearized_variance);
    REQUIRE(a.crossing_time);
    const double m = *a.crossing_time;
    CHECK(*a.linearized_variance == doctest::Approx(400.0 * m / std::pow(4.0 + 0.8 * m, 2)));
    CHECK(a.asymptotic_ok);

    CHECK(approx_spring(RegimeParams{2.0, 0.1, 20.0, 1000.0}).mean == doctest::Approx(120.9214).epsilon(1e-6));

    a = approx_spring(RegimeParams{4.0, 0.8, 0.0, 2000.0});
    CHECK(a.variance == 0.0);
    CHECK(*a.linearized_variance == 0.0);
}

TEST_CASE("spring approximation rejects winter and non-asymptotic parameters")
{
    CHECK_THROWS_AS(approx_spring(RegimeParams{4.0, 0.0, 20.0, 2000.0}), PreconditionError);
    // sqrt(2 * 10 / 0.1) - 40.5 < 0
    CHECK_THROWS_AS(approx_spring(RegimeParams{4.0, 0.1, 20.0, 10.0}), PreconditionError);

    // Positive mean but crossing well before day 30: flagged, not rejected.
    const auto early = approx_spring(RegimeParams{1.0, 2.0, 5.0, 300.0});
    CHECK(early.mean > 0.0);
    CHECK_FALSE(early.asymptotic_ok);
}

TEST_CASE("parameter validation")
{
    CHECK_THROWS_AS(validate(RegimeParams{-1.0, 0.0, 20.0, 1000.0}), PreconditionError);
    CHECK_THROWS_AS(validate(RegimeParams{4.0, -0.1, 20.0, 1000.0}), PreconditionError);
    CHECK_THROWS_AS(validate(RegimeParams{4.0, 0.0, -1.0, 1000.0}), PreconditionError);
    CHECK_THROWS_AS(validate(RegimeParams{4.0, 0.0, 20.0, 0.0}), PreconditionError);
    CHECK_NOTHROW(validate(RegimeParams{4.0, 0.0, 0.0, 1.0}));
    CHECK(RegimeParams{4.0, 0.0, 1.0, 1.0}.regime() == Regime::Winter);
    CHECK(RegimeParams{4.0, 1e-300, 1.0, 1.0}.regime() == Regime::Spring);
}

TEST_CASE("sensitivities")
{
    const Sensitivity w = sensitivity(RegimeParams{4.0, 0.0, 20.0, 1000.0});
    CHECK(w.d_alpha == doctest::Approx(-62.5));
    CHECK_FALSE(w.d_beta);
    CHECK_THROWS_AS(sensitivity_beta(RegimeParams{4.0, 0.0, 20.0, 1000.0}), PreconditionError);

    const Sensitivity s = sensitivity(RegimeParams{4.0, 0.8, 20.0, 2000.0});
    REQUIRE(s.d_beta_leading);
    CHECK(*s.d_beta_leading == doctest::Approx(-44.1942).epsilon(1e-6));
    CHECK(*s.d_beta == doctest::Approx(-44.1942 + 4.0 / 0.64).epsilon(1e-6));
    CHECK(s.d_alpha == doctest::Approx(-1.25));
    CHECK(*s.d_beta < 0.0);
}

TEST_CASE("winter sensitivity matches a central finite difference")
{
    const double tau = 1000.0;
    auto mean_at = [&](double alpha) { return approx_winter(RegimeParams{alpha, 0.0, 20.0, tau}).mean; };
    const double fd = (mean_at(4.001) - mean_at(3.999)) / 0.002;
    const double analytic = sensitivity(RegimeParams{4.0, 0.0, 20.0, tau}).d_alpha;
    CHECK(std::abs(fd / analytic - 1.0) < 1e-4);
}

TEST_CASE("spring sensitivities match central finite differences on a grid")
{
    for (double alpha : {1.0, 2.0, 4.0}) {
        for (double beta : {0.2, 0.5, 0.8}) {
            const double tau = 2000.0;
            const RegimeParams p{alpha, beta, 20.0, tau};
            const Sensitivity s = sensitivity(p);
            const double fd_a = oracle::central_difference(
                [&](double a) { return approx_spring(RegimeParams{a, beta, 20.0, tau}).mean; }, alpha, 1e-3);
            const double fd_b = oracle::central_difference(
                [&](double b) { return approx_spring(RegimeParams{alpha, b, 20.0, tau}).mean; }, beta, 1e-3);
            const double fd_lead = oracle::central_difference(
                [&](double b) { return std::sqrt(2.0 * tau / b); }, beta, 1e-3);
            CHECK(std::abs(fd_a / s.d_alpha - 1.0) < 1e-4);
            CHECK(std::abs(fd_b / *s.d_beta - 1.0) < 1e-4);
            CHECK(std::abs(fd_lead / *s.d_beta_leading - 1.0) < 1e-4);
        }
    }
}

TEST_CASE("monotonicity and diminishing sensitivity")
{
    const double tau = 2000.0;
    for (double a = 1.0; a < 20.0; a += 0.5) {
        const double m1 = approx_winter(RegimeParams{a, 0.0, 20.0, tau}).mean;
        const double m2 = approx_winter(RegimeParams{a + 0.5, 0.0, 20.0, tau}).mean;
        CHECK(m2 < m1);
        CHECK(std::abs(sensitivity(RegimeParams{a + 0.5, 0.0, 20.0, tau}).d_alpha) <
              std::abs(sensitivity(RegimeParams{a, 0.0, 20.0, tau}).d_alpha));
    }
    // Spring grid restricted to alpha^2 < tau beta / 2, where the reported mean is decreasing in beta.
    for (double b = 0.2; b < 2.0; b += 0.1) {
        const RegimeParams p{2.0, b, 20.0, tau};
        const RegimeParams q{2.0, b + 0.1, 20.0, tau};
        CHECK(approx_spring(q).mean < approx_spring(p).mean);
        CHECK(*sensitivity(p).d_beta < 0.0);
        CHECK(std::abs(*sensitivity(q).d_beta_leading) < std::abs(*sensitivity(p).d_beta_leading));
    }
    for (double t = 500.0; t < 5000.0; t += 250.0) {
        CHECK(approx_winter(RegimeParams{4.0, 0.0, 20.0, t + 250.0}).mean >
              approx_winter(RegimeParams{4.0, 0.0, 20.0, t}).mean);
        CHECK(approx_spring(RegimeParams{4.0, 0.4, 20.0, t + 250.0}).mean >
              approx_spring(RegimeParams{4.0, 0.4, 20.0, t}).mean);
    }
}

TEST_CASE("variance regime contrast in tau")
{
    for (double t = 1000.0; t < 10000.0; t += 500.0) {
        CHECK(approx_winter(RegimeParams{4.0, 0.0, 20.0, t + 500.0}).variance >
              approx_winter(RegimeParams{4.0, 0.0, 20.0, t}).variance);
        CHECK(approx_spring(RegimeParams{4.0, 0.5, 20.0, t + 500.0}).variance <
              approx_spring(RegimeParams{4.0, 0.5, 20.0, t}).variance);
    }
}

TEST_CASE("crossing time brackets the integer sums")
{
    for (double alpha : {0.5, 2.0, 4.0, 10.0}) {
        for (double beta : {0.05, 0.2, 0.8}) {
            for (double tau : {50.0, 1000.0, 2000.0, 7777.0}) {
                const RegimeParams p{alpha, beta, 20.0, tau};
                const double m = crossing_time(p).m_tau;
                CHECK(deterministic_cumsum(p, static_cast<long>(std::ceil(m))) >= tau * (1 - 1e-12));
                CHECK(deterministic_cumsum(p, static_cast<long>(std::floor(m))) <= tau * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("simplified and linearized spring variances agree at large tau")
{
    for (double alpha : {1.0, 2.0, 4.0}) {
        for (double beta : {0.1, 0.4, 0.8}) {
            // Smallest tau with m(tau) >= 50 alpha / beta, then larger ones.
            const double m_min = 50.0 * alpha / beta;
            const double tau0 = deterministic_cumsum(RegimeParams{alpha, beta, 0.0, 1.0}, m_min);
            for (double factor : {1.0, 2.0, 10.0}) {
                const auto a = approx_spring(RegimeParams{alpha, beta, 20.0, tau0 * factor});
                REQUIRE(*a.crossing_time >= m_min * (1 - 1e-9));
                CHECK(std::abs(*a.linearized_variance / a.variance - 1.0) < 0.05);
            }
        }
    }
}
