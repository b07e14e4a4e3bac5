// SPDX-License-Identifier: Apache-2.0
//
// Tests for the temporal-dependence-removal pipeline: decimation, raw
// autocorrelation, the Levinson-Durbin fit (cross-checked against a dense
// Gaussian-elimination solver implemented independently here), and the
// innovation (prediction-residual) transform.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "keyrate/errors.hpp"
#include "keyrate/preprocess.hpp"
#include "keyrate/rng.hpp"

using namespace keyrate;

namespace {

TimeSeries series_of(std::vector<double> v, double interval = 1.0) {
    TimeSeries s;
    s.values = std::move(v);
    s.sampling_interval = interval;
    return s;
}

// Dense solve of the Toeplitz normal equations T a = rhs with
// T[i][j] = r[|i-j|], rhs[i] = r[i+1], by Gaussian elimination with partial
// pivoting. Independent oracle for the Levinson-Durbin recursion.
std::vector<double> dense_toeplitz_solve(const std::vector<double>& r, std::size_t order) {
    const std::size_t n = order;
    std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            m[i][j] = r[i > j ? i - j : j - i];
        m[i][n] = r[i + 1];
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row)
            if (std::fabs(m[row][col]) > std::fabs(m[pivot][col])) pivot = row;
        std::swap(m[col], m[pivot]);
        REQUIRE(std::fabs(m[col][col]) > 0.0);
        for (std::size_t row = col + 1; row < n; ++row) {
            const double f = m[row][col] / m[col][col];
            for (std::size_t j = col; j <= n; ++j) m[row][j] -= f * m[col][j];
        }
    }
    std::vector<double> a(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = m[i][n];
        for (std::size_t j = i + 1; j < n; ++j) acc -= m[i][j] * a[j];
        a[i] = acc / m[i][i];
    }
    return a;
}

// Positive-definite autocorrelation sequence from a discrete spectral
// measure: r[l] = sigma0^2*delta_l + sum_j w_j cos(omega_j l), w_j > 0.
std::vector<double> random_psd_autocorrelation(std::mt19937_64& rng, std::size_t max_lag) {
    std::vector<double> r(max_lag + 1, 0.0);
    r[0] = 0.1;  // white ridge keeps the system well conditioned
    const int components = 1 + static_cast<int>(rng() % 4);
    for (int j = 0; j < components; ++j) {
        const double w = 0.2 + uniform_unit(rng);
        const double omega = uniform_unit(rng) * 3.0;
        for (std::size_t l = 0; l <= max_lag; ++l)
            r[l] += w * std::cos(omega * static_cast<double>(l));
    }
    return r;
}

double sample_corr(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = std::min(a.size(), b.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) { ma += a[i]; mb += b[i]; }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double saa = 0, sbb = 0, sab = 0;
    for (std::size_t i = 0; i < n; ++i) {
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
        sab += (a[i] - ma) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("downsample keeps every Nth sample and scales the interval") {
    TimeSeries s = series_of({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, 0.1);

    TimeSeries same = downsample(s, 1);
    CHECK(same.values == s.values);
    CHECK(same.sampling_interval == s.sampling_interval);

    TimeSeries third = downsample(s, 3);
    CHECK(third.values == std::vector<double>{0, 3, 6, 9});
    CHECK(third.sampling_interval == doctest::Approx(0.3).epsilon(1e-15));

    TimeSeries sparse = downsample(s, 100);
    CHECK(sparse.values == std::vector<double>{0});

    CHECK_THROWS_AS(downsample(s, 0), DomainError);
}

TEST_CASE("autocorrelation is the raw (uncentered) second-moment estimator") {
    SUBCASE("hand-checked small case") {
        TimeSeries s = series_of({1, 2, 3});
        std::vector<double> r = autocorrelation(s, 2);
        REQUIRE(r.size() == 3);
        CHECK(r[0] == doctest::Approx((1.0 + 4.0 + 9.0) / 3.0).epsilon(1e-15));
        CHECK(r[1] == doctest::Approx((1 * 2 + 2 * 3) / 2.0).epsilon(1e-15));  // = 4
        CHECK(r[2] == doctest::Approx(1 * 3 / 1.0).epsilon(1e-15));
    }
    SUBCASE("constant series: every lag equals c^2 (no mean removal)") {
        TimeSeries s = series_of(std::vector<double>(50, 2.5));
        std::vector<double> r = autocorrelation(s, 5);
        for (double v : r) CHECK(v == doctest::Approx(6.25).epsilon(1e-15));
    }
    SUBCASE("all-zero series") {
        TimeSeries s = series_of(std::vector<double>(20, 0.0));
        for (double v : autocorrelation(s, 3)) CHECK(v == 0.0);
    }
    SUBCASE("bit-exact against a direct reference loop") {
        std::mt19937_64 rng(77);
        GaussianSampler gauss(78);
        for (int trial = 0; trial < 5; ++trial) {
            const std::size_t n = 100 + rng() % 900;
            TimeSeries s;
            s.values.resize(n);
            for (auto& v : s.values) v = gauss() + 1.0;  // nonzero mean on purpose
            const std::size_t max_lag = 10;
            std::vector<double> r = autocorrelation(s, max_lag);
            for (std::size_t l = 0; l <= max_lag; ++l) {
                double acc = 0.0;
                for (std::size_t i = 0; i + l < n; ++i) acc += s.values[i] * s.values[i + l];
                CHECK(r[l] == acc / static_cast<double>(n - l));
            }
        }
    }
    SUBCASE("lag bound") {
        TimeSeries s = series_of({1, 2, 3, 4});
        CHECK_NOTHROW(autocorrelation(s, 3));
        CHECK_THROWS_AS(autocorrelation(s, 4), DomainError);
    }
}

TEST_CASE("mean_center subtracts the sample mean") {
    TimeSeries s = series_of({1, 2, 3});
    TimeSeries c = mean_center(s);
    CHECK(c.values == std::vector<double>{-1, 0, 1});
    TimeSeries cc = mean_center(c);
    for (std::size_t i = 0; i < 3; ++i) CHECK(cc.values[i] == doctest::Approx(c.values[i]).epsilon(1e-15));
}

TEST_CASE("levinson_durbin solves hand-checked systems") {
    SUBCASE("white input gives the zero predictor") {
        PredictorModel m = levinson_durbin({1.0, 0.0});
        REQUIRE(m.order == 1);
        CHECK(m.coefficients[0] == 0.0);
        CHECK(m.residual_variance == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("order-1 fit to an AR(1) sequence recovers the pole") {
        // AR(1), a = 0.5, unit innovation: r[0] = 1/(1-a^2) = 4/3, r[1] = a*r[0].
        PredictorModel m = levinson_durbin({4.0 / 3.0, 2.0 / 3.0});
        REQUIRE(m.order == 1);
        CHECK(m.coefficients[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(m.residual_variance == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("order-2 fit to the same AR(1) zeros the extra tap") {
        PredictorModel m = levinson_durbin({4.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0});
        REQUIRE(m.order == 2);
        CHECK(m.coefficients[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(m.coefficients[1] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(m.residual_variance == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("levinson_durbin agrees with a dense solver on random PSD systems") {
    std::mt19937_64 rng(123456);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t order = 1 + rng() % 50;
        std::vector<double> r = random_psd_autocorrelation(rng, order);
        PredictorModel fast = levinson_durbin(r);
        std::vector<double> slow = dense_toeplitz_solve(r, order);
        REQUIRE(fast.coefficients.size() == order);
        for (std::size_t i = 0; i < order; ++i) {
            CAPTURE(trial);
            CAPTURE(order);
            CAPTURE(i);
            const double scale = std::max(1.0, std::fabs(slow[i]));
            CHECK(std::fabs(fast.coefficients[i] - slow[i]) <= 1e-8 * scale);
        }
        // Residual variance must match r[0] - a.r[1..p] (the Toeplitz identity).
        double expected = r[0];
        for (std::size_t i = 0; i < order; ++i) expected -= slow[i] * r[i + 1];
        CHECK(std::fabs(fast.residual_variance - expected) <= 1e-8 * std::max(1.0, expected));
        CHECK(fast.residual_variance >= 0.0);
    }
}

TEST_CASE("levinson_durbin rejects or repairs boundary inputs") {
    CHECK_THROWS_AS(levinson_durbin({0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(levinson_durbin({-1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(levinson_durbin({1.0}), DomainError);

    // |kappa| > 1 + tolerance: impossible for a PSD sequence, must abort.
    CHECK_THROWS_AS(levinson_durbin({1.0, 1.5}), IllConditionedError);

    // |kappa| == 1 exactly: clamp to the stable side and warn.
    int warnings = 0;
    PredictorModel clamped =
        levinson_durbin({1.0, 1.0}, [&](const std::string&) { ++warnings; });
    CHECK(warnings == 1);
    CHECK(std::fabs(clamped.coefficients[0]) < 1.0);
    CHECK(clamped.coefficients[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(clamped.residual_variance >= 0.0);
}

TEST_CASE("predict applies the fitted filter") {
    PredictorModel m;
    m.order = 1;
    m.coefficients = {1.0};
    TimeSeries s = series_of({5, 7, 9}, 0.25);
    TimeSeries p = predict(s, m);
    CHECK(p.values == std::vector<double>{5, 7});  // one-step copy predictor
    CHECK(p.sampling_interval == 0.25);

    PredictorModel zero;
    zero.order = 2;
    zero.coefficients = {0.0, 0.0};
    CHECK(predict(s, zero).values == std::vector<double>{0.0});

    PredictorModel too_long;
    too_long.order = 3;
    too_long.coefficients = {0.1, 0.1, 0.1};
    CHECK_THROWS_AS(predict(s, too_long), DomainError);
}

TEST_CASE("decorrelate whitens an AR(1) process") {
    // Simulate AR(1): s_k = 0.9 s_{k-1} + e_k.
    const std::size_t n = 60000;
    GaussianSampler gauss(2024);
    TimeSeries s;
    s.values.resize(n);
    double state = 0.0;
    for (auto& v : s.values) {
        state = 0.9 * state + gauss();
        v = state;
    }
    const std::size_t order = 30;
    auto [innovation, model] = decorrelate(s, order);
    REQUIRE(innovation.size() == n - order);
    REQUIRE(model.order == order);

    // The fitted leading tap should be near the true pole.
    CHECK(model.coefficients[0] == doctest::Approx(0.9).epsilon(0.03));

    // Innovation must look white: lag-1 normalized autocorrelation near zero.
    std::vector<double> r = autocorrelation(mean_center(innovation), 1);
    CHECK(std::fabs(r[1] / r[0]) < 0.02);

    // Orthogonality: the residual is uncorrelated with every regressor lag.
    const double bound = 3.0 / std::sqrt(static_cast<double>(innovation.size()));
    for (std::size_t lag = 1; lag <= order; ++lag) {
        std::vector<double> past(innovation.size());
        for (std::size_t k = 0; k < innovation.size(); ++k)
            past[k] = s.values[k + order - lag];
        CHECK(std::fabs(sample_corr(innovation.values, past)) < bound);
    }
}

TEST_CASE("decorrelate on white noise fits near-zero taps") {
    const std::size_t n = 50000;
    GaussianSampler gauss(5150);
    TimeSeries s;
    s.values.resize(n);
    for (auto& v : s.values) v = gauss();
    auto [innovation, model] = decorrelate(s, 30);
    for (double a : model.coefficients) CHECK(std::fabs(a) < 0.02);
    CHECK(model.residual_variance == doctest::Approx(1.0).epsilon(0.03));
    CHECK(innovation.size() == n - 30);
}

TEST_CASE("decorrelate rejects inputs shorter than twice the order") {
    TimeSeries s = series_of(std::vector<double>(20, 1.0));
    CHECK_THROWS_AS(decorrelate(s, 10), DomainError);  // needs n > 2*order
    CHECK_THROWS_AS(decorrelate(s, 0), DomainError);
}

TEST_CASE("process_traceset applies one method to every component") {
    GaussianSampler gauss(31337);
    TraceSet t;
    const std::size_t n = 600;
    for (TimeSeries* series : {&t.x, &t.y, &t.z}) {
        series->sampling_interval = 0.1;
        series->values.resize(n);
        for (auto& v : series->values) v = gauss();
    }
    t.z_secondary = t.z;

    SUBCASE("downsample variant") {
        TraceSet d = process_traceset(t, ProcessingMethod::downsample, 30);
        CHECK(d.variant == Variant::downsampled);
        CHECK(d.length() == n / 30);
        CHECK(d.x.sampling_interval == doctest::Approx(3.0).epsilon(1e-12));
        REQUIRE(d.z_secondary.has_value());
        CHECK(d.z_secondary->size() == n / 30);
        for (std::size_t i = 0; i < d.length(); ++i) CHECK(d.x[i] == t.x[i * 30]);
    }
    SUBCASE("decorrelate variant records the fitted models") {
        TraceSet d = process_traceset(t, ProcessingMethod::decorrelate, 30);
        CHECK(d.variant == Variant::decorrelated);
        CHECK(d.length() == n - 30);
        REQUIRE(d.z_secondary.has_value());
        CHECK(d.z_secondary->size() == n - 30);
        CHECK(d.provenance.find("predictor x") != std::string::npos);
        CHECK(d.provenance.find("predictor z2") != std::string::npos);
    }
    SUBCASE("only original traces may be processed") {
        TraceSet once = process_traceset(t, ProcessingMethod::downsample, 2);
        CHECK_THROWS_AS(process_traceset(once, ProcessingMethod::downsample, 2), DomainError);
    }
}

TEST_CASE("predictor text serialization round-trips exactly") {
    std::mt19937_64 rng(88);
    GaussianSampler gauss(89);
    for (int trial = 0; trial < 20; ++trial) {
        PredictorModel m;
        m.order = 1 + rng() % 40;
        m.coefficients.resize(m.order);
        for (auto& c : m.coefficients)
            c = gauss() * std::pow(10.0, static_cast<int>(rng() % 13) - 6);
        m.residual_variance = std::fabs(gauss()) + 1e-12;
        m.source_autocorrelation.resize(m.order + 1);
        for (auto& r : m.source_autocorrelation) r = gauss();

        PredictorModel back = predictor_from_text(predictor_to_text(m));
        CHECK(back.order == m.order);
        CHECK(back.coefficients == m.coefficients);          // bit-exact
        CHECK(back.residual_variance == m.residual_variance);
        CHECK(back.source_autocorrelation == m.source_autocorrelation);
    }
}
