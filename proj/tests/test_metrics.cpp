#include "doctest.h"

#include "taxotrace/error.hpp"
#include "taxotrace/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace taxotrace;

namespace {

EerResult eer_of(const std::vector<double>& bona, const std::vector<double>& spoof) {
    std::vector<double> scores;
    std::vector<bool> flags;
    for (double s : bona) {
        scores.push_back(s);
        flags.push_back(true);
    }
    for (double s : spoof) {
        scores.push_back(s);
        flags.push_back(false);
    }
    return compute_eer(scores, flags);
}

// Independent brute-force EER oracle: evaluate FAR/FRR at every candidate
// threshold (all midpoints between adjacent distinct scores plus sentinels
// below/above the score range), locate the sign change of FAR - FRR, and
// interpolate linearly between the bracketing points.
double eer_oracle(const std::vector<double>& bona, const std::vector<double>& spoof) {
    std::vector<double> all(bona.begin(), bona.end());
    all.insert(all.end(), spoof.begin(), spoof.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    std::vector<double> thr;
    thr.push_back(all.front() - 1.0);
    for (std::size_t i = 0; i + 1 < all.size(); ++i)
        thr.push_back(0.5 * (all[i] + all[i + 1]));
    thr.push_back(all.back() + 1.0);

    auto far_at = [&](double t) {
        std::size_t n = 0;
        for (double s : spoof) n += (s >= t) ? 1 : 0;
        return double(n) / double(spoof.size());
    };
    auto frr_at = [&](double t) {
        std::size_t n = 0;
        for (double s : bona) n += (s < t) ? 1 : 0;
        return double(n) / double(bona.size());
    };

    double prev_far = far_at(thr[0]), prev_frr = frr_at(thr[0]);
    double prev_d = prev_far - prev_frr;
    for (std::size_t i = 1; i < thr.size(); ++i) {
        double far = far_at(thr[i]), frr = frr_at(thr[i]);
        double d = far - frr;
        if (prev_d == 0.0) return 100.0 * 0.5 * (prev_far + prev_frr);
        if (d == 0.0) return 100.0 * 0.5 * (far + frr);
        if ((prev_d > 0.0) != (d > 0.0)) {
            double w = prev_d / (prev_d - d);
            double far_x = prev_far + w * (far - prev_far);
            double frr_x = prev_frr + w * (frr - prev_frr);
            return 100.0 * 0.5 * (far_x + frr_x);
        }
        prev_d = d;
        prev_far = far;
        prev_frr = frr;
    }
    return 100.0 * 0.5 * (prev_far + prev_frr);
}

}  // namespace

TEST_CASE("eer is zero when scores separate perfectly") {
    auto r = eer_of({0.9, 0.8, 0.95}, {0.1, 0.2, 0.05, 0.3});
    CHECK(r.eer_percent == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("eer is fifty percent when distributions coincide") {
    auto r = eer_of({0.2, 0.4, 0.6, 0.8}, {0.2, 0.4, 0.6, 0.8});
    CHECK(r.eer_percent == doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("eer matches the brute-force oracle on random score sets") {
    std::mt19937_64 rng(20240401);
    for (int trial = 0; trial < 40; ++trial) {
        std::uniform_int_distribution<int> nb(3, 60), ns(3, 80);
        std::normal_distribution<double> gb(0.6, 0.25), gs(0.4, 0.25);
        std::vector<double> bona(nb(rng)), spoof(ns(rng));
        for (auto& v : bona) v = gb(rng);
        for (auto& v : spoof) v = gs(rng);
        // Occasionally force ties across the two sets.
        if (trial % 5 == 0) spoof[0] = bona[0];

        auto r = eer_of(bona, spoof);
        double expect = eer_oracle(bona, spoof);
        INFO("trial ", trial);
        CHECK(r.eer_percent == doctest::Approx(expect).epsilon(1e-9));
        CHECK(r.eer_percent >= 0.0);
        CHECK(r.eer_percent <= 100.0);
    }
}

TEST_CASE("eer is invariant under strictly increasing score transforms") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> bona(25), spoof(35);
    for (auto& v : bona) v = 0.3 + 0.7 * u(rng);
    for (auto& v : spoof) v = 0.7 * u(rng);

    auto base = eer_of(bona, spoof);
    auto xf = [](double s) { return std::exp(3.0 * s) - 2.0; };
    std::vector<double> bona2(bona.size()), spoof2(spoof.size());
    std::transform(bona.begin(), bona.end(), bona2.begin(), xf);
    std::transform(spoof.begin(), spoof.end(), spoof2.begin(), xf);
    auto mapped = eer_of(bona2, spoof2);
    CHECK(mapped.eer_percent == doctest::Approx(base.eer_percent).epsilon(1e-9));
}

TEST_CASE("eer rejects single-class inputs") {
    CHECK_THROWS_AS(eer_of({}, {0.5, 0.4}), TraceError);
    CHECK_THROWS_AS(eer_of({0.5, 0.4}, {}), TraceError);
}

TEST_CASE("confusion matrix counts every reference/prediction pair once") {
    std::vector<int> ref{0, 0, 1, 2, 2, 2, 1};
    std::vector<int> pred{0, 1, 1, 2, 0, 2, 1};
    auto m = confusion(pred, ref, 3);
    REQUIRE(m.size() == 3);
    CHECK(m[0][0] == 1);
    CHECK(m[0][1] == 1);
    CHECK(m[1][1] == 2);
    CHECK(m[2][0] == 1);
    CHECK(m[2][2] == 2);
    long total = 0;
    for (const auto& row : m)
        for (auto v : row) total += v;
    CHECK(total == long(ref.size()));
}

TEST_CASE("weighted f1 analytic cases") {
    SUBCASE("perfect prediction gives 100") {
        std::vector<int> ref{0, 1, 2, 1, 0};
        CHECK(weighted_f1(ref, ref, 3) == doctest::Approx(100.0));
    }
    SUBCASE("known hand-computed value") {
        // ref class 0: support 4, class 1: support 1.
        // pred: one class-0 item predicted 1, everything else correct.
        // class 0: P = 3/3, R = 3/4, F1 = 6/7.
        // class 1: P = 1/2, R = 1/1, F1 = 2/3.
        // weighted = (4*(6/7) + 1*(2/3))/5 * 100.
        std::vector<int> ref{0, 0, 0, 0, 1};
        std::vector<int> pred{0, 0, 0, 1, 1};
        double expect = (4.0 * (6.0 / 7.0) + 1.0 * (2.0 / 3.0)) / 5.0 * 100.0;
        CHECK(weighted_f1(pred, ref, 2) == doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("class with zero precision and recall contributes zero") {
        // Everything predicted as class 0; class 1 holds 9/10 of support.
        // class 0: P = 1/10, R = 1, F1 = 2/11; class 1: F1 = 0.
        std::vector<int> ref(10, 1);
        ref[0] = 0;
        std::vector<int> pred(10, 0);
        double expect = (1.0 / 10.0) * (2.0 / 11.0) * 100.0;
        CHECK(weighted_f1(pred, ref, 2) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("weighted f1 matches a per-class definition oracle on random labels") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        int k = 2 + int(rng() % 4);
        int n = 20 + int(rng() % 100);
        std::vector<int> ref(n), pred(n);
        for (int i = 0; i < n; ++i) {
            ref[i] = int(rng() % k);
            pred[i] = int(rng() % k);
        }
        // Oracle: precision/recall/F1 per class straight from pair counts.
        double acc = 0.0;
        for (int c = 0; c < k; ++c) {
            double tp = 0, fp = 0, fn = 0, support = 0;
            for (int i = 0; i < n; ++i) {
                if (ref[i] == c) {
                    ++support;
                    if (pred[i] == c)
                        ++tp;
                    else
                        ++fn;
                } else if (pred[i] == c) {
                    ++fp;
                }
            }
            double p = (tp + fp) > 0 ? tp / (tp + fp) : 0.0;
            double r = (tp + fn) > 0 ? tp / (tp + fn) : 0.0;
            double f1 = (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;
            acc += (support / double(n)) * f1;
        }
        INFO("trial ", trial);
        CHECK(weighted_f1(pred, ref, k) == doctest::Approx(acc * 100.0).epsilon(1e-12));
    }
}

TEST_CASE("per-class stats report support and bounded rates") {
    std::vector<int> ref{0, 1, 1, 2};
    std::vector<int> pred{0, 1, 2, 2};
    auto stats = per_class_stats(pred, ref, 3);
    REQUIRE(stats.size() == 3);
    CHECK(stats[0].support == 1);
    CHECK(stats[1].support == 2);
    CHECK(stats[2].support == 1);
    for (const auto& s : stats) {
        CHECK(s.precision >= 0.0);
        CHECK(s.precision <= 1.0);
        CHECK(s.recall >= 0.0);
        CHECK(s.recall <= 1.0);
    }
    CHECK(stats[1].recall == doctest::Approx(0.5));
    CHECK(stats[2].precision == doctest::Approx(0.5));
}

TEST_CASE("metrics reject mismatched vectors and out-of-range labels") {
    std::vector<int> ref{0, 1};
    std::vector<int> short_pred{0};
    CHECK_THROWS_AS(confusion(short_pred, ref, 2), TraceError);
    std::vector<int> bad_pred{0, 5};
    CHECK_THROWS_AS(confusion(bad_pred, ref, 2), TraceError);
}
