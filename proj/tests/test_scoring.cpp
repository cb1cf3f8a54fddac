#include "doctest.h"

#include "taxotrace/scoring.hpp"

#include <cmath>
#include <random>

using namespace taxotrace;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(long(v.size()));
    long i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

}  // namespace

TEST_CASE("fusion of equal probabilities is the probability itself") {
    CHECK(fuse_bonafide({0.729, 0.729, 0.729}) == doctest::Approx(0.729).epsilon(1e-12));
    CHECK(fuse_bonafide({0.4, 0.4}) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("fusion is the cubic root of the three-way product") {
    // 0.8 * 0.1 * 0.1 = 8e-3, cbrt = 0.2.
    CHECK(fuse_bonafide({0.8, 0.1, 0.1}) == doctest::Approx(0.2).epsilon(1e-12));
    double expect = std::cbrt(0.9 * 0.5 * 0.2);
    CHECK(fuse_bonafide({0.9, 0.5, 0.2}) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("fusion floors zero probabilities instead of collapsing to zero") {
    double fused = fuse_bonafide({0.0, 0.9, 0.9});
    CHECK(fused > 0.0);
    CHECK(fused == doctest::Approx(std::cbrt(1e-12 * 0.9 * 0.9)).epsilon(1e-9));
}

TEST_CASE("fusion with one head degenerates to that probability") {
    CHECK(fuse_bonafide({0.37}) == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("fusion is monotone in each head") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int trial = 0; trial < 50; ++trial) {
        double a = u(rng), b = u(rng), c = u(rng);
        double lo = std::min(a, 0.98);
        CHECK(fuse_bonafide({lo, b, c}) <= fuse_bonafide({lo + 0.01, b, c}));
    }
}

TEST_CASE("fusion rejects an empty head list") {
    CHECK_THROWS_AS(fuse_bonafide({}), TraceError);
}

TEST_CASE("argmax ties resolve to the lowest class index") {
    std::map<TaskKind, Eigen::VectorXd> probs;
    probs[TaskKind::VQ] = vec({0.25, 0.25, 0.25, 0.25});
    probs[TaskKind::DEC] = vec({0.2, 0.4, 0.4});
    auto preds = predict_classes(probs);
    CHECK(preds.at(TaskKind::VQ) == 0);
    CHECK(preds.at(TaskKind::DEC) == 1);
}

TEST_CASE("score_bonafide uses the binary head directly when active") {
    auto setup = TrainSetup::from_config_name("D_VQ");
    std::map<TaskKind, Eigen::VectorXd> probs;
    probs[TaskKind::BIN] = vec({0.81, 0.19});
    probs[TaskKind::VQ] = vec({0.1, 0.5, 0.2, 0.2});
    CHECK(score_bonafide(probs, setup) == doctest::Approx(0.81).epsilon(1e-12));
}

TEST_CASE("score_bonafide fuses the source-tracing heads for M2") {
    auto setup = TrainSetup::from_config_name("M2");
    std::map<TaskKind, Eigen::VectorXd> probs;
    probs[TaskKind::VQ] = vec({0.8, 0.1, 0.05, 0.05});
    probs[TaskKind::AUX] = vec({0.1, 0.5, 0.2, 0.2});
    probs[TaskKind::DEC] = vec({0.1, 0.5, 0.4});
    double expect = std::cbrt(0.8 * 0.1 * 0.1);
    CHECK(score_bonafide(probs, setup) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("score file renders deterministically and sorted by utterance id") {
    auto setup = TrainSetup::from_config_name("M2");
    std::vector<ScoreSet> rows(2);
    rows[0].utterance_id = "utt_b";
    rows[1].utterance_id = "utt_a";
    for (auto& r : rows) {
        r.probs[TaskKind::VQ] = vec({0.7, 0.1, 0.1, 0.1});
        r.probs[TaskKind::AUX] = vec({0.7, 0.1, 0.1, 0.1});
        r.probs[TaskKind::DEC] = vec({0.8, 0.1, 0.1});
        r.predicted = predict_classes(r.probs);
        r.bonafide_score = score_bonafide(r.probs, setup);
    }
    std::string a = render_score_file(rows, setup);
    std::swap(rows[0], rows[1]);
    std::string b = render_score_file(rows, setup);
    CHECK(a == b);

    auto parsed = parse_score_file(a);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].utterance_id == "utt_a");
    CHECK(parsed[1].utterance_id == "utt_b");
    CHECK(parsed[0].bonafide_score == doctest::Approx(std::cbrt(0.7 * 0.7 * 0.8)).epsilon(1e-8));
    CHECK(parsed[0].predicted.at(TaskKind::VQ) == 0);
    CHECK(parsed[0].predicted.count(TaskKind::BIN) == 0);
}

TEST_CASE("score file leaves inactive head fields empty") {
    auto setup = TrainSetup::from_config_name("S_DEC");
    std::vector<ScoreSet> rows(1);
    rows[0].utterance_id = "u1";
    rows[0].probs[TaskKind::DEC] = vec({0.5, 0.3, 0.2});
    rows[0].predicted = predict_classes(rows[0].probs);
    rows[0].bonafide_score = score_bonafide(rows[0].probs, setup);
    std::string text = render_score_file(rows, setup);
    // Header + one row; the BIN/VQ/AUX prediction columns must be empty.
    auto parsed = parse_score_file(text);
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].predicted.size() == 1);
    CHECK(parsed[0].predicted.at(TaskKind::DEC) == 0);
    CHECK(parsed[0].bonafide_score == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("empty score set renders a header-only file") {
    auto setup = TrainSetup::from_config_name("M1");
    std::string text = render_score_file({}, setup);
    CHECK(parse_score_file(text).empty());
}
