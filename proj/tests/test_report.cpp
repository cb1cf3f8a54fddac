#include "doctest.h"

#include "taxotrace/report.hpp"
#include "taxotrace/scoring.hpp"

#include <cmath>
#include <random>

using namespace taxotrace;

namespace {

// A synthetic manifest with no files behind it: build_report only joins ids.
struct World {
    Manifest manifest;
    CodecRegistry registry;

    World() {
        registry.register_codec(
            {"cod_a", "A", {VqClass::Mvq, AuxClass::Sem, DecClass::Time}});
        registry.register_codec(
            {"cod_b", "B", {VqClass::Svq, AuxClass::NoAux, DecClass::Freq}});
        int n = 0;
        auto add = [&](const std::string& origin, Split split, int count) {
            for (int i = 0; i < count; ++i) {
                manifest.entries.push_back({"u" + std::to_string(n++),
                                            "audio/x.wav", origin, split, 16000});
            }
        };
        add(kBonafideOrigin, Split::Dev, 10);
        add("cod_a", Split::Dev, 10);
        add("cod_b", Split::Dev, 10);
        add(kBonafideOrigin, Split::EvalCors, 6);
        add("cod_a", Split::EvalCors, 6);
    }
};

// Renders a score file where every utterance is predicted correctly with
// high confidence (for deterministic report assertions).
std::string perfect_scores(const World& w, const TrainSetup& setup) {
    std::vector<ScoreSet> rows;
    for (const auto& e : w.manifest.entries) {
        ScoreSet s;
        s.utterance_id = e.utterance_id;
        for (TaskKind t : setup.active_heads) {
            const int k = task_class_count(t);
            const int label = label_of(e.origin, t, w.registry);
            Eigen::VectorXd p = Eigen::VectorXd::Constant(k, 0.05 / (k - 1));
            p[label] = 0.95;
            s.probs[t] = p;
        }
        s.predicted = predict_classes(s.probs);
        s.bonafide_score = score_bonafide(s.probs, setup);
        rows.push_back(std::move(s));
    }
    return render_score_file(rows, setup);
}

}  // namespace

TEST_CASE("report structure follows the configuration") {
    World w;

    SUBCASE("M2 reports an EER and three task blocks per split") {
        auto setup = TrainSetup::from_config_name("M2");
        auto rep = build_report(perfect_scores(w, setup), w.manifest, w.registry, setup);
        CHECK(rep.config_name == "M2");
        REQUIRE(rep.splits.count("dev") == 1);
        REQUIRE(rep.splits.count("eval_cors") == 1);
        const auto& dev = rep.splits.at("dev");
        CHECK(dev.n_utterances == 30);
        REQUIRE(dev.bin_eer.has_value());
        CHECK(*dev.bin_eer == doctest::Approx(0.0));
        CHECK(dev.tasks.size() == 3);
        CHECK(dev.tasks.count(TaskKind::VQ) == 1);
        CHECK(dev.tasks.at(TaskKind::VQ).weighted_f1 == doctest::Approx(100.0));
        // 3 of 4 VQ classes appear in dev: bonafide, Mvq, Svq.
        const auto& cm = dev.tasks.at(TaskKind::VQ).confusion_matrix;
        REQUIRE(cm.size() == 4);
        CHECK(cm[0][0] == 10);
        CHECK(cm[1][1] == 10);
        CHECK(cm[2][2] == 10);
        CHECK(cm[3][3] == 0);
    }
    SUBCASE("a single source-tracing head defines no EER") {
        auto setup = TrainSetup::from_config_name("S_VQ");
        auto rep = build_report(perfect_scores(w, setup), w.manifest, w.registry, setup);
        const auto& dev = rep.splits.at("dev");
        CHECK_FALSE(dev.bin_eer.has_value());
        CHECK(dev.tasks.size() == 1);
    }
    SUBCASE("S_BIN reports the EER and no task blocks") {
        auto setup = TrainSetup::from_config_name("S_BIN");
        auto rep = build_report(perfect_scores(w, setup), w.manifest, w.registry, setup);
        const auto& dev = rep.splits.at("dev");
        CHECK(dev.bin_eer.has_value());
        CHECK(dev.tasks.empty());
    }
    SUBCASE("D_DEC reports EER plus the DEC block") {
        auto setup = TrainSetup::from_config_name("D_DEC");
        auto rep = build_report(perfect_scores(w, setup), w.manifest, w.registry, setup);
        const auto& dev = rep.splits.at("dev");
        CHECK(dev.bin_eer.has_value());
        CHECK(dev.tasks.size() == 1);
        CHECK(dev.tasks.count(TaskKind::DEC) == 1);
    }
}

TEST_CASE("the uniform-guess baseline matches simulation within five points") {
    World w;
    auto setup = TrainSetup::from_config_name("M2");
    auto rep = build_report(perfect_scores(w, setup), w.manifest, w.registry, setup);
    const auto& dev = rep.splits.at("dev");

    // Simulate uniform guessing on the dev class distribution.
    std::mt19937_64 rng(1234);
    for (TaskKind t : setup.active_heads) {
        const int k = task_class_count(t);
        std::vector<int> labels;
        for (const auto& e : w.manifest.entries) {
            if (e.split == Split::Dev) labels.push_back(label_of(e.origin, t, w.registry));
        }
        double acc = 0.0;
        const int reps = 2000;
        for (int r = 0; r < reps; ++r) {
            std::vector<int> guess(labels.size());
            for (auto& g : guess) g = int(rng() % std::uint64_t(k));
            acc += weighted_f1(guess, labels, k);
        }
        acc /= reps;
        INFO("task ", to_string(t));
        CHECK(std::abs(dev.tasks.at(t).random_guess_f1 - acc) < 5.0);
    }
}

TEST_CASE("report json round-trips to an equal value") {
    World w;
    auto setup = TrainSetup::from_config_name("M1");
    auto rep = build_report(perfect_scores(w, setup), w.manifest, w.registry, setup);
    auto text = report_to_json(rep);
    auto back = report_from_json(text);
    CHECK(back == rep);
    CHECK(report_to_json(back) == text);
}

TEST_CASE("confusion csv carries class names and counts") {
    World w;
    auto setup = TrainSetup::from_config_name("M2");
    auto rep = build_report(perfect_scores(w, setup), w.manifest, w.registry, setup);
    auto csv = confusion_csv(rep.splits.at("dev").tasks.at(TaskKind::DEC), TaskKind::DEC);
    CHECK(csv.find("bonafide") != std::string::npos);
    CHECK(csv.find("Time") != std::string::npos);
    CHECK(csv.find("Freq") != std::string::npos);
    CHECK(csv.find("10") != std::string::npos);
}

TEST_CASE("scored utterances missing from the manifest fail loudly") {
    World w;
    auto setup = TrainSetup::from_config_name("M2");
    auto text = perfect_scores(w, setup);

    Manifest truncated = w.manifest;
    truncated.entries.pop_back();
    CHECK_THROWS_AS(build_report(text, truncated, w.registry, setup), TraceError);
}

TEST_CASE("report text mentions every split and metric") {
    World w;
    auto setup = TrainSetup::from_config_name("D_VQ");
    auto rep = build_report(perfect_scores(w, setup), w.manifest, w.registry, setup);
    auto text = report_to_text(rep);
    CHECK(text.find("dev") != std::string::npos);
    CHECK(text.find("eval_cors") != std::string::npos);
    CHECK(text.find("EER") != std::string::npos);
    CHECK(text.find("F1") != std::string::npos);
}
