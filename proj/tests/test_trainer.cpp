#include "doctest.h"

#include "taxotrace/optimizer.hpp"
#include "taxotrace/synth.hpp"
#include "taxotrace/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace taxotrace;

namespace {

// One small corpus shared by the trainer tests; generating clips dominates
// the cost, so build it once.
struct Fixture {
    std::filesystem::path dir;
    Manifest train, dev;
    CodecRegistry registry;

    Fixture() {
        dir = std::filesystem::temp_directory_path() /
              ("taxotrainer_" + std::to_string(std::rand()));
        auto recipes = default_recipes();
        auto manifest = generate_synthetic_corpus(recipes, 20, 13, 3, dir);
        registry = registry_from_recipes(recipes);
        train.base_dir = manifest.base_dir;
        dev.base_dir = manifest.base_dir;
        for (const auto& e : manifest.entries) {
            if (e.split == Split::Train) train.entries.push_back(e);
            if (e.split == Split::Dev) dev.entries.push_back(e);
        }
    }
    ~Fixture() { std::filesystem::remove_all(dir); }
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

TrainSetup quick_setup(const std::string& name, std::uint64_t seed) {
    auto setup = TrainSetup::from_config_name(name);
    setup.seed = seed;
    setup.epochs = 2;
    setup.patience = 0;
    return setup;
}

bool params_equal(const std::map<std::string, Eigen::MatrixXd>& a,
                  const std::map<std::string, Eigen::MatrixXd>& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [name, value] : a) {
        auto it = b.find(name);
        if (it == b.end() || it->second != value) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("optimizer reproduces the hand-computed adaptive update") {
    ParamStore store;
    auto& t = store.add("w", 1, 2);
    t.value << 1.0, -2.0;
    t.grad << 0.5, -0.25;

    const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    AdaptiveOptimizer opt(lr, 0.0, b1, b2, eps);
    OptimizerState state;
    opt.step(store, {"w"}, state);

    // After one step the bias-corrected moments collapse to g and g^2.
    for (int i = 0; i < 2; ++i) {
        double g = (i == 0) ? 0.5 : -0.25;
        double expect = ((i == 0) ? 1.0 : -2.0) - lr * g / (std::sqrt(g * g) + eps);
        CHECK(t.value(0, i) == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(state.step == 1);

    // Second step with fresh gradients follows the moment recursions.
    t.grad << 0.1, 0.2;
    opt.step(store, {"w"}, state);
    for (int i = 0; i < 2; ++i) {
        double g1 = (i == 0) ? 0.5 : -0.25;
        double g2 = (i == 0) ? 0.1 : 0.2;
        double m = b1 * (1 - b1) * g1 + (1 - b1) * g2;
        double v = b2 * (1 - b2) * g1 * g1 + (1 - b2) * g2 * g2;
        double mhat = m / (1 - b1 * b1);
        double vhat = v / (1 - b2 * b2);
        double first = ((i == 0) ? 1.0 : -2.0) -
                       lr * g1 / (std::sqrt(g1 * g1) + eps);
        double expect = first - lr * mhat / (std::sqrt(vhat) + eps);
        CHECK(t.value(0, i) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("weight decay is decoupled from the gradient path") {
    // With zero gradient the adaptive part of the update vanishes, so the
    // parameter must shrink by exactly the decay factor.
    ParamStore store;
    auto& t = store.add("w", 1, 1);
    t.value << 2.0;
    t.grad << 0.0;
    AdaptiveOptimizer opt(0.1, 0.01);
    OptimizerState state;
    opt.step(store, {"w"}, state);
    CHECK(t.value(0, 0) == doctest::Approx(2.0 * (1.0 - 0.1 * 0.01)).epsilon(1e-12));

    // And weight_decay = 0 leaves a zero-gradient parameter untouched.
    ParamStore store2;
    auto& t2 = store2.add("w", 1, 1);
    t2.value << 2.0;
    t2.grad << 0.0;
    OptimizerState state2;
    AdaptiveOptimizer(0.1, 0.0).step(store2, {"w"}, state2);
    CHECK(t2.value(0, 0) == 2.0);
}

TEST_CASE("an epoch yields ceil(n/batch) steps and logged losses are finite") {
    auto& f = fixture();
    auto setup = quick_setup("M2", 11);
    setup.epochs = 1;
    auto result = fit(setup, f.train, f.dev, f.registry, 1);

    const std::size_t n = f.train.entries.size();
    const std::size_t expect_steps = (n + setup.batch_size - 1) / setup.batch_size;
    CHECK(result.log.steps.size() == expect_steps);
    for (const auto& s : result.log.steps) CHECK(std::isfinite(s.total));
    REQUIRE(result.log.epochs.size() == 1);
    CHECK(result.log.epochs[0].dev_f1.size() == 3);  // VQ, AUX, DEC
    // The fused bona fide score always yields a dev EER on a two-class dev set.
    CHECK(result.log.epochs[0].dev_eer.has_value());
    CHECK(result.checkpoint.next_epoch == 1);
}

TEST_CASE("training is bit-exact in the seed") {
    auto& f = fixture();
    auto r1 = fit(quick_setup("D_VQ", 5), f.train, f.dev, f.registry, 2);
    auto r2 = fit(quick_setup("D_VQ", 5), f.train, f.dev, f.registry, 2);
    auto r3 = fit(quick_setup("D_VQ", 6), f.train, f.dev, f.registry, 2);
    CHECK(params_equal(r1.checkpoint.params, r2.checkpoint.params));
    CHECK(r1.log.to_jsonl() == r2.log.to_jsonl());
    CHECK_FALSE(params_equal(r1.checkpoint.params, r3.checkpoint.params));
    // A config with BIN active reports a dev EER.
    REQUIRE_FALSE(r1.log.epochs.empty());
    CHECK(r1.log.epochs[0].dev_eer.has_value());
}

TEST_CASE("resume continues the exact trajectory of a longer fit") {
    auto& f = fixture();
    auto full = fit(quick_setup("S_DEC", 9), f.train, f.dev, f.registry, 3);
    auto part = fit(quick_setup("S_DEC", 9), f.train, f.dev, f.registry, 1);
    auto rest = resume(part.checkpoint, f.train, f.dev, f.registry, 2);

    CHECK(rest.checkpoint.next_epoch == full.checkpoint.next_epoch);
    CHECK(params_equal(rest.checkpoint.params, full.checkpoint.params));
    CHECK(params_equal(rest.checkpoint.best_params, full.checkpoint.best_params));
    CHECK(rest.checkpoint.best_epoch == full.checkpoint.best_epoch);
    CHECK(rest.checkpoint.best_metric == full.checkpoint.best_metric);
    CHECK(rest.checkpoint.opt.step == full.checkpoint.opt.step);
    for (const auto& [name, m] : full.checkpoint.opt.m)
        CHECK(rest.checkpoint.opt.m.at(name) == m);
}

TEST_CASE("inactive heads never move during training") {
    auto& f = fixture();
    auto setup = quick_setup("S_VQ", 13);
    auto result = fit(setup, f.train, f.dev, f.registry, 2);

    // Reference: a freshly initialized model with the same seed.
    Model reference = result.checkpoint.instantiate(false);
    ModelConfig cfg = result.checkpoint.model_config;
    Model fresh{cfg};
    for (const auto& t : fresh.params().tensors()) {
        bool trainable = t.name.rfind("frontend.", 0) == 0 || t.name.rfind("head.VQ.", 0) == 0;
        const auto& trained = result.checkpoint.params.at(t.name);
        if (trainable) continue;
        CHECK_MESSAGE(trained == t.value, t.name);
    }
    // The active path did move.
    CHECK(result.checkpoint.params.at("head.VQ.fc1_w") !=
          fresh.params().at("head.VQ.fc1_w").value);
}

TEST_CASE("checkpoints round-trip bit-exactly and reject corruption") {
    auto& f = fixture();
    auto result = fit(quick_setup("D_AUX", 21), f.train, f.dev, f.registry, 1);
    auto dir = std::filesystem::temp_directory_path() /
               ("taxockpt_" + std::to_string(std::rand()));
    std::filesystem::create_directories(dir);
    auto file = dir / "ckpt.bin";

    result.checkpoint.save(file);
    auto loaded = Checkpoint::load(file);
    CHECK(params_equal(loaded.params, result.checkpoint.params));
    CHECK(params_equal(loaded.best_params, result.checkpoint.best_params));
    CHECK(loaded.next_epoch == result.checkpoint.next_epoch);
    CHECK(loaded.best_epoch == result.checkpoint.best_epoch);
    CHECK(loaded.best_metric == result.checkpoint.best_metric);
    CHECK(loaded.opt.step == result.checkpoint.opt.step);
    CHECK(loaded.setup.config_name == "D_AUX");
    for (const auto& [name, v] : result.checkpoint.opt.v)
        CHECK(loaded.opt.v.at(name) == v);

    // Saving the loaded checkpoint reproduces the file byte for byte.
    auto file2 = dir / "ckpt2.bin";
    loaded.save(file2);
    std::ifstream a(file, std::ios::binary), b(file2, std::ios::binary);
    std::string bytes_a((std::istreambuf_iterator<char>(a)), {});
    std::string bytes_b((std::istreambuf_iterator<char>(b)), {});
    CHECK(bytes_a == bytes_b);

    SUBCASE("truncated file") {
        std::ofstream out(dir / "trunc.bin", std::ios::binary);
        out << bytes_a.substr(0, bytes_a.size() / 2);
        out.close();
        CHECK_THROWS_AS(Checkpoint::load(dir / "trunc.bin"), TraceError);
    }
    SUBCASE("wrong magic") {
        std::string bad = bytes_a;
        bad[0] = 'X';
        std::ofstream out(dir / "magic.bin", std::ios::binary);
        out << bad;
        out.close();
        CHECK_THROWS_AS(Checkpoint::load(dir / "magic.bin"), TraceError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(Checkpoint::load(dir / "nope.bin"), TraceError);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("the best epoch tracks the minimum dev criterion") {
    auto& f = fixture();
    auto setup = quick_setup("M2", 17);
    auto result = fit(setup, f.train, f.dev, f.registry, 3);
    REQUIRE_FALSE(result.log.epochs.empty());
    double best = result.log.epochs[0].criterion;
    int best_epoch = result.log.epochs[0].epoch;
    for (const auto& e : result.log.epochs) {
        if (e.criterion < best) {
            best = e.criterion;
            best_epoch = e.epoch;
        }
    }
    CHECK(result.checkpoint.best_epoch == best_epoch);
    CHECK(result.checkpoint.best_metric == doctest::Approx(best));
    int flagged = 0;
    for (const auto& e : result.log.epochs) flagged += e.is_best ? 1 : 0;
    CHECK(flagged >= 1);
}
