#include "taxotrace/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "taxotrace/hash.hpp"
#include "taxotrace/inference.hpp"
#include "taxotrace/loss.hpp"
#include "taxotrace/metrics.hpp"
#include "taxotrace/optimizer.hpp"
#include "taxotrace/segment.hpp"

namespace taxotrace {

namespace {

TaskLabels labels_of_segment(const Segment& seg) {
    return {{TaskKind::BIN, seg.label_bin},
            {TaskKind::VQ, seg.label_vq},
            {TaskKind::AUX, seg.label_aux},
            {TaskKind::DEC, seg.label_dec}};
}

struct DevEval {
    std::optional<double> eer;
    std::map<TaskKind, double> f1;
    double criterion = 0.0;
};

DevEval evaluate_dev(const Model& model, const TrainSetup& setup, const Manifest& dev,
                     const CodecRegistry& registry, ClipCache& cache) {
    const auto rows = score_entries(model, setup, dev, dev.entries, registry, cache);

    DevEval out;
    std::vector<double> scores;
    std::vector<bool> is_bona;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        scores.push_back(rows[i].bonafide_score);
        is_bona.push_back(dev.entries[i].origin == kBonafideOrigin);
    }
    try {
        out.eer = compute_eer(scores, is_bona).eer_percent;
    } catch (const TraceError& e) {
        if (e.code() != ErrorCode::DegenerateLabels) throw;
    }

    double f1_sum = 0.0;
    int f1_count = 0;
    for (TaskKind t : setup.active_heads) {
        if (t == TaskKind::BIN) continue;
        std::vector<int> preds, labels;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            preds.push_back(rows[i].predicted.at(t));
            labels.push_back(label_of(dev.entries[i].origin, t, registry));
        }
        const double f1 = weighted_f1(preds, labels, task_class_count(t));
        out.f1[t] = f1;
        f1_sum += f1;
        ++f1_count;
    }

    // model selection: dev BIN EER when BIN is active, else mean weighted F1
    // (negated so that lower is uniformly better)
    if (setup.is_active(TaskKind::BIN)) {
        if (!out.eer) {
            throw TraceError(ErrorCode::DegenerateLabels,
                             "dev split lacks both classes for EER-based selection");
        }
        out.criterion = *out.eer;
    } else {
        out.criterion = -(f1_count > 0 ? f1_sum / f1_count : 0.0);
    }
    return out;
}

FitResult run(Checkpoint ckpt, const Manifest& train, const Manifest& dev,
              const CodecRegistry& registry, int n_epochs) {
    const TrainSetup& setup = ckpt.setup;
    setup.validate();
    if (train.entries.empty() || dev.entries.empty()) {
        throw TraceError(ErrorCode::InvalidArgument, "train/dev manifests must be non-empty");
    }

    Model model = ckpt.instantiate(/*use_best=*/false);
    const auto trainable = model.trainable_names(setup);
    const AdaptiveOptimizer optimizer(setup.learning_rate, setup.weight_decay);
    OptimizerState opt_state = ckpt.opt;
    ClipCache cache;
    TrainLog log;

    const int first_epoch = ckpt.next_epoch;
    for (int epoch = first_epoch; epoch < first_epoch + n_epochs; ++epoch) {
        std::vector<std::size_t> order(train.entries.size());
        std::iota(order.begin(), order.end(), 0);
        std::mt19937_64 shuffle_rng(derive_seed(setup.seed, "shuffle", epoch));
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double epoch_loss = 0.0;
        long epoch_steps = 0;
        for (std::size_t start = 0; start < order.size(); start += setup.batch_size) {
            const std::size_t end = std::min(order.size(), start + setup.batch_size);
            const double inv_n = 1.0 / static_cast<double>(end - start);
            model.params().zero_grad();

            StepLog step;
            step.step = opt_state.step + 1;
            for (std::size_t k = start; k < end; ++k) {
                const ManifestEntry& entry = train.entries[order[k]];
                Segment seg = load_segment(train, entry, CropMode::Train,
                                           derive_seed(setup.seed, "crop", epoch,
                                                       entry.utterance_id),
                                           registry, cache);
                if (setup.augment_strength > 0.0) {
                    seg = augment(seg, setup.augment_strength,
                                  derive_seed(setup.seed, "aug", epoch, entry.utterance_id));
                }
                Model::Cache fwd;
                const HeadLogits logits = model.forward(seg.samples, setup, fwd);
                const TaskLabels labels = labels_of_segment(seg);
                const LossBreakdown loss = total_loss(logits, labels, setup);
                if (!std::isfinite(loss.total)) {
                    throw TraceError(ErrorCode::NonFiniteLoss,
                                     "non-finite loss at step " + std::to_string(step.step));
                }
                step.total += inv_n * loss.total;
                for (const auto& [t, l] : loss.per_head) step.per_head[t] += inv_n * l;

                HeadGrads dlogits = total_loss_grad(logits, labels, setup);
                for (auto& [t, g] : dlogits) g *= inv_n;
                model.backward(fwd, dlogits);
            }
            optimizer.step(model.params(), trainable, opt_state);
            epoch_loss += step.total;
            ++epoch_steps;
            log.steps.push_back(std::move(step));
        }

        const DevEval dev_eval = evaluate_dev(model, setup, dev, registry, cache);
        EpochLog el;
        el.epoch = epoch;
        el.train_loss = epoch_steps > 0 ? epoch_loss / epoch_steps : 0.0;
        el.dev_eer = dev_eval.eer;
        el.dev_f1 = dev_eval.f1;
        el.criterion = dev_eval.criterion;

        if (ckpt.best_epoch < 0 || dev_eval.criterion < ckpt.best_metric) {
            ckpt.best_metric = dev_eval.criterion;
            ckpt.best_epoch = epoch;
            ckpt.best_params.clear();
            for (const auto& t : model.params().tensors()) {
                ckpt.best_params[t.name] = t.value;
            }
            el.is_best = true;
        }
        log.epochs.push_back(std::move(el));
        ckpt.next_epoch = epoch + 1;

        if (setup.patience > 0 && ckpt.best_epoch >= 0 &&
            epoch - ckpt.best_epoch >= setup.patience) {
            break;
        }
    }

    ckpt.params.clear();
    for (const auto& t : model.params().tensors()) {
        ckpt.params[t.name] = t.value;
    }
    ckpt.opt = std::move(opt_state);
    return {std::move(ckpt), std::move(log)};
}

}  // namespace

FitResult fit(const TrainSetup& setup, const Manifest& train_manifest,
              const Manifest& dev_manifest, const CodecRegistry& registry, int epochs) {
    setup.validate();
    ModelConfig mc;
    mc.frontend.d_model = setup.d_model;
    mc.init_seed = derive_seed(setup.seed, "init");

    Checkpoint ckpt;
    ckpt.setup = setup;
    ckpt.model_config = mc;
    Model model(mc);
    for (const auto& t : model.params().tensors()) {
        ckpt.params[t.name] = t.value;
    }
    return run(std::move(ckpt), train_manifest, dev_manifest, registry, epochs);
}

FitResult resume(const Checkpoint& checkpoint, const Manifest& train_manifest,
                 const Manifest& dev_manifest, const CodecRegistry& registry,
                 int extra_epochs) {
    return run(checkpoint, train_manifest, dev_manifest, registry, extra_epochs);
}

std::string TrainLog::to_jsonl() const {
    std::ostringstream out;
    for (const auto& s : steps) {
        nlohmann::ordered_json j;
        j["type"] = "step";
        j["step"] = s.step;
        j["l_total"] = s.total;
        for (const auto& [t, l] : s.per_head) j["l_" + to_string(t)] = l;
        out << j.dump() << "\n";
    }
    for (const auto& e : epochs) {
        nlohmann::ordered_json j;
        j["type"] = "epoch";
        j["epoch"] = e.epoch;
        j["train_loss"] = e.train_loss;
        if (e.dev_eer) j["dev_eer"] = *e.dev_eer;
        for (const auto& [t, f1] : e.dev_f1) j["dev_f1_" + to_string(t)] = f1;
        j["criterion"] = e.criterion;
        j["is_best"] = e.is_best;
        out << j.dump() << "\n";
    }
    return out.str();
}

}  // namespace taxotrace
