#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "taxotrace/metrics.hpp"
#include "taxotrace/sampling.hpp"
#include "taxotrace/scoring.hpp"
#include "taxotrace/synth.hpp"
#include "taxotrace/taxonomy.hpp"

namespace py = pybind11;
using namespace taxotrace;

PYBIND11_MODULE(_core, m) {
    m.doc() = "codec deepfake source tracing: metrics, fusion and corpus operations";

    py::register_exception<TraceError>(m, "TraceError");

    m.def(
        "task_classes",
        [](const std::string& task) { return task_classes(task_from_string(task)); },
        py::arg("task"),
        "Ordered class names for a task (bona fide is always class 0).");

    m.def(
        "compute_eer",
        [](const std::vector<double>& scores, const std::vector<bool>& is_bonafide) {
            const EerResult r = compute_eer(scores, is_bonafide);
            return py::make_tuple(r.eer_percent, r.threshold);
        },
        py::arg("scores"), py::arg("is_bonafide"),
        "Equal error rate in percent plus the operating threshold.");

    m.def("weighted_f1", &weighted_f1, py::arg("preds"), py::arg("labels"),
          py::arg("n_classes"), "Support-weighted mean per-class F1, in percent.");

    m.def("confusion", &confusion, py::arg("preds"), py::arg("labels"), py::arg("n_classes"),
          "confusion[r][p]: count of reference class r predicted as p.");

    m.def("fuse_bonafide", &fuse_bonafide, py::arg("bonafide_probs"),
          "k-th root of the product of k bona fide probabilities.");

    m.def(
        "generate_corpus",
        [](const std::string& out_dir, int n_bonafide, int n_per_codec,
           std::uint64_t seed, int heldout_per_codec, const std::string& recipes_path) {
            const auto recipes = recipes_path.empty() ? default_recipes()
                                                      : load_recipes(recipes_path);
            const Manifest manifest = generate_synthetic_corpus(
                recipes, n_bonafide, n_per_codec, seed, out_dir, heldout_per_codec);
            return (manifest.base_dir / "manifest.jsonl").string();
        },
        py::arg("out_dir"), py::arg("n_bonafide") = 900, py::arg("n_per_codec") = 210,
        py::arg("seed") = 7, py::arg("heldout_per_codec") = -1, py::arg("recipes_path") = "",
        "Generate the synthetic fingerprint corpus; returns the manifest path.");

    m.def(
        "balanced_sample_manifest",
        [](const std::string& manifest_path, const std::string& registry_path,
           const std::string& grouping, int total_spoof, std::uint64_t seed) {
            const CodecRegistry registry = CodecRegistry::load_jsonl(registry_path);
            const Manifest manifest = ingest_manifest(manifest_path, registry);
            const Manifest sampled = balanced_sample(manifest, task_from_string(grouping),
                                                     total_spoof, seed, registry);
            std::vector<std::string> ids;
            for (const auto& e : sampled.entries) ids.push_back(e.utterance_id);
            return ids;
        },
        py::arg("manifest_path"), py::arg("registry_path"), py::arg("grouping"),
        py::arg("total_spoof"), py::arg("seed"),
        "Taxonomy-guided balanced sampling; returns the selected utterance ids.");
}
