#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taxotrace/error.hpp"

namespace taxotrace {

// The three taxonomy axes of a neural audio codec.
enum class VqClass { Mvq, Svq, Scq };
enum class AuxClass { Sem, Disent, NoAux };  // NoAux serializes as "None"
enum class DecClass { Time, Freq };

enum class TaskKind { BIN, VQ, AUX, DEC };

inline constexpr TaskKind kAllTasks[] = {TaskKind::BIN, TaskKind::VQ,
                                         TaskKind::AUX, TaskKind::DEC};

std::string to_string(VqClass v);
std::string to_string(AuxClass a);
std::string to_string(DecClass d);
std::string to_string(TaskKind t);

VqClass vq_from_string(const std::string& s);
AuxClass aux_from_string(const std::string& s);
DecClass dec_from_string(const std::string& s);
TaskKind task_from_string(const std::string& s);

struct TaxonomyLabel {
    VqClass vq;
    AuxClass aux;
    DecClass dec;

    bool operator==(const TaxonomyLabel&) const = default;
};

struct CodecSpec {
    std::string codec_id;
    std::string display_name;
    TaxonomyLabel label;

    bool operator==(const CodecSpec&) const = default;
};

inline constexpr const char* kBonafideOrigin = "bonafide";

/// Ordered class names for a task. Bona fide is always class 0 so that
/// fused scoring and confusion matrices address it uniformly:
///   BIN -> {bonafide, spoof}
///   VQ  -> {bonafide, Mvq, Svq, Scq}
///   AUX -> {bonafide, Sem, Disent, None}
///   DEC -> {bonafide, Time, Freq}
const std::vector<std::string>& task_classes(TaskKind task);
int task_class_count(TaskKind task);

/// Registry of known codecs, keyed by codec_id. Immutable after load.
class CodecRegistry {
public:
    /// Throws DuplicateCodecId if spec.codec_id is already present.
    void register_codec(const CodecSpec& spec);

    /// Throws UnknownCodecId.
    const CodecSpec& lookup(const std::string& codec_id) const;

    bool contains(const std::string& codec_id) const;
    std::size_t size() const { return specs_.size(); }

    /// Ids in registration order.
    const std::vector<std::string>& ids() const { return order_; }

    /// JSON-lines file, one codec per line:
    /// {"codec_id":..,"display_name":..,"vq":..,"aux":..,"dec":..}
    static CodecRegistry load_jsonl(const std::filesystem::path& path);
    void save_jsonl(const std::filesystem::path& path) const;

private:
    std::map<std::string, CodecSpec> specs_;
    std::vector<std::string> order_;
};

/// Class index of an utterance origin under a task. Bona fide maps to 0
/// for every task; a codec origin maps to the index of its category.
/// Throws UnknownCodecId for an unregistered spoof origin.
int label_of(const std::string& origin, TaskKind task, const CodecRegistry& registry);

}  // namespace taxotrace
