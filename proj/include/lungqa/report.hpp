#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lungqa/classify_eval.hpp"
#include "lungqa/geometry.hpp"
#include "lungqa/regions.hpp"
#include "lungqa/robust_stats.hpp"

namespace lungqa {

inline constexpr const char* kToolVersion = "lungqa 1.0.0";

struct ManifestEntry {
    std::string image_id;
    Label class_label = Label::Normal;
    std::string image_path;
    std::string mask_path;
    std::string truth_mask_path;  // optional, empty when absent
};

/// Reads a manifest CSV with header
/// image_id,class_label,image_path,mask_path[,truth_mask_path].
/// image_id must be unique; paths must be non-empty.
std::vector<ManifestEntry> load_manifest(const std::string& path);

struct QaConfig {
    int threshold = 128;
    Connectivity connectivity = Connectivity::Eight;
    double support_fraction = -1.0;  // < 0: default h = floor((n+d+1)/2)
    double cutoff_p = 0.975;
    double tau = 0.0;
    double margin = 0.0;
    std::uint64_t seed = 0;
    int n_starts = 500;
    bool normalize_cbb = false;
    int threads = 0;  // 0: hardware concurrency
};

/// One per-image QA record. Failures are recorded, never dropped.
struct ImageRecord {
    std::string image_id;
    std::string class_label;
    std::string error;  // non-empty when the mask could not be processed
    int region_count = 0;
    std::optional<double> sa_over_lla;
    std::optional<double> la_over_lla;
    bool degenerate = false;     // fewer than two regions
    bool off_identity = false;
    std::optional<BoundingBox> box;
    Point2 cbb;                  // (0,0) for zero-region masks
    double distance = 0.0;       // robust distance
    bool outlier = false;
};

struct ClassSummary {
    std::string label;
    long long total = 0;
    long long mcd_outliers = 0;
    long long off_identity = 0;
    long long degenerate = 0;
    std::string mcd_outlier_percent;    // one decimal, round half up
    std::string off_identity_percent;
};

struct QaReport {
    std::vector<ImageRecord> records;
    std::vector<ClassSummary> per_class;  // classes sorted by label, then "total"
    bool insufficient_observations = false;
    std::string mcd_error;  // non-empty when the MCD fit degenerated
    int mcd_h = 0;
    double mcd_cutoff = 0.0;
    bool normalized_cbb = false;
    QaConfig config;
};

/// Full QA pass: binarize masks, label regions, ratio and CBB analysis,
/// FAST-MCD outlier flags, per-class tallies. Deterministic for a fixed
/// config and seed. Per-image work runs in parallel; aggregation follows
/// manifest order.
QaReport run_qa(const std::vector<ManifestEntry>& manifest, const QaConfig& config);

std::string qa_report_json(const QaReport& report);
std::string qa_report_csv(const QaReport& report);

struct CropConfig {
    int threshold = 128;
    Connectivity connectivity = Connectivity::Eight;
    double margin = 0.0;
    std::string out_dir = ".";
    int threads = 0;
};

struct CropResult {
    std::string image_id;
    std::optional<BoundingBox> box;  // at original resolution
    std::string out_path;
    std::string status;  // "ok", "no-regions", or an error message
};

/// Crops each original image to the rescaled union box of its mask.
/// Zero-region masks produce an uncropped copy, flagged "no-regions".
std::vector<CropResult> run_crop(const std::vector<ManifestEntry>& manifest,
                                 const CropConfig& config);

std::string crop_index_csv(const std::vector<CropResult>& results);

}  // namespace lungqa
