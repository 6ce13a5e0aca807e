#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "lungqa/classify_eval.hpp"
#include "lungqa/overlap.hpp"
#include "lungqa/raster.hpp"
#include "lungqa/report.hpp"
#include "lungqa/robust_stats.hpp"
#include "lungqa/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace lungqa;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitDegenerate = 2;

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << content;
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

Connectivity parse_connectivity(const std::string& s) {
    if (s == "four" || s == "4") return Connectivity::Four;
    if (s == "eight" || s == "8") return Connectivity::Eight;
    throw CLI::ValidationError("--connectivity", "must be 'four' or 'eight'");
}

int cmd_qa(const std::string& manifest_path, const QaConfig& cfg, const std::string& out_dir) {
    const std::vector<ManifestEntry> manifest = load_manifest(manifest_path);
    const QaReport report = run_qa(manifest, cfg);

    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "report.json", qa_report_json(report));
    write_file(fs::path(out_dir) / "report.csv", qa_report_csv(report));
    if (!report.records.empty()) {
        write_file(fs::path(out_dir) / "cbb.svg", plot_cbb(report));
        bool any_ratio = false;
        for (const ImageRecord& r : report.records)
            any_ratio |= r.error.empty() && !r.degenerate;
        if (any_ratio) write_file(fs::path(out_dir) / "ratio.svg", plot_ratio(report));
    }

    for (const ClassSummary& s : report.per_class)
        std::cout << s.label << ": " << s.mcd_outliers << " MCD outliers ("
                  << s.mcd_outlier_percent << "), " << s.off_identity << " off-identity ("
                  << s.off_identity_percent << "), " << s.degenerate << " degenerate of "
                  << s.total << "\n";

    if (report.insufficient_observations) {
        std::cerr << "lungqa qa: insufficient observations for MCD (need at least 4 usable images)\n";
        return kExitDegenerate;
    }
    if (!report.mcd_error.empty()) {
        std::cerr << "lungqa qa: " << report.mcd_error << "\n";
        return kExitDegenerate;
    }
    return kExitOk;
}

int cmd_crop(const std::string& manifest_path, const CropConfig& cfg) {
    const std::vector<ManifestEntry> manifest = load_manifest(manifest_path);
    const std::vector<CropResult> results = run_crop(manifest, cfg);
    write_file(fs::path(cfg.out_dir) / "crop_index.csv", crop_index_csv(results));
    for (const CropResult& r : results)
        if (r.status != "ok") std::cerr << r.image_id << ": " << r.status << "\n";
    return kExitOk;
}

int cmd_overlap(const std::string& pairs_path, int threshold, const std::string& out_path) {
    std::ifstream in(pairs_path);
    if (!in) throw std::runtime_error(pairs_path + ": cannot open pairs file");
    std::string line;
    if (!std::getline(in, line) || line.rfind("image_id,pred_path,truth_path", 0) != 0)
        throw std::runtime_error(pairs_path + ": header must be image_id,pred_path,truth_path");

    std::ostringstream csv;
    csv << "image_id,iou,dice\n";
    std::vector<OverlapScores> scores;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::istringstream ls(line);
        std::string id, pred_path, truth_path;
        std::getline(ls, id, ',');
        std::getline(ls, pred_path, ',');
        std::getline(ls, truth_path, ',');
        if (!truth_path.empty() && truth_path.back() == '\r') truth_path.pop_back();
        const BitMask pred = binarize(load_gray(pred_path), threshold);
        const BitMask truth = binarize(load_gray(truth_path), threshold);
        const OverlapScores s = overlap(pred, truth);
        scores.push_back(s);
        char buf[80];
        std::snprintf(buf, sizeof buf, "%s,%.9g,%.9g\n", id.c_str(), s.iou, s.dice);
        csv << buf;
    }
    const OverlapScores mean = mean_overlap(scores);
    char buf[80];
    std::snprintf(buf, sizeof buf, "mean,%.9g,%.9g\n", mean.iou, mean.dice);
    csv << buf;

    if (out_path.empty())
        std::cout << csv.str();
    else
        write_file(out_path, csv.str());
    std::fprintf(stderr, "mean IoU %.3f, mean Dice %.3f over %zu pairs\n", mean.iou, mean.dice,
                 scores.size());
    return kExitOk;
}

int cmd_eval(const std::string& preds_path, const std::string& out_path) {
    std::ifstream in(preds_path);
    if (!in) throw std::runtime_error(preds_path + ": cannot open predictions file");
    std::string line;
    if (!std::getline(in, line) || line.rfind("image_id,truth,predicted", 0) != 0)
        throw std::runtime_error(preds_path + ": header must be image_id,truth,predicted");

    std::vector<std::pair<Label, Label>> pairs;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::istringstream ls(line);
        std::string id, truth, predicted;
        std::getline(ls, id, ',');
        std::getline(ls, truth, ',');
        std::getline(ls, predicted, ',');
        if (!predicted.empty() && predicted.back() == '\r') predicted.pop_back();
        pairs.emplace_back(parse_label(truth), parse_label(predicted));
    }
    const ConfusionMatrix cm = confusion(pairs);
    const MetricsRow m = metrics(cm);

    nlohmann::ordered_json j;
    j["confusion"] = {{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
    j["metrics"] = {{"accuracy", m.accuracy},
                    {"sensitivity", m.sensitivity},
                    {"precision", m.precision},
                    {"f1", m.f1},
                    {"zero_denominator", m.zero_denominator}};
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
    return kExitOk;
}

int cmd_prep(const std::string& in_dir, const std::string& out_dir, int side) {
    fs::create_directories(out_dir);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(in_dir)) {
        const std::string ext = e.path().extension().string();
        if (e.is_regular_file() && (ext == ".png" || ext == ".pgm")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error(in_dir + ": no .png or .pgm files found");
    for (const fs::path& f : files) {
        const Raster out = classifier_prep(load_gray(f.string()), side);
        save_gray(out, (fs::path(out_dir) / f.filename()).string());
    }
    std::cerr << "prepared " << files.size() << " images at " << side << "x" << side << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lung-segmentation QC: crops, overlap metrics, and robust outlier reports"};
    app.require_subcommand(1);

    std::string manifest_path, out_dir = "lungqa-out", out_path, pairs_path, preds_path, in_dir;
    std::string connectivity = "eight";
    QaConfig qa_cfg;
    double margin = 0.0;
    int side = 224;

    CLI::App* qa = app.add_subcommand("qa", "Run mask QA: regions, ratios, CBB + MCD outliers, plots");
    qa->set_config("--config")->description("key=value config file; CLI flags override it");
    qa->add_option("manifest", manifest_path, "Manifest CSV")->required();
    qa->add_option("--threshold", qa_cfg.threshold, "Mask binarization threshold")->capture_default_str();
    qa->add_option("--connectivity", connectivity, "four|eight")->capture_default_str();
    qa->add_option("--support-fraction", qa_cfg.support_fraction,
                   "MCD support fraction h/n; default floor((n+d+1)/2)");
    qa->add_option("--cutoff-p", qa_cfg.cutoff_p, "Chi-square outlier cutoff probability")->capture_default_str();
    qa->add_option("--tau", qa_cfg.tau, "Off-identity ratio tolerance")->capture_default_str();
    qa->add_option("--seed", qa_cfg.seed, "MCD RNG seed")->capture_default_str();
    qa->add_option("--starts", qa_cfg.n_starts, "MCD initial subset count")->capture_default_str();
    qa->add_flag("--normalize-cbb", qa_cfg.normalize_cbb, "Normalize CBBs by mask dimensions");
    qa->add_option("--threads", qa_cfg.threads, "Worker threads (0 = auto)");
    qa->add_option("--out", out_dir, "Output directory")->capture_default_str();

    CLI::App* crop_cmd = app.add_subcommand("crop", "Crop originals to rescaled mask bounding boxes");
    crop_cmd->set_config("--config")->description("key=value config file; CLI flags override it");
    crop_cmd->add_option("manifest", manifest_path, "Manifest CSV")->required();
    crop_cmd->add_option("--threshold", qa_cfg.threshold, "Mask binarization threshold")->capture_default_str();
    crop_cmd->add_option("--connectivity", connectivity, "four|eight")->capture_default_str();
    crop_cmd->add_option("--margin", margin, "Box expansion per side, as a fraction of box size")->capture_default_str();
    crop_cmd->add_option("--threads", qa_cfg.threads, "Worker threads (0 = auto)");
    crop_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

    CLI::App* overlap_cmd = app.add_subcommand("overlap", "IoU/Dice for predicted vs truth mask pairs");
    overlap_cmd->add_option("pairs", pairs_path, "CSV: image_id,pred_path,truth_path")->required();
    overlap_cmd->add_option("--threshold", qa_cfg.threshold, "Mask binarization threshold")->capture_default_str();
    overlap_cmd->add_option("--out", out_path, "Output CSV (default: stdout)");

    CLI::App* eval_cmd = app.add_subcommand("eval", "Confusion matrix and metrics from predictions CSV");
    eval_cmd->add_option("predictions", preds_path, "CSV: image_id,truth,predicted")->required();
    eval_cmd->add_option("--out", out_path, "Output JSON (default: stdout)");

    CLI::App* prep_cmd = app.add_subcommand("prep", "Pad to square and resize images for a classifier");
    prep_cmd->add_option("input", in_dir, "Input directory of .png/.pgm images")->required();
    prep_cmd->add_option("--side", side, "Output side length")->capture_default_str();
    prep_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (qa->parsed()) {
            qa_cfg.connectivity = parse_connectivity(connectivity);
            return cmd_qa(manifest_path, qa_cfg, out_dir);
        }
        if (crop_cmd->parsed()) {
            CropConfig cfg;
            cfg.threshold = qa_cfg.threshold;
            cfg.connectivity = parse_connectivity(connectivity);
            cfg.margin = margin;
            cfg.threads = qa_cfg.threads;
            cfg.out_dir = out_dir;
            return cmd_crop(manifest_path, cfg);
        }
        if (overlap_cmd->parsed()) return cmd_overlap(pairs_path, qa_cfg.threshold, out_path);
        if (eval_cmd->parsed()) return cmd_eval(preds_path, out_path);
        if (prep_cmd->parsed()) return cmd_prep(in_dir, out_dir, side);
    } catch (const DegenerateDataError& e) {
        std::cerr << "lungqa: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const std::exception& e) {
        std::cerr << "lungqa: " << e.what() << "\n";
        return kExitBadInput;
    }
    return kExitBadInput;
}
