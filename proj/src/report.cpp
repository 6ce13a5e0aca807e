#include "lungqa/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lungqa/overlap.hpp"
#include "lungqa/raster.hpp"

namespace lungqa {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    for (std::string& f : fields) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? "" : f.substr(b, e - b + 1);
    }
    return fields;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

// Runs fn(i) for i in [0, n) on a small worker pool; each index writes
// only its own output slot, so the result is order-independent.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    unsigned nt = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
    if (nt < 1) nt = 1;
    nt = std::min<unsigned>(nt, n == 0 ? 1 : static_cast<unsigned>(n));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (std::thread& t : pool) t.join();
}

ImageRecord analyze_mask(const ManifestEntry& entry, const QaConfig& cfg) {
    ImageRecord rec;
    rec.image_id = entry.image_id;
    rec.class_label = entry.class_label == Label::Abnormal ? "abnormal" : "normal";
    try {
        const Raster mask_img = load_gray(entry.mask_path);
        const BitMask mask = binarize(mask_img, cfg.threshold);
        const RegionSet rs = label_regions(mask, cfg.connectivity);
        rec.region_count = static_cast<int>(rs.count());
        const RegionRatios rr = ratio_params(rs);
        rec.sa_over_lla = rr.sa_over_lla;
        rec.la_over_lla = rr.la_over_lla;
        rec.degenerate = rr.degenerate();
        rec.off_identity = !rr.degenerate() && off_identity(rr, cfg.tau);
        rec.box = union_box(rs);
        rec.cbb = cfg.normalize_cbb ? center(rec.box, mask.width, mask.height) : center(rec.box);
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

}  // namespace

std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open manifest");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty manifest");
    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 4 || header[0] != "image_id" || header[1] != "class_label" ||
        header[2] != "image_path" || header[3] != "mask_path")
        throw std::runtime_error(
            path + ": manifest header must be image_id,class_label,image_path,mask_path[,truth_mask_path]");
    const bool has_truth = header.size() >= 5 && header[4] == "truth_mask_path";

    std::vector<ManifestEntry> entries;
    std::set<std::string> seen;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() < 4)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected at least 4 fields");
        ManifestEntry e;
        e.image_id = f[0];
        e.class_label = parse_label(f[1]);
        e.image_path = f[2];
        e.mask_path = f[3];
        if (has_truth && f.size() >= 5) e.truth_mask_path = f[4];
        if (e.image_id.empty() || e.image_path.empty() || e.mask_path.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty id or path");
        if (!seen.insert(e.image_id).second)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": duplicate image_id '" +
                                     e.image_id + "'");
        entries.push_back(std::move(e));
    }
    return entries;
}

QaReport run_qa(const std::vector<ManifestEntry>& manifest, const QaConfig& config) {
    QaReport report;
    report.config = config;
    report.normalized_cbb = config.normalize_cbb;
    report.records.resize(manifest.size());

    parallel_for(manifest.size(), config.threads,
                 [&](std::size_t i) { report.records[i] = analyze_mask(manifest[i], config); });

    // CBB point cloud: every record that produced a center, including
    // zero-region masks at the origin. I/O failures carry no center.
    std::vector<std::size_t> point_of_record;
    for (std::size_t i = 0; i < report.records.size(); ++i)
        if (report.records[i].error.empty()) point_of_record.push_back(i);

    const std::size_t n = point_of_record.size();
    if (n >= 4) {
        Eigen::MatrixXd points(static_cast<Eigen::Index>(n), 2);
        for (std::size_t k = 0; k < n; ++k) {
            points(static_cast<Eigen::Index>(k), 0) = report.records[point_of_record[k]].cbb.x;
            points(static_cast<Eigen::Index>(k), 1) = report.records[point_of_record[k]].cbb.y;
        }
        McdOptions opt;
        if (config.support_fraction > 0.0) {
            const int lo = static_cast<int>(n) / 2 + 1;
            opt.h = std::clamp(static_cast<int>(config.support_fraction * static_cast<double>(n)),
                               lo, static_cast<int>(n));
        }
        opt.seed = config.seed;
        opt.n_starts = config.n_starts;
        opt.cutoff_p = config.cutoff_p;
        try {
            const McdFit fit = mcd_fit(points, opt);
            report.mcd_h = fit.h;
            report.mcd_cutoff = fit.cutoff;
            for (std::size_t k = 0; k < n; ++k) {
                report.records[point_of_record[k]].distance = fit.distances[k];
                report.records[point_of_record[k]].outlier = fit.outlier[k];
            }
        } catch (const DegenerateDataError& e) {
            report.mcd_error = e.what();
        }
    } else {
        report.insufficient_observations = true;
    }

    // Per-class tallies plus a "total" row.
    std::map<std::string, ClassSummary> sums;
    ClassSummary total;
    total.label = "total";
    for (const ImageRecord& r : report.records) {
        ClassSummary& s = sums[r.class_label];
        s.label = r.class_label;
        for (ClassSummary* t : {&s, &total}) {
            ++t->total;
            if (r.outlier) ++t->mcd_outliers;
            if (r.off_identity) ++t->off_identity;
            if (r.degenerate) ++t->degenerate;
        }
    }
    for (auto& [_, s] : sums) {
        s.mcd_outlier_percent = format_percent(s.mcd_outliers, s.total);
        s.off_identity_percent = format_percent(s.off_identity, s.total);
        report.per_class.push_back(s);
    }
    if (total.total > 0) {
        total.mcd_outlier_percent = format_percent(total.mcd_outliers, total.total);
        total.off_identity_percent = format_percent(total.off_identity, total.total);
        report.per_class.push_back(total);
    }
    return report;
}

std::string qa_report_json(const QaReport& report) {
    nlohmann::ordered_json j;
    j["tool_version"] = kToolVersion;
    j["config"] = {
        {"threshold", report.config.threshold},
        {"connectivity", report.config.connectivity == Connectivity::Four ? "four" : "eight"},
        {"support_fraction", report.config.support_fraction},
        {"cutoff_p", report.config.cutoff_p},
        {"tau", report.config.tau},
        {"seed", report.config.seed},
        {"starts", report.config.n_starts},
        {"normalize_cbb", report.config.normalize_cbb},
    };
    j["mcd"] = {
        {"h", report.mcd_h},
        {"cutoff", report.mcd_cutoff},
        {"insufficient_observations", report.insufficient_observations},
        {"error", report.mcd_error},
    };
    j["summary"] = nlohmann::ordered_json::array();
    for (const ClassSummary& s : report.per_class) {
        j["summary"].push_back({
            {"class", s.label},
            {"total", s.total},
            {"mcd_outliers", s.mcd_outliers},
            {"mcd_outlier_percent", s.mcd_outlier_percent},
            {"off_identity", s.off_identity},
            {"off_identity_percent", s.off_identity_percent},
            {"degenerate", s.degenerate},
        });
    }
    j["records"] = nlohmann::ordered_json::array();
    for (const ImageRecord& r : report.records) {
        nlohmann::ordered_json rj = {
            {"image_id", r.image_id},
            {"class", r.class_label},
            {"region_count", r.region_count},
            {"degenerate", r.degenerate},
            {"off_identity", r.off_identity},
            {"cbb", {r.cbb.x, r.cbb.y}},
            {"distance", r.distance},
            {"outlier", r.outlier},
        };
        if (r.sa_over_lla) rj["sa_over_lla"] = *r.sa_over_lla;
        if (r.la_over_lla) rj["la_over_lla"] = *r.la_over_lla;
        if (r.box) rj["box"] = {r.box->x0, r.box->y0, r.box->x1, r.box->y1};
        if (!r.error.empty()) rj["error"] = r.error;
        j["records"].push_back(std::move(rj));
    }
    return j.dump(2) + "\n";
}

std::string qa_report_csv(const QaReport& report) {
    std::ostringstream out;
    out << "image_id,class,region_count,degenerate,off_identity,sa_over_lla,la_over_lla,"
           "box_x0,box_y0,box_x1,box_y1,cbb_x,cbb_y,distance,outlier,error\n";
    for (const ImageRecord& r : report.records) {
        out << r.image_id << ',' << r.class_label << ',' << r.region_count << ','
            << (r.degenerate ? 1 : 0) << ',' << (r.off_identity ? 1 : 0) << ',';
        if (r.sa_over_lla) out << fmt(*r.sa_over_lla);
        out << ',';
        if (r.la_over_lla) out << fmt(*r.la_over_lla);
        out << ',';
        if (r.box)
            out << r.box->x0 << ',' << r.box->y0 << ',' << r.box->x1 << ',' << r.box->y1;
        else
            out << ",,,";
        out << ',' << fmt(r.cbb.x) << ',' << fmt(r.cbb.y) << ',' << fmt(r.distance) << ','
            << (r.outlier ? 1 : 0) << ',' << r.error << '\n';
    }
    return out.str();
}

std::vector<CropResult> run_crop(const std::vector<ManifestEntry>& manifest,
                                 const CropConfig& config) {
    std::filesystem::create_directories(config.out_dir);
    std::vector<CropResult> results(manifest.size());

    parallel_for(manifest.size(), config.threads, [&](std::size_t i) {
        const ManifestEntry& entry = manifest[i];
        CropResult& res = results[i];
        res.image_id = entry.image_id;
        try {
            const Raster original = load_gray(entry.image_path);
            const Raster mask_img = load_gray(entry.mask_path);
            const BitMask mask = binarize(mask_img, config.threshold);
            const RegionSet rs = label_regions(mask, config.connectivity);
            const std::string ext =
                std::filesystem::path(entry.image_path).extension() == ".pgm" ? ".pgm" : ".png";
            res.out_path = (std::filesystem::path(config.out_dir) / (entry.image_id + ext)).string();

            const std::optional<BoundingBox> seg_box = union_box(rs);
            if (!seg_box) {
                save_gray(original, res.out_path);
                res.status = "no-regions";
                return;
            }
            BoundingBox box = rescale_box(*seg_box, mask.width, mask.height, original.width,
                                          original.height);
            box = expand_box(box, config.margin, original.width, original.height);
            save_gray(crop(original, box), res.out_path);
            res.box = box;
            res.status = "ok";
        } catch (const std::exception& e) {
            res.status = std::string("error: ") + e.what();
        }
    });
    return results;
}

std::string crop_index_csv(const std::vector<CropResult>& results) {
    std::ostringstream out;
    out << "image_id,box_x0,box_y0,box_x1,box_y1,output_path,status\n";
    for (const CropResult& r : results) {
        out << r.image_id << ',';
        if (r.box)
            out << r.box->x0 << ',' << r.box->y0 << ',' << r.box->x1 << ',' << r.box->y1;
        else
            out << ",,,";
        out << ',' << r.out_path << ',' << r.status << '\n';
    }
    return out.str();
}

}  // namespace lungqa
