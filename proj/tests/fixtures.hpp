// Test-only helpers: synthetic lung-style masks and manifest scaffolding.
#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "lungqa/raster.hpp"
#include "lungqa/report.hpp"

namespace lungqa::testfix {

struct Ellipse {
    double cx, cy, rx, ry;
};

inline Raster ellipse_mask(int w, int h, const std::vector<Ellipse>& ellipses) {
    Raster img(w, h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (const Ellipse& e : ellipses) {
                const double dx = (x - e.cx) / e.rx;
                const double dy = (y - e.cy) / e.ry;
                if (dx * dx + dy * dy <= 1.0) {
                    img.at(x, y) = 255;
                    break;
                }
            }
    return img;
}

/// A plausible two-lobe lung mask with jittered lobe centers.
inline Raster two_lobe_mask(int w, int h, double jx, double jy) {
    return ellipse_mask(w, h, {{0.32 * w + jx, 0.50 * h + jy, 0.14 * w, 0.32 * h},
                               {0.68 * w + jx, 0.50 * h + jy, 0.14 * w, 0.32 * h}});
}

struct FixtureSet {
    std::filesystem::path dir;
    std::vector<ManifestEntry> manifest;
    std::filesystem::path manifest_path;
};

/// Writes `n` two-lobe masks, the first `planted_displaced` of which are
/// shifted far off-center and the next `planted_blob` of which carry a
/// third spurious blob. Jitter is uniform in [-jitter, jitter] pixels.
inline FixtureSet make_fixture_set(const std::string& name, int n, int planted_displaced,
                                   int planted_blob, double jitter = 2.0,
                                   unsigned rng_seed = 12345) {
    FixtureSet fs;
    fs.dir = std::filesystem::temp_directory_path() / ("lungqa_fix_" + name);
    std::filesystem::create_directories(fs.dir);
    std::mt19937 rng(rng_seed);
    std::uniform_real_distribution<double> jit(-jitter, jitter);

    const int w = 128, h = 128;
    for (int i = 0; i < n; ++i) {
        Raster mask;
        if (i < planted_displaced) {
            // both lobes pushed into a corner
            const double dx = 0.28 * w, dy = 0.30 * h;
            mask = ellipse_mask(w, h, {{0.32 * w - dx, 0.50 * h - dy, 0.10 * w, 0.16 * h},
                                       {0.58 * w - dx, 0.50 * h - dy, 0.10 * w, 0.16 * h}});
        } else if (i < planted_displaced + planted_blob) {
            mask = two_lobe_mask(w, h, jit(rng), jit(rng));
            // third blob near the abdomen
            const Raster blob = ellipse_mask(w, h, {{0.5 * w, 0.92 * h, 0.05 * w, 0.05 * h}});
            for (std::size_t p = 0; p < mask.pixels.size(); ++p)
                if (blob.pixels[p]) mask.pixels[p] = 255;
        } else {
            mask = two_lobe_mask(w, h, jit(rng), jit(rng));
        }
        const std::string id = "img" + std::to_string(i);
        const std::string mask_path = (fs.dir / (id + "_mask.pgm")).string();
        save_gray(mask, mask_path);

        ManifestEntry e;
        e.image_id = id;
        e.class_label = i % 2 == 0 ? Label::Normal : Label::Abnormal;
        e.image_path = mask_path;  // the mask doubles as the image for tests
        e.mask_path = mask_path;
        fs.manifest.push_back(std::move(e));
    }

    fs.manifest_path = fs.dir / "manifest.csv";
    std::ofstream out(fs.manifest_path);
    out << "image_id,class_label,image_path,mask_path\n";
    for (const ManifestEntry& e : fs.manifest)
        out << e.image_id << ',' << (e.class_label == Label::Abnormal ? "abnormal" : "normal")
            << ',' << e.image_path << ',' << e.mask_path << '\n';
    return fs;
}

}  // namespace lungqa::testfix
