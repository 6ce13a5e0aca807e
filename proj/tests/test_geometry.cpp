#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lungqa/regions.hpp"

using namespace lungqa;

TEST_CASE("union_box") {
    RegionSet rs;
    rs.source_w = rs.source_h = 32;

    SUBCASE("empty set is absent") { CHECK_FALSE(union_box(rs).has_value()); }

    SUBCASE("single region") {
        rs.regions.push_back({1, 10, {2, 3, 10, 9}});
        CHECK(*union_box(rs) == BoundingBox{2, 3, 10, 9});
    }

    SUBCASE("two regions") {
        rs.regions.push_back({1, 16, {0, 0, 4, 4}});
        rs.regions.push_back({2, 24, {6, 2, 9, 10}});
        CHECK(*union_box(rs) == BoundingBox{0, 0, 9, 10});
    }
}

TEST_CASE("center") {
    CHECK(center(BoundingBox{0, 0, 100, 50}) == Point2{50.0, 25.0});
    CHECK(center(std::nullopt) == Point2{0.0, 0.0});  // failures land at the origin
    CHECK(center(BoundingBox{0, 0, 64, 48}, 64, 48) == Point2{0.5, 0.5});

    // full-cover mask centers at the image midpoint
    const RegionSet rs = label_regions(BitMask(20, 10, true));
    CHECK(center(union_box(rs), 20, 10) == Point2{0.5, 0.5});
}

TEST_CASE("rescale_box") {
    SUBCASE("identity when dimensions match") {
        const BoundingBox b{3, 4, 10, 12};
        CHECK(rescale_box(b, 16, 16, 16, 16) == b);
    }
    SUBCASE("exact x2 and x4 scaling") {
        CHECK(rescale_box({100, 50, 300, 400}, 512, 512, 1024, 2048) ==
              BoundingBox{200, 200, 600, 1600});
    }
    SUBCASE("full-cover box maps to full image") {
        CHECK(rescale_box({0, 0, 512, 512}, 512, 512, 777, 333) == BoundingBox{0, 0, 777, 333});
    }
    SUBCASE("inverse mapping contains the original box") {
        std::mt19937 rng(13);
        for (int trial = 0; trial < 500; ++trial) {
            const int seg_w = 2 + static_cast<int>(rng() % 512);
            const int seg_h = 2 + static_cast<int>(rng() % 512);
            const int orig_w = 1 + static_cast<int>(rng() % 2048);
            const int orig_h = 1 + static_cast<int>(rng() % 2048);
            BoundingBox b;
            b.x0 = static_cast<int>(rng() % (seg_w - 1));
            b.y0 = static_cast<int>(rng() % (seg_h - 1));
            b.x1 = b.x0 + 1 + static_cast<int>(rng() % (seg_w - b.x0 - 1) + 1);
            b.y1 = b.y0 + 1 + static_cast<int>(rng() % (seg_h - b.y0 - 1) + 1);
            b.x1 = std::min(b.x1, seg_w);
            b.y1 = std::min(b.y1, seg_h);

            const BoundingBox r = rescale_box(b, seg_w, seg_h, orig_w, orig_h);
            CHECK(r.valid());
            CHECK(r.x1 <= orig_w);
            CHECK(r.y1 <= orig_h);
            // map back with outward rounding and check coverage
            BoundingBox back;
            back.x0 = static_cast<int>(std::floor(static_cast<double>(r.x0) * seg_w / orig_w));
            back.y0 = static_cast<int>(std::floor(static_cast<double>(r.y0) * seg_h / orig_h));
            back.x1 = static_cast<int>(std::ceil(static_cast<double>(r.x1) * seg_w / orig_w));
            back.y1 = static_cast<int>(std::ceil(static_cast<double>(r.y1) * seg_h / orig_h));
            CHECK(back.contains(b));
        }
    }
}

TEST_CASE("crop") {
    std::mt19937 rng(21);
    Raster img(10, 10);
    for (auto& v : img.pixels) v = static_cast<std::uint8_t>(rng());

    SUBCASE("full-image box copies verbatim") {
        CHECK(crop(img, {0, 0, 10, 10}) == img);
    }
    SUBCASE("index arithmetic") {
        const Raster c = crop(img, {2, 3, 5, 9});
        CHECK(c.width == 3);
        CHECK(c.height == 6);
        CHECK(c.at(0, 0) == img.at(2, 3));
        CHECK(c.at(2, 5) == img.at(4, 8));
    }
    SUBCASE("margin expansion before clamping") {
        const BoundingBox e = expand_box({4, 4, 6, 6}, 0.5, 8, 8);
        CHECK(e == BoundingBox{3, 3, 7, 7});
        // clamping at the border
        const BoundingBox e2 = expand_box({0, 0, 6, 6}, 0.5, 8, 8);
        CHECK(e2 == BoundingBox{0, 0, 8, 8});
    }
    SUBCASE("degenerate box rejected") {
        CHECK_THROWS_AS(crop(img, {5, 5, 5, 9}), std::invalid_argument);
        CHECK_THROWS_AS(crop(img, {5, 5, 12, 9}), std::invalid_argument);
    }
}

TEST_CASE("classifier_prep") {
    SUBCASE("square input of target size is unchanged") {
        std::mt19937 rng(1);
        Raster img(224, 224);
        for (auto& v : img.pixels) v = static_cast<std::uint8_t>(rng());
        CHECK(classifier_prep(img) == img);
    }
    SUBCASE("portrait input pads symmetrically then resizes") {
        Raster img(100, 200, 200);
        const Raster out = classifier_prep(img);
        CHECK(out.width == 224);
        CHECK(out.height == 224);
        // 50 black columns each side of a 200x200 square -> the outer
        // quarter of the output stays black, the middle is bright
        CHECK(out.at(10, 112) == 0);
        CHECK(out.at(213, 112) == 0);
        CHECK(out.at(112, 112) == 200);
    }
    SUBCASE("all-zero input stays all zero") {
        const Raster out = classifier_prep(Raster(37, 91, 0));
        CHECK(out.width == 224);
        CHECK(out.height == 224);
        for (auto v : out.pixels) CHECK(v == 0);
    }
    SUBCASE("content aspect ratio is preserved within a pixel") {
        // a full-bright rectangle keeps its width/height ratio through
        // pad + resize
        Raster img(120, 60, 0);
        for (int y = 0; y < 60; ++y)
            for (int x = 0; x < 120; ++x) img.at(x, y) = 255;
        const Raster out = classifier_prep(img);
        int min_x = out.width, max_x = -1, min_y = out.height, max_y = -1;
        for (int y = 0; y < out.height; ++y)
            for (int x = 0; x < out.width; ++x)
                if (out.at(x, y) >= 128) {
                    min_x = std::min(min_x, x);
                    max_x = std::max(max_x, x);
                    min_y = std::min(min_y, y);
                    max_y = std::max(max_y, y);
                }
        const double ratio = static_cast<double>(max_x - min_x + 1) / (max_y - min_y + 1);
        CHECK(ratio == doctest::Approx(2.0).epsilon(0.05));
    }
}
