#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lungqa/overlap.hpp"

using namespace lungqa;

namespace {

BitMask random_mask(std::mt19937& rng, int w, int h, double p) {
    BitMask m(w, h);
    std::bernoulli_distribution coin(p);
    for (auto& b : m.bits) b = coin(rng) ? 1 : 0;
    return m;
}

}  // namespace

TEST_CASE("overlap basics") {
    SUBCASE("identical non-empty masks") {
        const BitMask m(4, 4, true);
        const OverlapScores s = overlap(m, m);
        CHECK(s.iou == 1.0);
        CHECK(s.dice == 1.0);
    }
    SUBCASE("disjoint non-empty masks") {
        BitMask a(4, 1), b(4, 1);
        a.set(0, 0, true);
        b.set(3, 0, true);
        const OverlapScores s = overlap(a, b);
        CHECK(s.iou == 0.0);
        CHECK(s.dice == 0.0);
    }
    SUBCASE("counted toy case: |P|=4, |T|=4, intersection 2") {
        BitMask p(4, 4), t(4, 4);
        for (int x = 0; x < 4; ++x) p.set(x, 0, true);   // row 0
        for (int x = 2; x < 4; ++x) t.set(x, 0, true);   // shares 2
        t.set(0, 1, true);
        t.set(1, 1, true);
        const OverlapScores s = overlap(p, t);
        CHECK(s.iou == doctest::Approx(1.0 / 3.0));
        CHECK(s.dice == doctest::Approx(0.5));
    }
    SUBCASE("empty-mask conventions") {
        const BitMask empty(3, 3), full(3, 3, true);
        CHECK(overlap(empty, empty).iou == 1.0);
        CHECK(overlap(empty, empty).dice == 1.0);
        CHECK(overlap(empty, full).iou == 0.0);
        CHECK(overlap(full, empty).dice == 0.0);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(overlap(BitMask(2, 2), BitMask(3, 2)), std::invalid_argument);
    }
}

TEST_CASE("overlap properties on random masks") {
    std::mt19937 rng(1234);
    for (int trial = 0; trial < 300; ++trial) {
        const int w = 1 + static_cast<int>(rng() % 64);
        const int h = 1 + static_cast<int>(rng() % 64);
        const BitMask a = random_mask(rng, w, h, 0.3);
        const BitMask b = random_mask(rng, w, h, 0.3);
        const OverlapScores ab = overlap(a, b);
        const OverlapScores ba = overlap(b, a);
        CHECK(ab.iou == ba.iou);
        CHECK(ab.dice == ba.dice);
        CHECK(ab.iou >= 0.0);
        CHECK(ab.dice <= 1.0);
        CHECK(ab.iou <= ab.dice);
        CHECK(ab.dice == doctest::Approx(2.0 * ab.iou / (1.0 + ab.iou)).epsilon(1e-12));
    }
}

TEST_CASE("adding a matched pixel never decreases either score") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        BitMask a = random_mask(rng, 16, 16, 0.3);
        BitMask b = random_mask(rng, 16, 16, 0.3);
        // find a pixel absent from both
        int px = -1, py = -1;
        for (int y = 0; y < 16 && px < 0; ++y)
            for (int x = 0; x < 16; ++x)
                if (!a.at(x, y) && !b.at(x, y)) {
                    px = x;
                    py = y;
                    break;
                }
        if (px < 0) continue;
        const OverlapScores before = overlap(a, b);
        a.set(px, py, true);
        b.set(px, py, true);
        const OverlapScores after = overlap(a, b);
        CHECK(after.iou >= before.iou);
        CHECK(after.dice >= before.dice);
    }
}

TEST_CASE("mean_overlap") {
    SUBCASE("single pair") {
        const std::vector<OverlapScores> s{{0.25, 0.4}};
        const OverlapScores m = mean_overlap(s);
        CHECK(m.iou == 0.25);
        CHECK(m.dice == 0.4);
    }
    SUBCASE("arithmetic mean") {
        const std::vector<OverlapScores> s{{1.0, 1.0}, {1.0 / 3.0, 0.5}};
        CHECK(mean_overlap(s).iou == doctest::Approx(2.0 / 3.0));
        CHECK(mean_overlap(s).dice == doctest::Approx(0.75));
    }
    SUBCASE("empty list rejected") {
        CHECK_THROWS_AS(mean_overlap({}), std::invalid_argument);
    }
}
