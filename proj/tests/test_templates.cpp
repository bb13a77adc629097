#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "gaitlab/errors.hpp"
#include "gaitlab/rng.hpp"
#include "gaitlab/templates.hpp"
#include "testutil.hpp"

using namespace gaitlab;

namespace {

std::vector<BinaryImage> random_cycle(Rng& rng, int frames, int w, int h, double density) {
    std::vector<BinaryImage> out;
    for (int t = 0; t < frames; ++t) {
        BinaryImage f(w, h);
        for (auto& p : f.pixels) p = rng.bernoulli(density);
        out.push_back(std::move(f));
    }
    return out;
}

// Brute-force accumulations straight from the defining sums.
double gei_oracle(const std::vector<BinaryImage>& fs, int x, int y) {
    double s = 0;
    for (const auto& f : fs) s += f.at(x, y);
    return s / static_cast<double>(fs.size());
}

double aei_oracle(const std::vector<BinaryImage>& fs, int x, int y) {
    double s = 0;
    int prev = 0;
    for (const auto& f : fs) {
        s += std::abs(static_cast<int>(f.at(x, y)) - prev);
        prev = f.at(x, y);
    }
    return s / static_cast<double>(fs.size());
}

double geni_oracle(const std::vector<BinaryImage>& fs, int x, int y) {
    double z = gei_oracle(fs, x, y);
    double e = 0;
    if (z > 0) e -= z * std::log2(z);
    if (z < 1) e -= (1 - z) * std::log2(1 - z);
    return e;
}

}  // namespace

TEST_SUITE("templates") {

TEST_CASE("gei: identical frames reproduce the frame; mixed gives 0.5") {
    BinaryImage ones(8, 8, 1), zeros(8, 8, 0);
    const GaitTemplate same = compute_gei({ones, ones, ones});
    for (double v : same.values) CHECK(v == doctest::Approx(1.0));
    const GaitTemplate half = compute_gei({ones, zeros});
    for (double v : half.values) CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("aei: two identical frames give F/2; zeros give zeros") {
    BinaryImage f(6, 6);
    f.at(2, 2) = f.at(3, 4) = 1;
    const GaitTemplate t = compute_aei({f, f});
    CHECK(t.at(2, 2) == doctest::Approx(0.5));
    CHECK(t.at(3, 4) == doctest::Approx(0.5));
    CHECK(t.at(0, 0) == doctest::Approx(0.0));

    const GaitTemplate z = compute_aei({BinaryImage(6, 6), BinaryImage(6, 6)});
    for (double v : z.values) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("geni endpoints: z=1 -> 0, z=0.5 -> exactly 1, z=0.25 -> 0.811278") {
    BinaryImage ones(4, 4, 1), zeros(4, 4, 0);
    CHECK(compute_geni({ones, ones}).at(0, 0) == doctest::Approx(0.0));
    CHECK(compute_geni({ones, zeros}).at(0, 0) == 1.0);  // exact in IEEE
    const GaitTemplate q = compute_geni({ones, zeros, zeros, zeros});
    CHECK(q.at(0, 0) == doctest::Approx(0.811278).epsilon(1e-6));
}

TEST_CASE("collations equal brute-force accumulation on random cycles") {
    Rng rng(101);
    for (int rep = 0; rep < 10; ++rep) {
        const auto cycle = random_cycle(rng, 10, 12, 9, 0.45);
        const GaitTemplate gei = compute_gei(cycle);
        const GaitTemplate aei = compute_aei(cycle);
        const GaitTemplate geni = compute_geni(cycle);
        for (int y = 0; y < 9; ++y) {
            for (int x = 0; x < 12; ++x) {
                CHECK(gei.at(x, y) == gei_oracle(cycle, x, y));   // exact
                CHECK(aei.at(x, y) == aei_oracle(cycle, x, y));   // exact
                CHECK(std::abs(geni.at(x, y) - geni_oracle(cycle, x, y)) < 1e-12);
            }
        }
    }
}

TEST_CASE("gei and geni are frame-order free; aei is not") {
    Rng rng(103);
    auto cycle = random_cycle(rng, 8, 10, 10, 0.5);
    auto rotated = cycle;
    std::rotate(rotated.begin(), rotated.begin() + 3, rotated.end());

    const auto g1 = compute_gei(cycle), g2 = compute_gei(rotated);
    const auto e1 = compute_geni(cycle), e2 = compute_geni(rotated);
    for (std::size_t i = 0; i < g1.values.size(); ++i) {
        CHECK(g1.values[i] == doctest::Approx(g2.values[i]));
        CHECK(e1.values[i] == doctest::Approx(e2.values[i]));
    }

    const auto a1 = compute_aei(cycle), a2 = compute_aei(rotated);
    double diff = 0;
    for (std::size_t i = 0; i < a1.values.size(); ++i)
        diff += std::abs(a1.values[i] - a2.values[i]);
    CHECK(diff > 0.0);
}

TEST_CASE("apply_mask: identity, annihilator, and band structure") {
    Rng rng(107);
    const auto cycle = random_cycle(rng, 6, 16, 16, 0.5);
    const GaitTemplate tpl = compute_gei(cycle);

    BinaryImage ones(16, 16, 1), zeros(16, 16, 0);
    const auto same = apply_mask(tpl, ones);
    for (std::size_t i = 0; i < tpl.values.size(); ++i)
        CHECK(same.values[i] == tpl.values[i]);
    const auto gone = apply_mask(tpl, zeros);
    for (double v : gone.values) CHECK(v == 0.0);

    BinaryImage band(16, 16, 0);  // head rows [0,4) and feet rows [12,16)
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x)
            if (y < 4 || y >= 12) band.at(x, y) = 1;
    const auto banded = apply_mask(tpl, band);
    for (int y = 4; y < 12; ++y)
        for (int x = 0; x < 16; ++x) CHECK(banded.at(x, y) == 0.0);
    for (int x = 0; x < 16; ++x) CHECK(banded.at(x, 0) == tpl.at(x, 0));
}

TEST_CASE("flatten is row-major and round-trips") {
    GaitTemplate tpl;
    tpl.kind = TemplateKind::GEI;
    tpl.width = 3;
    tpl.height = 2;
    tpl.values = {0, 1, 0, 0, 0, 0};
    const Eigen::VectorXd v = flatten(tpl);
    CHECK(v[1] == 1.0);

    Rng rng(109);
    GaitTemplate big;
    big.kind = TemplateKind::AEI;
    big.width = 14;
    big.height = 6;
    for (int i = 0; i < 84; ++i) big.values.push_back(rng.uniform());
    const GaitTemplate back = reshape(flatten(big), 14, 6, TemplateKind::AEI);
    for (std::size_t i = 0; i < big.values.size(); ++i)
        CHECK(back.values[i] == big.values[i]);
}

TEST_CASE("export/import round-trips within 1/255") {
    Rng rng(113);
    GaitTemplate tpl;
    tpl.kind = TemplateKind::GEnI;
    tpl.width = 20;
    tpl.height = 15;
    for (int i = 0; i < 300; ++i) tpl.values.push_back(rng.uniform());

    const std::string path = "/tmp/gaitlab_tpl_test.png";
    export_template(tpl, path);
    const GaitTemplate back = import_template(path);
    CHECK(back.kind == TemplateKind::GEnI);
    REQUIRE(back.width == 20);
    REQUIRE(back.height == 15);
    for (std::size_t i = 0; i < tpl.values.size(); ++i)
        CHECK(std::abs(back.values[i] - tpl.values[i]) <= 1.0 / 255.0 + 1e-12);
    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
}

TEST_CASE("empty cycle is fatal") {
    CHECK_THROWS_AS(compute_gei({}), GaitError);
    CHECK_THROWS_AS(compute_aei({}), GaitError);
    CHECK_THROWS_AS(compute_geni({}), GaitError);
}

}  // TEST_SUITE
