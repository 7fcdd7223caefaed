// dataset generators, idx parsing, csv, batching.
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "srda/data.hpp"

using namespace srda;

TEST_CASE("gen_two_moons balance, geometry, determinism") {
    Rng rng(7);
    Dataset ds = gen_two_moons(10, 0.1, rng);
    REQUIRE(ds.size() == 10);
    REQUIRE(ds.labeled());
    int c0 = 0;
    for (int y : *ds.labels) c0 += y == 0;
    CHECK(c0 == 5);

    Rng rng2(7);
    const Dataset noiseless = gen_two_moons(100, 0.0, rng2);
    for (std::size_t i = 0; i < noiseless.size(); ++i) {
        if ((*noiseless.labels)[i] == 0) {
            const double n = std::hypot(noiseless.features.at(i, 0), noiseless.features.at(i, 1));
            CHECK(n == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    Rng a(3), b(3);
    const Dataset d1 = gen_two_moons(51, 0.2, a);
    const Dataset d2 = gen_two_moons(51, 0.2, b);
    CHECK(d1.features == d2.features);
    CHECK(*d1.labels == *d2.labels);
    // odd n: counts differ by one
    int c0odd = 0;
    for (int y : *d1.labels) c0odd += y == 0;
    CHECK(std::abs(2 * c0odd - 51) == 1);
    CHECK_THROWS_AS(gen_two_moons(1, 0.1, a), InvalidInput);
}

TEST_CASE("rotate_domain is a label-preserving centroid isometry") {
    Rng rng(9);
    const Dataset ds = gen_two_moons(40, 0.15, rng);

    const Dataset same = rotate_domain(ds, 0.0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(same.features.at(i, 0) == doctest::Approx(ds.features.at(i, 0)).epsilon(1e-12));
        CHECK(same.features.at(i, 1) == doctest::Approx(ds.features.at(i, 1)).epsilon(1e-12));
    }

    // 180 degrees about the origin (centered data) negates coordinates
    Dataset centered = ds;
    double cx = 0, cy = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        cx += ds.features.at(i, 0);
        cy += ds.features.at(i, 1);
    }
    cx /= static_cast<double>(ds.size());
    cy /= static_cast<double>(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        centered.features.at(i, 0) -= cx;
        centered.features.at(i, 1) -= cy;
    }
    const Dataset flipped = rotate_domain(centered, 180.0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(flipped.features.at(i, 0) ==
              doctest::Approx(-centered.features.at(i, 0)).epsilon(1e-9));
        CHECK(flipped.features.at(i, 1) ==
              doctest::Approx(-centered.features.at(i, 1)).epsilon(1e-9));
    }

    // pairwise distances preserved
    const Dataset rot = rotate_domain(ds, 33.0);
    CHECK(*rot.labels == *ds.labels);
    for (std::size_t i = 0; i < 10; ++i) {
        for (std::size_t j = i + 1; j < 10; ++j) {
            const double before = std::hypot(ds.features.at(i, 0) - ds.features.at(j, 0),
                                             ds.features.at(i, 1) - ds.features.at(j, 1));
            const double after = std::hypot(rot.features.at(i, 0) - rot.features.at(j, 0),
                                            rot.features.at(i, 1) - rot.features.at(j, 1));
            CHECK(after == doctest::Approx(before).epsilon(1e-10));
        }
    }

    Dataset flat;
    flat.features = Matrix(3, 4);
    CHECK_THROWS_AS(rotate_domain(flat, 10.0), NonPlanarData);
}

TEST_CASE("translate_domain shifts and preserves distances") {
    Rng rng(2);
    const Dataset ds = gen_blobs(30, 3, 0.3, rng);
    const Dataset same = translate_domain(ds, {0.0, 0.0});
    CHECK(same.features == ds.features);
    const Dataset moved = translate_domain(ds, {1.0, 0.0});
    CHECK(moved.features.at(0, 0) == doctest::Approx(ds.features.at(0, 0) + 1.0).epsilon(1e-15));
    CHECK(*moved.labels == *ds.labels);
    for (std::size_t i = 1; i < 10; ++i) {
        const double before = std::hypot(ds.features.at(i, 0) - ds.features.at(0, 0),
                                         ds.features.at(i, 1) - ds.features.at(0, 1));
        const double after = std::hypot(moved.features.at(i, 0) - moved.features.at(0, 0),
                                        moved.features.at(i, 1) - moved.features.at(0, 1));
        CHECK(after == doctest::Approx(before).epsilon(1e-12));
    }
    CHECK_THROWS_AS(translate_domain(ds, {1.0}), ShapeError);
}

TEST_CASE("parse_idx fixture and errors") {
    SUBCASE("handcrafted 20-byte image stream") {
        // magic 0x00000803, dims (1, 2, 2), payload {0, 255, 128, 64}
        const std::vector<unsigned char> bytes = {0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 2,
                                                  0, 0, 0, 2, 0, 255, 128, 64};
        const Matrix m = parse_idx_images(bytes);
        REQUIRE(m.rows() == 1);
        REQUIRE(m.cols() == 4);
        CHECK(m.at(0, 0) == 0.0);
        CHECK(m.at(0, 1) == 1.0);
        CHECK(m.at(0, 2) == doctest::Approx(0.50196078431).epsilon(1e-9));
        CHECK(m.at(0, 3) == doctest::Approx(0.25098039215).epsilon(1e-9));
    }
    SUBCASE("label stream") {
        const std::vector<unsigned char> bytes = {0, 0, 8, 1, 0, 0, 0, 3, 7, 0, 2};
        const auto labels = parse_idx_labels(bytes);
        CHECK(labels == std::vector<int>{7, 0, 2});
    }
    SUBCASE("variant dispatch") {
        const std::vector<unsigned char> bytes = {0, 0, 8, 1, 0, 0, 0, 1, 9};
        const auto parsed = parse_idx(bytes);
        CHECK(std::holds_alternative<std::vector<int>>(parsed));
    }
    SUBCASE("bad magic 0x00000999") {
        const std::vector<unsigned char> bytes = {0, 0, 9, 0x99, 0, 0, 0, 0};
        CHECK_THROWS_AS(parse_idx(bytes), BadMagic);
    }
    SUBCASE("non-ubyte element code") {
        const std::vector<unsigned char> bytes = {0, 0, 0x0D, 1, 0, 0, 0, 0};
        CHECK_THROWS_AS(parse_idx(bytes), UnsupportedType);
    }
    SUBCASE("declared 10 labels with 9 payload bytes") {
        std::vector<unsigned char> bytes = {0, 0, 8, 1, 0, 0, 0, 10};
        for (int i = 0; i < 9; ++i) bytes.push_back(static_cast<unsigned char>(i));
        CHECK_THROWS_AS(parse_idx_labels(bytes), TruncatedPayload);
    }
}

TEST_CASE("hostile idx headers cannot wrap the size arithmetic") {
    // dims chosen so n*rows*cols overflows 64 bits back to a tiny number
    std::vector<unsigned char> bytes = {0, 0, 8, 3};
    for (std::uint32_t v : {0x80000000u, 0x80000000u, 0x00000010u}) {
        bytes.push_back(static_cast<unsigned char>(v >> 24));
        bytes.push_back(static_cast<unsigned char>(v >> 16));
        bytes.push_back(static_cast<unsigned char>(v >> 8));
        bytes.push_back(static_cast<unsigned char>(v));
    }
    CHECK_THROWS_AS(parse_idx_images(bytes), TruncatedPayload);
}

TEST_CASE("csv with non-finite features is rejected") {
    std::stringstream in("label,f0,f1\n0,1.0,nan\n");
    CHECK_THROWS_AS(read_dataset_csv(in, "bad"), IoError);
}

TEST_CASE("idx round-trip on the /255 grid") {
    Rng rng(5);
    Matrix img(3, 6);
    for (double& v : img.data()) v = static_cast<double>(rng.index(256)) / 255.0;
    const auto bytes = write_idx_images(img, 2, 3);
    const Matrix back = parse_idx_images(bytes);
    CHECK(back == img);

    std::vector<int> labels = {0, 3, 9, 9, 1};
    CHECK(parse_idx_labels(write_idx_labels(labels)) == labels);
}

TEST_CASE("subsample stratification and determinism") {
    Rng gen(3);
    const Dataset ds = gen_blobs(60, 3, 0.2, gen);
    SUBCASE("n_keep = n is a permutation") {
        Rng r(1);
        const Dataset sub = subsample(ds, 60, r);
        std::vector<double> a = ds.features.data(), b = sub.features.data();
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
    }
    SUBCASE("n_keep = K picks one per class") {
        Rng r(1);
        const Dataset sub = subsample(ds, 3, r);
        std::vector<int> counts(3, 0);
        for (int y : *sub.labels) ++counts[static_cast<std::size_t>(y)];
        CHECK(counts == std::vector<int>{1, 1, 1});
    }
    SUBCASE("per-class counts differ by at most one") {
        Rng r(9);
        const Dataset sub = subsample(ds, 25, r);
        std::vector<int> counts(3, 0);
        for (int y : *sub.labels) ++counts[static_cast<std::size_t>(y)];
        const int lo = *std::min_element(counts.begin(), counts.end());
        const int hi = *std::max_element(counts.begin(), counts.end());
        CHECK(hi - lo <= 1);
        CHECK(counts[0] + counts[1] + counts[2] == 25);
    }
    SUBCASE("seeded twice gives identical subsets") {
        Rng r1(4), r2(4);
        CHECK(subsample(ds, 17, r1).features == subsample(ds, 17, r2).features);
    }
    Rng r(1);
    CHECK_THROWS_AS(subsample(ds, 61, r), InvalidCount);
    CHECK_THROWS_AS(subsample(ds, 0, r), InvalidCount);
}

TEST_CASE("subsample of unlabeled data") {
    Dataset ds;
    Rng rng(4);
    ds.features = Matrix::gaussian(30, 3, rng);
    Rng r1(2), r2(2);
    const Dataset a = subsample(ds, 12, r1);
    const Dataset b = subsample(ds, 12, r2);
    CHECK(a.size() == 12);
    CHECK_FALSE(a.labeled());
    CHECK(a.features == b.features);
}

TEST_CASE("standardize statistics") {
    SUBCASE("fit on itself centers and scales") {
        Rng rng(8);
        Dataset ds = gen_two_moons(200, 0.3, rng);
        const Dataset z = standardize(ds, ds);
        for (std::size_t c = 0; c < 2; ++c) {
            double mean = 0, var = 0;
            for (std::size_t i = 0; i < z.size(); ++i) mean += z.features.at(i, c);
            mean /= static_cast<double>(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) {
                const double d = z.features.at(i, c) - mean;
                var += d * d;
            }
            var /= static_cast<double>(z.size());
            CHECK(mean == doctest::Approx(0.0).epsilon(1e-10));
            CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    SUBCASE("constant feature maps to 0") {
        Dataset ds;
        ds.features = Matrix(3, 1, 4.2);
        const Dataset z = standardize(ds, ds);
        for (std::size_t i = 0; i < 3; ++i) CHECK(z.features.at(i, 0) == 0.0);
    }
    SUBCASE("two-point population statistics") {
        Dataset fit;
        fit.features = Matrix(2, 1);
        fit.features.at(0, 0) = 0.0;
        fit.features.at(1, 0) = 2.0;
        const Dataset z = standardize(fit, fit);
        CHECK(z.features.at(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(z.features.at(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("dataset csv round-trip") {
    Rng rng(12);
    Dataset ds = gen_two_moons(20, 0.1, rng);
    std::stringstream ss;
    write_dataset_csv(ds, ss);
    const std::string text = ss.str();
    CHECK(text.rfind("label,f0,f1\n", 0) == 0);
    std::stringstream in(text);
    const Dataset back = read_dataset_csv(in, "back");
    CHECK(back.features == ds.features); // %.17g round-trips doubles exactly
    CHECK(*back.labels == *ds.labels);

    // unlabeled export uses -1
    Dataset unl = ds;
    unl.labels.reset();
    std::stringstream ss2;
    write_dataset_csv(unl, ss2);
    std::stringstream in2(ss2.str());
    const Dataset back2 = read_dataset_csv(in2, "u");
    CHECK_FALSE(back2.labeled());
}

TEST_CASE("batch stream visits every index once per pass") {
    BatchStream stream(10, 3, Rng(6));
    std::vector<std::size_t> seen;
    for (int b = 0; b < 10; ++b) { // 30 draws = 3 full passes
        const auto batch = stream.next_batch();
        CHECK(batch.size() == 3);
        seen.insert(seen.end(), batch.begin(), batch.end());
    }
    for (int pass = 0; pass < 3; ++pass) {
        std::vector<std::size_t> window(seen.begin() + pass * 10, seen.begin() + (pass + 1) * 10);
        std::sort(window.begin(), window.end());
        for (std::size_t i = 0; i < 10; ++i) CHECK(window[i] == i);
    }
    // deterministic given the seed
    BatchStream s1(10, 3, Rng(6)), s2(10, 3, Rng(6));
    for (int b = 0; b < 5; ++b) CHECK(s1.next_batch() == s2.next_batch());
    CHECK_THROWS_AS(BatchStream(0, 3, Rng(1)), InvalidInput);
}
