// numeric core: matrix ops, softmax/cross-entropy, rng determinism, optimizer.
#include <doctest.h>

#include <cmath>

#include "srda/gradcheck.hpp"
#include "srda/matrix.hpp"
#include "srda/ops.hpp"
#include "srda/optim.hpp"
#include "srda/rng.hpp"

using namespace srda;

TEST_CASE("softmax basics") {
    const Matrix u = softmax(Matrix::from_rows({{0.0, 0.0, 0.0}}));
    CHECK(u.at(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(u.at(0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-12));

    // max-subtraction keeps huge logits finite
    const Matrix big = softmax(Matrix::from_rows({{1000.0, 0.0}}));
    CHECK(big.all_finite());
    CHECK(big.at(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(big.at(0, 1) == doctest::Approx(0.0).epsilon(1e-9));

    // frozen from a 40-digit evaluation of e^x_i / sum e^x_j
    const Matrix q = softmax(Matrix::from_rows({{1.0, 2.0, 3.0}}));
    CHECK(q.at(0, 0) == doctest::Approx(0.090030573170380458).epsilon(1e-5));
    CHECK(q.at(0, 1) == doctest::Approx(0.24472847105479765).epsilon(1e-5));
    CHECK(q.at(0, 2) == doctest::Approx(0.66524095577482189).epsilon(1e-5));

    Matrix bad(1, 2);
    bad.at(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(softmax(bad), InvalidInput);
}

TEST_CASE("softmax rows sum to 1 and shift invariance") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = 2 + rng.index(6);
        Matrix z = Matrix::gaussian(3, k, rng, 5.0);
        const Matrix q = softmax(z);
        Matrix shifted = z;
        for (std::size_t r = 0; r < z.rows(); ++r) {
            const double c = rng.uniform(-100.0, 100.0);
            for (std::size_t col = 0; col < k; ++col) shifted.at(r, col) += c;
        }
        const Matrix q2 = softmax(shifted);
        for (std::size_t r = 0; r < q.rows(); ++r) {
            double sum = 0.0;
            for (std::size_t col = 0; col < k; ++col) {
                CHECK(q.at(r, col) > 0.0);
                sum += q.at(r, col);
                CHECK(q.at(r, col) == doctest::Approx(q2.at(r, col)).epsilon(1e-12));
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("cross entropy values and errors") {
    CHECK(cross_entropy(Matrix::from_rows({{1.0, 0.0}}), Matrix::from_rows({{1.0, 0.0}})) ==
          doctest::Approx(0.0).epsilon(1e-12));
    // uniform q over 4 classes: -sum p log(1/4) = ln 4 for any p
    const Matrix qu = Matrix::from_rows({{0.25, 0.25, 0.25, 0.25}});
    const Matrix p = Matrix::from_rows({{0.7, 0.1, 0.1, 0.1}});
    CHECK(cross_entropy(qu, p) == doctest::Approx(1.3862943611198906).epsilon(1e-12));
    CHECK(cross_entropy(Matrix::from_rows({{0.7, 0.3}}), Matrix::from_rows({{0.5, 0.5}})) ==
          doctest::Approx(0.78032387413233419).epsilon(1e-10));
    CHECK_THROWS_AS(
        cross_entropy(Matrix::from_rows({{0.5, 0.5}}), Matrix::from_rows({{1.0, 0.0, 0.0}})),
        ShapeError);
    // clamped log keeps zero-probability coordinates finite
    CHECK(std::isfinite(
        cross_entropy(Matrix::from_rows({{0.0, 1.0}}), Matrix::from_rows({{0.5, 0.5}}))));
}

TEST_CASE("cross entropy obeys Gibbs' inequality") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + rng.index(5);
        Matrix q(1, k), p(1, k);
        double qs = 0.0, ps = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            q.at(0, i) = rng.uniform() + 1e-6;
            p.at(0, i) = rng.uniform() + 1e-6;
            qs += q.at(0, i);
            ps += p.at(0, i);
        }
        q *= 1.0 / qs;
        p *= 1.0 / ps;
        CHECK(cross_entropy(q, p) >= entropy(p) - 1e-12);
    }
}

TEST_CASE("l2_normalize") {
    const Matrix v = l2_normalize(Matrix::from_rows({{3.0, 4.0}}));
    CHECK(v.at(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(v.at(0, 1) == doctest::Approx(0.8).epsilon(1e-12));
    const Matrix e = l2_normalize(Matrix::from_rows({{2.0, 0.0, 0.0}}));
    CHECK(e.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(l2_norm(e) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(l2_normalize(Matrix::from_rows({{0.0, 0.0}})), ZeroNorm);
}

TEST_CASE("argmax ties break low") {
    CHECK(argmax_row(Matrix::from_rows({{0.2, 0.5, 0.3}})) == 1);
    CHECK(argmax_row(Matrix::from_rows({{0.5, 0.5}})) == 0);
    CHECK(argmax_row(Matrix::from_rows({{0.1, 0.4, 0.4, 0.1}})) == 1);
}

TEST_CASE("matrix matmul and transpose") {
    const Matrix a = Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
    const Matrix b = Matrix::from_rows({{5.0, 6.0}, {7.0, 8.0}});
    const Matrix c = a.matmul(b);
    CHECK(c.at(0, 0) == 19.0);
    CHECK(c.at(0, 1) == 22.0);
    CHECK(c.at(1, 0) == 43.0);
    CHECK(c.at(1, 1) == 50.0);
    const Matrix t = a.transpose();
    CHECK(t.at(0, 1) == 3.0);
    CHECK_THROWS_AS(a.matmul(Matrix(3, 2)), ShapeError);
}

TEST_CASE("rng determinism and distribution transforms") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    Rng c(42);
    Rng d(43);
    bool differ = false;
    for (int i = 0; i < 10 && !differ; ++i) differ = c.next_u64() != d.next_u64();
    CHECK(differ);

    // normal mean/var sanity
    Rng n(5);
    double sum = 0.0, sq = 0.0;
    const int N = 20000;
    for (int i = 0; i < N; ++i) {
        const double x = n.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(sum / N == doctest::Approx(0.0).epsilon(0.05));
    CHECK(sq / N == doctest::Approx(1.0).epsilon(0.05));

    Rng idx(9);
    for (int i = 0; i < 100; ++i) CHECK(idx.index(7) < 7);
    CHECK_THROWS_AS(idx.index(0), InvalidInput);

    // child streams are independent of parent draw position
    Rng p1(99), p2(99);
    p2.next_u64();
    CHECK(p1.child(3).next_u64() == p2.child(3).next_u64());
    CHECK(p1.child(3).next_u64() != p1.child(4).next_u64());
}

TEST_CASE("sgd and adam updates") {
    ParamStore store;
    store.add("w", 1, 1);
    store.segment(0).values[0] = 1.0;
    store.segment(0).grads[0] = 2.0;

    SUBCASE("sgd definition") {
        Optimizer opt(OptimizerKind::Sgd, 0.1);
        opt.step(store);
        CHECK(store.segment(0).values[0] == doctest::Approx(0.8).epsilon(1e-15));
    }
    SUBCASE("lr zero leaves parameters bit-identical") {
        Optimizer opt(OptimizerKind::Adam, 0.0);
        const double before = store.segment(0).values[0];
        opt.step(store);
        CHECK(store.segment(0).values[0] == before);
    }
    SUBCASE("adam first-step magnitude is ~lr for small and large gradients") {
        for (double g : {1e-3, 1e3}) {
            ParamStore s;
            s.add("w", 1, 1);
            s.segment(0).values[0] = 0.0;
            s.segment(0).grads[0] = g;
            Optimizer opt(OptimizerKind::Adam, 0.01);
            opt.step(s);
            // update = lr * g / (|g| + 1e-8) at t=1
            CHECK(std::abs(s.segment(0).values[0]) == doctest::Approx(0.01).epsilon(1e-4));
            CHECK(s.segment(0).values[0] < 0.0);
        }
    }
    SUBCASE("non-finite gradient diverges") {
        store.segment(0).grads[0] = std::numeric_limits<double>::infinity();
        Optimizer opt(OptimizerKind::Adam, 0.1);
        CHECK_THROWS_AS(opt.step(store), DivergedError);
    }
}

TEST_CASE("finite differences recover analytic derivatives") {
    ParamStore store;
    store.add("w", 1, 1);
    store.segment(0).values[0] = 3.0;
    auto square = [&]() { return store.segment(0).values[0] * store.segment(0).values[0]; };
    const auto g1 = finite_diff_grad(square, store);
    CHECK(g1[0][0] == doctest::Approx(6.0).epsilon(1e-6));

    store.segment(0).values[0] = 0.0;
    auto sine = [&]() { return std::sin(store.segment(0).values[0]); };
    const auto g2 = finite_diff_grad(sine, store);
    CHECK(g2[0][0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(store.segment(0).values[0] == 0.0); // restored bit-exactly
}

TEST_CASE("param store zero_grads and checksum") {
    ParamStore store;
    store.add("a", 2, 3);
    store.add("b", 1, 3);
    CHECK(store.param_count() == 9);
    store.segment(0).grads[4] = 7.0;
    store.zero_grads();
    for (const auto& seg : store)
        for (double g : seg.grads) CHECK(g == 0.0);
    const auto c1 = store.value_checksum();
    store.segment(1).values[0] += 1e-300; // any bit change is detected
    CHECK(store.value_checksum() != c1);
    CHECK_THROWS_AS(store.add("a", 1, 1), InvalidInput);
}
