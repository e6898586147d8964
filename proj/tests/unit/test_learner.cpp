#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "nbcs/error.hpp"
#include "nbcs/learner.hpp"
#include "oracles.hpp"

using namespace nbcs;

namespace {

LabeledDataset gaussian_clusters(const std::vector<Vector2>& centres, const std::vector<int>& labels,
                                 std::size_t per_cluster, double sd, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sd);
    LabeledDataset data;
    data.dim = 2;
    for (std::size_t c = 0; c < centres.size(); ++c)
        for (std::size_t i = 0; i < per_cluster; ++i) {
            data.points.push_back(Point(Vector2(centres[c].x() + g(rng), centres[c].y() + g(rng))));
            data.labels.push_back(labels[c]);
        }
    return data;
}

LabeledDataset xor_data(std::size_t n, std::uint64_t seed) {
    const std::vector<Vector2> corners{{1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
    return gaussian_clusters(corners, {1, 1, -1, -1}, n / 4, 0.15, seed);
}

double min_root_coefficient(const Model& m, const Point& x) {
    return m.system.root().simplex.barycentric(m.transform.apply(x)).minCoeff();
}

}  // namespace

TEST_CASE("transform into the root simplex") {
    const Simplex root = regular_simplex(2);
    LabeledDataset single;
    single.dim = 2;
    single.points = {Point(Vector2(7.0, -3.0))};
    single.labels = {1};
    const AffineTransform t = fit_transform_to_simplex(single, root);
    CHECK((t.apply(single.points[0]) - barycenter(root)).norm() < 1e-12);

    const LabeledDataset data = gaussian_clusters({{100, 200}, {-50, 3}}, {0, 1}, 200, 30.0, 1);
    const AffineTransform u = fit_transform_to_simplex(data, root, 0.9);
    double worst = 1.0;
    for (const auto& x : data.points) worst = std::min(worst, root.barycentric(u.apply(x)).minCoeff());
    CHECK(worst > 0.0);
    // Padding 0.9 of the inscribed ball keeps every coefficient at least 0.1 / (d+1).
    CHECK(worst >= 0.1 / 3.0 - 1e-12);

    // Distances scale uniformly.
    const Point a = data.points[0], b = data.points[1], c = data.points[2];
    CHECK((u.apply(a) - u.apply(b)).norm() / (a - b).norm() ==
          doctest::Approx((u.apply(a) - u.apply(c)).norm() / (a - c).norm()));

    CHECK_THROWS_AS(fit_transform_to_simplex(data, root, 1.0), DomainError);
    CHECK_THROWS_AS(fit_transform_to_simplex(LabeledDataset{{}, {}, 2}, root), DataError);
    CHECK_THROWS_AS(fit_transform_to_simplex(data, regular_simplex(3)), DataError);
}

TEST_CASE("dataset validation") {
    LabeledDataset data;
    data.dim = 2;
    data.points = {Point(Vector2(0, 0)), Point(Eigen::Vector3d(0, 0, 0))};
    data.labels = {1, 2};
    CHECK_THROWS_AS(data.validate(), DataError);
    data.points[1] = Point(Vector2(std::nan(""), 0));
    CHECK_THROWS_AS(data.validate(), DataError);
    data.points[1] = Point(Vector2(1, 0));
    CHECK_NOTHROW(data.validate());
    CHECK(data.classes() == std::vector<int>{1, 2});
    CHECK(data.subset({1}).labels == std::vector<int>{2});
}

TEST_CASE("uniform fit at stage zero is a linear classifier") {
    const LabeledDataset data = gaussian_clusters({{0, 0}, {3, 1}}, {-1, 1}, 50, 0.3, 2);
    const Model m = fit_uniform(data, 0, 10.0);
    CHECK(m.system.vertex_count() == 3);
    CHECK(m.weights.size() == 1);
    CHECK(m.stages_used == 0);
    CHECK(accuracy(m, data) == 1.0);
}

TEST_CASE("uniform fit with data in every cell has (d+1)^q leaves") {
    // A dense grid over the bounding box reaches every cell after the transform.
    LabeledDataset data;
    data.dim = 2;
    for (int i = 0; i <= 60; ++i)
        for (int j = 0; j <= 60; ++j) {
            const double x = -1.0 + i / 30.0, y = -1.0 + j / 30.0;
            if (x * x + y * y > 1.0) continue;
            data.points.push_back(Point(Vector2(x, y)));
            data.labels.push_back(x > 0 ? 1 : -1);
        }
    const Model m = fit_uniform(data, 2, 1.0);
    CHECK(m.system.leaf_count() == 9);
    CHECK(m.stages_used == 2);
}

TEST_CASE("leaf count bound for uniform fits") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        const std::size_t d = 1 + rng() % 3;
        const std::size_t n = 2 + rng() % 30;
        const int q = 1 + static_cast<int>(rng() % 4);
        LabeledDataset data;
        data.dim = d;
        std::normal_distribution<double> g;
        for (std::size_t i = 0; i < n; ++i) {
            Point x(static_cast<Eigen::Index>(d));
            for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = g(rng);
            data.points.push_back(x);
            data.labels.push_back(i % 2 == 0 ? 1 : -1);
        }
        const Model m = fit_uniform(data, q, 1.0);
        const double full = std::pow(static_cast<double>(d + 1), q);
        const double sample = static_cast<double>(d * n) * q;
        CHECK(static_cast<double>(m.system.leaf_count()) <= std::min(full, sample));
    }
}

TEST_CASE("adaptive fit stops at once on separable data") {
    const LabeledDataset data = gaussian_clusters({{0, 0}, {4, 0}}, {-1, 1}, 40, 0.3, 4);
    const Model a = fit_adaptive(data, 3, 1.0, 1);
    const Model u = fit_uniform(data, 0, 1.0);
    CHECK(a.stages_used == 0);
    CHECK(a.data_splits == 0);
    CHECK(a.system.vertex_count() == 3);
    REQUIRE(a.weights.size() == 1);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.weights[0][i] == u.weights[0][i]);
}

TEST_CASE("adaptive fit splits at a lone misclassified point") {
    LabeledDataset data = gaussian_clusters({{-1, 0}, {1, 0}}, {1, -1}, 20, 0.05, 5);
    const Point outlier(Vector2(-1.6, 0.02));
    data.points.push_back(outlier);
    data.labels.push_back(-1);

    const Model base = fit_uniform(data, 0, 1.0);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < data.size(); ++i) wrong += base.predict(data.points[i]) != data.labels[i];
    REQUIRE(wrong == 1);
    REQUIRE(base.predict(outlier) == 1);

    const Model m = fit_adaptive(data, 1, 1.0, 1);
    CHECK(m.stages_used == 1);
    CHECK(m.data_splits == 1);
    REQUIRE(m.system.vertex_count() == 4);
    CHECK((m.system.vertex(3) - m.transform.apply(outlier)).norm() < 1e-12);
}

TEST_CASE("adaptive fit falls back to the barycenter without distinct candidates") {
    LabeledDataset data;
    data.dim = 2;
    // Every point identical: the leaf has a single distinct candidate.
    for (int i = 0; i < 6; ++i) {
        data.points.push_back(Point(Vector2(0.5, 0.5)));
        data.labels.push_back(i % 2 == 0 ? 1 : -1);
    }
    const Model m = fit_adaptive(data, 1, 1.0, 1);
    CHECK(m.data_splits == 0);
    REQUIRE(m.system.vertex_count() == 4);
    CHECK((m.system.vertex(3) - barycenter(m.system.root().simplex)).norm() < 1e-12);
}

TEST_CASE("retraining never does worse than the lifted classifier") {
    const LabeledDataset data = xor_data(200, 6);
    const Model m1 = fit_uniform(data, 1, 1.0);
    const Model m2 = fit_uniform(data, 2, 1.0);
    Model lifted = m2;
    lifted.weights = {lift_to(m2.system, m1.weights[0])};
    for (std::size_t i = 0; i < data.size(); ++i) CHECK(lifted.predict(data.points[i]) == m1.predict(data.points[i]));
    CHECK(training_objective(m2, data) <= training_objective(lifted, data) + 1e-6);
}

TEST_CASE("xor needs subdivision") {
    const LabeledDataset data = xor_data(400, 7);
    CHECK(accuracy(fit_uniform(data, 0, 1.0), data) <= 0.8);
    CHECK(accuracy(fit_uniform(data, 2, 1.0), data) >= 0.95);
}

TEST_CASE("single-class and multiclass models") {
    LabeledDataset one = gaussian_clusters({{0, 0}}, {7}, 10, 1.0, 8);
    const Model m = fit_uniform(one, 2, 1.0);
    CHECK(m.weights.empty());
    CHECK(m.predict(Point(Vector2(100, 100))) == 7);
    CHECK(fit_adaptive(one, 2, 1.0, 0).predict(Point(Vector2(0, 0))) == 7);

    const LabeledDataset three = gaussian_clusters({{0, 0}, {5, 0}, {0, 5}}, {3, 1, 2}, 30, 0.4, 9);
    const Model mc = fit_uniform(three, 1, 10.0);
    CHECK(mc.classes == std::vector<int>{1, 2, 3});
    CHECK(mc.weights.size() == 3);
    CHECK(accuracy(mc, three) >= 0.95);
    CHECK(fit_adaptive(three, 2, 10.0, 0).weights.size() == 3);
}

TEST_CASE("prediction rules") {
    // Zero weights give decision value 0, which goes to the positive class.
    Model zero{NestedSystem::regular(2), {WeightVector(3, 0.0)},
               AffineTransform{Point::Zero(2), 1.0, Point::Zero(2)}, {-1, 1}, 0, 0, 1.0};
    CHECK(zero.predict(barycenter(zero.system.root().simplex)) == 1);

    const LabeledDataset data = gaussian_clusters({{0, 0}, {3, 1}}, {-1, 1}, 50, 0.3, 10);
    const Model m = fit_uniform(data, 2, 1.0);
    for (const Point& far : {Point(Vector2(1e6, -1e6)), Point(Vector2(-40, 3)), Point(Vector2(0, 1e9))}) {
        CHECK(min_root_coefficient(m, far) < 0.0);
        const Point inside = m.to_root(far);
        CHECK(m.system.root().simplex.barycentric(inside).minCoeff() >= -1e-12);
        CHECK(m.predict(far) == m.predict(far));
    }
    CHECK(accuracy(m, data) == 1.0);
}

TEST_CASE("stratified folds") {
    std::vector<int> labels;
    for (int i = 0; i < 53; ++i) labels.push_back(i % 3 == 0 ? 1 : 0);
    const auto folds = stratified_folds(labels, 5, 11);
    REQUIRE(folds.size() == 5);
    std::set<std::size_t> all;
    for (const auto& f : folds) {
        std::size_t ones = 0;
        for (std::size_t i : f) {
            CHECK(all.insert(i).second);
            ones += labels[i] == 1;
        }
        CHECK(ones >= 3);
        CHECK(ones <= 4);
    }
    CHECK(all.size() == labels.size());
    CHECK(stratified_folds(labels, 5, 11) == folds);
    CHECK_THROWS_AS(stratified_folds(labels, 1, 11), DomainError);
    CHECK_THROWS_AS(stratified_folds({1, 2}, 3, 11), DomainError);
}

TEST_CASE("cross-validation ties and determinism") {
    const LabeledDataset data = gaussian_clusters({{0, 0}, {6, 0}}, {-1, 1}, 30, 0.3, 12);
    CvConfig cfg;
    cfg.C_grid = {4.0, 1.0};
    cfg.q_grid = {3, 2};
    FitOptions base;
    const CvResult r = cross_validate(data, cfg, base, 1);
    REQUIRE(r.cells.size() == 4);
    for (const auto& cell : r.cells) REQUIRE(cell.mean_accuracy == 1.0);
    CHECK(r.best_q == 2);
    CHECK(r.best_C == 1.0);

    const CvResult again = cross_validate(data, cfg, base, 2);
    for (std::size_t i = 0; i < r.cells.size(); ++i) CHECK(again.cells[i].fold_accuracy == r.cells[i].fold_accuracy);

    LabeledDataset constant = data;
    std::fill(constant.labels.begin(), constant.labels.end(), 1);
    CHECK(cross_validate(constant, cfg, base, 1).best_accuracy == 1.0);

    cfg.C_grid.clear();
    CHECK_THROWS_AS(cross_validate(data, cfg, base), DomainError);
}

TEST_CASE("default grids") {
    const auto grid = CvConfig::default_C_grid();
    REQUIRE(grid.size() == 11);
    CHECK(grid.front() == 1.0 / 32.0);
    CHECK(grid.back() == 32768.0);
    CHECK(CvConfig{}.q_grid == std::vector<int>{2, 3, 4, 5});
    CHECK(default_min_misclassified(10) == 2);
    CHECK(default_min_misclassified(1000) == 5);
    CHECK(default_min_misclassified(1001) == 6);
}

TEST_CASE("polytope data generation") {
    const PolytopeDataset all = generate_polytope_dataset(500, 3, 4, 0.0, 13);
    CHECK(all.data.size() == 500);
    CHECK(all.discarded == 0);
    CHECK(all.halfspaces.size() == 4);
    for (const auto& h : all.halfspaces) {
        CHECK(h.normal.norm() == doctest::Approx(1.0));
        CHECK(h.offset >= 0.05);
        CHECK(h.offset <= 0.95);
    }
    for (std::size_t i = 0; i < all.data.size(); ++i) {
        CHECK(all.data.points[i].norm() <= 1.0);
        bool inside = true;
        for (const auto& h : all.halfspaces) inside = inside && h.normal.dot(all.data.points[i]) + h.offset >= 0.0;
        CHECK((all.data.labels[i] == 1) == inside);
    }

    const PolytopeDataset banded = generate_polytope_dataset(2000, 2, 5, 0.05, 13);
    CHECK(banded.data.size() + banded.discarded == 2000);
    CHECK(banded.discarded > 0);
    for (const auto& x : banded.data.points) CHECK(std::abs(polytope_signed_distance(banded.halfspaces, x)) >= 0.05);

    const auto again = generate_polytope_dataset(2000, 2, 5, 0.05, 13);
    CHECK(again.data.labels == banded.data.labels);

    CHECK_THROWS_AS(generate_polytope_dataset(0, 2, 5, 0.0, 1), DomainError);
    CHECK_THROWS_AS(generate_polytope_dataset(10, 2, 5, -1.0, 1), DomainError);
}

TEST_CASE("single halfspace through the origin labels by sign") {
    std::mt19937_64 rng(14);
    std::normal_distribution<double> g;
    std::vector<Point> pts;
    for (int i = 0; i < 300; ++i) pts.push_back(Point(Vector2(g(rng), g(rng))));
    const Halfspace h{Point(Vector2(0.6, 0.8)), 0.0};
    const PolytopeDataset out = label_by_polytope(pts, {h}, 0.0);
    REQUIRE(out.data.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(out.data.labels[i] == (h.normal.dot(pts[i]) >= 0.0 ? 1 : -1));
}

TEST_CASE("points are uniform in the unit disc") {
    const PolytopeDataset ds = generate_polytope_dataset(10000, 2, 3, 0.0, 15);
    for (double r : {0.25, 0.5, 0.75, 0.9}) {
        double inside = 0.0;
        for (const auto& x : ds.data.points) inside += x.norm() <= r;
        CHECK(std::abs(inside / 10000.0 - r * r) <= 0.02);
    }
}

TEST_CASE("signed distance to a polytope") {
    // Unit square [-1, 1]^2.
    const std::vector<Halfspace> square{{Point(Vector2(1, 0)), 1.0},
                                        {Point(Vector2(-1, 0)), 1.0},
                                        {Point(Vector2(0, 1)), 1.0},
                                        {Point(Vector2(0, -1)), 1.0}};
    CHECK(polytope_signed_distance(square, Point(Vector2(0, 0))) == doctest::Approx(1.0));
    CHECK(polytope_signed_distance(square, Point(Vector2(0.5, 0.2))) == doctest::Approx(0.5));
    CHECK(polytope_signed_distance(square, Point(Vector2(3, 0))) == doctest::Approx(-2.0));
    CHECK(polytope_signed_distance(square, Point(Vector2(4, 5))) == doctest::Approx(-5.0).epsilon(1e-9));
}
