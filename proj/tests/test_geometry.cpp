#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "xmodal/geometry.hpp"
#include "xmodal/rng.hpp"

using namespace xmodal;

namespace {

Vec random_unit(Rng& rng, std::size_t dim) {
    Vec v(dim);
    for (double& x : v) x = gaussian(rng);
    return l2_normalize(v);
}

}  // namespace

TEST_CASE("l2_normalize projects onto the unit sphere") {
    const Vec e = l2_normalize({3.0, 4.0});
    CHECK(e[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(e[1] == doctest::Approx(0.8).epsilon(1e-12));

    const Vec unit = l2_normalize({1.0, 0.0});
    CHECK(unit[0] == 1.0);
    CHECK(unit[1] == 0.0);

    CHECK_THROWS_AS(l2_normalize({0.0, 0.0}), ZeroVector);
    CHECK_THROWS_AS(l2_normalize({}), ZeroVector);

    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        Vec v(5);
        for (double& x : v) x = uniform_in(rng, -10.0, 10.0);
        if (norm(v) < 1e-12) continue;
        CHECK(norm(l2_normalize(v)) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("pairwise_distance is the Euclidean distance") {
    CHECK(pairwise_distance({0.3, 0.4}, {0.3, 0.4}) == 0.0);
    CHECK(pairwise_distance({1.0, 0.0}, {-1.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(pairwise_distance({1.0, 0.0}, {0.0, 1.0}) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(pairwise_distance({1.0}, {1.0, 2.0}), DimensionMismatch);
}

TEST_CASE("pairwise_distance satisfies the triangle inequality on random unit vectors") {
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        const Vec a = random_unit(rng, 4), b = random_unit(rng, 4), c = random_unit(rng, 4);
        CHECK(pairwise_distance(a, c) <= pairwise_distance(a, b) + pairwise_distance(b, c) + 1e-9);
        CHECK(pairwise_distance(a, b) == doctest::Approx(pairwise_distance(b, a)).epsilon(1e-15));
    }
}

TEST_CASE("triplet_hinge enforces the margin") {
    const Vec ea = {1.0, 0.0}, ep = {0.0, 1.0}, en = {-1.0, 0.0};
    // satisfied margin: d(a,p)=0, d(a,n)=1
    CHECK(triplet_hinge(ea, ea, en, 0.2) == 0.0);
    // sqrt(2) - 2 + 0.2 < 0
    CHECK(triplet_hinge(ea, ep, en, 0.2) == 0.0);
    // equal distances leave exactly the margin
    CHECK(triplet_hinge(ea, ep, {0.0, -1.0}, 0.2) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("triplet_hinge is nonnegative and zero exactly when the margin holds") {
    Rng rng(13);
    for (int i = 0; i < 500; ++i) {
        const Vec a = random_unit(rng, 3), p = random_unit(rng, 3), n = random_unit(rng, 3);
        const double alpha = uniform_in(rng, 0.0, 0.5);
        const double h = triplet_hinge(a, p, n, alpha);
        CHECK(h >= 0.0);
        const bool satisfied = pairwise_distance(a, p) + alpha <= pairwise_distance(a, n);
        CHECK((h == 0.0) == satisfied);
    }
}

TEST_CASE("mean_triplet_loss averages hinges and handles the empty set") {
    const std::vector<Vec> emb = {
        {0.0, 0.0},  // 0: anchor
        {1.0, 0.0},  // 1: d = 1
        {0.0, 0.9},  // 2: d = 0.9 -> hinge 0.3
        {0.0, 0.8},  // 3: d = 0.8 -> hinge 0.4
        {1.5, 0.0},  // 4: d = 1.5 -> hinge 0
    };
    CHECK(mean_triplet_loss(emb, TripletSet{}, 0.2) == 0.0);
    CHECK(mean_triplet_loss(emb, {{0, 1, 2}}, 0.2) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(mean_triplet_loss(emb, {{0, 1, 4}, {0, 1, 3}}, 0.2) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK_THROWS_AS(mean_triplet_loss(emb, {{0, 1, 9}}, 0.2), IndexOutOfRange);
}

TEST_CASE("mean_triplet_loss is permutation invariant over the set") {
    Rng rng(17);
    std::vector<Vec> emb;
    for (int i = 0; i < 6; ++i) emb.push_back(random_unit(rng, 3));
    TripletSet triples = {{0, 1, 2}, {3, 4, 5}, {1, 0, 3}, {2, 5, 0}};
    const double reference = mean_triplet_loss(emb, triples, 0.2);
    for (int shuffle = 0; shuffle < 10; ++shuffle) {
        for (std::size_t i = 0; i + 1 < triples.size(); ++i) {
            const std::size_t j = i + bounded(rng, triples.size() - i);
            std::swap(triples[i], triples[j]);
        }
        CHECK(mean_triplet_loss(emb, triples, 0.2) == doctest::Approx(reference).epsilon(1e-15));
    }
}

TEST_CASE("combined_loss is the lambda-weighted sum") {
    CHECK(combined_loss(0.5, 0.25, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(combined_loss(0.5, 0.25, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
    // lambda = 0 degenerates to the primary loss bit-exactly
    Rng rng(19);
    for (int i = 0; i < 100; ++i) {
        const double primary = uniform_in(rng, 0.0, 2.0);
        const double transfer = uniform_in(rng, 0.0, 2.0);
        CHECK(combined_loss(primary, transfer, 0.0) == primary);
    }
}

TEST_CASE("identity_centroid is the plain average, never renormalized") {
    const Vec single = {0.6, 0.8};
    CHECK(identity_centroid({single}) == single);

    const Vec cancel = identity_centroid({{1.0, 0.0}, {-1.0, 0.0}});
    CHECK(cancel[0] == 0.0);
    CHECK(cancel[1] == 0.0);

    const Vec mean = identity_centroid({{1.0, 0.0}, {0.0, 1.0}});
    CHECK(mean[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(mean[1] == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(identity_centroid({}), EmptyIdentity);
}

TEST_CASE("centroid of unit vectors stays inside the sphere") {
    Rng rng(23);
    for (int i = 0; i < 200; ++i) {
        std::vector<Vec> members;
        const std::size_t count = 1 + bounded(rng, 6);
        for (std::size_t j = 0; j < count; ++j) members.push_back(random_unit(rng, 4));
        CHECK(norm(identity_centroid(members)) <= 1.0 + 1e-9);
    }
}

TEST_CASE("centroids_by_identity groups and optionally renormalizes") {
    const std::vector<Vec> emb = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}};
    const std::vector<std::string> ids = {"a", "a", "b"};
    const auto plain = centroids_by_identity(emb, ids);
    CHECK(plain.at("a")[0] == doctest::Approx(0.5));
    CHECK(plain.at("b")[0] == doctest::Approx(-1.0));
    const auto renorm = centroids_by_identity(emb, ids, true);
    CHECK(norm(renorm.at("a")) == doctest::Approx(1.0).epsilon(1e-12));
}
