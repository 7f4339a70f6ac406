#include <doctest.h>

#include <cmath>

#include "placenav/random.hpp"
#include "placenav/valuation.hpp"
#include "support.hpp"

using namespace placenav;

namespace {

Eigen::VectorXd one_hot(int n, int i, double value = 1.0) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v[i] = value;
    return v;
}

Eigen::VectorXd random_rates(Rng& rng, int n, double p_active = 0.5) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.bernoulli(p_active) ? rng.uniform() : 0.0;
    return v;
}

ReplayBuffer buffer_of(const std::vector<Eigen::VectorXd>& patterns) {
    ReplayBuffer buf;
    std::int64_t step = 0;
    for (const auto& p : patterns) record_step(buf, {p, step++});
    return buf;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("reward activation of a silent layer is zero") {
    auto cell = RewardCell::zeros(6);
    cell.weights.setConstant(3.0);
    CHECK(reward_activation(cell, Eigen::VectorXd::Zero(6)) == 0.0);
}

TEST_CASE("uniform unit weights read out one") {
    Rng rng(3);
    auto cell = RewardCell::zeros(12);
    cell.weights.setOnes();
    for (int t = 0; t < 50; ++t) {
        Eigen::VectorXd v = random_rates(rng, 12);
        v[t % 12] = 0.5;
        const double expected = v.sum() / v.sum();
        CHECK(testing::rel_close(reward_activation(cell, v), expected));
    }
}

TEST_CASE("activation saturates at the cap") {
    auto cell = RewardCell::zeros(3, 2.0);
    cell.weights << 20.0, 20.0, 20.0;
    CHECK(reward_ratio(cell, Eigen::Vector3d(1, 1, 1)) == 20.0);
    CHECK(reward_activation(cell, Eigen::Vector3d(1, 1, 1)) == 2.0);
}

TEST_CASE("weights shorter than the layer are rejected") {
    auto cell = RewardCell::zeros(3);
    CHECK_THROWS(reward_activation(cell, Eigen::VectorXd::Zero(4)));
    CHECK_THROWS(td_update(cell, Eigen::VectorXd::Zero(4), {}));
}

TEST_CASE("single one-hot replay raises that weight by exactly one") {
    auto cell = RewardCell::zeros(10);
    cell.weights[5] = 0.25;
    const auto buf = buffer_of({one_hot(10, 5, 0.37)});
    CHECK(reverse_replay(cell, buf, 10.0) == ReplayStatus::applied);
    CHECK(cell.weights[5] == 1.25);
    CHECK(cell.weights.sum() == 1.25);
}

TEST_CASE("two-step replay discounts the predecessor") {
    const double tau = 10.0;
    auto cell = RewardCell::zeros(8);
    // chronological: predecessor p=2 first, goal cell g=6 last
    const auto buf = buffer_of({one_hot(8, 2, 0.4), one_hot(8, 6, 0.9)});
    reverse_replay(cell, buf, tau);
    CHECK(cell.weights[6] == 1.0);
    CHECK(testing::rel_close(cell.weights[2], std::exp(-1.0 / tau)));
}

TEST_CASE("identical snapshots sum geometrically") {
    const double tau = 4.0;
    for (int k : {1, 2, 5, 17}) {
        Eigen::VectorXd v(4);
        v << 0.2, 0.8, 0.0, 0.4;
        std::vector<Eigen::VectorXd> pats(k, v);
        auto cell = RewardCell::zeros(4);
        reverse_replay(cell, buffer_of(pats), tau);
        double geo = 0.0;
        for (int t = 0; t < k; ++t) geo += std::exp(-t / tau);
        const Eigen::VectorXd raw = (v / 0.8) * geo;
        const Eigen::VectorXd expected = raw / raw.maxCoeff();
        for (int i = 0; i < 4; ++i) CHECK(testing::rel_close(cell.weights[i], expected[i]));
    }
}

TEST_CASE("silent snapshots are skipped without advancing time") {
    const double tau = 3.0;
    auto cell = RewardCell::zeros(5);
    const auto buf = buffer_of({one_hot(5, 1), Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(5),
                                one_hot(5, 4)});
    reverse_replay(cell, buf, tau);
    CHECK(cell.weights[4] == 1.0);
    CHECK(testing::rel_close(cell.weights[1], std::exp(-1.0 / tau)));
}

TEST_CASE("replay with nothing to learn is a no-op") {
    auto cell = RewardCell::zeros(5);
    cell.weights.setConstant(0.3);
    const Eigen::VectorXd before = cell.weights;
    CHECK(reverse_replay(cell, ReplayBuffer{}, 10.0) == ReplayStatus::empty_buffer);
    CHECK(reverse_replay(cell, buffer_of({Eigen::VectorXd::Zero(5)}), 10.0) ==
          ReplayStatus::zero_update);
    CHECK(cell.weights == before);
}

TEST_CASE("td leaves an exact prediction alone") {
    auto cell = RewardCell::zeros(3);
    cell.weights << 0.5, 0.25, 0.0;
    const Eigen::Vector3d v(1.0, 2.0, 0.7);
    const Eigen::VectorXd before = cell.weights;
    td_update(cell, v, {0.3, 1.0});
    CHECK(cell.weights == before);
}

TEST_CASE("td single step from zero weights") {
    auto cell = RewardCell::zeros(4);
    td_update(cell, one_hot(4, 2), {0.1, 1.0});
    CHECK(testing::rel_close(cell.weights[2], 0.1));
    CHECK(cell.weights.sum() == cell.weights[2]);
}

TEST_CASE("td converges with the linear recurrence ratio") {
    Eigen::VectorXd v(4);
    v << 0.3, 0.9, 0.0, 0.5;
    const double eta = 0.2, reward = 1.0;
    const double ratio = 1.0 - eta * v.squaredNorm();
    auto cell = RewardCell::zeros(4);
    double err = reward - cell.weights.dot(v);
    const double err0 = err;
    for (int n = 1; n <= 40; ++n) {
        td_update(cell, v, {eta, reward});
        err = reward - cell.weights.dot(v);
        CHECK(testing::rel_close(err, err0 * std::pow(ratio, n), 1e-9, 1e-15));
    }
}

TEST_CASE("td clamps weights at zero") {
    auto cell = RewardCell::zeros(2);
    cell.weights << 0.05, 2.0;
    td_update(cell, Eigen::Vector2d(1.0, 1.0), {0.5, 0.0});
    CHECK(cell.weights[0] == 0.0);
    CHECK(cell.weights[1] == doctest::Approx(0.975).epsilon(1e-12));
}

TEST_CASE("replay buffer bookkeeping") {
    ReplayBuffer buf(3);
    record_step(buf, {one_hot(2, 0), 0});
    CHECK(buf.size() == 1);
    for (std::int64_t s = 1; s < 5; ++s) record_step(buf, {one_hot(2, s % 2), s});
    CHECK(buf.size() == 3);
    CHECK(buf[0].step == 2);
    CHECK(buf[1].step == 3);
    CHECK(buf[2].step == 4);
    buf.clear();
    CHECK(buf.empty());
}

}  // TEST_SUITE

TEST_SUITE("invariant") {

TEST_CASE("replay weights fall off along the trajectory") {
    Rng rng(11);
    for (int c = 0; c < testing::kPropertyCases; ++c) {
        const int n = 5 + static_cast<int>(rng.next() % 40);
        const int len = 2 + static_cast<int>(rng.next() % (n - 1));
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.next() % (i + 1)]);
        std::vector<Eigen::VectorXd> pats;
        for (int t = 0; t < len; ++t) pats.push_back(one_hot(n, order[t], 0.05 + rng.uniform()));
        const double tau = 0.5 + 20.0 * rng.uniform();
        auto cell = RewardCell::zeros(n);
        reverse_replay(cell, buffer_of(pats), tau);
        bool ok = true;
        for (int t = 1; t < len; ++t) ok = ok && cell.weights[order[t - 1]] < cell.weights[order[t]];
        CHECK(ok);
        CHECK(cell.weights[order[len - 1]] == 1.0);
    }
}

TEST_CASE("reward activation ignores the overall rate scale") {
    Rng rng(12);
    for (int c = 0; c < testing::kPropertyCases; ++c) {
        const int n = 1 + static_cast<int>(rng.next() % 60);
        auto cell = RewardCell::zeros(n);
        for (int i = 0; i < n; ++i) cell.weights[i] = 2.0 * rng.uniform();
        Eigen::VectorXd v = random_rates(rng, n, 0.6);
        v[rng.next() % n] += 0.01;
        const double s = std::exp(rng.uniform(-4.0, 4.0));
        const Eigen::VectorXd sv = s * v;
        if (sv.sum() < cell.epsilon) continue;
        CHECK(testing::rel_close(reward_activation(cell, sv), reward_activation(cell, v)));
    }
}

TEST_CASE("applied replay adds a unit-max increment") {
    Rng rng(13);
    for (int c = 0; c < testing::kPropertyCases; ++c) {
        const int n = 2 + static_cast<int>(rng.next() % 30);
        const int len = 1 + static_cast<int>(rng.next() % 25);
        std::vector<Eigen::VectorXd> pats;
        for (int t = 0; t < len; ++t) pats.push_back(random_rates(rng, n, 0.3));
        auto cell = RewardCell::zeros(n);
        for (int i = 0; i < n; ++i) cell.weights[i] = rng.uniform();
        const Eigen::VectorXd before = cell.weights;
        if (reverse_replay(cell, buffer_of(pats), 1.0 + 10.0 * rng.uniform()) ==
            ReplayStatus::applied) {
            const Eigen::VectorXd inc = cell.weights - before;
            CHECK(inc.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(inc.minCoeff() >= 0.0);
        }
    }
}

TEST_CASE("td error shrinks monotonically inside the stable band") {
    Rng rng(14);
    for (int c = 0; c < testing::kPropertyCases; ++c) {
        const int n = 1 + static_cast<int>(rng.next() % 20);
        Eigen::VectorXd v = random_rates(rng, n, 0.7);
        v[rng.next() % n] += 0.05;
        const double eta = rng.uniform(0.01, 1.99) / v.squaredNorm();
        const double reward = rng.uniform(0.0, 2.0);
        auto cell = RewardCell::zeros(n);
        double err = std::abs(reward - cell.weights.dot(v));
        bool ok = true;
        for (int t = 0; t < 30; ++t) {
            td_update(cell, v, {eta, reward});
            const double e = std::abs(reward - cell.weights.dot(v));
            ok = ok && e <= err + 1e-12;
            err = e;
        }
        CHECK(ok);
        CHECK((cell.weights.array() >= 0.0).all());
    }
}

}  // TEST_SUITE
