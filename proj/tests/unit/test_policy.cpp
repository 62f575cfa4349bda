#include <doctest.h>

#include "orbinspect/errors.hpp"
#include "orbinspect/policy.hpp"

#include <cmath>
#include <optional>
#include <set>
#include <filesystem>
#include <random>

using namespace orbinspect;
using namespace orbinspect::policy;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

env::InspectionEnv sphere_env(double threshold = 1.0, std::size_t points = 300) {
    env::EnvConfig c;
    c.coverage_threshold = threshold;
    return env::InspectionEnv(c, geometry::synthetic_cloud(geometry::SyntheticShape::Sphere, points, 1.0));
}

env::AgentObservation random_obs(std::mt19937_64& rng, std::size_t size) {
    std::normal_distribution<double> g;
    env::AgentObservation o(static_cast<Eigen::Index>(size));
    for (Eigen::Index i = 0; i < o.size(); ++i) o[i] = g(rng);
    return o;
}

}  // namespace

TEST_CASE("random actions are uniform and reproducible") {
    std::mt19937_64 rng(2024);
    std::array<std::size_t, 20> hist{};
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const std::size_t a = act_random(rng, 20);
        REQUIRE(a < 20);
        ++hist[a];
    }
    const double expect = draws / 20.0;
    double chi2 = 0.0;
    for (std::size_t h : hist) chi2 += (double(h) - expect) * (double(h) - expect) / expect;
    // 19 degrees of freedom: mean 19, sd sqrt(38)
    CHECK(chi2 <= 19.0 + 3.0 * std::sqrt(38.0));

    std::mt19937_64 a(5), b(5);
    for (int i = 0; i < 100; ++i) CHECK(act_random(a, 20) == act_random(b, 20));
    CHECK_THROWS_AS(act_random(a, 0), InvalidAction);
}

TEST_CASE("greedy selection and tie-breaking") {
    const std::vector<double> v{0.1, 0.7, 0.3, 0.7, -1.0};
    CHECK(act_greedy([&](std::size_t i) { return v[i]; }, v.size()) == 1);
    CHECK(act_greedy([](std::size_t) { return 0.0; }, 20) == 0);
    CHECK(act_greedy([](std::size_t i) { return -double(i); }, 20) == 0);
    CHECK(act_greedy([](std::size_t i) { return double(i % 7); }, 20) == 6);
    CHECK(argmax(Eigen::VectorXf::Zero(20)) == 0);
    Eigen::VectorXf q(4);
    q << 1, 3, 3, 2;
    CHECK(argmax(q) == 1);
}

TEST_CASE("greedy picks the cheapest station once everything is seen") {
    const env::InspectionEnv e = sphere_env();
    const env::JointState s = e.reset(3).state;
    env::InspectionLedger full(e.cloud().size());
    geometry::PointMask all(e.cloud().size());
    for (std::size_t i = 0; i < all.size(); ++i) all.set(i);
    full.record(all);

    const Vec3 velocity(0.05, -0.02, 0.01);
    DecisionContext ctx;
    ctx.env = &e;
    ctx.query = {s.viewpoint[0], velocity, 100.0, &full};
    std::size_t cheapest = 0;
    double best = 1e9;
    for (std::size_t c = 0; c < 20; ++c) {
        const auto p = e.predict(ctx.query, c);
        CHECK(p.gain.remaining_before == 0);
        if (p.delta_v < best) {
            best = p.delta_v;
            cheapest = c;
        }
    }
    GreedyPolicy g;
    CHECK(g.act(ctx) == cheapest);
}

TEST_CASE("greedy flies to a station that sees the last unseen point") {
    const env::InspectionEnv e = sphere_env();
    const std::size_t from = 0;
    const double now = 0.0;
    std::vector<geometry::PointMask> images;
    for (std::size_t c = 0; c < 20; ++c)
        images.push_back(e.image(c, now + orbit::transfer_tof(from, c, e.viewpoints(), e.config().orbit)));
    // the point seen by the fewest candidate images, excluding those the current station sees
    std::optional<std::size_t> target;
    std::size_t fewest = 21;
    for (std::size_t i = 0; i < e.cloud().size(); ++i) {
        if (images[from].test(i)) continue;
        std::size_t hits = 0;
        for (std::size_t c = 0; c < 20; ++c) hits += images[c].test(i);
        if (hits > 0 && hits < fewest) {
            fewest = hits;
            target = i;
        }
    }
    REQUIRE(target.has_value());
    geometry::PointMask seen(e.cloud().size());
    for (std::size_t i = 0; i < seen.size(); ++i) seen.set(i, i != *target);
    env::InspectionLedger ledger(e.cloud().size());
    ledger.record(seen);

    DecisionContext ctx;
    ctx.env = &e;
    ctx.query = {from, Vec3::Zero(), now, &ledger};
    std::set<std::size_t> seers;
    std::size_t cheapest = 20;
    double best = 1e9;
    for (std::size_t c = 0; c < 20; ++c) {
        if (!images[c].test(*target)) continue;
        seers.insert(c);
        const double dv = e.predict(ctx.query, c).delta_v;
        if (dv < best) {
            best = dv;
            cheapest = c;
        }
    }
    GreedyPolicy g;
    const std::size_t chosen = g.act(ctx);
    CHECK(seers.count(chosen) == 1);
    CHECK(chosen == cheapest);
    CHECK_THROWS_AS(g.act(DecisionContext{}), ConfigError);
}

TEST_CASE("zero network prefers the first station") {
    const auto w = std::make_shared<RecurrentQWeights>(RecurrentQWeights::zeros({30}));
    RecurrentQPolicy p(w);
    std::mt19937_64 rng(1);
    for (int k = 0; k < 3; ++k) CHECK(p.act_observation(random_obs(rng, 30)) == 0);
    CHECK(p.last_q().isZero());
}

TEST_CASE("two-unit recurrent cell matches a hand-computed update") {
    const NetworkDims d{2, 2, 2, 2, 2};
    RecurrentQWeights w = RecurrentQWeights::zeros(d);
    w.w1.setIdentity();
    w.w2.setIdentity();
    // gate blocks i, f, g, o; recurrent columns are the identity in each block
    const double bias[4] = {0.5, 1.0, 0.3, -0.2};
    for (int gate = 0; gate < 4; ++gate)
        for (int u = 0; u < 2; ++u) {
            w.wg(2 * gate + u, 2 + u) = 1.0f;
            w.bg[2 * gate + u] = static_cast<float>(bias[gate] + 0.1 * u);
        }
    w.wh.setIdentity();

    double h[2] = {0, 0}, c[2] = {0, 0};
    LstmState state = LstmState::zeros(2);
    for (int step = 0; step < 2; ++step) {
        for (int u = 0; u < 2; ++u) {
            const double i = sigmoid(bias[0] + 0.1 * u + h[u]);
            const double f = sigmoid(bias[1] + 0.1 * u + h[u]);
            const double g = std::tanh(bias[2] + 0.1 * u + h[u]);
            const double o = sigmoid(bias[3] + 0.1 * u + h[u]);
            c[u] = f * c[u] + i * g;
            h[u] = o * std::tanh(c[u]);
        }
        const ForwardResult r = recurrent_forward(w, VectorF::Zero(2), state);
        state = r.state;
        for (int u = 0; u < 2; ++u) {
            CHECK(r.state.c[u] == doctest::Approx(c[u]).epsilon(1e-6));
            CHECK(r.state.h[u] == doctest::Approx(h[u]).epsilon(1e-6));
            CHECK(r.q[u] == doctest::Approx(h[u]).epsilon(1e-6));
        }
    }
    CHECK_THROWS_AS(recurrent_forward(w, VectorF::Zero(3), state), DimensionMismatch);
    CHECK_THROWS_AS(recurrent_forward(w, VectorF::Zero(2), LstmState::zeros(3)), DimensionMismatch);
}

TEST_CASE("hidden layers keep the output bounded") {
    const RecurrentQWeights w = RecurrentQWeights::random({12}, 9, 0.5f);
    double bound = 0.0;
    for (Eigen::Index r = 0; r < w.wh.rows(); ++r)
        bound = std::max(bound, double(w.wh.row(r).cwiseAbs().sum() + std::abs(w.bh[r])));
    LstmState s = LstmState::zeros(64);
    for (float scale : {1.0f, 1e3f, 1e8f}) {
        const ForwardResult r = recurrent_forward(w, VectorF::Constant(12, scale), s);
        CHECK(r.q.allFinite());
        CHECK(r.q.cwiseAbs().maxCoeff() <= bound + 1e-5);
        s = r.state;
    }
}

TEST_CASE("positive affine rescaling of Q leaves the choices unchanged") {
    const auto base = std::make_shared<RecurrentQWeights>(RecurrentQWeights::random({40}, 17));
    auto scaled = std::make_shared<RecurrentQWeights>(*base);
    scaled->wh *= 3.0f;
    scaled->bh = scaled->bh * 3.0f + VectorF::Constant(20, 0.5f);
    RecurrentQPolicy a(base), b(scaled);
    std::mt19937_64 rng(2);
    for (int k = 0; k < 10; ++k) {
        const auto o = random_obs(rng, 40);
        CHECK(a.act_observation(o) == b.act_observation(o));
    }
}

TEST_CASE("hidden state advances, resets and stays per-policy") {
    const auto w = std::make_shared<RecurrentQWeights>(RecurrentQWeights::random({40}, 23, 0.6f));
    std::mt19937_64 rng(8);
    std::vector<env::AgentObservation> obs;
    for (int k = 0; k < 6; ++k) obs.push_back(random_obs(rng, 40));

    RecurrentQPolicy p(w);
    std::vector<std::size_t> first;
    for (const auto& o : obs) first.push_back(p.act_observation(o));
    CHECK_FALSE(p.hidden().h.isZero());
    p.reset();
    CHECK(p.hidden().h.isZero());
    CHECK(p.hidden().c.isZero());
    std::vector<std::size_t> again;
    for (const auto& o : obs) again.push_back(p.act_observation(o));
    CHECK(again == first);

    // a second policy on the same weights interleaved with the first does not disturb it
    RecurrentQPolicy q(w), other(w);
    std::vector<std::size_t> interleaved;
    for (const auto& o : obs) {
        other.act_observation(obs[0]);
        interleaved.push_back(q.act_observation(o));
    }
    CHECK(interleaved == first);
}

TEST_CASE("epsilon exploration is seeded") {
    const auto w = std::make_shared<RecurrentQWeights>(RecurrentQWeights::random({40}, 1));
    std::mt19937_64 rng(4);
    const auto o = random_obs(rng, 40);
    RecurrentQPolicy a(w, 1.0, 77), b(w, 1.0, 77);
    std::set<std::size_t> seen;
    for (int k = 0; k < 200; ++k) {
        const std::size_t x = a.act_observation(o);
        CHECK(x == b.act_observation(o));
        CHECK(x < 20);
        seen.insert(x);
    }
    CHECK(seen.size() > 10);
    CHECK_THROWS_AS(RecurrentQPolicy(w, 1.5), ConfigError);
    CHECK_THROWS_AS(RecurrentQPolicy(nullptr), ConfigError);
}

TEST_CASE("observation normalization") {
    const std::size_t n = 4;
    env::AgentObservation o = env::AgentObservation::Zero(static_cast<Eigen::Index>(env::ObservationLayout::size(n)));
    o[0] = 200.0;
    o[8] = -100.0;
    o[9] = 0.25;
    o[18] = 1.0;
    o[25] = 1.0;
    o[static_cast<Eigen::Index>(env::ObservationLayout::time_offset(n))] = 3059.0;
    const VectorF x = normalize_observation(o);
    CHECK(x[0] == 1.0f);
    CHECK(x[8] == -0.5f);
    CHECK(x[9] == 0.25f);
    CHECK(x[18] == 1.0f);
    CHECK(x[25] == 1.0f);
    CHECK(x[x.size() - 1] == doctest::Approx(0.5));
}

TEST_CASE("policy factory") {
    for (auto k : {PolicyKind::Random, PolicyKind::Park, PolicyKind::Greedy, PolicyKind::RecurrentQ,
                   PolicyKind::Scripted})
        CHECK(parse_policy_kind(to_string(k)) == k);
    CHECK_FALSE(parse_policy_kind("smart").has_value());

    const auto dir = std::filesystem::temp_directory_path();
    std::vector<std::string> files;
    for (int a = 0; a < 3; ++a) {
        files.push_back((dir / ("orbinspect_policy_" + std::to_string(a) + ".maiq")).string());
        save_weights(RecurrentQWeights::random({30}, 100 + a), files.back());
    }
    PolicySpec spec;
    spec.kind = PolicyKind::RecurrentQ;
    spec.weight_files = files;
    const auto ps = make_policies(spec, 1, 30);
    REQUIRE(ps.size() == 3);
    std::mt19937_64 rng(6);
    const auto o = random_obs(rng, 30);
    DecisionContext ctx;
    ctx.observation = &o;
    std::set<std::vector<float>> qs;
    for (const auto& p : ps) {
        p->act(ctx);
        const VectorF& q = static_cast<RecurrentQPolicy&>(*p).last_q();
        qs.insert(std::vector<float>(q.data(), q.data() + q.size()));
    }
    CHECK(qs.size() == 3);
    CHECK_THROWS_AS(make_policies(spec, 1, 31), DimensionMismatch);
    spec.weight_files.pop_back();
    CHECK_THROWS_AS(make_policies(spec, 1, 30), ConfigError);
    for (const auto& f : files) std::filesystem::remove(f);

    PolicySpec scripted;
    scripted.kind = PolicyKind::Scripted;
    scripted.scripts = {{4, 5}, {6}, {}};
    auto sp = make_policies(scripted, 0, 30);
    DecisionContext park;
    park.query.from = 9;
    CHECK(sp[0]->act(park) == 4);
    CHECK(sp[0]->act(park) == 5);
    CHECK(sp[0]->act(park) == 9);
    CHECK(sp[2]->act(park) == 9);
    sp[0]->reset();
    CHECK(sp[0]->act(park) == 4);
    scripted.scripts.pop_back();
    CHECK_THROWS_AS(make_policies(scripted, 0, 30), ConfigError);

    PolicySpec random;
    random.kind = PolicyKind::Random;
    const env::InspectionEnv e = sphere_env(1.0, 50);
    DecisionContext rc;
    rc.env = &e;
    auto r1 = make_policies(random, 5, 0), r2 = make_policies(random, 5, 0);
    std::vector<std::size_t> s0, s1, s2;
    for (int k = 0; k < 30; ++k) {
        s0.push_back(r1[0]->act(rc));
        s1.push_back(r1[1]->act(rc));
        s2.push_back(r2[0]->act(rc));
    }
    CHECK(s0 == s2);
    CHECK(s0 != s1);
    CHECK(ParkPolicy{}.act(park) == 9);
}

TEST_CASE("greedy covers at least as fast as random on a sphere") {
    const env::InspectionEnv e = sphere_env(1.0, 300);
    const int seeds = 50, steps = 3;
    std::vector<double> diff;
    for (int seed = 0; seed < seeds; ++seed) {
        auto run = [&](bool greedy) {
            env::JointState s = e.reset(static_cast<std::uint64_t>(seed)).state;
            std::mt19937_64 rng(static_cast<std::uint64_t>(seed) + 1000);
            double sum = 0.0;
            for (int k = 0; k < steps; ++k) {
                if (s.done) {
                    sum += env::coverage_ratio(s.ledger);
                    continue;
                }
                env::JointAction act{};
                for (std::size_t a = 0; a < kAgentCount; ++a) {
                    const env::CandidateQuery q{s.viewpoint[a], s.agents[a].velocity, s.time, &s.ledger};
                    act[a] = greedy ? act_greedy([&](std::size_t c) { return e.predict(q, c).reward; }, 20)
                                    : act_random(rng, 20);
                }
                s = e.step_joint(s, act).state;
                sum += env::coverage_ratio(s.ledger);
            }
            return sum / steps;
        };
        diff.push_back(run(true) - run(false));
    }
    double mean = 0.0, var = 0.0;
    for (double d : diff) mean += d / seeds;
    for (double d : diff) var += (d - mean) * (d - mean) / (seeds - 1);
    // one-sided 95% test that greedy is not worse
    CHECK(mean + 1.677 * std::sqrt(var / seeds) >= 0.0);
    CHECK(mean > 0.0);
}
