#include "orbinspect/policy.hpp"

#include "orbinspect/errors.hpp"

#include <cmath>

namespace orbinspect::policy {
namespace {

VectorF sigmoid(const VectorF& z) { return (1.0f + (-z.array()).exp()).inverse().matrix(); }

std::uint64_t agent_seed(std::uint64_t seed, std::size_t agent) {
    // splitmix64 finalizer over (seed, agent)
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (agent + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

std::size_t act_random(std::mt19937_64& rng, std::size_t action_count) {
    if (action_count == 0) throw InvalidAction("no actions to choose from");
    std::uniform_int_distribution<std::size_t> pick(0, action_count - 1);
    return pick(rng);
}

std::size_t act_greedy(const RewardOracle& oracle, std::size_t action_count) {
    if (action_count == 0) throw InvalidAction("no actions to choose from");
    std::size_t best = 0;
    double best_value = oracle(0);
    for (std::size_t a = 1; a < action_count; ++a) {
        const double v = oracle(a);
        if (v > best_value) {
            best = a;
            best_value = v;
        }
    }
    return best;
}

std::size_t argmax(const Eigen::VectorXf& values) {
    if (values.size() == 0) throw InvalidAction("argmax of an empty vector");
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return static_cast<std::size_t>(best);
}

LstmState LstmState::zeros(std::size_t cell) {
    const auto n = static_cast<Eigen::Index>(cell);
    return {VectorF::Zero(n), VectorF::Zero(n)};
}

ForwardResult recurrent_forward(const RecurrentQWeights& w, const VectorF& input, const LstmState& state) {
    const auto& d = w.dims;
    const auto c = static_cast<Eigen::Index>(d.cell);
    if (input.size() != static_cast<Eigen::Index>(d.input))
        throw DimensionMismatch("network input has width " + std::to_string(input.size()) + ", expected " +
                                std::to_string(d.input));
    if (state.h.size() != c || state.c.size() != c) throw DimensionMismatch("hidden state does not match cell size");

    const VectorF a1 = (w.w1 * input + w.b1).array().tanh().matrix();
    const VectorF a2 = (w.w2 * a1 + w.b2).array().tanh().matrix();

    VectorF xh(a2.size() + c);
    xh << a2, state.h;
    const VectorF z = w.wg * xh + w.bg;
    const VectorF i = sigmoid(z.segment(0, c));
    const VectorF f = sigmoid(z.segment(c, c));
    const VectorF g = z.segment(2 * c, c).array().tanh().matrix();
    const VectorF o = sigmoid(z.segment(3 * c, c));

    ForwardResult out;
    out.state.c = (f.array() * state.c.array() + i.array() * g.array()).matrix();
    out.state.h = (o.array() * out.state.c.array().tanh()).matrix();
    out.q = w.wh * out.state.h + w.bh;
    return out;
}

VectorF normalize_observation(const env::AgentObservation& obs, const NormalizationConstants& k) {
    using L = env::ObservationLayout;
    VectorF x = obs.cast<float>();
    for (Eigen::Index i = 0; i < 9; ++i) {
        x[static_cast<Eigen::Index>(L::kPositions) + i] = static_cast<float>(obs[static_cast<Eigen::Index>(L::kPositions) + i] / k.position);
        x[static_cast<Eigen::Index>(L::kVelocities) + i] = static_cast<float>(obs[static_cast<Eigen::Index>(L::kVelocities) + i] / k.velocity);
    }
    const Eigen::Index t = obs.size() - 1;
    x[t] = static_cast<float>(obs[t] / k.time);
    return x;
}

RecurrentQPolicy::RecurrentQPolicy(std::shared_ptr<const RecurrentQWeights> weights, double epsilon,
                                   std::uint64_t seed, NormalizationConstants norm)
    : weights_(std::move(weights)), epsilon_(epsilon), seed_(seed), norm_(norm), rng_(seed) {
    if (!weights_) throw ConfigError("recurrent policy needs weights");
    weights_->validate();
    if (!(epsilon_ >= 0.0 && epsilon_ <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
    state_ = LstmState::zeros(weights_->dims.cell);
}

void RecurrentQPolicy::reset() {
    state_ = LstmState::zeros(weights_->dims.cell);
    rng_.seed(seed_);
    last_q_ = VectorF();
}

std::size_t RecurrentQPolicy::act_observation(const env::AgentObservation& obs) {
    ForwardResult r = recurrent_forward(*weights_, normalize_observation(obs, norm_), state_);
    state_ = std::move(r.state);
    last_q_ = std::move(r.q);
    if (epsilon_ > 0.0) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        if (u(rng_) < epsilon_) return act_random(rng_, weights_->dims.actions);
    }
    return argmax(last_q_);
}

std::size_t RecurrentQPolicy::act(const DecisionContext& context) {
    if (context.observation == nullptr) throw ConfigError("recurrent policy needs an observation");
    return act_observation(*context.observation);
}

std::size_t RandomPolicy::act(const DecisionContext& context) {
    if (context.env == nullptr) throw ConfigError("random policy needs the action count from the environment");
    return act_random(rng_, context.env->viewpoints().size());
}

std::size_t GreedyPolicy::act(const DecisionContext& context) {
    if (context.env == nullptr) throw ConfigError("greedy policy needs an environment lookahead");
    const env::InspectionEnv& e = *context.env;
    return act_greedy([&](std::size_t c) { return e.predict(context.query, c).reward; }, e.viewpoints().size());
}

std::size_t ScriptedPolicy::act(const DecisionContext& context) {
    if (next_ < actions_.size()) return actions_[next_++];
    return context.query.from;
}

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
    if (name == "random") return PolicyKind::Random;
    if (name == "park") return PolicyKind::Park;
    if (name == "greedy") return PolicyKind::Greedy;
    if (name == "recurrent-q") return PolicyKind::RecurrentQ;
    if (name == "scripted") return PolicyKind::Scripted;
    return std::nullopt;
}

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Random: return "random";
        case PolicyKind::Park: return "park";
        case PolicyKind::Greedy: return "greedy";
        case PolicyKind::RecurrentQ: return "recurrent-q";
        case PolicyKind::Scripted: return "scripted";
    }
    return "unknown";
}

std::vector<std::unique_ptr<Policy>> make_policies(const PolicySpec& spec, std::uint64_t seed,
                                                   std::size_t observation_size) {
    std::vector<std::unique_ptr<Policy>> out;
    std::vector<std::shared_ptr<const RecurrentQWeights>> weights;
    if (spec.kind == PolicyKind::RecurrentQ) {
        if (spec.weight_files.size() != 1 && spec.weight_files.size() != kAgentCount)
            throw ConfigError("recurrent-q needs one weight file or one per agent");
        for (const std::string& path : spec.weight_files) {
            auto w = std::make_shared<RecurrentQWeights>(load_weights(path));
            w->bind(observation_size);
            weights.push_back(std::move(w));
        }
    }
    if (spec.kind == PolicyKind::Scripted && spec.scripts.size() != kAgentCount)
        throw ConfigError("scripted policy needs one action list per agent");

    for (std::size_t a = 0; a < kAgentCount; ++a) {
        switch (spec.kind) {
            case PolicyKind::Random: out.push_back(std::make_unique<RandomPolicy>(agent_seed(seed, a))); break;
            case PolicyKind::Park: out.push_back(std::make_unique<ParkPolicy>()); break;
            case PolicyKind::Greedy: out.push_back(std::make_unique<GreedyPolicy>()); break;
            case PolicyKind::Scripted: out.push_back(std::make_unique<ScriptedPolicy>(spec.scripts[a])); break;
            case PolicyKind::RecurrentQ:
                out.push_back(std::make_unique<RecurrentQPolicy>(weights[weights.size() == 1 ? 0 : a], spec.epsilon,
                                                                 agent_seed(seed, a)));
                break;
        }
    }
    return out;
}

}  // namespace orbinspect::policy
