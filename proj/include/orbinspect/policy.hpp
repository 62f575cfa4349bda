#pragma once

// High-level viewpoint selection policies.

#include "orbinspect/inspection_env.hpp"
#include "orbinspect/weights.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace orbinspect::policy {

/// What a policy sees when its agent must pick the next station.
struct DecisionContext {
    std::size_t agent = 0;
    const env::AgentObservation* observation = nullptr;
    /// Privileged lookahead for the greedy baseline; bound to the true state.
    const env::InspectionEnv* env = nullptr;
    env::CandidateQuery query;
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual std::size_t act(const DecisionContext& context) = 0;
    /// Clears any per-episode memory.
    virtual void reset() {}
    virtual std::string name() const = 0;
};

/// Predicted reward of each candidate station.
using RewardOracle = std::function<double(std::size_t candidate)>;

/// Uniform draw over [0, action_count).
std::size_t act_random(std::mt19937_64& rng, std::size_t action_count);

/// argmax of the oracle over all candidates; ties go to the lowest index.
std::size_t act_greedy(const RewardOracle& oracle, std::size_t action_count);

/// Index of the largest entry, lowest index on ties.
std::size_t argmax(const Eigen::VectorXf& values);

struct LstmState {
    VectorF h;
    VectorF c;

    static LstmState zeros(std::size_t cell);
};

struct ForwardResult {
    VectorF q;
    LstmState state;
};

/// tanh(W1 x + b1) -> tanh(W2 . + b2) -> LSTM cell -> linear head.
ForwardResult recurrent_forward(const RecurrentQWeights& weights, const VectorF& input, const LstmState& state);

struct NormalizationConstants {
    double position = 200.0;
    double velocity = 1.0;
    double time = 6118.0;
};

/// Scales positions, velocities and the time stamp of an environment
/// observation before it is fed to the network.
VectorF normalize_observation(const env::AgentObservation& obs, const NormalizationConstants& k = {});

/// Recurrent Q policy with its own hidden state.
class RecurrentQPolicy : public Policy {
public:
    RecurrentQPolicy(std::shared_ptr<const RecurrentQWeights> weights, double epsilon = 0.0,
                     std::uint64_t seed = 0, NormalizationConstants norm = {});

    std::size_t act(const DecisionContext& context) override;
    /// Network step on a ready observation; returns the chosen action.
    std::size_t act_observation(const env::AgentObservation& obs);
    void reset() override;
    std::string name() const override { return "recurrent-q"; }

    const LstmState& hidden() const noexcept { return state_; }
    const VectorF& last_q() const noexcept { return last_q_; }

private:
    std::shared_ptr<const RecurrentQWeights> weights_;
    double epsilon_;
    std::uint64_t seed_;
    NormalizationConstants norm_;
    std::mt19937_64 rng_;
    LstmState state_;
    VectorF last_q_;
};

class RandomPolicy : public Policy {
public:
    explicit RandomPolicy(std::uint64_t seed) : seed_(seed), rng_(seed) {}
    std::size_t act(const DecisionContext& context) override;
    void reset() override { rng_.seed(seed_); }
    std::string name() const override { return "random"; }

private:
    std::uint64_t seed_;
    std::mt19937_64 rng_;
};

/// Always stays at the current station.
class ParkPolicy : public Policy {
public:
    std::size_t act(const DecisionContext& context) override { return context.query.from; }
    std::string name() const override { return "park"; }
};

/// One-step reward maximizer using the environment's lookahead.
class GreedyPolicy : public Policy {
public:
    std::size_t act(const DecisionContext& context) override;
    std::string name() const override { return "greedy"; }
};

/// Replays a fixed action list, then parks.
class ScriptedPolicy : public Policy {
public:
    explicit ScriptedPolicy(std::vector<std::size_t> actions) : actions_(std::move(actions)) {}
    std::size_t act(const DecisionContext& context) override;
    void reset() override { next_ = 0; }
    std::string name() const override { return "scripted"; }

private:
    std::vector<std::size_t> actions_;
    std::size_t next_ = 0;
};

enum class PolicyKind { Random, Park, Greedy, RecurrentQ, Scripted };

std::optional<PolicyKind> parse_policy_kind(std::string_view name);
std::string_view to_string(PolicyKind kind);

/// How to build the three per-agent policies of an episode.
struct PolicySpec {
    PolicyKind kind = PolicyKind::Greedy;
    /// One weight file per agent (recurrent-q); a single entry is shared.
    std::vector<std::string> weight_files;
    double epsilon = 0.0;
    /// Per-agent action lists (scripted).
    std::vector<std::vector<std::size_t>> scripts;
};

/// Builds the policies for one episode. `seed` feeds the random/epsilon
/// generators; `observation_size` is checked against recurrent weights.
std::vector<std::unique_ptr<Policy>> make_policies(const PolicySpec& spec, std::uint64_t seed,
                                                   std::size_t observation_size);

}  // namespace orbinspect::policy
