// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scalekit/records.hpp"
#include "scalekit/rng.hpp"

namespace scalekit {

// ---------------------------------------------------------------------------
// Environment
// ---------------------------------------------------------------------------

/// 9x9 pellet-collection gridworld with dense reward: +1 exactly when the
/// agent enters a pellet cell (the pellet is then removed). An episode ends
/// after 40 steps or when all 5 pellets are collected, so returns lie in
/// [0, 5]. Layout (agent + pellet cells, all distinct) is drawn from the
/// episode seed.
class GridWorld {
public:
    static constexpr int kSize = 9;
    static constexpr int kPellets = 5;
    static constexpr int kStepLimit = 40;
    static constexpr int kActions = 4;  // 0 up, 1 down, 2 left, 3 right
    static constexpr int kObsDim = kSize * kSize * 2;

    explicit GridWorld(std::uint64_t episode_seed);

    bool done() const { return steps_ >= kStepLimit || pellets_left_ == 0; }
    double total_reward() const { return total_reward_; }
    int steps() const { return steps_; }
    int agent_row() const { return agent_row_; }
    int agent_col() const { return agent_col_; }
    bool pellet_at(int row, int col) const { return pellets_[row * kSize + col]; }
    int pellets_left() const { return pellets_left_; }

    /// Moves the agent (walls clamp) and returns the step reward.
    double step(int action);

    /// Sparse observation: indices of the active cells in the flattened
    /// one-hot (agent plane, then pellet plane). At most 1 + kPellets.
    void observe(std::vector<std::uint16_t>& active) const;

private:
    int agent_row_ = 0;
    int agent_col_ = 0;
    std::array<bool, kSize * kSize> pellets_{};
    int pellets_left_ = 0;
    int steps_ = 0;
    double total_reward_ = 0.0;
};

/// Deterministic scripted expert: takes the first action in the fixed order
/// (up, down, left, right) that strictly decreases the Manhattan distance
/// to the nearest pellet.
int expert_action(const GridWorld& world);

// ---------------------------------------------------------------------------
// Expert data
// ---------------------------------------------------------------------------

struct ExpertSample {
    std::array<std::uint16_t, 6> active{};  // agent cell + up to 5 pellet cells
    std::uint8_t active_count = 0;
    std::uint8_t action = 0;
};

struct ExpertDataset {
    std::vector<ExpertSample> samples;
    int episodes = 0;
};

/// Rolls out the expert for the given number of episodes. Episode seeds are
/// derived from the base seed, so two calls with the same arguments produce
/// identical datasets.
ExpertDataset generate_expert_dataset(int episodes, std::uint64_t seed);

/// Mean episode return of the scripted expert over seeded episodes. Episode
/// seeds match evaluate_return's for the same base seed.
double expert_mean_return(int episodes, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Policy
// ---------------------------------------------------------------------------

/// One-hidden-layer ReLU MLP over the flattened one-hot observation with a
/// 4-way softmax head. All layers are scaled with the width, so the
/// effective parameter count is the full count:
///   N = W * (obs_dim + actions) + W + actions.
class BcPolicy {
public:
    explicit BcPolicy(int width);  // zero weights: the uniform policy
    static BcPolicy random_init(int width, std::uint64_t seed);

    int width() const { return width_; }
    std::int64_t param_count() const;
    static std::int64_t param_count_for_width(int width);

    void action_probs(std::span<const std::uint16_t> active, int active_count,
                      std::array<double, 4>& probs) const;
    int greedy_action(std::span<const std::uint16_t> active, int active_count) const;
    int sample_action(std::span<const std::uint16_t> active, int active_count, Rng& rng) const;

    /// Mean per-timestep cross-entropy of the expert actions under the
    /// policy.
    double mean_cross_entropy(std::span<const ExpertSample> samples) const;

    /// Analytic gradient of the mean cross-entropy over the batch, in the
    /// flat parameter layout. Returns the batch loss.
    double batch_gradient(std::span<const ExpertSample> batch, std::vector<double>& grad) const;

    /// One SGD step on the batch; returns the pre-update batch loss.
    double train_batch(std::span<const ExpertSample> batch, double learning_rate);

    /// Flat parameters: [W1 (W x obs), b1 (W), W2 (4 x W), b2 (4)]. Exposed
    /// for finite-difference checks.
    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }

private:
    void forward(std::span<const std::uint16_t> active, int active_count,
                 std::vector<double>& hidden, std::array<double, 4>& logits) const;

    int width_;
    std::vector<double> params_;
    std::vector<double> grad_buffer_;
    mutable std::vector<double> hidden_buffer_;
};

// ---------------------------------------------------------------------------
// Training and the isoFLOP sweep
// ---------------------------------------------------------------------------

struct TrainConfig {
    std::vector<int> widths = {4, 8, 16, 32, 64, 128};
    std::vector<double> flop_budgets = {3e8, 1e9, 3e9, 1e10, 3e10};
    double learning_rate = 0.2;
    int batch_size = 32;
    double max_samples = 1e7;  // per-run sample cap; budgets beyond it are skipped
    int dataset_episodes = 2000;
    int validation_trajectories = 100;
    int rollout_episodes = 100;
    bool sample_actions = false;  // rollout action selection; greedy by default
    std::uint64_t seed = 1;
};

struct TrainSnapshot {
    double samples = 0.0;
    double validation_loss = 0.0;
    BcPolicy policy;
};

/// Minibatch SGD on the cross-entropy objective with validation snapshots
/// at the given sample counts (ascending, max <= sample_budget). Batches
/// are drawn with replacement; the final batch before a snapshot is
/// truncated so each snapshot lands on its exact sample count. Aborts with
/// a diagnostic if the validation loss exceeds 10*ln(4) at three
/// consecutive snapshots.
std::vector<TrainSnapshot> train_bc(const ExpertDataset& train_data,
                                    const ExpertDataset& validation_data, int width,
                                    double sample_budget, std::span<const double> snapshots,
                                    const TrainConfig& config, std::uint64_t run_seed);

/// Mean return of the policy over seeded rollout episodes. Greedy argmax by
/// default (ties to the lowest action index); sampling behind the flag.
double evaluate_return(const BcPolicy& policy, int episodes, std::uint64_t seed,
                       bool sample_actions = false);

struct IsoflopRunResult {
    std::vector<ExperimentRecord> records;  // bc_loss + bc_return per snapshot
    double expert_return = 0.0;             // scripted expert over 1000 episodes
    double random_baseline = 0.0;           // uniform policy, sampled actions
    std::vector<std::string> warnings;      // skipped (width, budget) cells
};

/// Trains every width once up to its largest reachable budget, snapshotting
/// where compute crosses each nominal budget (C = 6 N D), evaluates each
/// snapshot's rollouts, and emits records for both the loss and the return
/// setting. Deterministic for a fixed config.
IsoflopRunResult run_isoflop_experiment(const TrainConfig& config);

}  // namespace scalekit
