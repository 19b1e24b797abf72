// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "scalekit/bcdesk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "scalekit/error.hpp"

namespace scalekit {

namespace {

constexpr int kObsDim = GridWorld::kObsDim;
constexpr int kActions = GridWorld::kActions;

// Seed-stream tags so the dataset, validation, evaluation and per-width
// training streams never collide.
constexpr std::uint64_t kDatasetStream = 0x01;
constexpr std::uint64_t kValidationStream = 0x02;
constexpr std::uint64_t kEvalStream = 0x03;
constexpr std::uint64_t kWidthStreamBase = 0x100;

int manhattan(int r1, int c1, int r2, int c2) { return std::abs(r1 - r2) + std::abs(c1 - c2); }

int nearest_pellet_distance(const GridWorld& world, int row, int col) {
    int best = GridWorld::kSize * 2;
    for (int r = 0; r < GridWorld::kSize; ++r)
        for (int c = 0; c < GridWorld::kSize; ++c)
            if (world.pellet_at(r, c)) best = std::min(best, manhattan(row, col, r, c));
    return best;
}

void apply_move(int action, int& row, int& col) {
    switch (action) {
        case 0: row = std::max(0, row - 1); break;
        case 1: row = std::min(GridWorld::kSize - 1, row + 1); break;
        case 2: col = std::max(0, col - 1); break;
        case 3: col = std::min(GridWorld::kSize - 1, col + 1); break;
        default: throw Error("GridWorld: action out of range");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// GridWorld
// ---------------------------------------------------------------------------

GridWorld::GridWorld(std::uint64_t episode_seed) {
    Rng rng(episode_seed);
    // Partial Fisher-Yates over all cells: first draw is the agent, the
    // next five are pellets.
    std::array<std::uint16_t, kSize * kSize> cells;
    std::iota(cells.begin(), cells.end(), 0);
    for (int i = 0; i < 1 + kPellets; ++i) {
        const auto j = i + static_cast<int>(rng.below(cells.size() - i));
        std::swap(cells[i], cells[j]);
    }
    agent_row_ = cells[0] / kSize;
    agent_col_ = cells[0] % kSize;
    for (int i = 1; i <= kPellets; ++i) pellets_[cells[i]] = true;
    pellets_left_ = kPellets;
}

double GridWorld::step(int action) {
    if (done()) throw Error("GridWorld: step on finished episode");
    apply_move(action, agent_row_, agent_col_);
    ++steps_;
    double reward = 0.0;
    const int cell = agent_row_ * kSize + agent_col_;
    if (pellets_[cell]) {
        pellets_[cell] = false;
        --pellets_left_;
        reward = 1.0;
    }
    total_reward_ += reward;
    return reward;
}

void GridWorld::observe(std::vector<std::uint16_t>& active) const {
    active.clear();
    active.push_back(static_cast<std::uint16_t>(agent_row_ * kSize + agent_col_));
    for (int cell = 0; cell < kSize * kSize; ++cell)
        if (pellets_[cell]) active.push_back(static_cast<std::uint16_t>(kSize * kSize + cell));
}

int expert_action(const GridWorld& world) {
    const int current = nearest_pellet_distance(world, world.agent_row(), world.agent_col());
    for (int action = 0; action < kActions; ++action) {
        int row = world.agent_row(), col = world.agent_col();
        apply_move(action, row, col);
        if (nearest_pellet_distance(world, row, col) == current - 1) return action;
    }
    // Unreachable on an open grid with at least one pellet left.
    return 0;
}

// ---------------------------------------------------------------------------
// Expert data
// ---------------------------------------------------------------------------

ExpertDataset generate_expert_dataset(int episodes, std::uint64_t seed) {
    if (episodes < 1) throw Error("generate_expert_dataset: episodes must be >= 1");
    ExpertDataset dataset;
    dataset.episodes = episodes;
    std::vector<std::uint16_t> active;
    for (int ep = 0; ep < episodes; ++ep) {
        GridWorld world(Rng::derive(seed, static_cast<std::uint64_t>(ep)));
        while (!world.done()) {
            world.observe(active);
            const int action = expert_action(world);
            ExpertSample sample;
            sample.active_count = static_cast<std::uint8_t>(active.size());
            std::copy(active.begin(), active.end(), sample.active.begin());
            sample.action = static_cast<std::uint8_t>(action);
            dataset.samples.push_back(sample);
            world.step(action);
        }
    }
    return dataset;
}

double expert_mean_return(int episodes, std::uint64_t seed) {
    double total = 0.0;
    for (int ep = 0; ep < episodes; ++ep) {
        GridWorld world(Rng::derive(seed, static_cast<std::uint64_t>(ep)));
        while (!world.done()) world.step(expert_action(world));
        total += world.total_reward();
    }
    return total / static_cast<double>(episodes);
}

// ---------------------------------------------------------------------------
// BcPolicy
// ---------------------------------------------------------------------------

BcPolicy::BcPolicy(int width) : width_(width) {
    if (width < 1) throw Error("BcPolicy: width must be >= 1");
    params_.assign(static_cast<std::size_t>(param_count()), 0.0);
    hidden_buffer_.resize(static_cast<std::size_t>(width));
}

BcPolicy BcPolicy::random_init(int width, std::uint64_t seed) {
    BcPolicy policy(width);
    Rng rng(seed);
    const double w1_std = std::sqrt(2.0 / static_cast<double>(kObsDim));
    const double w2_std = std::sqrt(2.0 / static_cast<double>(width));
    double* w1 = policy.params_.data();
    for (int i = 0; i < width * kObsDim; ++i) w1[i] = w1_std * rng.normal();
    double* w2 = policy.params_.data() + width * kObsDim + width;
    for (int i = 0; i < kActions * width; ++i) w2[i] = w2_std * rng.normal();
    // Biases stay zero.
    return policy;
}

std::int64_t BcPolicy::param_count_for_width(int width) {
    return static_cast<std::int64_t>(width) * (kObsDim + kActions) + width + kActions;
}

std::int64_t BcPolicy::param_count() const { return param_count_for_width(width_); }

void BcPolicy::forward(std::span<const std::uint16_t> active, int active_count,
                       std::vector<double>& hidden, std::array<double, 4>& logits) const {
    const int w = width_;
    const double* w1 = params_.data();                       // w x kObsDim
    const double* b1 = params_.data() + w * kObsDim;         // w
    const double* w2 = b1 + w;                               // kActions x w
    const double* b2 = w2 + kActions * w;                    // kActions

    hidden.assign(static_cast<std::size_t>(w), 0.0);
    for (int j = 0; j < w; ++j) {
        double pre = b1[j];
        const double* row = w1 + static_cast<std::size_t>(j) * kObsDim;
        for (int s = 0; s < active_count; ++s) pre += row[active[s]];
        hidden[j] = pre > 0.0 ? pre : 0.0;
    }
    for (int a = 0; a < kActions; ++a) {
        double z = b2[a];
        const double* row = w2 + static_cast<std::size_t>(a) * w;
        for (int j = 0; j < w; ++j) z += row[j] * hidden[j];
        logits[a] = z;
    }
}

void BcPolicy::action_probs(std::span<const std::uint16_t> active, int active_count,
                            std::array<double, 4>& probs) const {
    std::array<double, 4> logits;
    forward(active, active_count, hidden_buffer_, logits);
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (int a = 0; a < kActions; ++a) {
        probs[a] = std::exp(logits[a] - max_logit);
        sum += probs[a];
    }
    for (double& p : probs) p /= sum;
}

int BcPolicy::greedy_action(std::span<const std::uint16_t> active, int active_count) const {
    std::array<double, 4> probs;
    action_probs(active, active_count, probs);
    int best = 0;
    for (int a = 1; a < kActions; ++a)
        if (probs[a] > probs[best]) best = a;
    return best;
}

int BcPolicy::sample_action(std::span<const std::uint16_t> active, int active_count,
                            Rng& rng) const {
    std::array<double, 4> probs;
    action_probs(active, active_count, probs);
    const double u = rng.uniform();
    double cum = 0.0;
    for (int a = 0; a < kActions; ++a) {
        cum += probs[a];
        if (u < cum) return a;
    }
    return kActions - 1;
}

double BcPolicy::mean_cross_entropy(std::span<const ExpertSample> samples) const {
    if (samples.empty()) throw Error("mean_cross_entropy: empty sample set");
    double total = 0.0;
    std::array<double, 4> probs;
    for (const auto& sample : samples) {
        action_probs(std::span<const std::uint16_t>(sample.active.data(), sample.active_count),
                     sample.active_count, probs);
        total += -std::log(std::max(probs[sample.action], 1e-300));
    }
    return total / static_cast<double>(samples.size());
}

double BcPolicy::batch_gradient(std::span<const ExpertSample> batch,
                                std::vector<double>& grad) const {
    if (batch.empty()) throw Error("batch_gradient: empty batch");
    const int w = width_;
    grad.assign(params_.size(), 0.0);

    const double* w2 = params_.data() + w * kObsDim + w;
    double* g_w1 = grad.data();
    double* g_b1 = grad.data() + w * kObsDim;
    double* g_w2 = g_b1 + w;
    double* g_b2 = g_w2 + kActions * w;

    std::vector<double> hidden(static_cast<std::size_t>(w));
    std::vector<double> d_hidden(static_cast<std::size_t>(w));
    std::array<double, 4> logits;
    double total_loss = 0.0;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());

    for (const auto& sample : batch) {
        const std::span<const std::uint16_t> active(sample.active.data(), sample.active_count);
        forward(active, sample.active_count, hidden, logits);

        const double max_logit = *std::max_element(logits.begin(), logits.end());
        std::array<double, 4> probs;
        double sum = 0.0;
        for (int a = 0; a < kActions; ++a) {
            probs[a] = std::exp(logits[a] - max_logit);
            sum += probs[a];
        }
        for (double& p : probs) p /= sum;
        total_loss += -std::log(std::max(probs[sample.action], 1e-300));

        // d loss / d logit = softmax - one_hot(action), averaged over the batch.
        std::array<double, 4> d_logits = probs;
        d_logits[sample.action] -= 1.0;

        std::fill(d_hidden.begin(), d_hidden.end(), 0.0);
        for (int a = 0; a < kActions; ++a) {
            const double dz = d_logits[a] * inv_batch;
            g_b2[a] += dz;
            double* g_row = g_w2 + static_cast<std::size_t>(a) * w;
            const double* w_row = w2 + static_cast<std::size_t>(a) * w;
            for (int j = 0; j < w; ++j) {
                g_row[j] += dz * hidden[j];
                d_hidden[j] += dz * w_row[j];
            }
        }
        for (int j = 0; j < w; ++j) {
            if (hidden[j] <= 0.0) continue;  // ReLU gate
            const double dj = d_hidden[j];
            g_b1[j] += dj;
            double* g_row = g_w1 + static_cast<std::size_t>(j) * kObsDim;
            for (int s = 0; s < sample.active_count; ++s) g_row[sample.active[s]] += dj;
        }
    }
    return total_loss * inv_batch;
}

double BcPolicy::train_batch(std::span<const ExpertSample> batch, double learning_rate) {
    const double loss = batch_gradient(batch, grad_buffer_);
    for (std::size_t i = 0; i < params_.size(); ++i) params_[i] -= learning_rate * grad_buffer_[i];
    return loss;
}

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

std::vector<TrainSnapshot> train_bc(const ExpertDataset& train_data,
                                    const ExpertDataset& validation_data, int width,
                                    double sample_budget, std::span<const double> snapshots,
                                    const TrainConfig& config, std::uint64_t run_seed) {
    if (train_data.samples.empty()) throw Error("train_bc: empty training dataset");
    if (validation_data.samples.empty()) throw Error("train_bc: empty validation dataset");
    if (snapshots.empty()) throw Error("train_bc: no snapshots requested");
    double prev = 0.0;
    for (const double s : snapshots) {
        if (!(s >= 1.0) || !(s > prev)) throw Error("train_bc: snapshots must be ascending and >= 1");
        prev = s;
    }
    if (snapshots.back() > sample_budget)
        throw Error("train_bc: largest snapshot exceeds the sample budget");

    BcPolicy policy = BcPolicy::random_init(width, Rng::derive(run_seed, 0xA));
    Rng batch_rng(Rng::derive(run_seed, 0xB));

    std::vector<TrainSnapshot> result;
    std::vector<ExpertSample> batch(static_cast<std::size_t>(config.batch_size));
    std::int64_t processed = 0;
    int divergence_streak = 0;
    const double divergence_ceiling = 10.0 * std::log(4.0);

    for (const double snapshot_target : snapshots) {
        const auto target = static_cast<std::int64_t>(std::llround(snapshot_target));
        while (processed < target) {
            const auto n = static_cast<std::size_t>(
                std::min<std::int64_t>(config.batch_size, target - processed));
            for (std::size_t i = 0; i < n; ++i)
                batch[i] = train_data.samples[batch_rng.below(train_data.samples.size())];
            policy.train_batch(std::span<const ExpertSample>(batch.data(), n),
                               config.learning_rate);
            processed += static_cast<std::int64_t>(n);
        }

        TrainSnapshot snap{static_cast<double>(processed),
                           policy.mean_cross_entropy(validation_data.samples), policy};
        if (snap.validation_loss > divergence_ceiling) {
            if (++divergence_streak >= 3) {
                char buf[160];
                std::snprintf(buf, sizeof(buf),
                              "train_bc diverged: width %d, validation loss %.4f > %.4f at 3 "
                              "consecutive snapshots (samples %lld)",
                              width, snap.validation_loss, divergence_ceiling,
                              static_cast<long long>(processed));
                throw Error(buf);
            }
        } else {
            divergence_streak = 0;
        }
        result.push_back(std::move(snap));
    }
    return result;
}

double evaluate_return(const BcPolicy& policy, int episodes, std::uint64_t seed,
                       bool sample_actions) {
    if (episodes < 1) throw Error("evaluate_return: episodes must be >= 1");
    double total = 0.0;
    std::vector<std::uint16_t> active;
    for (int ep = 0; ep < episodes; ++ep) {
        const std::uint64_t episode_seed = Rng::derive(seed, static_cast<std::uint64_t>(ep));
        GridWorld world(episode_seed);
        Rng action_rng(Rng::derive(episode_seed, 0x5A));
        while (!world.done()) {
            world.observe(active);
            const int count = static_cast<int>(active.size());
            const int action = sample_actions
                                   ? policy.sample_action(active, count, action_rng)
                                   : policy.greedy_action(active, count);
            world.step(action);
        }
        total += world.total_reward();
    }
    return total / static_cast<double>(episodes);
}

IsoflopRunResult run_isoflop_experiment(const TrainConfig& config) {
    if (config.widths.size() < 4) throw Error("run_isoflop_experiment: need >= 4 widths");
    if (config.flop_budgets.size() < 4) throw Error("run_isoflop_experiment: need >= 4 budgets");
    for (std::size_t i = 1; i < config.flop_budgets.size(); ++i)
        if (!(config.flop_budgets[i] > config.flop_budgets[i - 1]))
            throw Error("run_isoflop_experiment: budgets must be strictly ascending");

    const ExpertDataset train_data =
        generate_expert_dataset(config.dataset_episodes, Rng::derive(config.seed, kDatasetStream));
    const ExpertDataset validation_data = generate_expert_dataset(
        config.validation_trajectories, Rng::derive(config.seed, kValidationStream));
    const std::uint64_t eval_seed = Rng::derive(config.seed, kEvalStream);

    IsoflopRunResult result;
    result.expert_return = expert_mean_return(1000, eval_seed);
    result.random_baseline =
        evaluate_return(BcPolicy(1), config.rollout_episodes, eval_seed, /*sample_actions=*/true);

    for (std::size_t wi = 0; wi < config.widths.size(); ++wi) {
        const int width = config.widths[wi];
        const double params = static_cast<double>(BcPolicy::param_count_for_width(width));

        std::vector<double> snapshots;
        std::vector<double> nominal;
        for (const double budget : config.flop_budgets) {
            const double samples = std::llround(budget / (6.0 * params));
            if (samples < 1.0 || samples > config.max_samples) {
                char buf[140];
                std::snprintf(buf, sizeof(buf),
                              "width %d: budget %.3g unreachable (needs %.6g samples, cap %.6g)",
                              width, budget, samples, config.max_samples);
                result.warnings.emplace_back(buf);
                continue;
            }
            snapshots.push_back(samples);
            nominal.push_back(budget);
        }
        if (snapshots.empty()) {
            result.warnings.emplace_back("width " + std::to_string(width) +
                                         ": no reachable budgets, width skipped");
            continue;
        }

        const std::uint64_t run_seed = Rng::derive(config.seed, kWidthStreamBase + wi);
        const std::vector<TrainSnapshot> snaps = train_bc(
            train_data, validation_data, width, snapshots.back(), snapshots, config, run_seed);

        for (std::size_t si = 0; si < snaps.size(); ++si) {
            const double mean_return = evaluate_return(snaps[si].policy, config.rollout_episodes,
                                                       eval_seed, config.sample_actions);
            ExperimentRecord rec;
            rec.domain = "gridworld";
            rec.flops = 6.0 * params * snaps[si].samples;
            rec.params = static_cast<std::int64_t>(params);
            rec.samples = snaps[si].samples;
            rec.loss = snaps[si].validation_loss;
            rec.mean_return = mean_return;
            rec.seed = static_cast<std::int64_t>(run_seed);
            rec.meta["width"] = std::to_string(width);
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", nominal[si]);
            rec.meta["nominal_flops"] = buf;

            rec.setting = Setting::bc_loss;
            result.records.push_back(rec);
            rec.setting = Setting::bc_return;
            result.records.push_back(rec);
        }
    }
    if (result.records.empty()) throw Error("run_isoflop_experiment: no budgets were reachable");
    return result;
}

}  // namespace scalekit
