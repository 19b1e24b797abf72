// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace scalekit {

/// Output geometry of one convolutional layer; kernel is k x k over c_in
/// input channels. Biases are not counted.
struct ConvLayerSpec {
    long long h_out = 1;
    long long w_out = 1;
    long long c_out = 1;
    long long c_in = 1;
    long long k = 1;
};

enum class FlopRuleKind {
    linear_bc,   // C = 6 N D
    linear_rl,   // C = 8 N D (actor forward counted alongside the learner's)
    conv_stack,  // per-sample training FLOPs = 3 x summed layer forwards
};

/// Accounting rule connecting compute C, effective parameters N and samples
/// D. Linear rules are exactly invertible in either factor.
class FlopRule {
public:
    static FlopRule linear_bc() { return FlopRule(FlopRuleKind::linear_bc, {}); }
    static FlopRule linear_rl() { return FlopRule(FlopRuleKind::linear_rl, {}); }
    static FlopRule conv_stack(std::vector<ConvLayerSpec> layers) {
        return FlopRule(FlopRuleKind::conv_stack, std::move(layers));
    }

    FlopRuleKind kind() const { return kind_; }
    bool is_linear() const { return kind_ != FlopRuleKind::conv_stack; }

    /// The constant in C = denominator * N * D: 6 for BC, 8 for RL.
    /// Errors for conv stacks, which have no such constant.
    double denominator() const;

    const std::vector<ConvLayerSpec>& layers() const { return layers_; }

private:
    FlopRule(FlopRuleKind kind, std::vector<ConvLayerSpec> layers)
        : kind_(kind), layers_(std::move(layers)) {}

    FlopRuleKind kind_;
    std::vector<ConvLayerSpec> layers_;
};

/// Forward FLOPs of one conv layer: 2 * h_out * w_out * c_out * k^2 * c_in.
double conv_forward_flops(const ConvLayerSpec& spec);

/// Total training FLOPs for N parameters over D samples under the rule.
/// Backward is costed at twice the forward pass, so conv-stack training
/// FLOPs are 3x the summed per-sample forwards.
double rule_flops(const FlopRule& rule, double params, double samples);

/// D such that rule_flops(rule, params, D) == budget, for linear rules.
double samples_for_budget(const FlopRule& rule, double budget, double params);

}  // namespace scalekit
