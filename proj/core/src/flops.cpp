// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "scalekit/flops.hpp"

#include <string>

#include "scalekit/error.hpp"

namespace scalekit {

namespace {

void check_layer(const ConvLayerSpec& spec) {
    if (spec.h_out < 1 || spec.w_out < 1 || spec.c_out < 1 || spec.c_in < 1 || spec.k < 1)
        throw Error("conv layer spec: all fields must be >= 1");
}

void check_inputs(double params, double samples) {
    if (!(params >= 1.0)) throw Error("rule_flops: params must be >= 1");
    if (!(samples > 0.0)) throw Error("rule_flops: samples must be > 0");
}

}  // namespace

double FlopRule::denominator() const {
    switch (kind_) {
        case FlopRuleKind::linear_bc: return 6.0;
        case FlopRuleKind::linear_rl: return 8.0;
        case FlopRuleKind::conv_stack:
            throw Error("FlopRule: conv_stack has no linear denominator");
    }
    throw Error("FlopRule: unknown kind");
}

double conv_forward_flops(const ConvLayerSpec& spec) {
    check_layer(spec);
    const double filter_params = static_cast<double>(spec.k) * static_cast<double>(spec.k) *
                                 static_cast<double>(spec.c_in);
    return 2.0 * static_cast<double>(spec.h_out) * static_cast<double>(spec.w_out) *
           static_cast<double>(spec.c_out) * filter_params;
}

double rule_flops(const FlopRule& rule, double params, double samples) {
    check_inputs(params, samples);
    switch (rule.kind()) {
        case FlopRuleKind::linear_bc:
        case FlopRuleKind::linear_rl:
            return rule.denominator() * params * samples;
        case FlopRuleKind::conv_stack: {
            if (rule.layers().empty())
                throw Error("rule_flops: conv_stack rule without layer specs");
            double forward = 0.0;
            for (const auto& layer : rule.layers()) forward += conv_forward_flops(layer);
            return 3.0 * forward * samples;
        }
    }
    throw Error("rule_flops: unknown rule kind");
}

double samples_for_budget(const FlopRule& rule, double budget, double params) {
    if (!rule.is_linear())
        throw Error("samples_for_budget: conv_stack rule is not invertible in closed form");
    if (!(budget > 0.0)) throw Error("samples_for_budget: budget must be > 0");
    if (!(params >= 1.0)) throw Error("samples_for_budget: params must be >= 1");
    return budget / (rule.denominator() * params);
}

}  // namespace scalekit
