// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scalekit/flops.hpp"

namespace scalekit {

enum class Setting { bc_loss, bc_return, rl_return };

std::string to_string(Setting setting);
Setting setting_from_string(const std::string& name);

/// One observation from a training-run snapshot: total compute, effective
/// parameter count, samples seen, and the metric(s) measured there.
struct ExperimentRecord {
    std::string domain;
    Setting setting = Setting::bc_loss;
    double flops = 0.0;
    std::int64_t params = 0;
    double samples = 0.0;
    std::optional<double> loss;
    std::optional<double> mean_return;
    std::int64_t seed = 0;
    std::map<std::string, std::string> meta;

    /// Throws on invariant violations: positivity of flops/params/samples,
    /// presence of the metric required by the setting.
    void validate() const;

    /// Nonpositive returns are accepted at ingestion but flagged; log-space
    /// fits exclude them.
    bool return_flagged() const { return mean_return.has_value() && *mean_return <= 0.0; }
};

/// Checks |flops - rule(params, samples)| / flops <= 1e-6 for a record
/// whose compute is supposed to follow the given accounting rule.
void validate_flop_rule(const ExperimentRecord& record, const FlopRule& rule);

enum class RecordFormat { jsonl, csv };

/// Parses records from a line-oriented stream. Errors name the line number
/// and offending field. Unknown JSONL keys are preserved in meta.
std::vector<ExperimentRecord> parse_records(std::istream& in, RecordFormat format);

/// Writes records in the given format. Numeric fields are printed with 17
/// significant digits so that parse -> serialize -> parse is the identity.
void serialize_records(std::ostream& out, std::span<const ExperimentRecord> records,
                       RecordFormat format);

/// One isoFLOP contour: records whose compute lands on the same nominal
/// budget. The budget is the geometric mean of member flops.
struct BudgetGroup {
    double budget = 0.0;
    std::vector<ExperimentRecord> records;

    Setting setting() const;
};

/// Partitions records into budget groups by relative tolerance on flops,
/// sorted ascending by budget. Members keep input order within a group
/// (ties broken by first-seen order). Singleton groups are allowed.
std::vector<BudgetGroup> group_by_budget(std::span<const ExperimentRecord> records,
                                         double rel_tol = 1e-3);

}  // namespace scalekit
