// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "scalekit/error.hpp"
#include "scalekit/records.hpp"
#include "scalekit/synth.hpp"

using namespace scalekit;

namespace {

std::vector<ExperimentRecord> parse_jsonl(const std::string& text) {
    std::istringstream in(text);
    return parse_records(in, RecordFormat::jsonl);
}

std::string serialize(const std::vector<ExperimentRecord>& records, RecordFormat format) {
    std::ostringstream out;
    serialize_records(out, records, format);
    return out.str();
}

}  // namespace

TEST_CASE("parse a single well-formed jsonl record") {
    const auto records = parse_jsonl(
        R"({"setting":"bc_loss","flops":1e13,"params":1e4,"samples":1.667e8,"loss":1.2})"
        "\n");
    REQUIRE(records.size() == 1);
    CHECK(records[0].setting == Setting::bc_loss);
    CHECK(records[0].flops == 1e13);
    CHECK(records[0].params == 10000);
    CHECK(records[0].samples == 1.667e8);
    CHECK(records[0].loss == 1.2);
    CHECK_FALSE(records[0].mean_return.has_value());
}

TEST_CASE("empty stream parses to an empty list") {
    CHECK(parse_jsonl("").empty());
    std::istringstream in("");
    CHECK(parse_records(in, RecordFormat::csv).empty());
}

TEST_CASE("params below 1 is rejected with the line number") {
    CHECK_THROWS_WITH_AS(
        parse_jsonl(R"({"setting":"bc_loss","flops":1,"params":0,"samples":1,"loss":1})"),
        doctest::Contains("params must be >= 1"), Error);
    try {
        parse_jsonl(R"({"setting":"bc_loss","flops":1,"params":0,"samples":1,"loss":1})");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
}

TEST_CASE("missing metric for the setting is rejected") {
    CHECK_THROWS_WITH_AS(
        parse_jsonl(R"({"setting":"bc_loss","flops":1,"params":1,"samples":1})"),
        doctest::Contains("requires field 'loss'"), Error);
    CHECK_THROWS_WITH_AS(
        parse_jsonl(R"({"setting":"bc_return","flops":1,"params":1,"samples":1,"loss":1})"),
        doctest::Contains("requires field 'mean_return'"), Error);
}

TEST_CASE("malformed json names the line") {
    CHECK_THROWS_WITH_AS(
        parse_jsonl(R"({"setting":"bc_loss","flops":1,"params":1,"samples":1,"loss":1})"
                    "\n{not json\n"),
        doctest::Contains("line 2"), Error);
}

TEST_CASE("unknown jsonl keys are preserved in meta") {
    const auto records = parse_jsonl(
        R"({"setting":"bc_loss","flops":1,"params":1,"samples":1,"loss":1,"extra":42,"tag":"x"})");
    REQUIRE(records.size() == 1);
    CHECK(records[0].meta.at("extra") == "42");
    CHECK(records[0].meta.at("tag") == "x");
}

TEST_CASE("nonpositive mean_return is accepted but flagged") {
    const auto records = parse_jsonl(
        R"({"setting":"bc_return","flops":1,"params":1,"samples":1,"mean_return":-2.5})");
    REQUIRE(records.size() == 1);
    CHECK(records[0].return_flagged());
}

TEST_CASE("parse-serialize-parse is the identity in both formats") {
    ExperimentRecord rec;
    rec.domain = "gridworld, \"quoted\"";
    rec.setting = Setting::bc_return;
    rec.flops = 1.2345678901234567e15;
    rec.params = 123457;
    rec.samples = 9.87654321e8;
    rec.loss = 0.6931471805599453;
    rec.mean_return = 3.25;
    rec.seed = -7;
    rec.meta = {{"width", "64"}, {"note", "snapshot 3"}};

    for (const RecordFormat format : {RecordFormat::jsonl, RecordFormat::csv}) {
        const std::string once = serialize({rec}, format);
        std::istringstream in(once);
        const auto parsed = parse_records(in, format);
        REQUIRE(parsed.size() == 1);
        CHECK(parsed[0].domain == rec.domain);
        CHECK(parsed[0].setting == rec.setting);
        CHECK(parsed[0].flops == rec.flops);
        CHECK(parsed[0].params == rec.params);
        CHECK(parsed[0].samples == rec.samples);
        CHECK(parsed[0].loss == rec.loss);
        CHECK(parsed[0].mean_return == rec.mean_return);
        CHECK(parsed[0].seed == rec.seed);
        CHECK(parsed[0].meta == rec.meta);
        // Byte-stable after the first normalizing round trip.
        CHECK(serialize(parsed, format) == once);
    }
}

TEST_CASE("group_by_budget splits by relative tolerance") {
    std::vector<ExperimentRecord> records;
    for (const double f : {1e13, 1.0000001e13, 1e14}) {
        ExperimentRecord rec;
        rec.setting = Setting::bc_loss;
        rec.flops = f;
        rec.params = 10;
        rec.samples = 1.0;
        rec.loss = 1.0;
        records.push_back(rec);
    }
    const auto groups = group_by_budget(records, 0.01);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].records.size() == 2);
    CHECK(groups[1].records.size() == 1);
    CHECK(groups[0].budget < groups[1].budget);
}

TEST_CASE("group_by_budget validates rel_tol and settings") {
    std::vector<ExperimentRecord> records(1);
    records[0].setting = Setting::bc_loss;
    records[0].flops = 1.0;
    records[0].params = 1;
    records[0].samples = 1.0;
    records[0].loss = 1.0;
    CHECK_THROWS_WITH_AS(group_by_budget(records, 0.6), doctest::Contains("rel_tol out of range"),
                         Error);
    CHECK_THROWS_AS(group_by_budget({}, 0.01), Error);

    std::vector<ExperimentRecord> mixed = {records[0], records[0]};
    mixed[1].setting = Setting::bc_return;
    mixed[1].mean_return = 1.0;
    CHECK_THROWS_WITH_AS(group_by_budget(mixed, 0.01), doctest::Contains("mixed settings"), Error);
}

TEST_CASE("synthetic grid of 14 sizes x 6 budgets groups into 6 groups of 14") {
    const SynthSpec spec = test::canonical_spec(3, 0.0, 6, 14);
    const auto records = generate(spec);
    REQUIRE(records.size() == 84);
    const auto groups = group_by_budget(records, 1e-3);
    REQUIRE(groups.size() == 6);
    std::size_t total = 0;
    for (const auto& group : groups) {
        CHECK(group.records.size() == 14);
        total += group.records.size();
    }
    CHECK(total == records.size());
    for (std::size_t i = 1; i < groups.size(); ++i) CHECK(groups[i].budget > groups[i - 1].budget);
}

TEST_CASE("grouping is a partition with deterministic order") {
    Rng rng(21);
    std::vector<ExperimentRecord> records;
    for (int i = 0; i < 60; ++i) {
        ExperimentRecord rec;
        rec.setting = Setting::bc_loss;
        rec.flops = std::pow(10.0, 10.0 + 3.0 * rng.uniform());
        rec.params = 1 + static_cast<std::int64_t>(rng.below(1000));
        rec.samples = 1.0 + rng.uniform();
        rec.loss = 1.0;
        rec.seed = i;
        records.push_back(rec);
    }
    const auto groups = group_by_budget(records, 0.05);
    std::size_t total = 0;
    for (const auto& group : groups) total += group.records.size();
    CHECK(total == records.size());

    const auto again = group_by_budget(records, 0.05);
    REQUIRE(again.size() == groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        CHECK(again[g].budget == groups[g].budget);
        CHECK(again[g].records.size() == groups[g].records.size());
        for (std::size_t i = 0; i < groups[g].records.size(); ++i)
            CHECK(again[g].records[i].seed == groups[g].records[i].seed);
    }
}

TEST_CASE("validate_flop_rule accepts rule-consistent records and rejects others") {
    ExperimentRecord rec;
    rec.setting = Setting::bc_loss;
    rec.params = 1000;
    rec.samples = 2500.0;
    rec.flops = 6.0 * 1000 * 2500.0;
    rec.loss = 1.0;
    CHECK_NOTHROW(validate_flop_rule(rec, FlopRule::linear_bc()));
    rec.flops *= 1.001;
    CHECK_THROWS_AS(validate_flop_rule(rec, FlopRule::linear_bc()), Error);
    rec.flops = 8.0 * 1000 * 2500.0;
    CHECK_NOTHROW(validate_flop_rule(rec, FlopRule::linear_rl()));
}
