// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "scalekit/records.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

#include "scalekit/error.hpp"

namespace scalekit {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_int(std::int64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
    return buf;
}

std::string json_quote(const std::string& s) { return json(s).dump(); }

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
    throw Error("line " + std::to_string(line_no) + ": " + what);
}

std::string stringify_json_value(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

// ---------------------------------------------------------------------------
// JSONL
// ---------------------------------------------------------------------------

ExperimentRecord record_from_json(const json& obj, std::size_t line_no) {
    if (!obj.is_object()) fail_line(line_no, "expected a JSON object");
    ExperimentRecord rec;

    auto require_number = [&](const char* key) -> double {
        if (!obj.contains(key)) fail_line(line_no, std::string("missing field '") + key + "'");
        const json& v = obj.at(key);
        if (!v.is_number()) fail_line(line_no, std::string("field '") + key + "' must be a number");
        return v.get<double>();
    };

    if (obj.contains("domain")) {
        if (!obj.at("domain").is_string()) fail_line(line_no, "field 'domain' must be a string");
        rec.domain = obj.at("domain").get<std::string>();
    }
    if (!obj.contains("setting")) fail_line(line_no, "missing field 'setting'");
    try {
        rec.setting = setting_from_string(obj.at("setting").get<std::string>());
    } catch (const std::exception&) {
        fail_line(line_no, "field 'setting' must be one of bc_loss, bc_return, rl_return");
    }

    rec.flops = require_number("flops");
    const double params = require_number("params");
    if (params != std::floor(params))
        fail_line(line_no, "field 'params' must be an integer");
    rec.params = static_cast<std::int64_t>(params);
    rec.samples = require_number("samples");

    if (obj.contains("loss") && !obj.at("loss").is_null()) {
        if (!obj.at("loss").is_number()) fail_line(line_no, "field 'loss' must be a number");
        rec.loss = obj.at("loss").get<double>();
    }
    if (obj.contains("mean_return") && !obj.at("mean_return").is_null()) {
        if (!obj.at("mean_return").is_number())
            fail_line(line_no, "field 'mean_return' must be a number");
        rec.mean_return = obj.at("mean_return").get<double>();
    }
    if (obj.contains("seed")) {
        if (!obj.at("seed").is_number_integer()) fail_line(line_no, "field 'seed' must be an integer");
        rec.seed = obj.at("seed").get<std::int64_t>();
    }
    if (obj.contains("meta")) {
        if (!obj.at("meta").is_object()) fail_line(line_no, "field 'meta' must be an object");
        for (const auto& [k, v] : obj.at("meta").items()) rec.meta[k] = stringify_json_value(v);
    }
    // Unknown top-level keys are kept, stringified, in meta.
    static const std::set<std::string> known = {"domain", "setting", "flops",       "params",
                                               "samples", "loss",   "mean_return", "seed",
                                               "meta"};
    for (const auto& [k, v] : obj.items()) {
        if (!known.count(k)) rec.meta[k] = stringify_json_value(v);
    }

    try {
        rec.validate();
    } catch (const Error& e) {
        fail_line(line_no, e.what());
    }
    return rec;
}

std::string record_to_jsonl(const ExperimentRecord& rec) {
    std::string out = "{";
    out += "\"domain\":" + json_quote(rec.domain);
    out += ",\"setting\":" + json_quote(to_string(rec.setting));
    out += ",\"flops\":" + fmt_double(rec.flops);
    out += ",\"params\":" + fmt_int(rec.params);
    out += ",\"samples\":" + fmt_double(rec.samples);
    if (rec.loss) out += ",\"loss\":" + fmt_double(*rec.loss);
    if (rec.mean_return) out += ",\"mean_return\":" + fmt_double(*rec.mean_return);
    out += ",\"seed\":" + fmt_int(rec.seed);
    out += ",\"meta\":{";
    bool first = true;
    for (const auto& [k, v] : rec.meta) {
        if (!first) out += ",";
        out += json_quote(k) + ":" + json_quote(v);
        first = false;
    }
    out += "}}";
    return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

constexpr const char* kCsvHeader = "domain,setting,flops,params,samples,loss,mean_return,seed,meta";

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) fail_line(line_no, "unterminated quoted CSV field");
    fields.push_back(cur);
    return fields;
}

std::string encode_meta(const std::map<std::string, std::string>& meta) {
    std::string out;
    for (const auto& [k, v] : meta) {
        if (!out.empty()) out += ";";
        out += k + "=" + v;
    }
    return out;
}

std::map<std::string, std::string> decode_meta(const std::string& s) {
    std::map<std::string, std::string> meta;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t end = s.find(';', pos);
        if (end == std::string::npos) end = s.size();
        const std::string item = s.substr(pos, end - pos);
        const std::size_t eq = item.find('=');
        if (eq != std::string::npos) meta[item.substr(0, eq)] = item.substr(eq + 1);
        pos = end + 1;
    }
    return meta;
}

double parse_csv_double(const std::string& field, const char* name, std::size_t line_no) {
    try {
        std::size_t consumed = 0;
        const double v = std::stod(field, &consumed);
        if (consumed != field.size()) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        fail_line(line_no, std::string("field '") + name + "' is not a number: '" + field + "'");
    }
}

std::int64_t parse_csv_int(const std::string& field, const char* name, std::size_t line_no) {
    try {
        std::size_t consumed = 0;
        const long long v = std::stoll(field, &consumed);
        if (consumed != field.size()) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        fail_line(line_no, std::string("field '") + name + "' is not an integer: '" + field + "'");
    }
}

std::vector<ExperimentRecord> parse_csv(std::istream& in) {
    std::vector<ExperimentRecord> records;
    std::string line;
    std::size_t line_no = 0;

    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        header = split_csv_line(line, line_no);
        break;
    }
    if (header.empty()) return records;

    auto column = [&](const char* name) -> int {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    };
    const int c_domain = column("domain"), c_setting = column("setting"), c_flops = column("flops"),
              c_params = column("params"), c_samples = column("samples"), c_loss = column("loss"),
              c_return = column("mean_return"), c_seed = column("seed"), c_meta = column("meta");
    if (c_setting < 0 || c_flops < 0 || c_params < 0 || c_samples < 0)
        throw Error("csv header must contain setting, flops, params, samples");

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line, line_no);
        auto get = [&](int idx) -> std::string {
            return (idx >= 0 && static_cast<std::size_t>(idx) < fields.size())
                       ? fields[static_cast<std::size_t>(idx)]
                       : std::string();
        };

        ExperimentRecord rec;
        rec.domain = get(c_domain);
        try {
            rec.setting = setting_from_string(get(c_setting));
        } catch (const std::exception&) {
            fail_line(line_no, "field 'setting' must be one of bc_loss, bc_return, rl_return");
        }
        rec.flops = parse_csv_double(get(c_flops), "flops", line_no);
        rec.params = parse_csv_int(get(c_params), "params", line_no);
        rec.samples = parse_csv_double(get(c_samples), "samples", line_no);
        if (const std::string f = get(c_loss); !f.empty())
            rec.loss = parse_csv_double(f, "loss", line_no);
        if (const std::string f = get(c_return); !f.empty())
            rec.mean_return = parse_csv_double(f, "mean_return", line_no);
        if (const std::string f = get(c_seed); !f.empty())
            rec.seed = parse_csv_int(f, "seed", line_no);
        rec.meta = decode_meta(get(c_meta));

        try {
            rec.validate();
        } catch (const Error& e) {
            fail_line(line_no, e.what());
        }
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace

std::string to_string(Setting setting) {
    switch (setting) {
        case Setting::bc_loss: return "bc_loss";
        case Setting::bc_return: return "bc_return";
        case Setting::rl_return: return "rl_return";
    }
    throw Error("unknown setting");
}

Setting setting_from_string(const std::string& name) {
    if (name == "bc_loss") return Setting::bc_loss;
    if (name == "bc_return") return Setting::bc_return;
    if (name == "rl_return") return Setting::rl_return;
    throw Error("unknown setting '" + name + "'");
}

void ExperimentRecord::validate() const {
    if (!(flops > 0.0)) throw Error("flops must be > 0");
    if (params < 1) throw Error("params must be >= 1");
    if (!(samples > 0.0)) throw Error("samples must be > 0");
    if (setting == Setting::bc_loss) {
        if (!loss) throw Error("setting bc_loss requires field 'loss'");
        if (*loss < 0.0) throw Error("loss must be >= 0");
    } else {
        if (!mean_return)
            throw Error("setting " + to_string(setting) + " requires field 'mean_return'");
    }
    if (loss && *loss < 0.0) throw Error("loss must be >= 0");
}

void validate_flop_rule(const ExperimentRecord& record, const FlopRule& rule) {
    const double expected = rule_flops(rule, static_cast<double>(record.params), record.samples);
    if (std::abs(record.flops - expected) / record.flops > 1e-6)
        throw Error("record flops " + std::to_string(record.flops) +
                    " deviates from rule value " + std::to_string(expected) +
                    " by more than 1e-6 relative");
}

std::vector<ExperimentRecord> parse_records(std::istream& in, RecordFormat format) {
    if (format == RecordFormat::csv) return parse_csv(in);

    std::vector<ExperimentRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            fail_line(line_no, std::string("malformed json: ") + e.what());
        }
        records.push_back(record_from_json(obj, line_no));
    }
    return records;
}

void serialize_records(std::ostream& out, std::span<const ExperimentRecord> records,
                       RecordFormat format) {
    if (format == RecordFormat::jsonl) {
        for (const auto& rec : records) out << record_to_jsonl(rec) << "\n";
        return;
    }
    out << kCsvHeader << "\n";
    for (const auto& rec : records) {
        out << csv_quote(rec.domain) << "," << to_string(rec.setting) << ","
            << fmt_double(rec.flops) << "," << fmt_int(rec.params) << ","
            << fmt_double(rec.samples) << "," << (rec.loss ? fmt_double(*rec.loss) : "") << ","
            << (rec.mean_return ? fmt_double(*rec.mean_return) : "") << "," << fmt_int(rec.seed)
            << "," << csv_quote(encode_meta(rec.meta)) << "\n";
    }
}

Setting BudgetGroup::setting() const {
    if (records.empty()) throw Error("empty budget group has no setting");
    return records.front().setting;
}

std::vector<BudgetGroup> group_by_budget(std::span<const ExperimentRecord> records,
                                         double rel_tol) {
    if (!(rel_tol > 0.0 && rel_tol < 0.5)) throw Error("rel_tol out of range (0, 0.5)");
    if (records.empty()) throw Error("group_by_budget: no records");
    for (const auto& rec : records)
        if (rec.setting != records.front().setting)
            throw Error("group_by_budget: mixed settings in input");

    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return records[a].flops < records[b].flops;
    });

    std::vector<BudgetGroup> groups;
    double log_sum = 0.0;
    for (const std::size_t idx : order) {
        const double f = records[idx].flops;
        bool start_new = groups.empty();
        if (!start_new) {
            const double gmean =
                std::exp(log_sum / static_cast<double>(groups.back().records.size()));
            start_new = std::abs(f - gmean) / gmean > rel_tol;
        }
        if (start_new) {
            groups.push_back(BudgetGroup{});
            log_sum = 0.0;
        }
        groups.back().records.push_back(records[idx]);
        log_sum += std::log(f);
        groups.back().budget = std::exp(log_sum / static_cast<double>(groups.back().records.size()));
    }
    return groups;
}

}  // namespace scalekit
