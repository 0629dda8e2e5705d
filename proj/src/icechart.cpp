// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors

#include "floeberg/icechart.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "floeberg/check.hpp"

namespace floeberg::icechart {

namespace {

constexpr double kSumTol = 1e-12;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

std::optional<int> parse_int(std::string_view s) {
    int v = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty()) return std::nullopt;
    return v;
}

}  // namespace

const char* class_name(int entry) {
    switch (entry) {
        case 0: return "water";
        case 1: return "young_ice";
        case 2: return "first_year_ice";
        case 3: return "multiyear_ice";
    }
    return "?";
}

StageEntry::StageEntry(int v) : value(v) {
    FLB_REQUIRE(v >= 0 && v < kNumClasses, "StageEntry: value ", v, " outside [0,3]");
}

EggCode::EggCode(int ct_, int ca_, int cb_, int cc_, StageEntry sa_, StageEntry sb_,
                 StageEntry sc_)
    : ct(ct_), ca(ca_), cb(cb_), cc(cc_), sa(sa_), sb(sb_), sc(sc_) {
    FLB_REQUIRE(ct >= 0 && ct <= 10, "EggCode: ct ", ct, " outside [0,10]");
    FLB_REQUIRE(ca >= 0 && ca <= 10, "EggCode: ca ", ca, " outside [0,10]");
    FLB_REQUIRE(cb >= 0 && cb <= 10, "EggCode: cb ", cb, " outside [0,10]");
    FLB_REQUIRE(cc >= 0 && cc <= 10, "EggCode: cc ", cc, " outside [0,10]");
    FLB_REQUIRE(ca + cb + cc == ct, "EggCode: ca+cb+cc = ", ca + cb + cc,
                " does not equal ct = ", ct);
}

RegionalLabel::RegionalLabel() : conc_{1.0, 0.0, 0.0, 0.0} {}

RegionalLabel::RegionalLabel(const std::array<double, 4>& conc) : conc_(conc) {
    double sum = 0.0;
    for (double c : conc_) {
        FLB_REQUIRE(c >= 0.0 && c <= 1.0, "RegionalLabel: component ", c,
                    " outside [0,1]");
        sum += c;
    }
    FLB_REQUIRE(std::abs(sum - 1.0) <= kSumTol,
                "RegionalLabel: components sum to ", sum, ", expected 1");
}

StageMapping StageMapping::defaults() {
    StageMapping m;
    for (int i = 0; i < kNumClasses; ++i) m.map_[i] = i;
    for (int code : {81, 82, 83, 84, 85}) m.map_[code] = 1;
    for (int code : {86, 87, 88, 89, 91, 93}) m.map_[code] = 2;
    for (int code : {95, 96, 97, 98}) m.map_[code] = 3;
    return m;
}

StageMapping StageMapping::parse_csv(std::string_view text) {
    StageMapping m;
    std::size_t pos = 0;
    int row = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line =
            trim(text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (line.empty()) continue;
        ++row;
        const auto fields = split_csv(line);
        FLB_CHECK_DATA(fields.size() == 2, "stage mapping row ", row,
                       ": expected 2 fields, got ", fields.size());
        const auto code = parse_int(fields[0]);
        const auto entry = parse_int(fields[1]);
        FLB_CHECK_DATA(code && entry, "stage mapping row ", row, ": non-integer field");
        FLB_CHECK_DATA(*entry >= 0 && *entry < kNumClasses, "stage mapping row ", row,
                       ": entry ", *entry, " outside [0,3]");
        m.map_[*code] = *entry;
    }
    return m;
}

StageEntry StageMapping::map(int code) const {
    const auto it = map_.find(code);
    FLB_REQUIRE(it != map_.end(), "stage mapping has no entry for code ", code);
    return StageEntry(it->second);
}

StageEntry map_stage(int code, const StageMapping& mapping) { return mapping.map(code); }

ChartTable parse_chart(std::string_view text, const StageMapping& mapping,
                       std::vector<std::string>* warnings) {
    ChartTable table;
    std::size_t pos = 0;
    bool header_seen = false;
    int row = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line =
            trim(text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (line.empty()) continue;
        if (!header_seen) {
            const auto fields = split_csv(line);
            static const char* expect[8] = {"polygon_id", "ct", "ca", "cb",
                                            "cc",         "sa", "sb", "sc"};
            FLB_CHECK_DATA(fields.size() == 8, "chart header: expected 8 columns, got ",
                           fields.size());
            for (int i = 0; i < 8; ++i)
                FLB_CHECK_DATA(fields[static_cast<std::size_t>(i)] == expect[i],
                               "chart header: column ", i + 1, " is '",
                               std::string(fields[static_cast<std::size_t>(i)]),
                               "', expected '", expect[i], "'");
            header_seen = true;
            continue;
        }
        ++row;
        const auto fields = split_csv(line);
        const auto id = fields.empty() ? std::nullopt : parse_int(fields[0]);
        FLB_CHECK_DATA(id && *id >= 0, "chart row ", row, ": bad polygon id");
        FLB_CHECK_DATA(!table.contains(*id), "chart row ", row, ": duplicate polygon id ",
                       *id);

        if (fields.size() == 2 && fields[1] == "X") {
            table.entries[*id] = std::nullopt;
            continue;
        }
        FLB_CHECK_DATA(fields.size() == 8, "chart row ", row,
                       ": expected 8 fields (or 'id,X'), got ", fields.size());
        int vals[7];
        for (int i = 0; i < 7; ++i) {
            const auto v = parse_int(fields[static_cast<std::size_t>(i) + 1]);
            FLB_CHECK_DATA(v, "chart row ", row, ": non-integer field '",
                           std::string(fields[static_cast<std::size_t>(i) + 1]), "'");
            vals[i] = *v;
        }
        for (int i = 0; i < 4; ++i)
            FLB_CHECK_DATA(vals[i] >= 0 && vals[i] <= 10, "chart row ", row,
                           ": concentration ", vals[i], " outside [0,10]");
        FLB_CHECK_DATA(vals[1] + vals[2] + vals[3] == vals[0], "chart row ", row,
                       ": ca+cb+cc != ct (", vals[1], "+", vals[2], "+", vals[3],
                       " != ", vals[0], ")");
        StageEntry stages[3];
        for (int i = 0; i < 3; ++i) {
            const int code = vals[4 + i];
            FLB_CHECK_DATA(mapping.defined(code), "chart row ", row,
                           ": stage code ", code, " not in mapping");
            stages[i] = mapping.map(code);
        }
        const EggCode egg(vals[0], vals[1], vals[2], vals[3], stages[0], stages[1],
                          stages[2]);
        std::vector<std::string> local;
        const RegionalLabel label = eggcode_to_label(egg, warnings ? &local : nullptr);
        if (warnings)
            for (auto& w : local)
                warnings->push_back(msg("chart row ", row, ": ", w));
        table.entries[*id] = label;
    }
    FLB_CHECK_DATA(header_seen, "chart: empty file");
    return table;
}

std::string write_chart(const ChartTable& table) {
    std::ostringstream os;
    os << "polygon_id,ct,ca,cb,cc,sa,sb,sc\n";
    for (const auto& [id, entry] : table.entries) {
        if (!entry) {
            os << id << ",X\n";
            continue;
        }
        const EggCode egg = label_to_eggcode(*entry);
        os << id << ',' << egg.ct << ',' << egg.ca << ',' << egg.cb << ',' << egg.cc
           << ',' << egg.sa.value << ',' << egg.sb.value << ',' << egg.sc.value << '\n';
    }
    return os.str();
}

RegionalLabel eggcode_to_label(const EggCode& egg, std::vector<std::string>* warnings) {
    // Accumulate in integer tenths so components are exact multiples of 0.1.
    std::array<int, 4> tenths{10 - egg.ct, 0, 0, 0};
    const std::pair<int, StageEntry> partials[3] = {
        {egg.ca, egg.sa}, {egg.cb, egg.sb}, {egg.cc, egg.sc}};
    for (const auto& [conc, stage] : partials) {
        if (stage.value == 0 && conc > 0 && warnings)
            warnings->push_back(msg("partial concentration ", conc,
                                    "/10 carries stage 0; counted as open water"));
        tenths[static_cast<std::size_t>(stage.value)] += conc;
    }
    std::array<double, 4> conc{};
    for (int i = 0; i < 4; ++i) conc[static_cast<std::size_t>(i)] = tenths[static_cast<std::size_t>(i)] / 10.0;
    return RegionalLabel(conc);
}

EggCode label_to_eggcode(const RegionalLabel& label) {
    // Largest-remainder rounding to integer tenths summing to 10. This is the
    // minimax integerization: each component lands within one tenth of the
    // input, and within half a tenth whenever nearest-rounding already sums
    // correctly.
    std::array<double, 4> t{};
    std::array<int, 4> n{};
    int assigned = 0;
    for (int i = 0; i < 4; ++i) {
        t[static_cast<std::size_t>(i)] = label[i] * 10.0;
        n[static_cast<std::size_t>(i)] = static_cast<int>(std::floor(t[static_cast<std::size_t>(i)]));
        assigned += n[static_cast<std::size_t>(i)];
    }
    int leftover = 10 - assigned;
    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double fa = t[static_cast<std::size_t>(a)] - n[static_cast<std::size_t>(a)];
        const double fb = t[static_cast<std::size_t>(b)] - n[static_cast<std::size_t>(b)];
        if (fa != fb) return fa > fb;
        return a < b;
    });
    for (int i = 0; i < leftover; ++i) ++n[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];

    EggCode egg;
    egg.ct = 10 - n[0];
    // Slots thickest-first; absent slots stay (0, stage 0).
    int slot = 0;
    int* cs[3] = {&egg.ca, &egg.cb, &egg.cc};
    StageEntry* ss[3] = {&egg.sa, &egg.sb, &egg.sc};
    for (int cls = 3; cls >= 1; --cls) {
        if (n[static_cast<std::size_t>(cls)] > 0) {
            *cs[slot] = n[static_cast<std::size_t>(cls)];
            *ss[slot] = StageEntry(cls);
            ++slot;
        }
    }
    return egg;
}

std::optional<int> dominant_class(const RegionalLabel& label, double threshold) {
    FLB_REQUIRE(threshold > 0.0 && threshold < 1.0,
                "dominant_class: threshold must lie in (0,1)");
    int best = 0;
    for (int i = 1; i < 4; ++i)
        if (label[i] > label[best]) best = i;
    if (label[best] > threshold) return best;
    return std::nullopt;
}

}  // namespace floeberg::icechart
