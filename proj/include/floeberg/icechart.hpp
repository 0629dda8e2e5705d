// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace floeberg::icechart {

/// Class indexing shared across the whole pipeline:
/// 0 = open water, 1 = young ice, 2 = first-year ice, 3 = multiyear ice.
inline constexpr int kNumClasses = 4;

const char* class_name(int entry);

/// Stage-of-development entry number.
struct StageEntry {
    int value = 0;

    StageEntry() = default;
    explicit StageEntry(int v);

    bool operator==(const StageEntry&) const = default;
};

/// One chart polygon's annotation: total concentration in tenths plus up to
/// three partial concentrations with their stage entries, thickest first.
struct EggCode {
    int ct = 0;
    int ca = 0, cb = 0, cc = 0;
    StageEntry sa, sb, sc;

    EggCode() = default;
    EggCode(int ct, int ca, int cb, int cc, StageEntry sa, StageEntry sb, StageEntry sc);

    bool operator==(const EggCode&) const = default;
};

/// Per-class concentration fractions, indexed by class entry number.
/// Components lie in [0,1] and sum to 1 within 1e-12.
class RegionalLabel {
public:
    RegionalLabel();  // all water
    explicit RegionalLabel(const std::array<double, 4>& conc);

    double operator[](int i) const { return conc_[static_cast<std::size_t>(i)]; }
    const std::array<double, 4>& conc() const { return conc_; }

    bool operator==(const RegionalLabel&) const = default;

private:
    std::array<double, 4> conc_;
};

/// Polygon id -> label; nullopt marks an excluded polygon (chart row "id,X").
struct ChartTable {
    std::map<int, std::optional<RegionalLabel>> entries;

    bool contains(int id) const { return entries.count(id) != 0; }
    bool operator==(const ChartTable&) const = default;
};

/// Mapping from external stage-of-development codes to class entry numbers.
class StageMapping {
public:
    /// Entries 0-3 map to themselves; SIGRID-3 stage codes are grouped by the
    /// thickness semantics of the four-class scheme:
    ///   81-85 (new/nilas/young/grey/grey-white)          -> 1 (young ice)
    ///   86-89, 91, 93 (first-year thin/medium/thick)     -> 2 (first-year ice)
    ///   95-98 (old/second-year/multiyear/glacier)        -> 3 (multiyear ice)
    static StageMapping defaults();

    /// Override table from CSV lines "external_code,entry".
    static StageMapping parse_csv(std::string_view text);

    bool defined(int code) const { return map_.count(code) != 0; }
    StageEntry map(int code) const;
    void set(int code, StageEntry entry) { map_[code] = entry.value; }

private:
    std::map<int, int> map_;
};

StageEntry map_stage(int code, const StageMapping& mapping);

/// Chart CSV: header "polygon_id,ct,ca,cb,cc,sa,sb,sc", one data row per
/// polygon; "id,X" marks an excluded polygon. Stage fields pass through the
/// mapping. Malformed rows raise std::runtime_error naming the data row.
ChartTable parse_chart(std::string_view text,
                       const StageMapping& mapping = StageMapping::defaults(),
                       std::vector<std::string>* warnings = nullptr);

/// Inverse of parse_chart for valid tables (labels are tenth-quantized on the
/// way out; tables that came from a chart round-trip exactly).
std::string write_chart(const ChartTable& table);

/// Egg code -> class-indexed fractions. Water collects (10-ct)/10 plus any
/// partial whose stage entry is 0 (a warning is emitted when such a partial
/// is nonzero); duplicate stage entries accumulate.
RegionalLabel eggcode_to_label(const EggCode& egg,
                               std::vector<std::string>* warnings = nullptr);

/// Quantize a label to integer tenths (largest-remainder, so the partials sum
/// to ct exactly) and emit stages thickest-first; absent slots get c=0, s=0.
EggCode label_to_eggcode(const RegionalLabel& label);

/// The class whose concentration strictly exceeds threshold, if any.
std::optional<int> dominant_class(const RegionalLabel& label, double threshold = 0.65);

}  // namespace floeberg::icechart
