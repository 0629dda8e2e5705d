// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors

#include "floeberg/evalmetrics.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace floeberg::evalmetrics {

R2Result r2_per_class(std::span<const icechart::RegionalLabel> labels,
                      std::span<const regionloss::PolygonPrediction> preds) {
    FLB_REQUIRE(labels.size() == preds.size(), "r2_per_class: ", labels.size(),
                " labels vs ", preds.size(), " predictions");
    FLB_REQUIRE(!labels.empty(), "r2_per_class: empty input");
    R2Result out;
    const double n = static_cast<double>(labels.size());
    for (int c = 0; c < 4; ++c) {
        double mean = 0.0;
        for (const auto& label : labels) mean += label[c];
        mean /= n;
        double ss_res = 0.0, ss_tot = 0.0;
        for (std::size_t k = 0; k < labels.size(); ++k) {
            const double dy = labels[k][c] - preds[k][c];
            const double dm = labels[k][c] - mean;
            ss_res += dy * dy;
            ss_tot += dm * dm;
        }
        if (ss_tot < 1e-15) {
            out.defined[static_cast<std::size_t>(c)] = false;
            out.value[static_cast<std::size_t>(c)] = 0.0;
        } else {
            out.defined[static_cast<std::size_t>(c)] = true;
            out.value[static_cast<std::size_t>(c)] = 1.0 - ss_res / ss_tot;
        }
    }
    return out;
}

PixelMetrics pixel_metrics(std::span<const std::uint8_t> pred,
                           std::span<const std::uint8_t> truth,
                           std::span<const std::uint8_t> land) {
    FLB_REQUIRE(pred.size() == truth.size() && pred.size() == land.size(),
                "pixel_metrics: plane size mismatch");
    PixelMetrics out;
    long correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (truth[i] == 255 || land[i]) continue;
        FLB_REQUIRE(truth[i] < 4, "pixel_metrics: truth value ", int(truth[i]));
        FLB_REQUIRE(pred[i] < 4, "pixel_metrics: prediction value ", int(pred[i]));
        ++out.confusion[truth[i]][pred[i]];
        ++out.total;
        if (truth[i] == pred[i]) ++correct;
    }
    out.accuracy = out.total > 0 ? static_cast<double>(correct) / static_cast<double>(out.total) : 0.0;
    return out;
}

std::string report_csv(const MetricsReport& report) {
    std::ostringstream os;
    os << "class,r2,defined\n";
    os << std::setprecision(17);
    for (int c = 0; c < 4; ++c) {
        os << icechart::class_name(c) << ',';
        if (report.defined[static_cast<std::size_t>(c)])
            os << report.r2[static_cast<std::size_t>(c)];
        else
            os << "nan";
        os << ',' << (report.defined[static_cast<std::size_t>(c)] ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string summary_text(const MetricsReport& report, const std::string& title) {
    std::ostringstream os;
    os << title << "\n";
    os << "polygons evaluated: " << report.n_poly;
    if (report.polygons_skipped_empty > 0)
        os << " (skipped " << report.polygons_skipped_empty << " land-covered)";
    os << "\n\n";
    os << std::left << std::setw(24) << "class" << std::right << std::setw(10) << "R2"
       << '\n';
    for (int c = 0; c < 4; ++c) {
        os << std::left << std::setw(24) << icechart::class_name(c) << std::right
           << std::setw(9);
        if (report.defined[static_cast<std::size_t>(c)])
            os << std::fixed << std::setprecision(2)
               << 100.0 * report.r2[static_cast<std::size_t>(c)] << '%';
        else
            os << "undefined";
        os << '\n';
        os.unsetf(std::ios::fixed);
    }
    if (report.pixel_accuracy) {
        os << "\npixel accuracy: " << std::fixed << std::setprecision(4)
           << *report.pixel_accuracy << " over " << report.evaluable_pixels
           << " pixels\n";
        os.unsetf(std::ios::fixed);
        os << "confusion (rows = truth, cols = prediction):\n";
        for (int a = 0; a < 4; ++a) {
            os << "  " << std::left << std::setw(16) << icechart::class_name(a);
            for (int p = 0; p < 4; ++p)
                os << std::right << std::setw(10)
                   << (*report.confusion)[static_cast<std::size_t>(a)][static_cast<std::size_t>(p)];
            os << '\n';
        }
    }
    return os.str();
}

}  // namespace floeberg::evalmetrics
