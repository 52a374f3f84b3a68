// Machine-readable evaluation reports: a JSON document per run (metadata,
// parameter echo, per-frame rows, aggregate row) and an optional CSV mirror
// with percentages at two decimals. Output is byte-deterministic for
// identical inputs: no timestamps, fixed key order.

#ifndef DMNR_REPORT_HPP
#define DMNR_REPORT_HPP

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "dmnr/errors.hpp"
#include "dmnr/hdbscan.hpp"
#include "dmnr/metrics.hpp"
#include "dmnr/types.hpp"

namespace dmnr {

struct RunInfo {
    std::string algorithm;  // dmnr | dmnr-h | sor | ror
    DmnrParams params;
    HdbscanParams hdbscan;
    double intensity_scale = 1.0;
};

namespace detail {

inline nlohmann::ordered_json metrics_row(const Confusion& c, const Metrics& m) {
    return nlohmann::ordered_json{
        {"tp", c.tp},          {"fp", c.fp},     {"fn", c.fn},
        {"tn", c.tn},          {"precision", m.precision},
        {"recall", m.recall},  {"f1", m.f1},
    };
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const EvalReport& report,
                                             const RunInfo& run) {
    nlohmann::ordered_json doc;
    doc["algorithm"] = run.algorithm;
    doc["parameters"] = {
        {"K", run.params.k_neighbors},
        {"k1", run.params.k1},
        {"k2", run.params.k2},
        {"k3", run.params.k3},
        {"h", run.params.rescue_clusters},
        {"height_mode",
         run.params.height_mode == HeightMode::Adaptive ? "adaptive" : "fixed"},
        {"h1", run.params.fixed_h1},
        {"h2", run.params.fixed_h2},
        {"min_cluster_size", run.hdbscan.min_cluster_size},
        {"min_samples", run.hdbscan.min_samples},
        {"intensity_scale", run.intensity_scale},
    };
    doc["noise_class_ids"] = report.noise_class_ids;
    doc["aggregation"] = "micro";
    nlohmann::ordered_json frames = nlohmann::ordered_json::array();
    for (const FrameEval& fe : report.per_frame) {
        nlohmann::ordered_json row = detail::metrics_row(fe.confusion, fe.metrics);
        row["id"] = fe.frame_id;
        frames.push_back(std::move(row));
    }
    doc["frames"] = std::move(frames);
    doc["aggregate"] = detail::metrics_row(report.aggregate, report.aggregate_metrics);
    return doc;
}

inline void write_report_json(const EvalReport& report, const RunInfo& run,
                              const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open report '" + path + "' for writing");
    }
    out << report_to_json(report, run).dump(2) << "\n";
    if (!out) {
        throw IoError("failed to write report '" + path + "'");
    }
}

// CSV mirror of the result-table layout: percentages, two decimals.
inline std::string report_to_csv(const EvalReport& report) {
    std::string csv = "frame,tp,fp,fn,tn,precision,recall,f1\n";
    const auto row = [&csv](const std::string& id, const Confusion& c,
                            const Metrics& m) {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "%s,%llu,%llu,%llu,%llu,%.2f,%.2f,%.2f\n", id.c_str(),
                      static_cast<unsigned long long>(c.tp),
                      static_cast<unsigned long long>(c.fp),
                      static_cast<unsigned long long>(c.fn),
                      static_cast<unsigned long long>(c.tn),
                      100.0 * m.precision, 100.0 * m.recall, 100.0 * m.f1);
        csv += buf;
    };
    for (const FrameEval& fe : report.per_frame) {
        row(fe.frame_id, fe.confusion, fe.metrics);
    }
    row("aggregate", report.aggregate, report.aggregate_metrics);
    return csv;
}

inline void write_report_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open report '" + path + "' for writing");
    }
    out << report_to_csv(report);
    if (!out) {
        throw IoError("failed to write report '" + path + "'");
    }
}

}  // namespace dmnr

#endif  // DMNR_REPORT_HPP
