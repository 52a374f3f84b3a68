// Point-wise confusion accounting against ground-truth noise labels, with
// precision/recall/F1 per frame and micro-averaged over a dataset (sum the
// confusions, then compute the metrics once).

#ifndef DMNR_METRICS_HPP
#define DMNR_METRICS_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dmnr/errors.hpp"
#include "dmnr/types.hpp"

namespace dmnr {

// "Positive" is the filter calling a point noise (Outlier): tp = removed
// noise, fp = removed environment, fn = retained noise, tn = retained
// environment.
struct Confusion {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }

    Confusion& operator+=(const Confusion& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
};

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Degenerate 0/0 ratios are defined as 0 so fully-clean frames aggregate
// cleanly; f1 is 0 whenever either component is 0.
inline Metrics precision_recall_f1(const Confusion& c) {
    Metrics m;
    const double tp = static_cast<double>(c.tp);
    if (c.tp + c.fp > 0) m.precision = tp / static_cast<double>(c.tp + c.fp);
    if (c.tp + c.fn > 0) m.recall = tp / static_cast<double>(c.tp + c.fn);
    if (m.precision > 0.0 && m.recall > 0.0) {
        m.f1 = 2.0 / (1.0 / m.recall + 1.0 / m.precision);
    }
    return m;
}

inline Confusion confusion(const Partition& partition,
                           const std::vector<std::uint32_t>& labels,
                           const std::set<std::uint32_t>& noise_ids) {
    if (labels.empty()) {
        throw MissingLabelsError("confusion: frame has no ground-truth labels");
    }
    if (partition.size() != labels.size()) {
        throw LengthMismatchError(
            "confusion: partition covers " + std::to_string(partition.size()) +
            " points, labels cover " + std::to_string(labels.size()));
    }
    Confusion c;
    for (std::size_t n = 0; n < labels.size(); ++n) {
        const bool is_noise = noise_ids.count(labels[n]) > 0;
        const bool removed = !partition.kept(n);
        if (removed && is_noise) ++c.tp;
        else if (removed && !is_noise) ++c.fp;
        else if (!removed && is_noise) ++c.fn;
        else ++c.tn;
    }
    return c;
}

struct FrameEval {
    std::string frame_id;
    Confusion confusion;
    Metrics metrics;
};

struct EvalReport {
    std::vector<FrameEval> per_frame;        // ordered by frame id
    Confusion aggregate;                     // sum over frames
    Metrics aggregate_metrics;               // micro-averaged
    std::vector<std::uint32_t> noise_class_ids;
};

using FilterFn = std::function<Partition(const PointCloud&)>;

// Run `filter` on every labeled frame and accumulate confusions. Frames are
// processed in ascending frame-id order; any per-frame failure aborts the
// run with the frame id attached.
inline EvalReport evaluate_dataset(
    std::vector<std::pair<std::string, PointCloud>> frames,
    const FilterFn& filter, const std::set<std::uint32_t>& noise_ids) {
    if (frames.empty()) {
        throw EmptyDatasetError("evaluate_dataset: no frames");
    }
    std::sort(frames.begin(), frames.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    EvalReport report;
    report.noise_class_ids.assign(noise_ids.begin(), noise_ids.end());
    for (const auto& [frame_id, cloud] : frames) {
        try {
            cloud.check_labels();
            if (!cloud.has_labels()) {
                throw MissingLabelsError("frame has no labels");
            }
            const Partition part = filter(cloud);
            part.check_covers(cloud.size());
            const Confusion c = confusion(part, cloud.labels, noise_ids);
            report.per_frame.push_back(
                FrameEval{frame_id, c, precision_recall_f1(c)});
            report.aggregate += c;
        } catch (const Error& e) {
            throw FrameError(frame_id, e.what());
        }
    }
    report.aggregate_metrics = precision_recall_f1(report.aggregate);
    return report;
}

}  // namespace dmnr

#endif  // DMNR_METRICS_HPP
