// DMNR-H: cluster the full raw frame, rank clusters by how many of their
// members the filter kept, and move the outlier members of the top h
// clusters back into the kept set. Points only ever move O -> F.

#ifndef DMNR_RESCUE_HPP
#define DMNR_RESCUE_HPP

#include <algorithm>
#include <cstddef>
#include <vector>

#include "dmnr/errors.hpp"
#include "dmnr/filter.hpp"
#include "dmnr/hdbscan.hpp"
#include "dmnr/types.hpp"

namespace dmnr {

// Transfer outliers of the h clusters holding the most kept points back to
// the kept set. Ties rank by larger total cluster size, then smaller id.
// Unclustered points (-1) are never rescued.
inline Partition rescue(const Partition& partition,
                        const ClusterLabeling& labeling, int h) {
    if (partition.size() != labeling.labels.size()) {
        throw LengthMismatchError(
            "rescue: partition and labeling cover different point counts");
    }
    if (h < 0) {
        throw Error("rescue: h must be >= 0");
    }
    Partition out = partition;
    if (h == 0 || labeling.cluster_count == 0) {
        return out;
    }

    const std::size_t k = static_cast<std::size_t>(labeling.cluster_count);
    std::vector<std::size_t> kept_members(k, 0);
    std::vector<std::size_t> total_members(k, 0);
    for (std::size_t n = 0; n < labeling.labels.size(); ++n) {
        const std::int32_t c = labeling.labels[n];
        if (c < 0) continue;
        ++total_members[static_cast<std::size_t>(c)];
        if (partition.kept(n)) ++kept_members[static_cast<std::size_t>(c)];
    }

    std::vector<std::int32_t> ranking(k);
    for (std::size_t c = 0; c < k; ++c) ranking[c] = static_cast<std::int32_t>(c);
    std::sort(ranking.begin(), ranking.end(),
              [&](std::int32_t a, std::int32_t b) {
                  const auto ia = static_cast<std::size_t>(a);
                  const auto ib = static_cast<std::size_t>(b);
                  if (kept_members[ia] != kept_members[ib])
                      return kept_members[ia] > kept_members[ib];
                  if (total_members[ia] != total_members[ib])
                      return total_members[ia] > total_members[ib];
                  return a < b;
              });

    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(h), k);
    std::vector<bool> selected(k, false);
    for (std::size_t i = 0; i < take; ++i) {
        selected[static_cast<std::size_t>(ranking[i])] = true;
    }

    for (std::size_t n = 0; n < labeling.labels.size(); ++n) {
        const std::int32_t c = labeling.labels[n];
        if (c >= 0 && selected[static_cast<std::size_t>(c)] && !partition.kept(n)) {
            out.verdicts[n] = Verdict::Kept;
            out.tags[n] = StageTag::Rescued;
        }
    }
    return out;
}

// DMNR followed by HDBSCAN over the full raw cloud and the rescue step.
// Clustering runs on the raw frame, not on F alone, so outliers carry
// cluster memberships for the transfer.
inline Partition dmnr_h(const PointCloud& cloud, const DmnrParams& params,
                        const HdbscanParams& hparams) {
    const Partition base = dmnr(cloud, params);
    if (params.rescue_clusters == 0) {
        return base;
    }
    const ClusterLabeling labeling = hdbscan(cloud, hparams);
    return rescue(base, labeling, params.rescue_clusters);
}

}  // namespace dmnr

#endif  // DMNR_RESCUE_HPP
