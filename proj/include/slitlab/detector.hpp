#pragma once

#include <cstdint>
#include <vector>

#include "slitlab/profile.hpp"

namespace slitlab::detector {

struct DetectionEvent {
    double x = 0.0;                 // m
    std::uint64_t sequence_index = 0;
    bool operator==(const DetectionEvent&) const = default;
};

struct SamplerOptions {
    double blur_sigma = 0.0;   // m; optional Gaussian detector blur
    unsigned workers = 0;      // 0 = hardware concurrency
};

/// Stateless counter-based generator: the uniform for (seed, index, stream)
/// does not depend on how many draws came before it.
double uniform01(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0);

/// Inverse-CDF sampler over the piecewise-linear density through the
/// profile samples. Event i depends only on (profile, seed, i).
std::vector<DetectionEvent> sample_hits(const IntensityProfile& profile, std::uint64_t n,
                                        std::uint64_t seed, const SamplerOptions& options = {});

struct BuildUp {
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> checkpoints;
    std::vector<std::vector<std::uint64_t>> histograms;  // one per checkpoint, cumulative
    std::vector<double> bin_edges;                       // bins + 1 edges, m
    bool operator==(const BuildUp&) const = default;
};

/// Cumulative histograms of one event stream at each checkpoint.
BuildUp build_up(const IntensityProfile& profile, const std::vector<std::uint64_t>& checkpoints,
                 std::size_t bins, std::uint64_t seed, const SamplerOptions& options = {});

}  // namespace slitlab::detector
