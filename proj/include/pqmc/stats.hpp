#pragma once
#include <vector>

namespace pqmc {

// Aggregate of repeated tunneling-time measurements: the mean and the
// standard deviation of the mean.
struct RunStatistics {
    std::vector<double> samples;
    double mean = 0.0;
    double stderr_of_mean = 0.0;
};

// Mean and stderr (sample stddev / sqrt(n)) of at least two samples.
// Throws std::invalid_argument for fewer than two.
RunStatistics summarize(const std::vector<double>& samples);

// Mean and blocking-based stderr for a correlated time series: the series is
// cut into nBlocks contiguous blocks and the block means are treated as
// independent.
void blocked_mean_stderr(const std::vector<double>& series, int nBlocks,
                         double& mean, double& stderr_of_mean);

} // namespace pqmc
