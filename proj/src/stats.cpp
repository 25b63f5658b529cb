#include "pqmc/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace pqmc {

RunStatistics summarize(const std::vector<double>& samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("summarize: need at least 2 samples");
    RunStatistics out;
    out.samples = samples;
    const auto n = static_cast<double>(samples.size());
    double sum = 0.0;
    for (double s : samples) sum += s;
    out.mean = sum / n;
    double ss = 0.0;
    for (double s : samples) ss += (s - out.mean) * (s - out.mean);
    out.stderr_of_mean = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return out;
}

void blocked_mean_stderr(const std::vector<double>& series, int nBlocks,
                         double& mean, double& stderr_of_mean) {
    if (nBlocks < 2 || series.size() < static_cast<std::size_t>(2 * nBlocks))
        throw std::invalid_argument("blocked_mean_stderr: too few samples for blocking");
    const std::size_t blockLen = series.size() / nBlocks;
    std::vector<double> blockMeans(nBlocks, 0.0);
    for (int b = 0; b < nBlocks; ++b) {
        double s = 0.0;
        for (std::size_t i = b * blockLen; i < (b + 1) * blockLen; ++i) s += series[i];
        blockMeans[b] = s / static_cast<double>(blockLen);
    }
    const RunStatistics agg = summarize(blockMeans);
    mean = agg.mean;
    stderr_of_mean = agg.stderr_of_mean;
}

} // namespace pqmc
