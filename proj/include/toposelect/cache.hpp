#pragma once

// On-disk store of optimizer runs.
//
// Layout: <root>/<problem fingerprint>/<run fingerprint>.json, where the run
// fingerprint covers the optimizer settings, the target volume fraction and
// the exact bytes of the start field. Each file holds one DesignResult.

#include "toposelect/fem2d.hpp"
#include "toposelect/simp.hpp"

#include <atomic>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>

namespace toposelect {

inline constexpr const char* kCacheEnvVar = "TOPOSELECT_CACHE";

class ResultCache {
public:
    explicit ResultCache(std::filesystem::path root);

    /// $TOPOSELECT_CACHE when set, otherwise ./.toposelect_cache.
    static std::filesystem::path default_root();

    const std::filesystem::path& root() const noexcept { return root_; }

    /// Returns the stored result for this run or computes, stores and returns it.
    /// Safe to call from several threads; a key computed concurrently by two
    /// callers is simply written twice with identical content.
    simp::DesignResult get_or_compute(const fem::ProblemSpec& problem, double vf,
                                      const simp::OptimizerConfig& cfg,
                                      const fem::DensityField& init,
                                      const std::function<simp::DesignResult()>& compute);

    std::optional<simp::DesignResult> lookup(const fem::ProblemSpec& problem, double vf,
                                             const simp::OptimizerConfig& cfg,
                                             const fem::DensityField& init) const;

    std::size_t hits() const noexcept { return hits_; }
    std::size_t misses() const noexcept { return misses_; }

    std::filesystem::path entry_path(const fem::ProblemSpec& problem, double vf,
                                     const simp::OptimizerConfig& cfg,
                                     const fem::DensityField& init) const;

private:
    std::filesystem::path root_;
    std::mutex write_mutex_;
    std::atomic<std::size_t> hits_{0};
    std::atomic<std::size_t> misses_{0};
};

}  // namespace toposelect
