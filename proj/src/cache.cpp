#include "toposelect/cache.hpp"

#include "toposelect/error.hpp"
#include "toposelect/io.hpp"

#include <bit>
#include <cstdlib>
#include <cstring>

namespace toposelect {

ResultCache::ResultCache(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
}

std::filesystem::path ResultCache::default_root() {
    if (const char* env = std::getenv(kCacheEnvVar); env && *env) return env;
    return ".toposelect_cache";
}

std::filesystem::path ResultCache::entry_path(const fem::ProblemSpec& problem, double vf,
                                              const simp::OptimizerConfig& cfg,
                                              const fem::DensityField& init) const {
    const std::string problem_key = io::fingerprint(io::to_json(problem).dump());
    std::string run = io::to_json(cfg).dump();
    run += '|';
    run += io::fingerprint(io::format_double(vf) + "/" + std::to_string(std::bit_cast<std::uint64_t>(vf)));
    run += '|';
    const auto values = init.values();
    run += io::fingerprint(std::string_view(reinterpret_cast<const char*>(values.data()),
                                            values.size() * sizeof(double)));
    return root_ / problem_key / (io::fingerprint(run) + ".json");
}

std::optional<simp::DesignResult> ResultCache::lookup(const fem::ProblemSpec& problem, double vf,
                                                      const simp::OptimizerConfig& cfg,
                                                      const fem::DensityField& init) const {
    const auto path = entry_path(problem, vf, cfg, init);
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    try {
        auto j = io::Json::parse(io::read_text_file(path));
        if (j.value("vf_target", -1.0) != vf) return std::nullopt;
        return io::design_result_from_json(j.at("result"));
    } catch (const std::exception&) {
        // Unreadable or truncated entries are recomputed and overwritten.
        return std::nullopt;
    }
}

simp::DesignResult ResultCache::get_or_compute(const fem::ProblemSpec& problem, double vf,
                                               const simp::OptimizerConfig& cfg,
                                               const fem::DensityField& init,
                                               const std::function<simp::DesignResult()>& compute) {
    if (auto hit = lookup(problem, vf, cfg, init)) {
        ++hits_;
        return *hit;
    }
    ++misses_;
    simp::DesignResult result = compute();
    const io::Json entry{{"vf_target", vf}, {"problem", problem.name}, {"result", io::to_json(result)}};
    {
        std::lock_guard lock(write_mutex_);
        io::write_text_file(entry_path(problem, vf, cfg, init), entry.dump());
    }
    // Return what a later lookup will return, so warm and cold runs agree bit for bit.
    return io::design_result_from_json(io::Json::parse(entry.dump()).at("result"));
}

}  // namespace toposelect
