#include "phough/detect.hpp"

#include <chrono>
#include <utility>

namespace phough {

DetectionResult detect(std::span<const Point> raw, const DetectorConfig& cfg,
                       const SelectionPolicy& policy) {
    using clock = std::chrono::steady_clock;
    PointCloud cloud = PointCloud::normalize(raw);

    const KernelSpec kernel(cfg.kernel.kind, cfg.kernel.sigma / cloud.scale());
    ApproxConfig acfg;
    acfg.epsilon = cfg.epsilon;
    acfg.max_depth = cfg.max_depth;
    acfg.min_cell_diameter = cfg.min_cell_diameter;
    acfg.use_global_lipschitz = cfg.use_global_lipschitz;

    const auto t0 = clock::now();
    CellField field = build_approximation(cloud, kernel, acfg, cfg.mode);
    const auto t1 = clock::now();
    NerveGraph nerve = build_nerve(field, cfg.mobius);
    std::vector<PersistencePair> pairs = compute_persistence(nerve);
    const auto t2 = clock::now();
    std::vector<DetectedLine> lines = select_lines(pairs, field, cloud, policy);

    return DetectionResult{std::move(cloud),
                           std::move(field),
                           std::move(nerve),
                           std::move(pairs),
                           std::move(lines),
                           std::chrono::duration<double, std::milli>(t1 - t0).count(),
                           std::chrono::duration<double, std::milli>(t2 - t1).count()};
}

double persistence_at(const std::vector<PersistencePair>& pairs, std::size_t index) {
    return index < pairs.size() ? pairs[index].persistence() : 0.0;
}

}  // namespace phough
