#pragma once

#include "locsvm/region.hpp"
#include "locsvm/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace locsvm {

struct Provenance {
  enum class Kind { fixed, built_from_split } kind = Kind::fixed;
  std::uint64_t seed = 0;
};

/// Finite cover of the input space by regions with bounded overlap.
/// Immutable after construction.
class Regionalization {
 public:
  Regionalization(std::vector<Region> regions, std::size_t s_max_declared, bool is_partition,
                  std::optional<Box> domain = std::nullopt, Provenance provenance = {});

  /// Indices of the regions containing x, ascending.
  [[nodiscard]] std::vector<std::size_t> containing(const Point& x) const;

  [[nodiscard]] std::size_t size() const { return regions_.size(); }
  [[nodiscard]] const Region& region(std::size_t i) const { return regions_.at(i); }
  [[nodiscard]] const std::vector<Region>& regions() const { return regions_; }
  [[nodiscard]] std::size_t s_max_declared() const { return s_max_; }
  [[nodiscard]] bool is_partition() const { return is_partition_; }
  [[nodiscard]] const std::optional<Box>& domain() const { return domain_; }
  [[nodiscard]] const Provenance& provenance() const { return provenance_; }
  [[nodiscard]] int dim() const { return regions_.front().dim(); }
  /// Voronoi centers when every region is a cell of the same diagram.
  [[nodiscard]] const std::shared_ptr<const std::vector<Point>>& voronoi_centers() const { return voronoi_; }

  [[nodiscard]] nlohmann::json to_json() const;
  static Regionalization from_json(const nlohmann::json& j);

 private:
  std::vector<Region> regions_;
  std::size_t s_max_;
  bool is_partition_;
  std::optional<Box> domain_;
  Provenance provenance_;
  std::shared_ptr<const std::vector<Point>> voronoi_;
};

/// Half-open grid cells [lo, hi) tiling `bounds`; the last cell along each
/// axis is closed.
Regionalization grid_partition(const Box& bounds, std::span<const int> cells_per_dim);

/// Voronoi partition from k-means centers of a regionalization split, which
/// must be disjoint from the training data. Centers are sorted
/// lexicographically; ties go to the lower center index.
Regionalization voronoi_from_split(std::span<const Point> split, std::size_t m, std::uint64_t seed,
                                   std::optional<Box> domain = std::nullopt, int max_iterations = 100);

/// k-means++ seeding followed by Lloyd iterations; centers sorted
/// lexicographically.
std::vector<Point> kmeans_centers(std::span<const Point> points, std::size_t m, std::uint64_t seed,
                                  int max_iterations = 100);

/// Default probe budget for continuous validations.
inline constexpr std::size_t kDefaultProbeCount = 100000;

/// Halton points in `box`, followed by its 2^d corners.
std::vector<Point> probe_points(const Box& box, std::size_t count = kDefaultProbeCount);

/// Balls of common radius clipped to `domain`. Coverage and the overlap bound
/// are established by probing; throws naming an uncovered probe point.
Regionalization overlapping_cover(std::span<const Point> centers, double radius, const Box& domain,
                                  std::size_t probe_count = kDefaultProbeCount);

struct RegionalizationReport {
  bool r1_ok = false;
  bool r2_ok = false;
  bool partition_ok = false;
  std::size_t observed_max_overlap = 0;
  std::size_t probe_count = 0;
  std::optional<Point> first_uncovered;

  [[nodiscard]] nlohmann::json to_json() const;
};

RegionalizationReport validate_regionalization(const Regionalization& r, std::span<const Point> probes);

struct Assignment {
  std::vector<Dataset> per_region_data;
  std::vector<std::vector<std::size_t>> per_region_indices;
  std::vector<std::size_t> counts;
  std::vector<std::size_t> nonempty_indices;
  std::size_t a_hat = 0;
};

/// D_i = samples whose x lies in region i, in original sample order. Throws
/// when a sample lies in no region.
Assignment assign(const Dataset& data, const Regionalization& r);

}  // namespace locsvm
