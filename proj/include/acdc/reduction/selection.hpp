#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acdc/reduction/performance_map.hpp"

namespace acdc::reduction {

// Cluster ids start at 1; 0 marks rows excluded for being level 5 everywhere.
struct ClusterAssignment {
  std::vector<grid::CcrcId> ccrcs;
  std::vector<int> cluster;
  int k = 0;
  double silhouette = 0.0;
  std::vector<double> silhouette_by_k;  // index k, NaN where not evaluated
};

// Average-linkage agglomeration on a symmetric distance matrix, cut at k
// clusters. Labels are 0-based, numbered by each cluster's first member.
std::vector<int> average_linkage(const Eigen::MatrixXd& dist, int k);
// Mean silhouette; singleton members contribute 0.
double mean_silhouette(const Eigen::MatrixXd& dist, const std::vector<int>& labels);

// L1 distance between level vectors; k maximizes the mean silhouette over
// [2, min(10, rows - 1)]. Fewer than two usable rows give one cluster.
ClusterAssignment cluster_ccrcs(const PerformanceMap& map);

struct ClusterSelection {
  std::vector<int> selected;         // ascending cluster ids
  Eigen::MatrixXd cluster_level;     // (k + 1) x regions mean level, row 0 unused
  std::vector<int> region_cover;     // selected cluster chosen for each region
  std::string rules;                 // decision-tree rules, one per line
};

// Greedy cover of the regions by clusters at their best mean level, followed
// by removal of redundant picks. Rules are written against the region
// centroids when `regions` is given. Throws UncoverableRegion when every
// cluster is unstable in some region.
ClusterSelection select_clusters(const PerformanceMap& map, const ClusterAssignment& clusters,
                                 const Subregions* regions = nullptr);

struct IndicatorSelection {
  DatasetRole indicator = DatasetRole::h2_f;
  ClusterAssignment clusters;
  ClusterSelection selection;
};

struct SelectionGroup {
  std::vector<int> attribute;  // per indicator: selected cluster id or 0
  std::vector<grid::CcrcId> members;
  grid::CcrcId representative = 0;
};

struct SelectionResult {
  std::vector<DatasetRole> indicators;
  std::vector<grid::CcrcId> ccrcs;
  std::vector<std::vector<int>> attribute;  // per ccrc
  std::vector<SelectionGroup> groups;       // all-zero group excluded
  std::vector<grid::CcrcId> reduced;        // ascending
  std::vector<std::string> rules;           // per indicator
};

SelectionResult intersect_selections(const std::vector<IndicatorSelection>& per_indicator);

struct CoverageGap {
  DatasetRole indicator;
  std::size_t region;
  int best = 0;       // over all rows of the map
  int achieved = 0;   // over the reduced set
};

// Cells where the best reduced-set level is 5 or worse than the all-row
// optimum by more than `slack` levels.
std::vector<CoverageGap> coverage_gaps(const std::vector<PerformanceMap>& maps, const std::vector<grid::CcrcId>& reduced,
                                       int slack);

struct ReductionOutput {
  Subregions regions;
  std::vector<PerformanceMap> maps;  // one per indicator
  std::vector<IndicatorSelection> per_indicator;
  SelectionResult result;
};

// Maps, clustering, selection and intersection for the four indicators.
ReductionOutput reduce(const IndicatorTable& table, const Subregions& regions);
ReductionOutput reduce(const IndicatorTable& table, std::size_t n_regions, std::uint64_t seed);

// stability_map_<indicator>.{svg,csv}, membership.{svg,csv}, boxplot_summary.csv
void render_outputs(const ReductionOutput& out, const IndicatorTable& table, const std::filesystem::path& dir);

}  // namespace acdc::reduction
