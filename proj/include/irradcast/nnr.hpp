#pragma once

#include <Eigen/Core>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "irradcast/forecast.hpp"
#include "irradcast/time_series.hpp"

namespace irradcast {

enum class WeightMode { uniform, inverse_distance };
enum class SearchMode { exact, approximate };

struct FixedK {
  int k = 1;
  bool operator==(const FixedK&) const = default;
};
struct MaxDistance {
  double epsilon = 0.1;  // in the units of the series the model is fitted on
  bool operator==(const MaxDistance&) const = default;
};
using Neighborhood = std::variant<FixedK, MaxDistance>;

/// Nearest-neighbor regression structure.
///
/// A pattern at index i holds y_i, ..., y_{i-p+1} followed, for every seasonal
/// lag l = 1..P, by the block y_{i-(ls-1)}, ..., y_{i-(ls+p-1)}. The first
/// element of each seasonal block is the value one season before the target
/// y_{i+1}, so the dimension is p + P (p + 1).
struct NnrSpec {
  int p = 1;
  int P = 0;
  int s = 0;
  WeightMode weight = WeightMode::uniform;
  Neighborhood neighborhood = FixedK{1};
  SearchMode search = SearchMode::exact;
  /// Approximate search returns neighbors within (1 + approximation) of the true distances.
  double approximation = 0.1;
  /// Inverse-distance weights divided by k instead of by their sum.
  bool literal_inverse_distance = false;

  void validate() const;
  int dimension() const { return p + P * (p + 1); }
  bool operator==(const NnrSpec&) const = default;
  /// Offsets relative to y_i, in pattern order.
  std::vector<int> lag_offsets() const;
};

using PatternMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ReferenceSample {
  PatternMatrix patterns;                // N x dimension
  Eigen::VectorXd targets;               // y_{i+1}
  std::vector<Eigen::Index> provenance;  // i, increasing with row
  std::vector<int> offsets;

  Eigen::Index size() const { return patterns.rows(); }
};

/// Every pattern whose elements and target are all included. Throws
/// RangeError when the training data is too short or nothing qualifies.
ReferenceSample build_reference_sample(const Eigen::Ref<const Eigen::VectorXd>& values, const Mask& include,
                                       const NnrSpec& spec);

struct Neighbor {
  Eigen::Index row = 0;
  double distance = 0.0;
  bool operator==(const Neighbor&) const = default;
};

class KdTree;

/// Neighbors sorted by (distance, provenance). Fixed k returns min(k, N)
/// patterns; a distance threshold returns every pattern within epsilon and
/// throws EmptyNeighborhoodError when there is none.
std::vector<Neighbor> find_neighbors(const ReferenceSample& sample, std::span<const double> query, const NnrSpec& spec,
                                     const KdTree* index = nullptr);

/// Uniform mean, or inverse-distance weighted mean; a zero-distance neighbor
/// short-circuits to its own target.
double predict_from_neighbors(const ReferenceSample& sample, const std::vector<Neighbor>& neighbors,
                              const NnrSpec& spec);

double nnr_predict_one(const ReferenceSample& sample, std::span<const double> query, const NnrSpec& spec);

/// kd-tree over a reference sample for (1 + a)-approximate k-NN and exact
/// radius queries. Queries must pass the sample the tree was built from.
class KdTree {
 public:
  explicit KdTree(const ReferenceSample& sample, int leaf_size = 16);
  std::vector<Neighbor> knn(const ReferenceSample& sample, std::span<const double> query, int k,
                            double approximation) const;
  std::vector<Neighbor> radius(const ReferenceSample& sample, std::span<const double> query, double epsilon) const;

 private:
  struct Node {
    int split_dim = -1;  // -1 for a leaf
    double split = 0.0;
    Eigen::Index begin = 0, end = 0;
    int left = -1, right = -1;
  };
  int build(const ReferenceSample& sample, Eigen::Index begin, Eigen::Index end, int leaf_size);

  std::vector<Eigen::Index> order_;
  std::vector<Node> nodes_;
};

class NnrModel final : public TrainedModel {
 public:
  NnrModel(NnrSpec spec, ReferenceSample sample);

  const NnrSpec& spec() const { return spec_; }
  const ReferenceSample& sample() const { return sample_; }
  const std::vector<int>& required_lags() const override { return sample_.offsets; }
  double predict_one(std::span<const double> lags, std::span<const double> residuals) const override;
  std::string describe() const override;

 private:
  NnrSpec spec_;
  ReferenceSample sample_;
  std::unique_ptr<KdTree> index_;
};

NnrModel nnr_fit(const Eigen::Ref<const Eigen::VectorXd>& values, const Mask& include, const NnrSpec& spec);
NnrModel nnr_fit(const TimeSeries& training, const NnrSpec& spec);

}  // namespace irradcast
