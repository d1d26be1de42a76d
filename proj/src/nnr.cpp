#include "irradcast/nnr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "irradcast/error.hpp"

namespace irradcast {
namespace {

double squared_distance(const double* a, const double* b, Eigen::Index dim) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

// Squared distance, abandoned once the running sum exceeds `bound`. Partial
// sums only grow, so an abandoned candidate is provably worse than `bound`.
double bounded_squared_distance(const double* a, const double* b, Eigen::Index dim, double bound) {
  double sum = 0.0;
  Eigen::Index i = 0;
  for (; i + 4 <= dim; i += 4) {
    const double d0 = a[i] - b[i], d1 = a[i + 1] - b[i + 1], d2 = a[i + 2] - b[i + 2], d3 = a[i + 3] - b[i + 3];
    sum += d0 * d0;
    sum += d1 * d1;
    sum += d2 * d2;
    sum += d3 * d3;
    if (sum > bound) return sum;
  }
  for (; i < dim; ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

struct Candidate {
  double d2;
  Eigen::Index row;
  bool operator<(const Candidate& o) const { return d2 < o.d2 || (d2 == o.d2 && row < o.row); }
};

// Keeps the k lexicographically smallest (d2, row) pairs.
class BoundedHeap {
 public:
  explicit BoundedHeap(std::size_t k) : k_(k) { items_.reserve(k + 1); }
  bool full() const { return items_.size() >= k_; }
  double worst() const { return items_.front().d2; }
  void offer(Candidate c) {
    if (!full()) {
      items_.push_back(c);
      std::push_heap(items_.begin(), items_.end());
    } else if (c < items_.front()) {
      std::pop_heap(items_.begin(), items_.end());
      items_.back() = c;
      std::push_heap(items_.begin(), items_.end());
    }
  }
  std::vector<Neighbor> sorted() {
    std::sort(items_.begin(), items_.end());
    std::vector<Neighbor> out;
    out.reserve(items_.size());
    for (const auto& c : items_) out.push_back({c.row, std::sqrt(c.d2)});
    return out;
  }

 private:
  std::size_t k_;
  std::vector<Candidate> items_;
};

void check_query(const ReferenceSample& sample, std::span<const double> query) {
  if (sample.size() == 0) throw RangeError("empty reference sample");
  if (Eigen::Index(query.size()) != sample.patterns.cols())
    throw DimensionError("query dimension " + std::to_string(query.size()) + " differs from pattern dimension " +
                         std::to_string(sample.patterns.cols()));
}

}  // namespace

void NnrSpec::validate() const {
  if (p < 1) throw RangeError("NNR needs p >= 1");
  if (P < 0) throw RangeError("negative seasonal lag count");
  if (P > 0 && s < 1) throw RangeError("seasonal NNR needs a season length");
  if (P == 0 && s != 0) throw RangeError("season length given without seasonal lags");
  if (const auto* fk = std::get_if<FixedK>(&neighborhood); fk && fk->k < 1) throw RangeError("k must be >= 1");
  if (const auto* md = std::get_if<MaxDistance>(&neighborhood); md && !(md->epsilon > 0.0))
    throw RangeError("distance threshold must be > 0");
  if (!(approximation >= 0.0)) throw RangeError("approximation factor must be >= 0");
}

std::vector<int> NnrSpec::lag_offsets() const {
  std::vector<int> out;
  out.reserve(std::size_t(dimension()));
  for (int i = 0; i < p; ++i) out.push_back(-i);
  for (int l = 1; l <= P; ++l)
    for (int i = 0; i <= p; ++i) out.push_back(-(l * s - 1) - i);
  return out;
}

ReferenceSample build_reference_sample(const Eigen::Ref<const Eigen::VectorXd>& values, const Mask& include,
                                       const NnrSpec& spec) {
  spec.validate();
  if (include.size() != values.size()) throw DimensionError("mask length differs from values");
  const Eigen::Index n = values.size();
  if (n <= Eigen::Index(spec.p) + Eigen::Index(spec.P) * spec.s + 2)
    throw RangeError("training series of " + std::to_string(n) + " samples too short for NNR layout");

  ReferenceSample sample;
  sample.offsets = spec.lag_offsets();
  const int back = -*std::min_element(sample.offsets.begin(), sample.offsets.end());
  const Eigen::Index dim = spec.dimension();

  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = back; i + 1 < n; ++i) {
    bool ok = include[i + 1];
    for (int o : sample.offsets) ok = ok && include[i + o];
    if (ok) rows.push_back(i);
  }
  if (rows.empty()) throw RangeError("no complete pattern in the training data");

  sample.patterns.resize(Eigen::Index(rows.size()), dim);
  sample.targets.resize(Eigen::Index(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Eigen::Index i = rows[r];
    for (Eigen::Index c = 0; c < dim; ++c) sample.patterns(Eigen::Index(r), c) = values[i + sample.offsets[std::size_t(c)]];
    sample.targets[Eigen::Index(r)] = values[i + 1];
  }
  sample.provenance = std::move(rows);
  return sample;
}

std::vector<Neighbor> find_neighbors(const ReferenceSample& sample, std::span<const double> query, const NnrSpec& spec,
                                     const KdTree* index) {
  check_query(sample, query);
  const Eigen::Index n = sample.size();
  const Eigen::Index dim = sample.patterns.cols();

  if (const auto* md = std::get_if<MaxDistance>(&spec.neighborhood)) {
    std::vector<Neighbor> out;
    if (index) {
      out = index->radius(sample, query, md->epsilon);
    } else {
      // The slack keeps abandonment strictly outside the threshold despite rounding.
      const double slack = md->epsilon * (1.0 + 1e-9);
      const double bound = slack * slack;
      for (Eigen::Index r = 0; r < n; ++r) {
        const double d2 = bounded_squared_distance(sample.patterns.row(r).data(), query.data(), dim, bound);
        if (d2 > bound) continue;
        const double d = std::sqrt(d2);
        if (d <= md->epsilon) out.push_back({r, d});
      }
      std::stable_sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) { return a.distance < b.distance; });
    }
    if (out.empty()) throw EmptyNeighborhoodError("no reference pattern within distance " + std::to_string(md->epsilon));
    return out;
  }

  const int k = std::get<FixedK>(spec.neighborhood).k;
  if (index) return index->knn(sample, query, k, spec.search == SearchMode::approximate ? spec.approximation : 0.0);
  BoundedHeap heap(std::size_t(std::min<Eigen::Index>(k, n)));
  const double* base = sample.patterns.data();
  for (Eigen::Index r = 0; r < n; ++r) {
    const double bound = heap.full() ? heap.worst() : std::numeric_limits<double>::infinity();
    heap.offer({bounded_squared_distance(base + r * dim, query.data(), dim, bound), r});
  }
  return heap.sorted();
}

double predict_from_neighbors(const ReferenceSample& sample, const std::vector<Neighbor>& neighbors,
                              const NnrSpec& spec) {
  if (neighbors.empty()) throw EmptyNeighborhoodError("empty neighborhood");
  if (spec.weight == WeightMode::uniform) {
    double sum = 0.0;
    for (const auto& nb : neighbors) sum += sample.targets[nb.row];
    return sum / double(neighbors.size());
  }
  // Neighbors arrive sorted, so the first zero-distance one has the lowest provenance.
  if (neighbors.front().distance == 0.0) return sample.targets[neighbors.front().row];
  double weighted = 0.0, weights = 0.0;
  for (const auto& nb : neighbors) {
    weighted += sample.targets[nb.row] / nb.distance;
    weights += 1.0 / nb.distance;
  }
  return spec.literal_inverse_distance ? weighted / double(neighbors.size()) : weighted / weights;
}

double nnr_predict_one(const ReferenceSample& sample, std::span<const double> query, const NnrSpec& spec) {
  return predict_from_neighbors(sample, find_neighbors(sample, query, spec), spec);
}

KdTree::KdTree(const ReferenceSample& sample, int leaf_size) {
  order_.resize(std::size_t(sample.size()));
  std::iota(order_.begin(), order_.end(), Eigen::Index{0});
  if (!order_.empty()) build(sample, 0, Eigen::Index(order_.size()), std::max(leaf_size, 1));
}

int KdTree::build(const ReferenceSample& sample, Eigen::Index begin, Eigen::Index end, int leaf_size) {
  const int id = int(nodes_.size());
  nodes_.push_back({-1, 0.0, begin, end, -1, -1});
  if (end - begin <= leaf_size) return id;

  const Eigen::Index dim = sample.patterns.cols();
  int best_dim = 0;
  double best_spread = -1.0;
  for (Eigen::Index c = 0; c < dim; ++c) {
    double lo = sample.patterns(order_[std::size_t(begin)], c), hi = lo;
    for (Eigen::Index i = begin; i < end; ++i) {
      const double v = sample.patterns(order_[std::size_t(i)], c);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) best_spread = hi - lo, best_dim = int(c);
  }
  if (best_spread <= 0.0) return id;  // all points identical

  const Eigen::Index mid = begin + (end - begin) / 2;
  auto first = order_.begin() + begin;
  std::nth_element(first, order_.begin() + mid, order_.begin() + end, [&](Eigen::Index a, Eigen::Index b) {
    return sample.patterns(a, best_dim) < sample.patterns(b, best_dim);
  });
  const double split = sample.patterns(order_[std::size_t(mid)], best_dim);
  nodes_[std::size_t(id)].split_dim = best_dim;
  nodes_[std::size_t(id)].split = split;
  // left: [begin, mid) holds values <= split, right: [mid, end) holds values >= split
  const int left = build(sample, begin, mid, leaf_size);
  const int right = build(sample, mid, end, leaf_size);
  nodes_[std::size_t(id)].left = left;
  nodes_[std::size_t(id)].right = right;
  return id;
}

std::vector<Neighbor> KdTree::knn(const ReferenceSample& sample, std::span<const double> query, int k,
                                  double approximation) const {
  check_query(sample, query);
  const Eigen::Index dim = sample.patterns.cols();
  BoundedHeap heap(std::size_t(std::min<Eigen::Index>(k, sample.size())));
  const double shrink = (1.0 + approximation) * (1.0 + approximation);

  auto visit = [&](auto&& self, int id) -> void {
    const Node& node = nodes_[std::size_t(id)];
    if (node.split_dim < 0) {
      for (Eigen::Index i = node.begin; i < node.end; ++i) {
        const Eigen::Index r = order_[std::size_t(i)];
        heap.offer({squared_distance(sample.patterns.row(r).data(), query.data(), dim), r});
      }
      return;
    }
    const double delta = query[std::size_t(node.split_dim)] - node.split;
    const int near = delta <= 0.0 ? node.left : node.right;
    const int far = delta <= 0.0 ? node.right : node.left;
    self(self, near);
    if (!heap.full() || delta * delta * shrink <= heap.worst()) self(self, far);
  };
  visit(visit, 0);
  return heap.sorted();
}

std::vector<Neighbor> KdTree::radius(const ReferenceSample& sample, std::span<const double> query,
                                     double epsilon) const {
  check_query(sample, query);
  const Eigen::Index dim = sample.patterns.cols();
  std::vector<Candidate> hits;
  auto visit = [&](auto&& self, int id) -> void {
    const Node& node = nodes_[std::size_t(id)];
    if (node.split_dim < 0) {
      for (Eigen::Index i = node.begin; i < node.end; ++i) {
        const Eigen::Index r = order_[std::size_t(i)];
        const double d2 = squared_distance(sample.patterns.row(r).data(), query.data(), dim);
        if (std::sqrt(d2) <= epsilon) hits.push_back({d2, r});
      }
      return;
    }
    const double delta = query[std::size_t(node.split_dim)] - node.split;
    if (delta <= 0.0 || std::abs(delta) <= epsilon) self(self, node.left);
    if (delta >= 0.0 || std::abs(delta) <= epsilon) self(self, node.right);
  };
  visit(visit, 0);
  std::sort(hits.begin(), hits.end());
  std::vector<Neighbor> out;
  out.reserve(hits.size());
  for (const auto& c : hits) out.push_back({c.row, std::sqrt(c.d2)});
  return out;
}

NnrModel::NnrModel(NnrSpec spec, ReferenceSample sample) : spec_(std::move(spec)), sample_(std::move(sample)) {
  spec_.validate();
  if (spec_.search == SearchMode::approximate) index_ = std::make_unique<KdTree>(sample_);
}

double NnrModel::predict_one(std::span<const double> lags, std::span<const double>) const {
  return predict_from_neighbors(sample_, find_neighbors(sample_, lags, spec_, index_.get()), spec_);
}

std::string NnrModel::describe() const {
  std::string out = spec_.P > 0 ? "snnr" : "nnr";
  out += "(p=" + std::to_string(spec_.p) + ",P=" + std::to_string(spec_.P) + ",s=" + std::to_string(spec_.s);
  if (const auto* fk = std::get_if<FixedK>(&spec_.neighborhood)) out += ",k=" + std::to_string(fk->k);
  else out += ",eps=" + std::to_string(std::get<MaxDistance>(spec_.neighborhood).epsilon);
  out += spec_.weight == WeightMode::uniform ? ",uniform)" : ",inverse)";
  return out;
}

NnrModel nnr_fit(const Eigen::Ref<const Eigen::VectorXd>& values, const Mask& include, const NnrSpec& spec) {
  return NnrModel(spec, build_reference_sample(values, include, spec));
}

NnrModel nnr_fit(const TimeSeries& training, const NnrSpec& spec) {
  return nnr_fit(training.values, training.valid, spec);
}

}  // namespace irradcast
