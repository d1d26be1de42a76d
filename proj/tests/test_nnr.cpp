#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "irradcast/error.hpp"
#include "irradcast/nnr.hpp"

using namespace irradcast;

namespace {

ReferenceSample random_sample(std::mt19937_64& rng, Eigen::Index n, Eigen::Index dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ReferenceSample s;
  s.patterns.resize(n, dim);
  s.targets.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) s.patterns(r, c) = u(rng);
    s.targets[r] = u(rng);
    s.provenance.push_back(r);
  }
  for (Eigen::Index c = 0; c < dim; ++c) s.offsets.push_back(-int(c));
  return s;
}

// Linear scan: every distance, sorted by (distance, row).
std::vector<std::pair<double, Eigen::Index>> brute_force(const ReferenceSample& s, const std::vector<double>& q) {
  std::vector<std::pair<double, Eigen::Index>> all;
  for (Eigen::Index r = 0; r < s.size(); ++r) {
    double d2 = 0.0;
    for (Eigen::Index c = 0; c < s.patterns.cols(); ++c) d2 += (s.patterns(r, c) - q[std::size_t(c)]) * (s.patterns(r, c) - q[std::size_t(c)]);
    all.emplace_back(std::sqrt(d2), r);
  }
  std::sort(all.begin(), all.end());
  return all;
}

double oracle_prediction(const ReferenceSample& s, const std::vector<std::pair<double, Eigen::Index>>& nb, bool uniform) {
  if (uniform) {
    double sum = 0.0;
    for (const auto& [d, r] : nb) sum += s.targets[r];
    return sum / double(nb.size());
  }
  for (const auto& [d, r] : nb)
    if (d == 0.0) return s.targets[r];
  double num = 0.0, den = 0.0;
  for (const auto& [d, r] : nb) {
    num += s.targets[r] / d;
    den += 1.0 / d;
  }
  return num / den;
}

NnrSpec knn_spec(int k, WeightMode w = WeightMode::uniform) {
  NnrSpec spec;
  spec.neighborhood = FixedK{k};
  spec.weight = w;
  return spec;
}

ReferenceSample tiny(std::initializer_list<std::pair<double, double>> rows) {
  ReferenceSample s;
  s.patterns.resize(Eigen::Index(rows.size()), 1);
  s.targets.resize(Eigen::Index(rows.size()));
  Eigen::Index i = 0;
  for (const auto& [x, y] : rows) {
    s.patterns(i, 0) = x;
    s.targets[i] = y;
    s.provenance.push_back(i);
    ++i;
  }
  s.offsets = {0};
  return s;
}

}  // namespace

TEST_SUITE("nnr") {

TEST_CASE("pattern layout") {
  NnrSpec a;
  a.p = 3;
  a.P = 2;
  a.s = 10;
  CHECK(a.lag_offsets() == std::vector<int>{0, -1, -2, -9, -10, -11, -12, -19, -20, -21, -22});
  CHECK(a.dimension() == 11);
  NnrSpec b;
  CHECK(b.lag_offsets() == std::vector<int>{0});
  NnrSpec c;
  c.p = 2;
  c.P = 1;
  c.s = 96;
  CHECK(c.dimension() == 5);
  // Cross-check by enumerating the seasonal block directly: the value one
  // season before y_{i+1} and the p values preceding it.
  std::vector<int> seasonal;
  for (int i = 0; i <= c.p; ++i) seasonal.push_back(1 - c.s - i);
  const auto offsets = c.lag_offsets();
  CHECK(std::vector<int>(offsets.begin() + 2, offsets.end()) == seasonal);
  CHECK(seasonal == std::vector<int>{-95, -96, -97});
}

TEST_CASE("reference sample contents and masking") {
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(30, 0.0, 29.0);
  NnrSpec spec;
  spec.p = 2;
  spec.P = 1;
  spec.s = 5;
  Mask include = Mask::Constant(30, true);
  const ReferenceSample full = build_reference_sample(v, include, spec);
  // i ranges over [6, 28]: deepest offset -(5 + 2 - 1) = -6, target i + 1 <= 29.
  CHECK(full.size() == 23);
  CHECK(full.provenance.front() == 6);
  CHECK(full.patterns.row(0) == Eigen::RowVectorXd::Map(std::vector<double>{6, 5, 2, 1, 0}.data(), 5));
  CHECK(full.targets[0] == 7.0);

  include[15] = false;
  const ReferenceSample masked = build_reference_sample(v, include, spec);
  for (std::size_t r = 0; r < masked.provenance.size(); ++r) {
    const Eigen::Index i = masked.provenance[r];
    CHECK(i + 1 != 15);
    for (int o : masked.offsets) CHECK(i + o != 15);
  }
  CHECK(masked.size() < full.size());
}

TEST_CASE("neighbor search basics") {
  const ReferenceSample s = tiny({{0.0, 1.0}, {1.0, 2.0}, {2.0, 3.0}, {3.0, 4.0}});
  const auto exact = find_neighbors(s, std::vector<double>{2.0}, knn_spec(1));
  REQUIRE(exact.size() == 1);
  CHECK(exact[0].row == 2);
  CHECK(exact[0].distance == 0.0);
  CHECK(find_neighbors(s, std::vector<double>{0.4}, knn_spec(4)).size() == 4);
  CHECK(find_neighbors(s, std::vector<double>{0.4}, knn_spec(50)).size() == 4);
  // Equidistant patterns tie-break by row.
  const auto tie = find_neighbors(s, std::vector<double>{1.5}, knn_spec(1));
  CHECK(tie[0].row == 1);
  CHECK_THROWS_AS(find_neighbors(s, std::vector<double>{1.0, 2.0}, knn_spec(1)), DimensionError);

  NnrSpec eps;
  eps.neighborhood = MaxDistance{0.6};
  CHECK(find_neighbors(s, std::vector<double>{1.5}, eps).size() == 2);
  CHECK_THROWS_AS(find_neighbors(s, std::vector<double>{10.0}, eps), EmptyNeighborhoodError);
}

TEST_CASE("prediction rules") {
  const ReferenceSample s = tiny({{0.0, 0.2}, {1.0, 0.4}, {2.0, 0.6}, {3.0, 1.0}, {5.0, 3.0}});
  std::vector<Neighbor> three{{0, 1.0}, {1, 1.0}, {2, 1.0}};
  CHECK(predict_from_neighbors(s, three, knn_spec(3)) == doctest::Approx(0.4));

  const ReferenceSample z = tiny({{0.0, 0.9}, {1.0, 0.1}});
  CHECK(nnr_predict_one(z, std::vector<double>{0.0}, knn_spec(2, WeightMode::inverse_distance)) == 0.9);

  std::vector<Neighbor> two{{3, 1.0}, {4, 2.0}};
  NnrSpec inv = knn_spec(2, WeightMode::inverse_distance);
  CHECK(predict_from_neighbors(s, two, inv) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  inv.literal_inverse_distance = true;
  CHECK(predict_from_neighbors(s, two, inv) == doctest::Approx((1.0 + 1.5) / 2.0));
}

TEST_CASE("exact search matches a linear scan on random instances") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> n_dist(1, 500), dim_dist(1, 11), k_dist(1, 20);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int inst = 0; inst < 200; ++inst) {
    const Eigen::Index n = n_dist(rng), dim = dim_dist(rng);
    const int k = k_dist(rng);
    const ReferenceSample s = random_sample(rng, n, dim);
    std::vector<double> q(static_cast<std::size_t>(dim));
    for (double& x : q) x = u(rng);
    const auto oracle = brute_force(s, q);
    const std::size_t m = std::min<std::size_t>(std::size_t(k), oracle.size());
    const std::vector<std::pair<double, Eigen::Index>> top(oracle.begin(), oracle.begin() + long(m));
    for (auto w : {WeightMode::uniform, WeightMode::inverse_distance}) {
      const NnrSpec spec = knn_spec(k, w);
      const auto got = find_neighbors(s, q, spec);
      std::set<Eigen::Index> a, b;
      for (const auto& g : got) a.insert(g.row);
      for (const auto& t : top) b.insert(t.second);
      CAPTURE(inst);
      CHECK(a == b);
      CHECK(std::abs(predict_from_neighbors(s, got, spec) - oracle_prediction(s, top, w == WeightMode::uniform)) < 1e-9);
    }
  }
}

TEST_CASE("kd-tree radius search is exact and approximate k-NN honours its bound") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int inst = 0; inst < 50; ++inst) {
    const ReferenceSample s = random_sample(rng, 400, 5);
    const KdTree tree(s, 8);
    std::vector<double> q(5);
    for (double& x : q) x = u(rng);
    const auto oracle = brute_force(s, q);

    std::set<Eigen::Index> want, got;
    for (const auto& [d, r] : oracle)
      if (d <= 0.3) want.insert(r);
    for (const auto& nb : tree.radius(s, q, 0.3)) got.insert(nb.row);
    CHECK(got == want);

    const auto exact = tree.knn(s, q, 10, 0.0);
    for (std::size_t i = 0; i < 10; ++i) CHECK(exact[i].row == oracle[i].second);

    const double a = 0.5;
    const auto approx = tree.knn(s, q, 10, a);
    REQUIRE(approx.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(approx[i].distance <= (1.0 + a) * oracle[i].first + 1e-12);
  }
}

TEST_CASE("fitted models") {
  SUBCASE("k = 1 memorizes the training continuation") {
    Eigen::VectorXd v(200);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& x : v) x = u(rng);
    NnrSpec spec = knn_spec(1);
    spec.p = 4;
    const NnrModel m = nnr_fit(v, Mask::Constant(200, true), spec);
    // Pattern ending at i = 150 predicts v[151].
    const std::span<const double> hist(v.data(), 151);
    CHECK(recursive_forecast(m, hist, 1).values[0] == v[151]);
  }
  SUBCASE("constant series predicts the constant") {
    NnrSpec spec = knn_spec(5, WeightMode::inverse_distance);
    spec.p = 3;
    spec.P = 1;
    spec.s = 10;
    const NnrModel m = nnr_fit(Eigen::VectorXd::Constant(100, 0.42), Mask::Constant(100, true), spec);
    const std::vector<double> h(40, 0.42);
    const auto fc = recursive_forecast(m, h, 12);
    CHECK((fc.values.array() == 0.42).all());
  }
  SUBCASE("approximate mode stays close to exact") {
    Eigen::VectorXd v(2000);
    for (Eigen::Index i = 0; i < 2000; ++i) v[i] = std::sin(double(i) * 0.1) + 0.1 * std::sin(double(i) * 1.3);
    NnrSpec spec = knn_spec(5);
    spec.p = 3;
    const NnrModel exact = nnr_fit(v, Mask::Constant(2000, true), spec);
    spec.search = SearchMode::approximate;
    const NnrModel approx = nnr_fit(v, Mask::Constant(2000, true), spec);
    const std::span<const double> h(v.data(), 1500);
    CHECK(std::abs(recursive_forecast(exact, h, 1).values[0] - recursive_forecast(approx, h, 1).values[0]) < 0.05);
  }
}

}
