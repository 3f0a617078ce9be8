#include "mixfrac/moment_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mixfrac/format.hpp"
#include "mixfrac/numeric.hpp"
#include "mixfrac/parallel.hpp"

namespace mixfrac {

std::string_view to_string(MomentKind kind) noexcept {
  switch (kind) {
    case MomentKind::cover: return "cover";
    case MomentKind::pack: return "pack";
    case MomentKind::integral: return "integral";
  }
  return "cover";
}

MomentKind moment_kind_from_string(std::string_view name) {
  if (name == "cover") return MomentKind::cover;
  if (name == "pack") return MomentKind::pack;
  if (name == "integral") return MomentKind::integral;
  throw Error(ErrorCode::BadArgument, "unknown moment kind '" + std::string(name) + "'");
}

void check_exponents(const VectorMeasure& vm, const QVector& q) {
  if (q.size() != vm.dimension())
    throw Error(ErrorCode::DimensionMismatch, "exponent vector has " + std::to_string(q.size()) +
                                                  " entries, measure has k = " +
                                                  std::to_string(vm.dimension()));
  for (double v : q)
    if (!std::isfinite(v)) throw Error(ErrorCode::BadArgument, "non-finite exponent");
}

GridLevel::GridLevel(const VectorMeasure& vm, int depth)
    : depth_(depth), base_(vm.base()), k_(vm.dimension()) {
  if (depth < 0 || depth > vm.max_depth())
    throw Error(ErrorCode::BadArgument, "depth " + std::to_string(depth) + " outside [0, " +
                                            std::to_string(vm.max_depth()) + "]");
  std::vector<std::vector<double>> per(k_);
  for (std::size_t j = 0; j < k_; ++j) per[j] = log_cell_masses(vm[j], base_, depth);
  const std::size_t n = per[0].size();
  for (std::size_t i = 0; i < n; ++i) {
    bool in = true;
    for (std::size_t j = 0; j < k_ && in; ++j) in = per[j][i] != kNegInf;
    if (!in) continue;
    for (std::size_t j = 0; j < k_; ++j) joint_.push_back(per[j][i]);
  }
  positive_.resize(k_);
  for (std::size_t j = 0; j < k_; ++j)
    for (double lm : per[j])
      if (lm != kNegInf) positive_[j].push_back(lm);
}

double GridLevel::log_moment(const QVector& q) const {
  if (joint_.empty())
    throw Error(ErrorCode::EmptySupport, "no joint-support cell at depth " + std::to_string(depth_) +
                                             " for q = " + q.str());
  LogSumAccumulator acc;
  for (std::size_t c = 0; c < joint_.size(); c += k_) {
    double w = 0.0;
    for (std::size_t j = 0; j < k_; ++j) w += q[j] * joint_[c + j];
    acc.add(w);
  }
  return acc.value();
}

double GridLevel::log_integral(const QVector& q) const {
  double total = 0.0;
  for (std::size_t j = 0; j < k_; ++j) {
    if (positive_[j].empty())
      throw Error(ErrorCode::EmptySupport, "component " + std::to_string(j + 1) + " has no mass");
    LogSumAccumulator acc;
    for (double lm : positive_[j]) acc.add((q[j] + 1.0) * lm);
    total += acc.value();
  }
  return total;
}

double covering_moment(const VectorMeasure& vm, const QVector& q, int depth) {
  check_exponents(vm, q);
  return GridLevel(vm, depth).log_moment(q);
}

double packing_moment(const VectorMeasure& vm, const QVector& q, int depth) {
  return covering_moment(vm, q, depth);
}

double renyi_integral(const VectorMeasure& vm, const QVector& q, int depth) {
  check_exponents(vm, q);
  return GridLevel(vm, depth).log_integral(q);
}

MomentTable::MomentTable(int base, std::vector<MomentRow> rows) : base_(base), rows_(std::move(rows)) {}

const MomentRow* MomentTable::find(const QVector& q, int depth, MomentKind kind) const {
  for (const auto& r : rows_)
    if (r.depth == depth && r.kind == kind && r.q == q) return &r;
  return nullptr;
}

std::vector<const MomentRow*> MomentTable::series(const QVector& q, MomentKind kind) const {
  std::vector<const MomentRow*> out;
  for (const auto& r : rows_)
    if (r.kind == kind && r.q == q) out.push_back(&r);
  std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->depth < b->depth; });
  return out;
}

std::string MomentTable::to_csv() const {
  const std::size_t k = rows_.empty() ? 1 : rows_.front().q.size();
  std::vector<std::string> header;
  for (std::size_t j = 1; j <= k; ++j) header.push_back("q_" + std::to_string(j));
  for (const char* h : {"depth", "kind", "log_value", "base"}) header.emplace_back(h);
  std::string out = csv_line(header);
  for (const auto& r : rows_) {
    std::vector<std::string> f;
    for (double v : r.q) f.push_back(format_double(v));
    f.push_back(std::to_string(r.depth));
    f.emplace_back(to_string(r.kind));
    f.push_back(format_double(r.log_value));
    f.push_back(std::to_string(base_));
    out += csv_line(f);
  }
  return out;
}

MomentTable build_moment_table(const VectorMeasure& vm, std::span<const QVector> q_grid,
                               DepthRange depths, std::span<const MomentKind> kinds,
                               unsigned threads) {
  if (q_grid.empty()) throw Error(ErrorCode::BadArgument, "empty q grid");
  if (kinds.empty()) throw Error(ErrorCode::BadArgument, "no moment kinds requested");
  std::vector<QVector> qs;
  for (const auto& q : q_grid) {
    check_exponents(vm, q);
    if (std::find(qs.begin(), qs.end(), q) == qs.end()) qs.push_back(q);
  }
  std::vector<MomentKind> ks;
  for (auto k : kinds)
    if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
  if (depths.empty()) return MomentTable(vm.base(), {});

  const auto nd = static_cast<std::size_t>(depths.size());
  std::vector<std::optional<GridLevel>> levels(nd);
  parallel_for(nd, threads, [&](std::size_t i) {
    levels[i].emplace(vm, depths.min + static_cast<int>(i));
  });

  std::vector<MomentRow> rows(qs.size() * nd * ks.size());
  parallel_for(rows.size(), threads, [&](std::size_t slot) {
    const std::size_t qi = slot / (nd * ks.size());
    const std::size_t di = (slot / ks.size()) % nd;
    const std::size_t ki = slot % ks.size();
    const GridLevel& level = *levels[di];
    MomentRow& row = rows[slot];
    row.q = qs[qi];
    row.depth = level.depth();
    row.kind = ks[ki];
    row.log_value = ks[ki] == MomentKind::integral ? level.log_integral(qs[qi]) : level.log_moment(qs[qi]);
  });
  return MomentTable(vm.base(), std::move(rows));
}

}  // namespace mixfrac
