#include "mixfrac/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mixfrac/numeric.hpp"

namespace mixfrac {
namespace {

constexpr double kWeightTolerance = 1e-9;
constexpr int kLogDomainDepth = 40;

void check_base(int base) {
  if (base < 2) throw Error(ErrorCode::BadBase, "base must be >= 2, got " + std::to_string(base));
}

// mu([0, x)) for a cascade with digit weights w; below[d] = sum_{e<d} w[e].
double expansion_mass(std::span<const double> w, std::span<const double> below, int base,
                      double x, int max_digits) {
  if (!(x > 0.0)) return 0.0;
  if (x >= 1.0) return w[base - 1] == 1.0 ? 0.0 : 1.0;
  double mass = 0.0;
  double prefix = 1.0;
  double frac = x;
  for (int i = 0; i < max_digits; ++i) {
    frac *= base;
    int d = static_cast<int>(std::floor(frac));
    d = std::clamp(d, 0, base - 1);
    frac -= d;
    mass += prefix * below[d];
    prefix *= w[d];
    if (frac <= 0.0 || prefix == 0.0) break;
  }
  return mass;
}

std::vector<double> below_of(std::span<const double> w) {
  std::vector<double> below(w.size(), 0.0);
  for (std::size_t d = 1; d < w.size(); ++d) below[d] = below[d - 1] + w[d - 1];
  return below;
}

}  // namespace

std::uint64_t cell_count(int base, int depth) {
  check_base(base);
  if (depth < 0) throw Error(ErrorCode::BadCell, "negative depth");
  std::uint64_t n = 1;
  const auto b = static_cast<std::uint64_t>(base);
  for (int i = 0; i < depth; ++i) {
    if (n > (std::uint64_t{1} << 62) / b)
      throw Error(ErrorCode::BadArgument, "grid too fine: base " + std::to_string(base) +
                                              " depth " + std::to_string(depth));
    n *= b;
  }
  return n;
}

double DyadicCell::lower() const {
  return static_cast<double>(index) / static_cast<double>(cell_count(base, depth));
}

double DyadicCell::upper() const {
  return static_cast<double>(index + 1) / static_cast<double>(cell_count(base, depth));
}

double DyadicCell::diameter() const {
  return 1.0 / static_cast<double>(cell_count(base, depth));
}

DyadicCell DyadicCell::parent() const {
  if (depth == 0) throw Error(ErrorCode::BadCell, "root has no parent");
  return {base, depth - 1, index / static_cast<std::uint64_t>(base)};
}

DyadicCell DyadicCell::child(int digit) const {
  if (digit < 0 || digit >= base) throw Error(ErrorCode::BadCell, "digit out of range");
  return {base, depth + 1, index * static_cast<std::uint64_t>(base) + static_cast<std::uint64_t>(digit)};
}

std::vector<int> DyadicCell::digits() const {
  std::vector<int> out(static_cast<std::size_t>(depth));
  std::uint64_t rest = index;
  for (int i = depth - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<int>(rest % static_cast<std::uint64_t>(base));
    rest /= static_cast<std::uint64_t>(base);
  }
  return out;
}

void validate_cell(const DyadicCell& cell) {
  check_base(cell.base);
  if (cell.index >= cell_count(cell.base, cell.depth))
    throw Error(ErrorCode::BadCell, "index " + std::to_string(cell.index) + " >= b^depth");
}

std::uint64_t cell_index_of(double x, int base, int depth) {
  const std::uint64_t n = cell_count(base, depth);
  x = std::clamp(x, 0.0, 1.0);
  const auto idx = static_cast<std::uint64_t>(std::floor(x * static_cast<double>(n)));
  return std::min(idx, n - 1);
}

MeasureComponent MeasureComponent::multinomial(int base, std::vector<double> weights) {
  check_base(base);
  if (weights.size() != static_cast<std::size_t>(base))
    throw Error(ErrorCode::BadArgument, "expected " + std::to_string(base) + " weights, got " +
                                            std::to_string(weights.size()));
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0)
      throw Error(ErrorCode::NonProbabilityWeights, "weights must be finite and >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightTolerance)
    throw Error(ErrorCode::NonProbabilityWeights, "weights sum to " + std::to_string(sum));
  MeasureComponent c;
  c.kind_ = Kind::multinomial;
  c.base_ = base;
  c.below_ = below_of(weights);
  c.reversed_.assign(weights.rbegin(), weights.rend());
  c.reversed_below_ = below_of(c.reversed_);
  c.weights_ = std::move(weights);
  return c;
}

MeasureComponent MeasureComponent::empirical(std::vector<Atom> atoms) {
  if (atoms.empty()) throw Error(ErrorCode::BadAtom, "empirical measure needs at least one atom");
  double sum = 0.0;
  for (const Atom& a : atoms) {
    if (!(a.position >= 0.0 && a.position <= 1.0))
      throw Error(ErrorCode::BadAtom, "atom position outside [0,1]");
    if (!(a.weight > 0.0) || !std::isfinite(a.weight))
      throw Error(ErrorCode::BadAtom, "atom weight must be > 0");
    sum += a.weight;
  }
  if (std::abs(sum - 1.0) > kWeightTolerance)
    throw Error(ErrorCode::NonProbabilityWeights, "atom weights sum to " + std::to_string(sum));
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& l, const Atom& r) { return l.position < r.position; });
  MeasureComponent c;
  c.kind_ = Kind::empirical;
  c.atoms_ = std::move(atoms);
  c.prefix_.assign(c.atoms_.size() + 1, 0.0);
  for (std::size_t i = 0; i < c.atoms_.size(); ++i) c.prefix_[i + 1] = c.prefix_[i] + c.atoms_[i].weight;
  return c;
}

MeasureComponent MeasureComponent::reflected() const {
  if (is_multinomial()) {
    return multinomial(base_, std::vector<double>(weights_.rbegin(), weights_.rend()));
  }
  std::vector<Atom> flipped;
  flipped.reserve(atoms_.size());
  for (const Atom& a : atoms_) flipped.push_back({1.0 - a.position, a.weight});
  return empirical(std::move(flipped));
}

std::string MeasureComponent::describe() const {
  std::ostringstream os;
  if (is_multinomial()) {
    os << "multinomial(b=" << base_ << ", [";
    for (std::size_t i = 0; i < weights_.size(); ++i) os << (i ? "," : "") << weights_[i];
    os << "])";
  } else {
    os << "empirical(" << atoms_.size() << " atoms)";
  }
  return os.str();
}

VectorMeasure::VectorMeasure(std::vector<MeasureComponent> components, int base, int max_depth)
    : components_(std::move(components)), max_depth_(max_depth) {
  if (components_.empty()) throw Error(ErrorCode::BadArgument, "vector measure needs k >= 1");
  int inferred = 0;
  for (const auto& c : components_) {
    if (!c.is_multinomial()) continue;
    if (inferred == 0) inferred = c.base();
    if (c.base() != inferred)
      throw Error(ErrorCode::BadBase, "multinomial components use different bases");
  }
  if (base == 0) base = inferred == 0 ? 2 : inferred;
  check_base(base);
  if (inferred != 0 && inferred != base)
    throw Error(ErrorCode::BadBase, "grid base differs from the multinomial base");
  base_ = base;
  if (max_depth_ < 1) throw Error(ErrorCode::BadArgument, "max_depth must be >= 1");
}

bool VectorMeasure::all_multinomial() const noexcept {
  return std::all_of(components_.begin(), components_.end(),
                     [](const MeasureComponent& c) { return c.is_multinomial(); });
}

double atoms_in(const MeasureComponent& c, double lo, double hi, bool closed_right) {
  const auto& atoms = c.atoms_;
  auto first = std::lower_bound(atoms.begin(), atoms.end(), lo,
                                [](const Atom& a, double v) { return a.position < v; });
  auto last = closed_right
                  ? std::upper_bound(atoms.begin(), atoms.end(), hi,
                                     [](double v, const Atom& a) { return v < a.position; })
                  : std::lower_bound(atoms.begin(), atoms.end(), hi,
                                     [](const Atom& a, double v) { return a.position < v; });
  if (last <= first) return 0.0;
  return c.prefix_[static_cast<std::size_t>(last - atoms.begin())] -
         c.prefix_[static_cast<std::size_t>(first - atoms.begin())];
}

double cell_mass(const MeasureComponent& component, const DyadicCell& cell) {
  validate_cell(cell);
  if (component.is_multinomial()) {
    if (component.base() != cell.base) throw Error(ErrorCode::BadBase, "cell base mismatch");
    if (cell.depth > kLogDomainDepth) return std::exp(cell_log_mass(component, cell));
    double m = 1.0;
    for (int d : cell.digits()) m *= component.weights()[static_cast<std::size_t>(d)];
    return m;
  }
  // Atoms are bucketed with cell_index_of so that every atom lands in exactly
  // one cell per depth, including x = 1.
  const auto atoms = component.atoms();
  auto idx_of = [&](const Atom& a) { return cell_index_of(a.position, cell.base, cell.depth); };
  auto first = std::partition_point(atoms.begin(), atoms.end(),
                                    [&](const Atom& a) { return idx_of(a) < cell.index; });
  auto last = std::partition_point(first, atoms.end(),
                                   [&](const Atom& a) { return idx_of(a) <= cell.index; });
  double m = 0.0;
  for (auto it = first; it != last; ++it) m += it->weight;
  return m;
}

double cell_log_mass(const MeasureComponent& component, const DyadicCell& cell) {
  validate_cell(cell);
  if (component.is_multinomial() && cell.depth > kLogDomainDepth) {
    if (component.base() != cell.base) throw Error(ErrorCode::BadBase, "cell base mismatch");
    double lm = 0.0;
    for (int d : cell.digits()) lm += std::log(component.weights()[static_cast<std::size_t>(d)]);
    return lm;
  }
  const double m = cell_mass(component, cell);
  return m > 0.0 ? std::log(m) : kNegInf;
}

std::vector<double> log_cell_masses(const MeasureComponent& component, int base, int depth) {
  const std::uint64_t n = cell_count(base, depth);
  if (component.is_multinomial()) {
    if (component.base() != base) throw Error(ErrorCode::BadBase, "grid base mismatch");
    std::vector<double> logw(static_cast<std::size_t>(base));
    for (int d = 0; d < base; ++d) {
      const double w = component.weights()[static_cast<std::size_t>(d)];
      logw[static_cast<std::size_t>(d)] = w > 0.0 ? std::log(w) : kNegInf;
    }
    std::vector<double> level{0.0};
    for (int j = 0; j < depth; ++j) {
      std::vector<double> next(level.size() * static_cast<std::size_t>(base));
      for (std::size_t i = 0; i < level.size(); ++i)
        for (int d = 0; d < base; ++d)
          next[i * static_cast<std::size_t>(base) + static_cast<std::size_t>(d)] =
              level[i] + logw[static_cast<std::size_t>(d)];
      level = std::move(next);
    }
    return level;
  }
  std::vector<double> mass(static_cast<std::size_t>(n), 0.0);
  for (const Atom& a : component.atoms()) mass[cell_index_of(a.position, base, depth)] += a.weight;
  for (double& m : mass) m = m > 0.0 ? std::log(m) : kNegInf;
  return mass;
}

double left_open_mass(const MeasureComponent& component, double x, int max_digits) {
  if (component.is_multinomial())
    return expansion_mass(component.weights_, component.below_, component.base_, x, max_digits);
  return atoms_in(component, -1.0, x, false);
}

// mu((x, 1]) via the reflected cascade.
double right_open_mass(const MeasureComponent& component, double x, int max_digits) {
  if (x >= 1.0) return 0.0;
  if (component.is_multinomial())
    return expansion_mass(component.reversed_, component.reversed_below_, component.base_, 1.0 - x,
                          max_digits);
  return 1.0 - atoms_in(component, -1.0, x, true);
}

double cdf(const MeasureComponent& component, double x, int max_digits) {
  if (x < 0.0) return 0.0;
  if (!component.is_multinomial()) return atoms_in(component, -1.0, x, true);
  return std::clamp(1.0 - right_open_mass(component, x, max_digits), 0.0, 1.0);
}

double ball_mass(const MeasureComponent& component, double center, double radius,
                 int max_digits) {
  if (!(radius > 0.0)) throw Error(ErrorCode::BadArgument, "radius must be > 0");
  const double lo = center - radius;
  const double hi = center + radius;
  if (!component.is_multinomial()) return atoms_in(component, lo, hi, true);
  const double m = 1.0 - left_open_mass(component, lo, max_digits) -
                   right_open_mass(component, hi, max_digits);
  return std::clamp(m, 0.0, 1.0);
}

std::vector<DyadicCell> joint_support_cells(const VectorMeasure& vm, int depth) {
  if (depth < 0 || depth > vm.max_depth())
    throw Error(ErrorCode::BadArgument, "depth " + std::to_string(depth) + " outside [0, " +
                                            std::to_string(vm.max_depth()) + "]");
  const std::uint64_t n = cell_count(vm.base(), depth);
  std::vector<char> positive(static_cast<std::size_t>(n), 1);
  for (const auto& c : vm.components()) {
    const auto lm = log_cell_masses(c, vm.base(), depth);
    for (std::size_t i = 0; i < lm.size(); ++i)
      if (lm[i] == kNegInf) positive[i] = 0;
  }
  std::vector<DyadicCell> cells;
  for (std::uint64_t i = 0; i < n; ++i)
    if (positive[i]) cells.push_back({vm.base(), depth, i});
  if (cells.empty())
    throw Error(ErrorCode::EmptySupport, "no joint-support cell at depth " + std::to_string(depth));
  return cells;
}

std::string_view to_string(DoublingReport::Class c) noexcept {
  switch (c) {
    case DoublingReport::Class::P0: return "P0";
    case DoublingReport::Class::P1: return "P1";
    case DoublingReport::Class::neither: return "neither";
  }
  return "neither";
}

DoublingReport estimate_doubling(const VectorMeasure& vm, double a, DepthRange depths,
                                 int samples) {
  if (!(a > 1.0)) throw Error(ErrorCode::BadArgument, "doubling factor a must be > 1");
  if (depths.empty() || depths.min < 0) throw Error(ErrorCode::BadArgument, "empty depth range");
  if (samples < 1) throw Error(ErrorCode::BadArgument, "samples must be >= 1");

  const int sample_depth = std::min(depths.max + 2, vm.max_depth());
  const auto cells = joint_support_cells(vm, sample_depth);
  std::vector<double> points;
  const std::size_t take = std::min<std::size_t>(cells.size(), static_cast<std::size_t>(samples));
  for (std::size_t i = 0; i < take; ++i) points.push_back(cells[i * cells.size() / take].midpoint());
  for (const auto& c : vm.components())
    if (!c.is_multinomial())
      for (const Atom& atom : c.atoms()) points.push_back(atom.position);

  DoublingReport report;
  report.a = a;
  report.depths = depths;
  report.sample_points = static_cast<int>(points.size());

  bool uniform_stable = true;
  bool pointwise_stable = true;
  const auto nd = static_cast<std::size_t>(depths.size());
  for (const auto& component : vm.components()) {
    DoublingComponent out;
    out.max_ratio_by_depth.assign(nd, 0.0);
    // ratios[point][depth]; NaN marks an excluded sample.
    std::vector<std::vector<double>> ratios(points.size(), std::vector<double>(nd, std::nan("")));
    for (std::size_t di = 0; di < nd; ++di) {
      const double r = 1.0 / static_cast<double>(cell_count(vm.base(), depths.min + static_cast<int>(di)));
      for (std::size_t pi = 0; pi < points.size(); ++pi) {
        const double den = ball_mass(component, points[pi], r);
        if (den <= 0.0) {
          ++out.zero_denominators;
          continue;
        }
        const double ratio = ball_mass(component, points[pi], a * r) / den;
        ratios[pi][di] = ratio;
        out.max_ratio_by_depth[di] = std::max(out.max_ratio_by_depth[di], ratio);
      }
    }
    out.max_ratio = *std::max_element(out.max_ratio_by_depth.begin(), out.max_ratio_by_depth.end());
    if (!std::isfinite(out.max_ratio)) uniform_stable = pointwise_stable = false;
    if (nd >= 2) {
      const double deep = out.max_ratio_by_depth[nd - 1];
      const double prev = out.max_ratio_by_depth[nd - 2];
      if (deep > prev * (1.0 + 1e-9)) uniform_stable = false;
      for (const auto& row : ratios) {
        if (std::isnan(row[nd - 1]) || std::isnan(row[nd - 2])) continue;
        if (row[nd - 1] > row[nd - 2] * (1.0 + 1e-9)) pointwise_stable = false;
      }
    }
    report.components.push_back(std::move(out));
  }
  if (uniform_stable)
    report.classification = DoublingReport::Class::P1;
  else if (pointwise_stable)
    report.classification = DoublingReport::Class::P0;
  else
    report.classification = DoublingReport::Class::neither;
  return report;
}

}  // namespace mixfrac
