#include "mqt/process.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "mqt/errors.hpp"

namespace mqt {

// ---------------------------------------------------------------------------
// JointLaw

JointLaw JointLaw::from_paths(const std::vector<std::vector<double>>& positions,
                              std::span<const std::uint32_t> states, std::span<const double> masses) {
  const std::size_t T = positions.size();
  if (T == 0) throw PreconditionError("joint law needs at least one time");
  if (states.size() != masses.size() * T) throw PreconditionError("path states have the wrong size");

  // Sort path indices lexicographically and merge equal paths.
  std::vector<std::size_t> order;
  order.reserve(masses.size());
  for (std::size_t p = 0; p < masses.size(); ++p) {
    if (!(masses[p] >= 0.0)) throw PreconditionError("negative path mass");
    if (masses[p] > 0.0) order.push_back(p);
  }
  auto less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(states.begin() + a * T, states.begin() + (a + 1) * T,
                                        states.begin() + b * T, states.begin() + (b + 1) * T);
  };
  auto same = [&](std::size_t a, std::size_t b) {
    return std::equal(states.begin() + a * T, states.begin() + (a + 1) * T, states.begin() + b * T);
  };
  std::sort(order.begin(), order.end(), less);

  std::vector<std::uint32_t> merged_states;
  std::vector<double> merged_masses;
  for (std::size_t idx = 0; idx < order.size(); ++idx) {
    const std::size_t p = order[idx];
    if (idx > 0 && same(order[idx - 1], p)) {
      merged_masses.back() += masses[p];
    } else {
      merged_states.insert(merged_states.end(), states.begin() + p * T, states.begin() + (p + 1) * T);
      merged_masses.push_back(masses[p]);
    }
  }

  // Per-time marginals from the paths; drop atoms without mass and remap.
  JointLaw law;
  law.marginals_.reserve(T);
  std::vector<std::vector<std::uint32_t>> remap(T);
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> w(positions[t].size(), 0.0);
    for (std::size_t p = 0; p < merged_masses.size(); ++p) {
      const auto s = merged_states[p * T + t];
      if (s >= w.size()) throw PreconditionError("path state out of range");
      w[s] += merged_masses[p];
    }
    // Positions must already be strictly increasing for index order to match.
    for (std::size_t a = 1; a < positions[t].size(); ++a)
      if (!(positions[t][a] > positions[t][a - 1]))
        throw PreconditionError("support positions must be strictly increasing");
    std::vector<double> xs, ms;
    remap[t].assign(w.size(), 0);
    for (std::size_t a = 0; a < w.size(); ++a) {
      if (w[a] > 0.0) {
        remap[t][a] = static_cast<std::uint32_t>(xs.size());
        xs.push_back(positions[t][a]);
        ms.push_back(w[a]);
      }
    }
    law.marginals_.emplace_back(std::move(xs), std::move(ms));
  }
  for (std::size_t p = 0; p < merged_masses.size(); ++p)
    for (std::size_t t = 0; t < T; ++t) merged_states[p * T + t] = remap[t][merged_states[p * T + t]];
  law.states_ = std::move(merged_states);
  law.masses_ = std::move(merged_masses);
  return law;
}

JointLaw JointLaw::from_dense(const std::vector<AtomicMeasure>& marginals,
                              std::span<const double> tensor) {
  const std::size_t T = marginals.size();
  std::size_t total = 1;
  for (const auto& m : marginals) total *= m.size();
  if (tensor.size() != total) throw PreconditionError("dense tensor has the wrong size");
  std::vector<std::vector<double>> pos(T);
  for (std::size_t t = 0; t < T; ++t) pos[t].assign(marginals[t].positions().begin(), marginals[t].positions().end());
  std::vector<std::uint32_t> states;
  std::vector<double> masses;
  std::vector<std::uint32_t> idx(T, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t t = T; t-- > 0;) {
      idx[t] = static_cast<std::uint32_t>(rem % marginals[t].size());
      rem /= marginals[t].size();
    }
    if (tensor[flat] != 0.0) {
      states.insert(states.end(), idx.begin(), idx.end());
      masses.push_back(tensor[flat]);
    }
  }
  return from_paths(pos, states, masses);
}

namespace {

std::vector<std::vector<double>> positions_of(const std::vector<AtomicMeasure>& ms) {
  std::vector<std::vector<double>> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.emplace_back(m.positions().begin(), m.positions().end());
  return out;
}

}  // namespace

JointLaw JointLaw::restrict_to(std::size_t first, std::size_t last) const {
  if (first > last || last >= n_times()) throw PreconditionError("restriction range out of bounds");
  const std::size_t T = n_times(), S = last - first + 1;
  std::vector<std::uint32_t> st;
  st.reserve(n_paths() * S);
  for (std::size_t p = 0; p < n_paths(); ++p)
    st.insert(st.end(), states_.begin() + p * T + first, states_.begin() + p * T + last + 1);
  std::vector<AtomicMeasure> sub(marginals_.begin() + first, marginals_.begin() + last + 1);
  return from_paths(positions_of(sub), st, masses_);
}

Coupling JointLaw::two_time(std::size_t i, std::size_t j) const {
  const auto& a = marginals_.at(i);
  const auto& b = marginals_.at(j);
  std::vector<double> m(a.size() * b.size(), 0.0);
  for (std::size_t p = 0; p < n_paths(); ++p) {
    const auto s = path(p);
    m[s[i] * b.size() + s[j]] += masses_[p];
  }
  return Coupling(a, b, std::move(m));
}

std::vector<double> JointLaw::to_dense(std::size_t cap) const {
  std::size_t total = 1;
  for (const auto& m : marginals_) {
    total *= m.size();
    if (total > cap) throw ResourceError("dense joint tensor exceeds the oracle cap");
  }
  std::vector<double> out(total, 0.0);
  for (std::size_t p = 0; p < n_paths(); ++p) {
    std::size_t flat = 0;
    const auto s = path(p);
    for (std::size_t t = 0; t < n_times(); ++t) flat = flat * marginals_[t].size() + s[t];
    out[flat] += masses_[p];
  }
  return out;
}

double max_mass_difference(const JointLaw& a, const JointLaw& b) {
  if (a.n_times() != b.n_times()) return 1.0;
  // Compare by positions rather than indices so that slightly different
  // marginal masses do not matter.
  std::map<std::vector<double>, double> diff;
  std::vector<double> key(a.n_times());
  for (std::size_t p = 0; p < a.n_paths(); ++p) {
    for (std::size_t t = 0; t < a.n_times(); ++t) key[t] = a.position(p, t);
    diff[key] += a.mass(p);
  }
  for (std::size_t p = 0; p < b.n_paths(); ++p) {
    for (std::size_t t = 0; t < b.n_times(); ++t) key[t] = b.position(p, t);
    diff[key] -= b.mass(p);
  }
  double d = 0.0;
  for (const auto& [k, v] : diff) d = std::max(d, std::abs(v));
  return d;
}

// ---------------------------------------------------------------------------
// ChainLaw

ChainLaw::ChainLaw(AtomicMeasure initial, std::vector<Kernel> transitions)
    : transitions_(std::move(transitions)) {
  marginals_.push_back(std::move(initial));
  for (const auto& k : transitions_) {
    const auto& cur = marginals_.back();
    marginals_.push_back(coupling_of(cur, k).target());
  }
}

Coupling ChainLaw::two_time(std::size_t i, std::size_t j) const {
  if (!(i < j && j < n_times())) throw PreconditionError("two_time needs i < j inside the grid");
  Kernel k = transitions_[i];
  for (std::size_t s = i + 1; s < j; ++s) k = compose(k, transitions_[s]);
  return coupling_of(marginals_[i], k);
}

// ---------------------------------------------------------------------------
// GridPathLaw

GridPathLaw::GridPathLaw(TimePartition grid, JointLaw joint, Interpolation interp, LawOrigin origin)
    : grid_(std::move(grid)), form_(std::move(joint)), interp_(interp), origin_(std::move(origin)) {
  if (std::get<JointLaw>(form_).n_times() != grid_.size())
    throw PreconditionError("joint law and grid have different numbers of times");
}

GridPathLaw::GridPathLaw(TimePartition grid, ChainLaw chain, Interpolation interp, LawOrigin origin)
    : grid_(std::move(grid)), form_(std::move(chain)), interp_(interp), origin_(std::move(origin)) {
  if (std::get<ChainLaw>(form_).n_times() != grid_.size())
    throw PreconditionError("chain and grid have different numbers of times");
}

const JointLaw& GridPathLaw::joint() const {
  if (is_chain()) throw PreconditionError("law is stored as a chain; call joint_of");
  return std::get<JointLaw>(form_);
}

const ChainLaw& GridPathLaw::chain() const {
  if (!is_chain()) throw PreconditionError("law is stored as a joint law");
  return std::get<ChainLaw>(form_);
}

const AtomicMeasure& GridPathLaw::marginal(std::size_t t) const {
  return std::visit([&](const auto& f) -> const AtomicMeasure& { return f.marginal(t); }, form_);
}

Coupling GridPathLaw::two_time(std::size_t i, std::size_t j) const {
  return std::visit([&](const auto& f) { return f.two_time(i, j); }, form_);
}

// ---------------------------------------------------------------------------
// Expansion and Markovization

JointLaw joint_of(const GridPathLaw& l, std::size_t cap) {
  if (!l.is_chain()) return l.joint();
  const auto& ch = l.chain();
  const std::size_t T = ch.n_times();
  std::vector<AtomicMeasure> ms;
  for (std::size_t t = 0; t < T; ++t) ms.push_back(ch.marginal(t));

  // Grow the path list one transition at a time.
  std::vector<std::vector<std::uint32_t>> paths;
  std::vector<double> mass;
  for (std::size_t i = 0; i < ms[0].size(); ++i) {
    paths.push_back({static_cast<std::uint32_t>(i)});
    mass.push_back(ms[0].mass(i));
  }
  for (std::size_t k = 0; k + 1 < T; ++k) {
    const auto& ker = ch.transition(k);
    const std::size_t m = ker.target_support().size();
    // Kernel targets index the kernel's reference support; map them onto the
    // next marginal's atoms.
    std::vector<std::uint32_t> to_next(m);
    for (std::size_t j = 0; j < m; ++j) {
      const auto idx = ms[k + 1].find(ker.target_support().position(j));
      to_next[j] = static_cast<std::uint32_t>(idx);
    }
    std::vector<std::vector<std::uint32_t>> next;
    std::vector<double> next_mass;
    for (std::size_t p = 0; p < paths.size(); ++p) {
      const auto s = paths[p].back();
      for (std::size_t j = 0; j < m; ++j) {
        const double w = ker(s, j);
        if (w == 0.0) continue;
        if (next.size() >= cap) throw ResourceError("chain expansion exceeds the oracle cap");
        auto q = paths[p];
        q.push_back(to_next[j]);
        next.push_back(std::move(q));
        next_mass.push_back(mass[p] * w);
      }
    }
    paths = std::move(next);
    mass = std::move(next_mass);
  }
  std::vector<std::uint32_t> flat;
  flat.reserve(paths.size() * T);
  for (const auto& p : paths) flat.insert(flat.end(), p.begin(), p.end());
  return JointLaw::from_paths(positions_of(ms), flat, mass);
}

namespace {

// Glues `left` (ending at the shared time) and `right` (starting there) by
// conditional independence given the shared state.
JointLaw glue(const JointLaw& left, const JointLaw& right, std::size_t cap) {
  const std::size_t TL = left.n_times(), TR = right.n_times();
  const auto& shared = left.marginal(TL - 1);
  const auto& shared_r = right.marginal(0);
  if (shared.size() != shared_r.size()) throw PreconditionError("segment marginals disagree");

  std::vector<std::vector<std::size_t>> starting(shared_r.size());
  for (std::size_t q = 0; q < right.n_paths(); ++q) starting[right.path(q)[0]].push_back(q);

  std::vector<std::vector<double>> pos;
  for (std::size_t t = 0; t < TL; ++t)
    pos.emplace_back(left.marginal(t).positions().begin(), left.marginal(t).positions().end());
  for (std::size_t t = 1; t < TR; ++t)
    pos.emplace_back(right.marginal(t).positions().begin(), right.marginal(t).positions().end());

  std::vector<std::uint32_t> states;
  std::vector<double> masses;
  for (std::size_t p = 0; p < left.n_paths(); ++p) {
    const auto a = left.path(p);
    const auto s = a[TL - 1];
    const double denom = shared.mass(s);
    for (std::size_t q : starting[s]) {
      if (masses.size() >= cap) throw ResourceError("Markovized law exceeds the oracle cap");
      const auto b = right.path(q);
      states.insert(states.end(), a.begin(), a.end());
      states.insert(states.end(), b.begin() + 1, b.end());
      masses.push_back(left.mass(p) * right.mass(q) / denom);
    }
  }
  return JointLaw::from_paths(pos, states, masses);
}

}  // namespace

GridPathLaw make_markov_at(const GridPathLaw& l, std::span<const double> r, std::size_t cap) {
  const auto& grid = l.grid();
  std::vector<std::size_t> cut;
  for (double t : r) {
    const auto idx = grid.index_of(t);
    if (idx == 0 || idx + 1 >= grid.size())
      throw PreconditionError("Markov time " + std::to_string(t) + " is not an interior grid time");
    cut.push_back(idx);
  }
  std::sort(cut.begin(), cut.end());
  cut.erase(std::unique(cut.begin(), cut.end()), cut.end());

  LawOrigin origin = l.origin();
  for (std::size_t idx : cut) origin.markov_times.push_back(grid[idx]);
  std::sort(origin.markov_times.begin(), origin.markov_times.end());
  origin.markov_times.erase(std::unique(origin.markov_times.begin(), origin.markov_times.end()),
                            origin.markov_times.end());

  if (cut.empty()) return l;
  // Chains are already Markov at every time.
  if (l.is_chain()) return GridPathLaw(grid, l.chain(), l.interpolation(), std::move(origin));

  const auto& law = l.joint();
  JointLaw acc = law.restrict_to(0, cut.front());
  for (std::size_t c = 0; c < cut.size(); ++c) {
    const std::size_t next = c + 1 < cut.size() ? cut[c + 1] : law.n_times() - 1;
    acc = glue(acc, law.restrict_to(cut[c], next), cap);
  }
  return GridPathLaw(grid, std::move(acc), l.interpolation(), std::move(origin));
}

bool is_markov(const GridPathLaw& l, double tol, std::size_t cap) {
  if (l.is_chain()) return true;
  const auto& grid = l.grid();
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double t = grid[i];
    const auto split = make_markov_at(l, std::span<const double>(&t, 1), cap);
    if (max_mass_difference(split.joint(), l.joint()) > tol) return false;
  }
  return true;
}

}  // namespace mqt
