#include "dynlab/hyper.hpp"

#include <algorithm>
#include <map>

#include "dynlab/disjoint.hpp"
#include "dynlab/error.hpp"

namespace dynlab::hyper {

using intfam::Outcome;
using intfam::Scope;
using nlohmann::json;
using systems::PointRef;

FiniteSubsetPoint make_finite_subset(std::shared_ptr<const systems::System> sys,
                                     std::vector<PointRef> points) {
  if (!sys) {
    throw_invalid("finite subset point needs a system");
  }
  if (points.empty()) {
    throw_invalid("finite subset point must be nonempty");
  }
  for (const auto& p : points) {
    systems::validate_point(*sys, p);
  }
  std::map<std::string, PointRef> canonical;
  for (auto& p : points) {
    canonical.emplace(p.canonical_key(), std::move(p));
  }
  FiniteSubsetPoint out;
  out.system = std::move(sys);
  for (auto& [key, p] : canonical) {
    out.points.push_back(std::move(p));
  }
  return out;
}

bool same_subset(const FiniteSubsetPoint& a, const FiniteSubsetPoint& b) {
  if (a.points.size() != b.points.size()) {
    return false;
  }
  for (size_t i = 0; i < a.points.size(); ++i) {
    if (a.points[i].canonical_key() != b.points[i].canonical_key()) {
      return false;
    }
  }
  return true;
}

json FiniteSubsetPoint::to_json() const {
  json points_json = json::array();
  for (const auto& p : points) {
    points_json.push_back(p.to_json());
  }
  return json{{"system", system->to_json()}, {"points", points_json}};
}

HausdorffResult hausdorff_distance(const FiniteSubsetPoint& a,
                                   const FiniteSubsetPoint& b, unsigned depth) {
  if (a.system->canonical_key() != b.system->canonical_key()) {
    throw_invalid("hausdorff distance needs points of the same system");
  }
  HausdorffResult out{Rational(0), false};
  auto directed = [&](const FiniteSubsetPoint& from, const FiniteSubsetPoint& to) {
    for (const auto& p : from.points) {
      std::optional<systems::TruncatedDistance> best;
      for (const auto& q : to.points) {
        auto d = systems::distance_truncated(*from.system, p, q, depth);
        if (!best || d.value < best->value) {
          best = d;
        }
        if (best->value == 0 && !best->truncated) {
          break;
        }
      }
      if (best->value > out.value) {
        out.value = best->value;
      }
      out.truncated = out.truncated || best->truncated;
    }
  };
  directed(a, b);
  directed(b, a);
  return out;
}

FiniteSubsetPoint induced_step(const FiniteSubsetPoint& a) {
  std::vector<PointRef> moved;
  moved.reserve(a.points.size());
  for (const auto& p : a.points) {
    moved.push_back(systems::step(*a.system, p));
  }
  return make_finite_subset(a.system, std::move(moved));
}

FiniteSubsetPoint induced_step_n(const FiniteSubsetPoint& a, uint64_t n) {
  FiniteSubsetPoint out = a;
  for (uint64_t i = 0; i < n; ++i) {
    out = induced_step(out);
  }
  return out;
}

namespace {

bool subset_of_keys(const FiniteSubsetPoint& inner,
                    const std::vector<std::string>& outer_keys) {
  for (const auto& p : inner.points) {
    if (!std::binary_search(outer_keys.begin(), outer_keys.end(),
                            p.canonical_key())) {
      return false;
    }
  }
  return true;
}

} // namespace

PeriodicSetResult periodic_set_search(std::shared_ptr<const systems::System> sys,
                                      const systems::OpenSetSpec& u,
                                      const PeriodicSetParams& params) {
  if (params.max_size < 1 || params.max_period < 1) {
    throw_invalid("periodic set search needs max_size >= 1 and max_period >= 1");
  }
  PeriodicSetResult result;
  result.verdict.claim = {"periodic_set",
                          json{{"max_size", params.max_size},
                               {"max_period", params.max_period},
                               {"budget", params.budget},
                               {"u", u.to_json()}},
                          0};
  disjoint::DenseEnumeration dense(sys);
  for (uint64_t i = 0; i < params.budget; ++i) {
    auto cand = dense.point_at(i);
    if (!cand) {
      break;
    }
    if (!systems::contains(*sys, u, *cand)) {
      continue;
    }
    for (uint64_t period = 1; period <= params.max_period; ++period) {
      // Follow the T^period orbit of the candidate while it stays in U;
      // a revisit closes a cycle C with T^period(C) = C.
      std::vector<PointRef> seen{*cand};
      std::vector<std::string> keys{cand->canonical_key()};
      bool escaped = false;
      std::optional<size_t> cycle_start;
      while (seen.size() <= params.max_size + 1) {
        PointRef next = systems::step_n(*sys, seen.back(), period);
        if (!systems::contains(*sys, u, next)) {
          escaped = true;
          break;
        }
        const std::string key = next.canonical_key();
        for (size_t j = 0; j < keys.size(); ++j) {
          if (keys[j] == key) {
            cycle_start = j;
            break;
          }
        }
        if (cycle_start) {
          break;
        }
        seen.push_back(std::move(next));
        keys.push_back(key);
      }
      if (escaped || !cycle_start) {
        continue;
      }
      std::vector<PointRef> cycle(seen.begin() +
                                      static_cast<long>(*cycle_start),
                                  seen.end());
      if (cycle.size() > params.max_size) {
        continue;
      }
      result.witness_set = make_finite_subset(sys, std::move(cycle));
      result.period = period;
      result.verdict.outcome = Outcome::verified;
      result.verdict.scope = Scope::window;
      result.verdict.witness = json{{"set", result.witness_set->to_json()},
                                    {"period", period},
                                    {"size", result.witness_set->points.size()}};
      return result;
    }
  }
  result.verdict.outcome = Outcome::refuted;
  result.verdict.scope = Scope::budget;
  result.verdict.counterexample = json{{"budget", params.budget}};
  return result;
}

bool reverify_periodic_witness(const PeriodicSetResult& result,
                               const systems::OpenSetSpec& u,
                               uint64_t multiples) {
  if (!result.witness_set || result.period == 0) {
    return false;
  }
  const auto& c = *result.witness_set;
  std::vector<std::string> keys;
  for (const auto& p : c.points) {
    if (!systems::contains(*c.system, u, p)) {
      return false;
    }
    keys.push_back(p.canonical_key());
  }
  std::sort(keys.begin(), keys.end());
  FiniteSubsetPoint iterate = c;
  for (uint64_t j = 0; j < multiples; ++j) {
    iterate = induced_step_n(iterate, result.period);
    if (!subset_of_keys(iterate, keys)) {
      return false;
    }
  }
  return true;
}

} // namespace dynlab::hyper
