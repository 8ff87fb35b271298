#include "smellsurv/tracking.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "smellsurv/error.hpp"

namespace smellsurv {

std::string to_string(const InstanceKey& key) {
  return key.file + "|" + key.entity_path + "|" + std::to_string(key.ordinal);
}

std::vector<InstanceKey> make_keys(std::span<const SmellOccurrence> occurrences) {
  std::vector<std::size_t> order(occurrences.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = occurrences[a];
    const auto& y = occurrences[b];
    const auto xl = x.begin_line.value_or(0), yl = y.begin_line.value_or(0);
    return std::tie(x.rule, x.file, x.entity_path, xl) < std::tie(y.rule, y.file, y.entity_path, yl);
  });

  std::vector<InstanceKey> keys(occurrences.size());
  const SmellOccurrence* prev = nullptr;
  std::uint32_t ordinal = 0;
  for (std::size_t idx : order) {
    const auto& o = occurrences[idx];
    if (prev && prev->rule == o.rule && prev->file == o.file && prev->entity_path == o.entity_path) {
      ++ordinal;
    } else {
      ordinal = 0;
    }
    keys[idx] = InstanceKey{o.rule, o.file, o.entity_path, ordinal};
    prev = &o;
  }
  return keys;
}

std::vector<std::pair<InstanceKey, InstanceKey>> apply_rename_heuristic(
    std::span<const InstanceKey> removed_keys, std::span<const InstanceKey> added_keys) {
  std::vector<InstanceKey> removed(removed_keys.begin(), removed_keys.end());
  std::vector<InstanceKey> added(added_keys.begin(), added_keys.end());
  std::sort(removed.begin(), removed.end());
  std::sort(added.begin(), added.end());

  std::vector<bool> taken(removed.size(), false);
  std::vector<std::pair<InstanceKey, InstanceKey>> pairs;
  for (const auto& a : added) {
    if (a.entity_path.empty()) continue;
    for (std::size_t i = 0; i < removed.size(); ++i) {
      const auto& r = removed[i];
      if (taken[i] || r.rule != a.rule || r.entity_path != a.entity_path || r.file == a.file) {
        continue;
      }
      taken[i] = true;
      pairs.emplace_back(r, a);
      break;
    }
  }
  return pairs;
}

Timestamp split_instant(const History& history) {
  if (history.snapshots.empty()) throw Error("history '" + history.app_name + "' is empty");
  const Timestamp first = history.snapshots.front().timestamp;
  const Timestamp last = history.snapshots.back().timestamp;
  return first + (last - first) / 2;
}

namespace {

struct OpenInstance {
  InstanceKey birth_key;
  std::size_t first = 0;
  std::size_t last_present = 0;
};

}  // namespace

std::vector<SurvivalRecord> build_survival_records(const History& history,
                                                   const TrackingOptions& options) {
  const auto& snaps = history.snapshots;
  if (snaps.size() < 2) {
    throw Error("history '" + history.app_name + "' needs at least 2 versions, has " +
                std::to_string(snaps.size()));
  }
  const std::size_t n = snaps.size();
  const std::size_t gap = options.gap_tolerance;
  const Timestamp split = split_instant(history);

  std::vector<SurvivalRecord> out;
  auto emit = [&](const OpenInstance& inst, std::optional<std::size_t> end_index) {
    SurvivalRecord r;
    r.key = inst.birth_key;
    r.scope = scope_of(inst.birth_key.rule);
    r.first_version = snaps[inst.first].version_id;
    r.first_date = snaps[inst.first].timestamp;
    r.last_present_version = snaps[inst.last_present].version_id;
    if (end_index) {
      r.end_date = snaps[*end_index].timestamp;
      r.censored = 1;
      r.duration_days = days_between(r.first_date, *r.end_date);
    } else {
      r.censored = 0;
      r.duration_days = days_between(r.first_date, snaps.back().timestamp);
    }
    r.timeframe = r.first_date < split ? 1 : 2;
    out.push_back(std::move(r));
  };

  std::map<InstanceKey, OpenInstance> active;
  for (std::size_t k = 0; k < n; ++k) {
    const auto keys = make_keys(snaps[k].occurrences);
    const std::set<InstanceKey> present(keys.begin(), keys.end());

    if (options.rename_heuristic && k > 0) {
      std::vector<InstanceKey> removed, added;
      for (const auto& [key, inst] : active) {
        if (inst.last_present == k - 1 && !present.contains(key)) removed.push_back(key);
      }
      for (const auto& key : present) {
        if (!active.contains(key)) added.push_back(key);
      }
      for (const auto& [from, to] : apply_rename_heuristic(removed, added)) {
        auto node = active.extract(from);
        node.key() = to;
        node.mapped().last_present = k;
        active.insert(std::move(node));
      }
    }

    for (auto it = active.begin(); it != active.end();) {
      const auto& inst = it->second;
      if (!present.contains(it->first) && k - inst.last_present > gap) {
        emit(inst, inst.last_present + 1);
        it = active.erase(it);
      } else {
        ++it;
      }
    }

    for (const auto& key : present) {
      auto [it, fresh] = active.try_emplace(key, OpenInstance{key, k, k});
      if (!fresh) it->second.last_present = k;
    }
  }

  for (const auto& [key, inst] : active) {
    if (inst.last_present == n - 1) {
      emit(inst, std::nullopt);
    } else {
      emit(inst, inst.last_present + 1);
    }
  }

  std::sort(out.begin(), out.end(), [](const SurvivalRecord& a, const SurvivalRecord& b) {
    return std::tie(a.first_date, a.key) < std::tie(b.first_date, b.key);
  });
  return out;
}

TimeframeViews assign_timeframes(std::span<const SurvivalRecord> records, const History& history) {
  TimeframeViews views;
  if (records.empty()) return views;
  const Timestamp split = split_instant(history);
  for (const auto& rec : records) {
    if (rec.first_date >= split) {
      SurvivalRecord r = rec;
      r.timeframe = 2;
      views.second.push_back(std::move(r));
      continue;
    }
    SurvivalRecord r = rec;
    r.timeframe = 1;
    if (!r.end_date || *r.end_date > split) {
      r.censored = 0;
      r.end_date.reset();
      r.duration_days = days_between(r.first_date, split);
    }
    views.first.push_back(std::move(r));
  }
  return views;
}

}  // namespace smellsurv
