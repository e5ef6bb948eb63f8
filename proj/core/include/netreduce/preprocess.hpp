#pragma once

#include <string>
#include <vector>

#include "netreduce/graph.hpp"

namespace netreduce {

enum class GroupKind { VoltageLevel, AcIsland, Combined, Single };

/// Total node -> group labeling aligned with a network's node order.
/// Group ids are dense, 0..group_count-1.
struct GroupLabeling {
  std::vector<std::string> node_ids;
  std::vector<int> labels;
  GroupKind kind = GroupKind::Single;

  std::size_t group_count() const;
  /// Node indices per group, each list ascending.
  std::vector<std::vector<std::size_t>> members() const;
};

/// Collapses parallel edges of the same kind between the same unordered
/// node pair. Reactance and resistance combine as parallel impedances;
/// capacities and num_parallel add; the lowest edge id survives and
/// member_ids lists the merged ids.
Network consolidate_parallel_edges(const Network& net);

/// Groups by exact voltage level, ascending; nodes without a level share
/// the last group.
GroupLabeling group_by_voltage(const Network& net);

/// Components over AcLine and Transformer edges.
GroupLabeling detect_ac_islands(const Network& net);

/// All nodes in group 0.
GroupLabeling single_group(const Network& net);

/// Intersection refinement of two labelings over the same node domain,
/// re-indexed by smallest member index. Throws DomainMismatch.
GroupLabeling combine_labelings(const GroupLabeling& a, const GroupLabeling& b);

}  // namespace netreduce
