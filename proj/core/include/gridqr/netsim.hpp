#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gridqr/topology.hpp"

namespace gridqr {

enum class MessageKind { reduce, broadcast };

struct MessageRecord {
  std::size_t src = 0;
  std::size_t dst = 0;
  std::uint64_t bytes = 0;
  bool inter_cluster = false;
  std::size_t step = 0;
  MessageKind kind = MessageKind::reduce;

  friend bool operator==(const MessageRecord&, const MessageRecord&) = default;
};

/// Counters of a simulated run.
///
/// Totals sum over the whole log. The critical_path_* values are the longest
/// dependency chains through the run, each metric maximised on its own:
/// critical_path_msgs counts reduce messages only (the quantity tabulated for
/// a binary reduction), critical_path_all_msgs also counts broadcasts.
/// modeled_time_seconds applies time = β·msgs + α·bytes + γ·flops along the
/// chains with each link's own β and α.
///
/// critical_path_rounds counts the distinct logical steps that carry reduce
/// messages: the number of rounds a level-synchronous reduction needs. It can
/// exceed critical_path_msgs when a domain left unpaired sends early.
struct CostReport {
  std::uint64_t msg_count = 0;
  std::uint64_t inter_cluster_msg_count = 0;
  std::uint64_t broadcast_msg_count = 0;
  std::uint64_t volume_bytes = 0;
  std::uint64_t inter_cluster_volume_bytes = 0;
  std::uint64_t critical_path_msgs = 0;
  std::uint64_t critical_path_rounds = 0;
  std::uint64_t critical_path_all_msgs = 0;
  std::uint64_t critical_path_volume_bytes = 0;
  double flops_critical_path = 0.0;
  double flops_total = 0.0;
  double modeled_time_seconds = 0.0;

  friend bool operator==(const CostReport&, const CostReport&) = default;
};

/// Deterministic stand-in for a communicator over a Topology.
///
/// Each domain carries a local clock and chain counters. charge_flops advances
/// the domain's clock; send() delivers the sender's state plus the link cost
/// to the receiver, which keeps the later of its own state and the arrival.
/// There is no contention: concurrent messages never delay each other.
class Communicator {
 public:
  explicit Communicator(Topology topo);

  void send(std::size_t src, std::size_t dst, std::uint64_t bytes,
            MessageKind kind = MessageKind::reduce);
  void charge_flops(std::size_t domain, double flops);

  /// Logical timestamp stamped on subsequent messages (one per tree level).
  void set_step(std::size_t step) noexcept { step_ = step; }
  std::size_t step() const noexcept { return step_; }

  const Topology& topology() const noexcept { return topo_; }
  const std::vector<MessageRecord>& log() const noexcept { return log_; }
  double flops(std::size_t domain) const { return ledger_.at(domain); }

  CostReport report() const;

 private:
  struct Chain {
    double time = 0.0;
    std::uint64_t msgs = 0;
    std::uint64_t all_msgs = 0;
    std::uint64_t bytes = 0;
    double flops = 0.0;
  };

  void check_domain(std::size_t d) const;

  Topology topo_;
  std::vector<MessageRecord> log_;
  std::vector<double> ledger_;
  std::vector<Chain> chains_;
  std::size_t step_ = 0;
};

CostReport cost_report(const Communicator& comm);

}  // namespace gridqr
