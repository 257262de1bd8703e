#include "gridqr/netsim.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace gridqr {

Communicator::Communicator(Topology topo)
    : topo_(std::move(topo)),
      ledger_(topo_.domain_count(), 0.0),
      chains_(topo_.domain_count()) {}

void Communicator::check_domain(std::size_t d) const {
  if (d >= topo_.domain_count()) {
    throw std::out_of_range("domain " + std::to_string(d) + " out of range (P = " +
                            std::to_string(topo_.domain_count()) + ")");
  }
}

void Communicator::send(std::size_t src, std::size_t dst, std::uint64_t bytes, MessageKind kind) {
  check_domain(src);
  check_domain(dst);
  if (src == dst) throw std::invalid_argument("send: src and dst must differ");

  const bool inter = topo_.cluster_of(src) != topo_.cluster_of(dst);
  log_.push_back({src, dst, bytes, inter, step_, kind});

  Chain arrival = chains_[src];
  const double alpha = topo_.inverse_bandwidth(src, dst);
  arrival.time += topo_.link_latency(src, dst) + (bytes == 0 ? 0.0 : alpha * static_cast<double>(bytes));
  arrival.all_msgs += 1;
  if (kind == MessageKind::reduce) arrival.msgs += 1;
  arrival.bytes += bytes;

  Chain& mine = chains_[dst];
  mine.time = std::max(mine.time, arrival.time);
  mine.msgs = std::max(mine.msgs, arrival.msgs);
  mine.all_msgs = std::max(mine.all_msgs, arrival.all_msgs);
  mine.bytes = std::max(mine.bytes, arrival.bytes);
  mine.flops = std::max(mine.flops, arrival.flops);
}

void Communicator::charge_flops(std::size_t domain, double flops) {
  check_domain(domain);
  if (flops < 0.0) throw std::invalid_argument("charge_flops: negative flop count");
  if (flops == 0.0) return;
  ledger_[domain] += flops;
  chains_[domain].flops += flops;
  const double gamma = topo_.seconds_per_flop(domain);
  if (gamma != 0.0) chains_[domain].time += gamma * flops;
}

CostReport Communicator::report() const {
  CostReport r;
  std::set<std::size_t> reduce_steps;
  for (const MessageRecord& m : log_) {
    ++r.msg_count;
    if (m.kind == MessageKind::reduce) reduce_steps.insert(m.step);
    r.volume_bytes += m.bytes;
    if (m.kind == MessageKind::broadcast) ++r.broadcast_msg_count;
    if (m.inter_cluster) {
      ++r.inter_cluster_msg_count;
      r.inter_cluster_volume_bytes += m.bytes;
    }
  }
  r.critical_path_rounds = reduce_steps.size();
  for (const Chain& c : chains_) {
    r.modeled_time_seconds = std::max(r.modeled_time_seconds, c.time);
    r.critical_path_msgs = std::max(r.critical_path_msgs, c.msgs);
    r.critical_path_all_msgs = std::max(r.critical_path_all_msgs, c.all_msgs);
    r.critical_path_volume_bytes = std::max(r.critical_path_volume_bytes, c.bytes);
    r.flops_critical_path = std::max(r.flops_critical_path, c.flops);
  }
  for (double f : ledger_) r.flops_total += f;
  return r;
}

CostReport cost_report(const Communicator& comm) { return comm.report(); }

}  // namespace gridqr
