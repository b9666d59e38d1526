#include "edgeoff/queueing.hpp"

#include <algorithm>
#include <stdexcept>

namespace edgeoff {

std::int64_t step_local_queue(std::int64_t q_local, std::int64_t n_uplink,
                              std::int64_t arrivals) {
  if (q_local < 0 || n_uplink < 0 || arrivals < 0)
    throw std::invalid_argument("step_local_queue: negative input");
  return std::max<std::int64_t>(0, q_local - n_uplink) + arrivals;
}

std::int64_t step_server_queue(std::int64_t q_server, std::int64_t n_computed,
                               std::int64_t q_local, std::int64_t n_uplink) {
  if (q_server < 0 || n_computed < 0 || q_local < 0 || n_uplink < 0)
    throw std::invalid_argument("step_server_queue: negative input");
  return std::max<std::int64_t>(0, q_server - n_computed) +
         std::min(q_local, n_uplink);
}

double step_virtual_queue(double z, double q_total_next, double q_avg) {
  if (z < 0.0 || q_total_next < 0.0 || q_avg < 0.0)
    throw std::invalid_argument("step_virtual_queue: negative input");
  return std::max(0.0, z + q_total_next - q_avg);
}

QueueStatus check_failure(const QueueSet& queues) {
  for (int k = 0; k < queues.n_ues(); ++k) {
    if (static_cast<double>(queues.q_total(k)) > queues.q_clip[k])
      return QueueStatus::failed;
    if (queues.z[k] > queues.z_clip[k]) return QueueStatus::failed;
  }
  return QueueStatus::ok;
}

void DelayTracker::on_slot(int k, std::int64_t slot, std::int64_t arrivals,
                           std::int64_t uplinked, std::int64_t computed) {
  auto& loc = local_.at(static_cast<std::size_t>(k));
  auto& srv = server_.at(static_cast<std::size_t>(k));

  // mirror the recursions: service drains the pre-slot queue contents, this
  // slot's uploads join the server queue afterwards, arrivals join last
  std::int64_t to_finish = computed;
  while (to_finish > 0 && !srv.empty()) {
    Batch& b = srv.front();
    const std::int64_t take = std::min(to_finish, b.count);
    // a unit arriving in slot t and finishing in slot s occupies a queue at
    // the end of slots t..s-1: sojourn of s-t slots (Little-consistent)
    delay_slot_sum_ +=
        static_cast<double>(take) * static_cast<double>(slot - b.arrival_slot);
    completed_ += take;
    b.count -= take;
    to_finish -= take;
    if (b.count == 0) srv.pop_front();
  }

  std::int64_t to_move = uplinked;
  while (to_move > 0 && !loc.empty()) {
    Batch& b = loc.front();
    const std::int64_t take = std::min(to_move, b.count);
    srv.push_back({b.arrival_slot, take});
    b.count -= take;
    to_move -= take;
    if (b.count == 0) loc.pop_front();
  }

  if (arrivals > 0) loc.push_back({slot, arrivals});
}

}  // namespace edgeoff
