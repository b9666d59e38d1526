#pragma once

#include <cstdint>
#include <deque>
#include <vector>

namespace edgeoff {

// Per-UE physical queues (units), virtual queues, and their clip levels.
// Q_avg / clips are refreshed from the online arrival-rate estimate.
struct QueueSet {
  std::vector<std::int64_t> q_local;   // Q^l
  std::vector<std::int64_t> q_server;  // Q^s
  std::vector<double> z;               // Z (real: Q_avg may be fractional)
  std::vector<double> q_avg;           // Little's-law queue target
  std::vector<double> q_clip;          // (1+eps1) * Q_avg
  std::vector<double> z_clip;          // (1+eps2) * Q_avg^2

  explicit QueueSet(int n_ues = 0)
      : q_local(n_ues, 0),
        q_server(n_ues, 0),
        z(n_ues, 0.0),
        q_avg(n_ues, 0.0),
        q_clip(n_ues, 0.0),
        z_clip(n_ues, 0.0) {}

  int n_ues() const { return static_cast<int>(q_local.size()); }
  std::int64_t q_total(int k) const { return q_local[k] + q_server[k]; }
  void set_targets(int k, double q_avg_k, double eps1, double eps2) {
    q_avg[k] = q_avg_k;
    q_clip[k] = (1.0 + eps1) * q_avg_k;
    z_clip[k] = (1.0 + eps2) * q_avg_k * q_avg_k;
  }
};

// Slot recursions (all units are integer data units).
std::int64_t step_local_queue(std::int64_t q_local, std::int64_t n_uplink,
                              std::int64_t arrivals);
std::int64_t step_server_queue(std::int64_t q_server, std::int64_t n_computed,
                               std::int64_t q_local, std::int64_t n_uplink);
double step_virtual_queue(double z, double q_total_next, double q_avg);

enum class QueueStatus { ok, failed };

// failed iff any Q^tot exceeds Q_clip or any Z exceeds Z_clip (strict '>')
QueueStatus check_failure(const QueueSet& queues);

// Timestamped per-unit delay measurement, used to cross-check the
// Little's-law delay estimate. Units flow FIFO through the local queue and
// then the server queue; a unit's delay is counted in whole slots from the
// slot it arrived to the slot its computation completes.
class DelayTracker {
 public:
  explicit DelayTracker(int n_ues = 0) : local_(n_ues), server_(n_ues) {}

  // call once per slot per UE, after the slot's service quantities are known
  void on_slot(int k, std::int64_t slot, std::int64_t arrivals,
               std::int64_t uplinked, std::int64_t computed);

  double mean_delay_slots() const {
    return completed_ == 0 ? 0.0
                           : delay_slot_sum_ / static_cast<double>(completed_);
  }
  std::int64_t completed_units() const { return completed_; }

 private:
  struct Batch {
    std::int64_t arrival_slot;
    std::int64_t count;
  };
  std::vector<std::deque<Batch>> local_;
  std::vector<std::deque<Batch>> server_;
  double delay_slot_sum_ = 0.0;
  std::int64_t completed_ = 0;
};

}  // namespace edgeoff
