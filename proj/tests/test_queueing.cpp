#include <doctest.h>

#include "edgeoff/queueing.hpp"

using namespace edgeoff;

TEST_SUITE("queueing") {

TEST_CASE("local queue recursion") {
  CHECK(step_local_queue(10, 4, 3) == 9);
  CHECK(step_local_queue(0, 5, 0) == 0);
  CHECK(step_local_queue(10, 20, 7) == 7);  // drain clamps at zero
}

TEST_CASE("server queue recursion") {
  CHECK(step_server_queue(5, 3, 10, 4) == 6);  // max(0,2)+min(10,4)
  CHECK(step_server_queue(0, 0, 0, 100) == 0);
  // uploads are capped by what the local queue holds, not by the link budget
  CHECK(step_server_queue(2, 9000, 3, 301) == 3);
  CHECK(step_server_queue(2, 9000, 400, 301) == 301);  // full drain + upload
}

TEST_CASE("virtual queue recursion") {
  CHECK(step_virtual_queue(5.0, 520.0, 500.0) == 25.0);
  CHECK(step_virtual_queue(0.0, 500.0, 500.0) == 0.0);
  CHECK(step_virtual_queue(100.0, 0.0, 500.0) == 0.0);  // clamps at zero
}

TEST_CASE("clip targets follow epsilon settings") {
  QueueSet q(2);
  q.set_targets(0, 500.0, 10.0, 0.0);
  CHECK(q.q_avg[0] == 500.0);
  CHECK(q.q_clip[0] == doctest::Approx(5500.0).epsilon(1e-15));
  CHECK(q.z_clip[0] == doctest::Approx(250000.0).epsilon(1e-15));
  q.set_targets(1, 1000.0, 10.0, 0.0);
  CHECK(q.q_clip[1] == doctest::Approx(11000.0).epsilon(1e-15));
}

TEST_CASE("failure check uses strict inequalities") {
  QueueSet q(1);
  q.set_targets(0, 500.0, 10.0, 0.0);
  CHECK(check_failure(q) == QueueStatus::ok);  // all zeros

  q.q_local[0] = 5500;  // Q_tot == Q_clip exactly -> still ok
  CHECK(check_failure(q) == QueueStatus::ok);
  q.q_local[0] = 5500;
  q.q_server[0] = 1;  // one over
  CHECK(check_failure(q) == QueueStatus::failed);

  q.q_local[0] = 0;
  q.q_server[0] = 0;
  q.z[0] = 250000.0;
  CHECK(check_failure(q) == QueueStatus::ok);
  q.z[0] = 250000.0 * 1.01;
  CHECK(check_failure(q) == QueueStatus::failed);
}

TEST_CASE("delay tracker counts whole-slot unit delays") {
  // single UE; arrivals wait in the local queue, then the server queue.
  DelayTracker tr(1);
  // slot 0: 10 units arrive, nothing served
  tr.on_slot(0, 0, 10, 0, 0);
  CHECK(tr.completed_units() == 0);
  // slot 1: all 10 uplinked, nothing computed yet
  tr.on_slot(0, 1, 0, 10, 0);
  CHECK(tr.completed_units() == 0);
  // slot 2: all 10 computed -> delay 2 slots each (arrived slot 0)
  tr.on_slot(0, 2, 0, 0, 10);
  CHECK(tr.completed_units() == 10);
  CHECK(tr.mean_delay_slots() == doctest::Approx(2.0).epsilon(1e-12));

  // FIFO split across batches: 4 more arrive at slot 3, uplinked at slot 4,
  // 2 complete at slot 5 and 2 at slot 6
  tr.on_slot(0, 3, 4, 0, 0);
  tr.on_slot(0, 4, 0, 4, 0);
  tr.on_slot(0, 5, 0, 0, 2);
  tr.on_slot(0, 6, 0, 0, 2);
  CHECK(tr.completed_units() == 14);
  // delays: 10 units x 2 slots, 2 units x 2 slots, 2 units x 3 slots
  CHECK(tr.mean_delay_slots() ==
        doctest::Approx((10 * 2.0 + 2 * 2.0 + 2 * 3.0) / 14.0).epsilon(1e-12));
}

}  // TEST_SUITE
