#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "edca/backoff.hpp"
#include "edca/sim.hpp"

#include <cmath>
#include <map>

using namespace edca;

TEST_CASE ("standard draw covers [0, W] uniformly")
{
  Rng rng (7);
  std::map<int, int> hist;
  const int n = 160000;
  for (int i = 0; i < n; ++i)
    hist[backoffDrawStandard (15, rng)]++;
  CHECK (hist.begin ()->first == 0);
  CHECK (hist.rbegin ()->first == 15);
  CHECK (hist.size () == 16);
  for (auto [v, c] : hist)
    CHECK (std::abs (c / double (n) - 1.0 / 16) < 0.004);
}

TEST_CASE ("fractional window is unbiased")
{
  Rng rng (11);
  for (double w : {15.0, 17.595, 33.264, 64.506})
    {
      double sum = 0;
      const int n = 200000;
      for (int i = 0; i < n; ++i)
        {
          const int x = fractionalWindow (w, rng);
          CHECK ((x == int (std::floor (w)) || x == int (std::ceil (w))));
          sum += x;
        }
      CHECK (std::abs (sum / n - w) < 0.01);
    }
}

TEST_CASE ("fractional draw has mean W/2")
{
  Rng rng (3);
  const double w = 22.835;
  double sum = 0;
  const int n = 400000;
  for (int i = 0; i < n; ++i)
    sum += backoffDrawFractional (w, rng);
  CHECK (std::abs (sum / n - w / 2) < 0.05);
}

TEST_CASE ("entity stage progression and retry drop")
{
  TrafficClassParams p;
  p.cwMin = 15;
  p.m = 2;
  p.retryLimit = 4;
  BackoffEntity e (p, BackoffMode::Standard, 0);
  Rng rng (1);
  e.drawCounter (rng);
  CHECK (e.stage () == 0);
  CHECK (e.window () == 15);
  CHECK_FALSE (e.onCollision (rng));
  CHECK (e.window () == 31);
  CHECK_FALSE (e.onCollision (rng));
  CHECK (e.window () == 63);
  CHECK_FALSE (e.onCollision (rng));
  CHECK (e.window () == 63);  // capped at stage m
  CHECK (e.onCollision (rng));
  CHECK (e.stage () == 0);
  CHECK_FALSE (e.onCollision (rng));
  e.onSuccess (rng);
  CHECK (e.stage () == 0);
  CHECK (e.counter () >= 0);
  CHECK (e.counter () <= 15);
}

TEST_CASE ("bounded queue")
{
  TrafficClassParams p;
  BackoffEntity e (p, BackoffMode::Standard, 2);
  CHECK (e.hasRoom ());
  e.queue ().push_back ({});
  e.queue ().push_back ({});
  CHECK_FALSE (e.hasRoom ());
  BackoffEntity u (p, BackoffMode::Standard, 0);
  for (int i = 0; i < 1000; ++i)
    u.queue ().push_back ({});
  CHECK (u.hasRoom ());
}

TEST_CASE ("slot classification and virtual collisions")
{
  CHECK (classifySlot (0) == SlotOutcome::Idle);
  CHECK (classifySlot (1) == SlotOutcome::Success);
  CHECK (classifySlot (3) == SlotOutcome::Collision);
  const int ready[] = {2, 1, 3};
  CHECK (virtualCollisionWinner (ready) == 1);
  CHECK (virtualCollisionWinner ({}) == -1);
  CHECK (burstLength (4, 2) == 2);
  CHECK (burstLength (1, 9) == 1);
}

TEST_CASE ("burst duration")
{
  PhyTiming phy;
  const int one[] = {1500};
  const int three[] = {1500, 1500, 40};
  const double x = phy.exchangeDuration (1500);
  CHECK (burstDuration (phy, one) == doctest::Approx (x).epsilon (1e-12));
  CHECK (burstDuration (phy, three)
         == doctest::Approx (2 * x + phy.exchangeDuration (40) + 2 * phy.sifs).epsilon (1e-12));
}
