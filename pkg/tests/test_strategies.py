#@HEADER
# ************************************************************************
#
#                        dtxalign v. 0.1
#
# dtxalign is licensed under 3-clause BSD terms of use, see LICENSE.md.
#
# ************************************************************************
#@HEADER

import itertools
import logging
import unittest

import numpy as np
import torch
from hypothesis import given, settings, strategies as st

import dtxalign.strategies as strategies
from dtxalign.channel import SinrTensor
from dtxalign.strategies import (EXAMPLE_EXPECTED, EXAMPLE_INITIAL_PSI, EXAMPLE_STEPS, MemoryStrategy,
                                 PPersistentStrategy, ScoreState, SlotCapacity, SlotPriority, make_strategy,
                                 memory_update, p_persistent_priority, random_priority, rank_by_capacity,
                                 replay_example, sequential_priority, slot_sum_capacity)

capacities = st.lists(st.integers(0,1000),min_size=1,max_size=12)

class TestSlotCapacity(unittest.TestCase):

  def test_zero_sinr(self):
    b = slot_sum_capacity(SinrTensor(torch.zeros((4,3,2),dtype=torch.float64)))
    self.assertTrue(np.array_equal(b.b,np.zeros(3)))

  def test_exact_logs(self):
    s = np.zeros((2,2,1))
    s[:,1,0] = [1.0,3.0]
    b = slot_sum_capacity(s)
    self.assertEqual(len(b),2)
    self.assertEqual(b.b[0],0.0)
    self.assertEqual(b.b[1],3.0)

  def test_summation_oracle(self):
    rng = np.random.default_rng(1)

    # SINRs of the form 2^j - 1 make every log2 an integer, so sums are exact
    s = np.power(2.0,rng.integers(0,12,size=(6,5,4)))-1.0
    b = slot_sum_capacity(SinrTensor(torch.as_tensor(s))).b
    for t in range(5):
      total = 0.0
      for n in range(6):
        for k in range(4):
          total += np.log2(1.0+s[n,t,k])
      self.assertEqual(b[t],total)

    s = rng.exponential(10.0,size=(6,5,4))
    b = slot_sum_capacity(s).b
    for t in range(5):
      self.assertAlmostEqual(b[t],sum(np.log2(1.0+s[n,t,k]) for n in range(6) for k in range(4)),places=10)
# end TestSlotCapacity

class TestSimpleStrategies(unittest.TestCase):

  def test_sequential(self):
    self.assertEqual(sequential_priority(3).v,(0,1,2))
    self.assertEqual(sequential_priority(10).v,tuple(range(10)))
    self.assertEqual(sequential_priority(10),sequential_priority(10))
    with self.assertRaises(ValueError):
      sequential_priority(0)

  def test_random_single_slot(self):
    self.assertEqual(random_priority(1,np.random.default_rng(0)).v,(0,))

  def test_random_uniform(self):
    rng = np.random.default_rng(2)
    draws = 60000
    counts = dict.fromkeys(itertools.permutations(range(3)),0)
    for _ in range(draws):
      counts[random_priority(3,rng).v] += 1

    self.assertEqual(len(counts),6)
    expected = draws/6.0
    for c in counts.values():
      self.assertAlmostEqual(c/draws,1.0/6.0,delta=0.01)

    # 99.9% quantile of chi-square with 5 degrees of freedom
    chi2 = sum((c-expected)**2/expected for c in counts.values())
    self.assertLess(chi2,20.52)

  def test_rank_ties(self):
    self.assertEqual(rank_by_capacity([1.0,3.0,3.0,0.0]),(1,2,0,3))
    self.assertEqual(rank_by_capacity(SlotCapacity(np.zeros(3))),(0,1,2))

  @given(capacities)
  def test_rank_monotone_transform(self,b):
    b = np.asarray(b,dtype=float)
    self.assertEqual(rank_by_capacity(b),rank_by_capacity(2.0*b+1.0))
    self.assertEqual(rank_by_capacity(b),rank_by_capacity(np.log1p(b)))
# end TestSimpleStrategies

class TestPPersistent(unittest.TestCase):

  def setUp(self):
    self.b = np.array([1.0,5.0,3.0])
    self.prev = SlotPriority((0,1,2))

  def test_no_previous(self):
    self.assertEqual(p_persistent_priority(self.b,None,0.0,np.random.default_rng(0)).v,(1,2,0))

  def test_degenerate_p(self):
    rng = np.random.default_rng(1)
    for _ in range(100):
      self.assertEqual(p_persistent_priority(self.b,self.prev,1.0,rng).v,(1,2,0))
      self.assertEqual(p_persistent_priority(self.b,self.prev,0.0,rng),self.prev)

  def test_one_draw_per_frame(self):
    a = np.random.default_rng(3)
    b = np.random.default_rng(3)
    p_persistent_priority(self.b,self.prev,0.0,a)
    p_persistent_priority(self.b,self.prev,1.0,b)
    self.assertEqual(a.random(),b.random())

  def test_adoption_rate(self):
    rng = np.random.default_rng(4)
    frames = 100000
    adopted = sum(p_persistent_priority(self.b,self.prev,0.3,rng)!=self.prev for _ in range(frames))
    self.assertAlmostEqual(adopted/frames,0.30,delta=0.01)

  def test_bad_p(self):
    with self.assertRaises(ValueError):
      p_persistent_priority(self.b,self.prev,1.5,np.random.default_rng(0))
    with self.assertRaises(ValueError):
      PPersistentStrategy(3,np.random.default_rng(0),p=-0.1)

  def test_strategy_keeps_whole_permutation(self):
    strategy = PPersistentStrategy(3,np.random.default_rng(5),p=0.3)
    first = strategy.priority(SlotCapacity(self.b))
    self.assertEqual(first.v,(1,2,0))
    for _ in range(50):
      v = strategy.priority(SlotCapacity(np.array([4.0,1.0,2.0]))).v
      self.assertIn(v,[(1,2,0),(0,2,1)])
    self.assertEqual(strategy.frame,51)
# end TestPPersistent

class TestMemory(unittest.TestCase):

  def test_worked_example(self):
    state = ScoreState(list(EXAMPLE_INITIAL_PSI),5,0,frozenset())
    for (used,capacity),(psi,v) in zip(EXAMPLE_STEPS,EXAMPLE_EXPECTED):
      state.used_last = used
      state, priority, _ = memory_update(state,np.asarray(capacity))
      self.assertEqual(tuple(state.psi),psi)
      self.assertEqual(priority.v,v)

  def test_replay_example(self):
    rows = replay_example()
    self.assertEqual(len(rows),3)

    # step 1: psi = {a:0, b:3, c:5}, R = (b, c, a), V = (c, b, a)
    self.assertEqual(rows[0],(1,(0,3,5),(1,2,0),(2,1,0)))
    # step 2: psi = {a:0, b:5, c:5}, V = (b, c, a)
    self.assertEqual(rows[1],(2,(0,5,5),(1,2,0),(1,2,0)))
    # step 3: R = (b, a, c), psi = {a:0, b:5, c:4}, V = (b, c, a)
    self.assertEqual(rows[2],(3,(0,5,4),(1,0,2),(1,2,0)))

    self.assertEqual(replay_example(1),rows[:1])
    with self.assertRaises(ValueError):
      replay_example(0)
    with self.assertRaises(ValueError):
      replay_example(4)

  def test_bounds_random_updates(self):
    rng = np.random.default_rng(6)
    t_slots = 10
    state = ScoreState.initial(t_slots,5,0)
    for _ in range(100000):
      state.used_last = frozenset(int(u) for u in np.flatnonzero(rng.random(t_slots)<0.5))
      state, v, _ = memory_update(state,rng.random(t_slots))
      self.assertTrue(all(0<=p<=5 for p in state.psi))
    state.check()

  def test_fixed_point(self):
    state = ScoreState([5]*4,5,0,frozenset(range(4)))
    new_state, _, _ = memory_update(state,np.array([0.5,2.0,1.0,3.0]))
    self.assertEqual(new_state.psi,[5]*4)

  @settings(max_examples=300,deadline=None)
  @given(st.integers(2,10).flatmap(lambda t: st.tuples(
           st.lists(st.integers(0,5),min_size=t,max_size=t),
           st.lists(st.booleans(),min_size=t,max_size=t),
           st.lists(st.floats(0.0,100.0,allow_nan=False),min_size=t,max_size=t))))
  def test_used_slot_never_below_unused(self,data):
    psi, used, b = data
    state = ScoreState(list(psi),5,0,frozenset(i for i,u in enumerate(used) if u))
    new_state, v, ranking = memory_update(state,np.asarray(b))

    self.assertTrue(v.isPermutation(len(psi)))
    self.assertEqual(sorted(ranking),list(range(len(psi))))
    for i in range(len(psi)):
      for j in range(len(psi)):
        if used[i] and not used[j] and j!=ranking[0] and psi[i]==psi[j]:
          self.assertGreaterEqual(new_state.psi[i],new_state.psi[j])
    new_state.check()

  def test_initial_state(self):
    state = ScoreState.initial(10,5,0)
    self.assertEqual(state.psi,[0]*10)
    self.assertEqual(state.used_last,frozenset(range(10)))

  def test_strategy_trace(self):
    strategy = MemoryStrategy(3,psi_ul=5,psi_ll=0,cell=0,keep_trace=True)
    strategy.priority(SlotCapacity(np.array([1.0,3.0,2.0])))
    strategy.recordUsage((1,))
    strategy.priority(SlotCapacity(np.array([1.0,3.0,2.0])))

    self.assertEqual(len(strategy.trace),2)
    frame, psi, ranking, v = strategy.trace[0]
    self.assertEqual(frame,1)
    # all slots used initially, R0 = slot 1 gets the double increment
    self.assertEqual(psi,(1,2,1))
    self.assertEqual(v,(1,2,0))
    self.assertEqual(strategy.trace[1][1],(0,4,0))

  def test_debug_trace_lines(self):
    strategy = MemoryStrategy(3,cell=4)
    with self.assertLogs('dtxalign.strategies',level=logging.DEBUG) as cm:
      strategy.priority(SlotCapacity(np.array([1.0,3.0,2.0])))
    self.assertIn('frame=1 cell=4 psi=1,2,1 R=1,2,0 V=1,2,0',cm.output[0])

  def test_bad_bounds(self):
    with self.assertRaises(ValueError):
      MemoryStrategy(3,psi_ul=0,psi_ll=1)
# end TestMemory

class TestAllStrategies(unittest.TestCase):

  @settings(max_examples=100,deadline=None)
  @given(st.sampled_from(strategies.STRATEGY_NAMES),st.integers(1,12),st.integers(0,2**32-1),st.integers(1,8))
  def test_output_is_permutation(self,name,t_slots,seed,frames):
    rng = np.random.default_rng(seed)
    strategy = make_strategy(name,t_slots,rng,p=0.3)
    for _ in range(frames):
      priority = strategy.priority(SlotCapacity(rng.exponential(1.0,t_slots)))
      self.assertTrue(priority.isPermutation(t_slots))
      strategy.recordUsage(tuple(int(u) for u in np.flatnonzero(rng.random(t_slots)<0.5)))

  def test_unknown(self):
    with self.assertRaises(ValueError):
      make_strategy('round_robin',10,np.random.default_rng(0))

  def test_names(self):
    for name in strategies.STRATEGY_NAMES:
      self.assertEqual(make_strategy(name,4,np.random.default_rng(0)).name,name)
# end TestAllStrategies

if __name__ == '__main__':
  unittest.main()
