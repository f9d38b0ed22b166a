#@HEADER
# ************************************************************************
#
#                        dtxalign v. 0.1
#
# dtxalign is licensed under 3-clause BSD terms of use, see LICENSE.md.
#
# ************************************************************************
#@HEADER

import unittest

import numpy as np

from dtxalign.channel import TransmitPattern
from dtxalign.config import SimConfig
from dtxalign.engine import (DropSimulation, FrameMetrics, convergence_frame, outage_rate, reduce_drop,
                             retransmission_probability, run_drop, run_drops, run_experiment, summarize,
                             trace_variation)
from dtxalign.power import PowerParams, breakdown
from dtxalign.scheduler import ScheduleMap, rb_bits
from dtxalign.strategies import RandomStrategy, SequentialStrategy, slot_sum_capacity
from dtxalign.utils import drop_streams

def small_config(**changes):
  """Seven cells, 6 subcarriers of 200 kHz, 4 slots, 3 mobiles per cell."""
  values = dict(tiers=1,k_per_cell=3,n_subcarriers=6,bandwidth_hz=1.2e6,t_slots=4,
                target_rate_mbps=0.5,frames=8,drops=2,warmup_frames=2)
  values.update(changes)
  return SimConfig(**values)

def synthetic_metrics(flags,infeasible=None):
  """FrameMetrics with only the center-cell flags filled in."""
  flags = np.asarray(flags,dtype=bool)
  if infeasible is None:
    infeasible = np.zeros_like(flags)
  params = PowerParams()
  out = []
  for f in range(flags.shape[0]):
    k = flags.shape[1]
    out.append(FrameMetrics(frame=f,power=[breakdown(0,0,params,10)],scheduled_bits=np.zeros((1,k)),
                            delivered_bits=np.zeros((1,k)),retransmission=flags[f][None,:],
                            infeasible=np.asarray(infeasible[f],dtype=bool)[None,:],
                            failed_rbs=np.zeros(1,dtype=int),center_cell=0))
  return out

class RecordingStrategy(SequentialStrategy):
  """Records what a cell sees whenever it is asked for a priority."""
  sim = None
  calls = None

  def priority(self,capacity):
    RecordingStrategy.calls.append((self.cell,self.frame+1,RecordingStrategy.sim.frame,
                                    RecordingStrategy.sim.sinr_evaluations,np.array(capacity.b)))
    return super().priority(capacity)

class TestDropSimulation(unittest.TestCase):

  def test_initial_frame_default(self):
    sim = DropSimulation(SimConfig(drops=1),0)
    metrics = sim.initialFrame()
    self.assertAlmostEqual(metrics.center_power,350.0,places=9)
    self.assertEqual(metrics.center_t_s,0)
    for p in metrics.power:
      self.assertAlmostEqual(p.total,350.0,places=9)
    self.assertEqual(sim.sinr_evaluations,1)
    self.assertFalse(np.any(metrics.failed_rbs))

  def test_step_requires_initial_frame(self):
    sim = DropSimulation(small_config(),0)
    with self.assertRaises(AssertionError):
      sim.step()

  def test_determinism(self):
    config = small_config(strategy='p_persistent')
    a = run_drop(config,1)
    b = run_drop(config,1)
    self.assertEqual(len(a),config.frames)
    for ma,mb in zip(a,b):
      self.assertEqual([p.total for p in ma.power],[p.total for p in mb.power])
      self.assertTrue(np.array_equal(ma.delivered_bits,mb.delivered_bits))
      self.assertTrue(np.array_equal(ma.retransmission,mb.retransmission))
      ma.check()

  def test_drops_differ(self):
    config = small_config(strategy='random')
    a = reduce_drop(0,run_drop(config,0))
    b = reduce_drop(1,run_drop(config,1))
    self.assertFalse(np.array_equal(a.power,b.power))

  def test_synchrony(self):
    config = small_config(frames=5)
    RecordingStrategy.calls = []

    def factory(cell,rng):
      strategy = RecordingStrategy(config.t_slots,rng)
      strategy.cell = cell
      return strategy

    sim = DropSimulation(config,0,strategy_factory=factory)
    RecordingStrategy.sim = sim
    reports = []
    sim.initialFrame()
    for _ in range(config.frames-1):
      reports.append(sim.report)
      sim.step()

    self.assertEqual(len(RecordingStrategy.calls),(config.frames-1)*sim.num_cells)
    for cell,frame,sim_frame,evaluations,capacity in RecordingStrategy.calls:
      # every cell decides frame f before the joint evaluation of frame f
      self.assertEqual(sim_frame,frame)
      self.assertEqual(evaluations,frame)
      expected = slot_sum_capacity(reports[frame-1][cell]).b
      self.assertTrue(np.array_equal(capacity,expected))

  def test_conservation(self):
    sim = DropSimulation(small_config(),0)
    pi = np.array([[1,0,2,0],[1,3,0,0],[0,3,2,0],[2,0,0,0],[0,0,0,1],[3,0,0,0]])
    bits = np.where(pi>0,rb_bits(1.0),0.0)
    schedule = ScheduleMap(pi=pi,bits=bits,infeasible=np.zeros(3,dtype=bool))

    actual = np.full((6,4,3),1.0)
    actual[0,0,0] = 0.5      # fails
    actual[2,2,1] = 0.99     # fails
    actual[1,1,2] = 1.01     # delivers
    scheduled, delivered, failed = sim.deliver(schedule,actual)

    self.assertEqual(failed,2)
    self.assertTrue(np.allclose(scheduled,[3*200.0,3*200.0,3*200.0]))
    self.assertTrue(np.allclose(delivered,[2*200.0,2*200.0,3*200.0]))

    ok = rb_bits(actual[np.nonzero(pi)+(pi[np.nonzero(pi)]-1,)])>=bits[np.nonzero(pi)]
    expected = np.bincount(pi[np.nonzero(pi)]-1,weights=bits[np.nonzero(pi)]*ok,minlength=3)
    self.assertTrue(np.array_equal(delivered,expected))

  def test_delivery_never_exceeds_schedule(self):
    for strategy in ('random','memory'):
      for m in run_drop(small_config(strategy=strategy,target_rate_mbps=1.5),0):
        m.check()
        self.assertTrue(np.all(m.retransmission|(m.delivered_bits>0.0)))

  def test_interference_causality(self):
    sim = DropSimulation(small_config(),0)
    cfg = sim.config
    full = TransmitPattern.full(sim.num_cells,cfg.n_subcarriers,cfg.t_slots)
    quiet = full.active.clone()
    neighbor = sim.layout.neighbors(sim.center)[0]
    quiet[neighbor,:,2] = False

    before = sim.evaluate(full)[sim.center]
    after = sim.evaluate(TransmitPattern(quiet))[sim.center]
    self.assertTrue((after[:,2,:]>before[:,2,:]).all())
    self.assertTrue((after[:,[0,1,3],:]==before[:,[0,1,3],:]).all())
    self.assertEqual(sim.sinr_evaluations,2)

  def test_low_rate_power(self):
    # 4e-4 bits per mobile: one block each, all of them in the first slot
    config = small_config(strategy='sequential',target_rate_mbps=1e-7)
    metrics = run_drop(config,0)
    t = config.t_slots
    expected = 90.0*(t-1)/t+3.0*config.k_per_cell/t+200.0/t
    for m in metrics[1:]:
      self.assertEqual(m.center_t_s,t-1)
      self.assertAlmostEqual(m.center_power,expected,places=9)

  def test_memory_trace(self):
    sim = DropSimulation(small_config(strategy='memory'),0,keep_trace=True)
    sim.run()
    trace = sim.algorithmTrace()
    self.assertEqual(len(trace),sim.config.frames-1)
    frame, psi, ranking, v = trace[0]
    self.assertEqual(frame,1)
    self.assertEqual(sorted(v),list(range(sim.config.t_slots)))
    self.assertTrue(all(0<=p<=5 for p in psi))
# end TestDropSimulation

class TestMetrics(unittest.TestCase):

  def test_retransmission_probability(self):
    flags = np.zeros((2,10),dtype=bool)
    self.assertEqual(retransmission_probability(synthetic_metrics(flags)),0.0)

    flags[0,[1,4]] = True
    flags[1,7] = True
    self.assertAlmostEqual(retransmission_probability(synthetic_metrics(flags)),0.15)

    self.assertEqual(retransmission_probability(synthetic_metrics(np.ones((3,4)))),1.0)

    with self.assertRaises(ValueError):
      retransmission_probability([])

  def test_infeasible_counts_as_flagged(self):
    flags = np.zeros((2,10),dtype=bool)
    infeasible = np.zeros((2,10),dtype=bool)
    infeasible[1,:2] = True
    metrics = synthetic_metrics(flags,infeasible)
    self.assertAlmostEqual(retransmission_probability(metrics),0.1)
    self.assertAlmostEqual(outage_rate(metrics),0.1)

  def test_convergence_frame(self):
    self.assertEqual(convergence_frame(np.full(20,100.0)),0)

    trace = np.concatenate([[350.0,250.0,180.0],np.full(20,150.0)])
    self.assertEqual(convergence_frame(trace,0.01),3)
    self.assertEqual(convergence_frame(trace,0.25),2)

    trace[10] = 160.0
    self.assertEqual(convergence_frame(trace,0.01),11)

    with self.assertRaises(ValueError):
      convergence_frame([])

  def test_trace_variation(self):
    self.assertEqual(trace_variation(np.full(20,150.0)),0.0)

    # the transient is outside the last 10 frames
    trace = np.concatenate([np.full(5,350.0),np.tile([99.0,101.0],5)])
    self.assertAlmostEqual(trace_variation(trace),0.01)
    self.assertAlmostEqual(trace_variation([10.0,30.0]),0.5)

    with self.assertRaises(ValueError):
      trace_variation([])
# end TestMetrics

class TestExperiment(unittest.TestCase):

  def test_random_collisions(self):
    # two cells that each need one slot pick the same one with probability 1/T
    streams = drop_streams(1,0,2)
    a = RandomStrategy(10,streams['strategies'][0])
    b = RandomStrategy(10,streams['strategies'][1])
    frames = 20000
    same = sum(a.priority(None).v[0]==b.priority(None).v[0] for _ in range(frames))
    self.assertAlmostEqual(same/frames,0.1,delta=0.01)

  def test_summarize(self):
    config = small_config(strategy='memory',target_rate_mbps=1.0)
    results = run_drops(config)
    self.assertEqual([r.drop_index for r in results],[0,1])

    summary = summarize(config,results)
    self.assertEqual(summary.drops,2)
    self.assertEqual(summary.strategy,'memory')
    self.assertAlmostEqual(summary.cell_sum_rate_mbps,3.0)
    self.assertEqual(len(summary.power_trace),config.frames)
    self.assertTrue(0.0<=summary.retransmission_probability<=1.0)
    self.assertTrue(0.0<=summary.outage_rate<=summary.retransmission_probability)
    self.assertTrue(0<=summary.mean_dtx_slots<=config.t_slots)
    self.assertAlmostEqual(summary.final_cv,trace_variation(summary.power_trace))

    steady = np.stack([r.power for r in results])[:,config.warmup_frames:]
    self.assertAlmostEqual(summary.mean_power,steady.mean())

  def test_run_experiment(self):
    config = small_config()
    a = run_experiment(config,[0.5,1.0],strategies=['sequential','memory'])
    b = run_experiment(config,[0.5,1.0],strategies=['sequential','memory'])

    self.assertEqual([(s.strategy,s.target_rate_mbps) for s in a],
                     [('sequential',0.5),('sequential',1.0),('memory',0.5),('memory',1.0)])
    for sa,sb in zip(a,b):
      self.assertEqual(sa.mean_power,sb.mean_power)
      self.assertEqual(sa.retransmission_probability,sb.retransmission_probability)
      self.assertTrue(np.array_equal(sa.power_trace,sb.power_trace))

    # frame 0 is full power for every pair
    for s in a:
      self.assertAlmostEqual(s.power_trace[0],200.0+3.0*config.n_subcarriers,places=9)

  def test_isolated_cell_never_retransmits(self):
    # without interferers the reported SINR is exactly the realized one
    config = small_config(tiers=0,target_rate_mbps=0.25)
    for summary in run_experiment(config,[0.25],strategies=['sequential','random','p_persistent','memory']):
      self.assertEqual(summary.retransmission_probability,0.0)

  def test_bad_sweep(self):
    with self.assertRaises(ValueError):
      run_experiment(small_config(),[])
# end TestExperiment

if __name__ == '__main__':
  unittest.main()
