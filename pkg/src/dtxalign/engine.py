#@HEADER
# ************************************************************************
#
#                        dtxalign v. 0.1
#
# dtxalign is licensed under 3-clause BSD terms of use, see LICENSE.md.
#
# ************************************************************************
#@HEADER

"""
Synchronous multi-cell frame loop and Monte-Carlo aggregation.

Frame 0 transmits on every resource block of every cell. Each later frame
is one barrier round:

  1. every cell ranks its slots from its own frame f-1 report, asks its
     strategy for a priority and allocates blocks (no cell sees another
     cell's frame f decision)
  2. all schedules are applied at once and one joint SINR evaluation gives
     the realized SINR of every mobile
  3. a scheduled block delivers its bits iff the realized Shannon bits
     cover them, otherwise it delivers nothing
  4. the realized SINR becomes the report for frame f+1 and every strategy
     learns which slots its cell used

Statistics are collected from the center cell, which is the only cell
surrounded by complete interference tiers.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .channel import (TransmitPattern, build_link_gains, cell_sinr, compute_sinr, drop_associated_mobiles,
                      noise_power)
from .geometry import build_hex_layout
from .power import total_power
from .scheduler import RateTargets, allocate, full_schedule, rb_bits
from .strategies import make_strategy, slot_sum_capacity
from .utils import DropPartitioner, MPI, PhaseTimerManager, drop_streams, gather_by_drop

logger = logging.getLogger(__name__)

# relative slack when comparing delivered bits with the target, so that a
# different summation order of the same blocks cannot raise a flag
DELIVERY_RTOL = 1e-9

# number of trailing frames whose mean is taken as the final value of a trace
FINAL_WINDOW = 10

@dataclass(eq=False)
class FrameMetrics:
  frame: int
  power: list                  # PowerBreakdown per cell
  scheduled_bits: np.ndarray   # (C, K)
  delivered_bits: np.ndarray   # (C, K)
  retransmission: np.ndarray   # (C, K) bool
  infeasible: np.ndarray       # (C, K) bool
  failed_rbs: np.ndarray       # (C,) failed blocks per cell
  center_cell: int = 0

  @property
  def center_power(self):
    return self.power[self.center_cell].total

  @property
  def center_t_s(self):
    return self.power[self.center_cell].t_s

  def check(self):
    assert np.all(self.delivered_bits<=self.scheduled_bits*(1.0+DELIVERY_RTOL))
# end FrameMetrics

@dataclass(eq=False)
class DropResult:
  """Center-cell series of one drop, the unit gathered across ranks."""
  drop_index: int
  power: np.ndarray            # (F,) W
  t_s: np.ndarray              # (F,) DTX slots
  retransmission: np.ndarray   # (F, K) bool
  infeasible: np.ndarray       # (F, K) bool
  algorithm_trace: list = field(default_factory=list)

@dataclass(eq=False)
class RunSummary:
  strategy: str
  target_rate_mbps: float
  cell_sum_rate_mbps: float
  mean_power: float
  power_std: float
  power_trace: np.ndarray
  retransmission_probability: float
  outage_rate: float
  convergence_frame: int
  mean_dtx_slots: float
  drops: int
  algorithm_trace: list = field(default_factory=list)
  final_cv: float = 0.0

  def check(self):
    assert 0.0<=self.retransmission_probability<=1.0
    assert 0.0<=self.outage_rate<=1.0
# end RunSummary

class DropSimulation:
  """
  One Monte-Carlo drop: geometry, frozen link gains and one strategy per
  cell, advanced frame by frame.

  strategy_factory(cell, rng) may replace the configured strategy (used by
  tests to observe what a cell sees).
  """

  def __init__(self,config,drop_index,strategy_factory=None,device=None,timer_manager=None,keep_trace=False):
    self.config = config
    self.drop_index = drop_index
    self.timer_manager = timer_manager if timer_manager is not None else PhaseTimerManager()

    num_cells = config.num_cells
    streams = drop_streams(config.seed,drop_index,num_cells)

    self.layout = build_hex_layout(config.tiers,config.isd_m)
    self.drop, shadowing = drop_associated_mobiles(self.layout,config.k_per_cell,streams['geometry'],
                                                   streams['shadowing'],config.shadowing_std_db,
                                                   config.min_distance_m)
    self.gains = build_link_gains(self.layout,self.drop,streams['fading'],
                                  n_subcarriers=config.n_subcarriers,
                                  min_distance=config.min_distance_m,device=device,
                                  shadowing_db=shadowing)
    self.center = self.layout.center_cell_index

    self.n0 = noise_power(config.subcarrier_bw_hz,config.noise_temperature_k)
    self.p_rb = config.p_rb_tx_w
    self.targets = RateTargets.from_mbps(config.target_rate_mbps,config.k_per_cell,config.frame_duration_s)
    self.power_params = config.power_params

    if strategy_factory is None:
      def strategy_factory(cell,rng):
        return make_strategy(config.strategy,config.t_slots,rng,p=config.p,
                             psi_ul=config.psi_ul,psi_ll=config.psi_ll,cell=cell,
                             keep_trace=keep_trace and cell==self.center)
    self.strategies = [strategy_factory(c,streams['strategies'][c]) for c in range(num_cells)]

    self.frame = -1
    self.report = None
    self.sinr_evaluations = 0
  # end __init__

  @property
  def num_cells(self):
    return self.layout.num_cells

  def _bits(self,s):
    return rb_bits(s,self.config.subcarrier_bw_hz,self.config.slot_duration_s)

  def evaluate(self,pattern):
    """Joint SINR of all cells for one transmit pattern."""
    with self.timer_manager.timer('sinr'):
      sinr = compute_sinr(self.gains,pattern,self.p_rb,self.n0)
    self.sinr_evaluations += 1
    return sinr

  def initialFrame(self):
    """Frame 0: full power on every block, delivery at the realized SINR."""
    assert self.frame==-1
    self.frame = 0

    cfg = self.config
    sinr = self.evaluate(TransmitPattern.full(self.num_cells,cfg.n_subcarriers,cfg.t_slots,
                                              device=self.gains.gain.device))
    schedules = [full_schedule(cell_sinr(sinr,c).numpy(),cfg.subcarrier_bw_hz,cfg.slot_duration_s)
                 for c in range(self.num_cells)]

    scheduled = np.stack([s.scheduled_bits() for s in schedules])
    failed = np.zeros(self.num_cells,dtype=int)
    metrics = self._metrics(schedules,scheduled,scheduled.copy(),failed)

    self.report = sinr
    for strategy,schedule in zip(self.strategies,schedules):
      strategy.recordUsage(schedule.used_slots)
    return metrics
  # end initialFrame

  def step(self):
    assert self.report is not None, 'initialFrame() must run first'
    self.frame += 1
    cfg = self.config

    # 1. decisions from the frame f-1 reports only
    schedules = []
    for c,strategy in enumerate(self.strategies):
      est = cell_sinr(self.report,c)
      with self.timer_manager.timer('strategy'):
        priority = strategy.priority(slot_sum_capacity(est))
      with self.timer_manager.timer('allocate'):
        schedules.append(allocate(priority,est.numpy(),self.targets,cfg.subcarrier_bw_hz,cfg.slot_duration_s))

    # 2. simultaneous transmission
    actual = self.evaluate(TransmitPattern.from_schedules(schedules,device=self.gains.gain.device))

    # 3. delivery
    with self.timer_manager.timer('delivery'):
      scheduled = np.zeros((self.num_cells,cfg.k_per_cell))
      delivered = np.zeros((self.num_cells,cfg.k_per_cell))
      failed = np.zeros(self.num_cells,dtype=int)
      for c,schedule in enumerate(schedules):
        scheduled[c], delivered[c], failed[c] = self.deliver(schedule,cell_sinr(actual,c).numpy())

    metrics = self._metrics(schedules,scheduled,delivered,failed)

    # 4. reports and slot usage for the next round
    self.report = actual
    for strategy,schedule in zip(self.strategies,schedules):
      strategy.recordUsage(schedule.used_slots)
    return metrics
  # end step

  def deliver(self,schedule,actual):
    """
    Delivered bits per mobile of one cell: a block delivers its scheduled
    bits iff rb_bits(actual SINR) covers them. Returns
    (scheduled bits, delivered bits, number of failed blocks).
    """
    k_per_cell = schedule.k_per_cell
    n, t = np.nonzero(schedule.pi)
    owner = schedule.pi[n,t]-1
    bits = schedule.bits[n,t]
    ok = self._bits(actual[n,t,owner])>=bits

    scheduled = np.bincount(owner,weights=bits,minlength=k_per_cell)
    delivered = np.bincount(owner,weights=np.where(ok,bits,0.0),minlength=k_per_cell)
    return scheduled, delivered, int(np.count_nonzero(~ok))

  def _metrics(self,schedules,scheduled,delivered,failed):
    power = [total_power(s,self.power_params,self.config.t_slots) for s in schedules]
    infeasible = np.stack([s.infeasible for s in schedules])
    short = delivered<self.targets.b_k[None,:]*(1.0-DELIVERY_RTOL)
    return FrameMetrics(frame=self.frame,power=power,scheduled_bits=scheduled,delivered_bits=delivered,
                        retransmission=short|infeasible,infeasible=infeasible,failed_rbs=failed,
                        center_cell=self.center)

  def run(self,frames=None):
    if frames is None:
      frames = self.config.frames
    assert frames>=1

    metrics = [self.initialFrame()]
    for _ in range(frames-1):
      metrics.append(self.step())
    return metrics

  def algorithmTrace(self):
    return list(getattr(self.strategies[self.center],'trace',[]))
# end DropSimulation

def run_drop(config,drop_index,device=None,timer_manager=None,keep_trace=False,strategy_factory=None):
  """Simulate one drop and return its FrameMetrics, frame 0 first."""
  sim = DropSimulation(config,drop_index,strategy_factory=strategy_factory,device=device,
                       timer_manager=timer_manager,keep_trace=keep_trace)
  return sim.run()

def reduce_drop(drop_index,metrics,algorithm_trace=None):
  return DropResult(drop_index=drop_index,
                    power=np.array([m.center_power for m in metrics]),
                    t_s=np.array([m.center_t_s for m in metrics]),
                    retransmission=np.stack([m.retransmission[m.center_cell] for m in metrics]),
                    infeasible=np.stack([m.infeasible[m.center_cell] for m in metrics]),
                    algorithm_trace=list(algorithm_trace or []))

def _center_flags(metrics,attr):
  if len(metrics)==0:
    raise ValueError('no frame metrics given')
  return np.stack([getattr(m,attr)[m.center_cell] for m in metrics])

def retransmission_probability(metrics):
  """
  Fraction of (frame, center-cell mobile) pairs that need a retransmission.
  Mobiles with an infeasible schedule count as flagged. Pass steady-state
  frames only.
  """
  flags = _center_flags(metrics,'retransmission')|_center_flags(metrics,'infeasible')
  return float(np.mean(flags))

def outage_rate(metrics):
  """Fraction of (frame, center-cell mobile) pairs with an infeasible schedule."""
  return float(np.mean(_center_flags(metrics,'infeasible')))

def convergence_frame(trace,tolerance=0.01):
  """
  First frame from which the trace stays within tolerance (relative) of
  its final value, the final value being the mean of the last frames.
  """
  trace = np.asarray(trace,dtype=float)
  if trace.size==0:
    raise ValueError('empty trace')

  final = float(np.mean(trace[-min(FINAL_WINDOW,trace.size):]))
  inside = np.abs(trace-final)<=tolerance*abs(final)

  # last frame outside the band, plus one
  outside = np.flatnonzero(~inside)
  return 0 if outside.size==0 else int(outside[-1])+1

def trace_variation(trace,window=FINAL_WINDOW):
  """Coefficient of variation (std over mean) of the last window frames of a trace."""
  trace = np.asarray(trace,dtype=float)
  if trace.size==0:
    raise ValueError('empty trace')
  tail = trace[-min(window,trace.size):]
  mean = float(np.mean(tail))
  return float(np.std(tail))/mean if mean!=0.0 else 0.0

def summarize(config,results):
  """Aggregate the DropResults of one (strategy, rate) pair."""
  assert len(results)>=1
  warm = config.warmup_frames

  power = np.stack([r.power for r in results])                # (D, F)
  trace = power.mean(axis=0)
  steady_means = power[:,warm:].mean(axis=1)
  flags = np.concatenate([r.retransmission[warm:]|r.infeasible[warm:] for r in results])
  infeasible = np.concatenate([r.infeasible[warm:] for r in results])

  summary = RunSummary(strategy=config.strategy,
                       target_rate_mbps=config.target_rate_mbps,
                       cell_sum_rate_mbps=config.cell_sum_rate_mbps,
                       mean_power=float(power[:,warm:].mean()),
                       power_std=float(np.std(steady_means,ddof=1)) if len(results)>1 else 0.0,
                       power_trace=trace,
                       retransmission_probability=float(np.mean(flags)),
                       outage_rate=float(np.mean(infeasible)),
                       convergence_frame=convergence_frame(trace,config.convergence_tolerance),
                       mean_dtx_slots=float(np.stack([r.t_s for r in results])[:,warm:].mean()),
                       drops=len(results),
                       algorithm_trace=list(results[0].algorithm_trace),
                       final_cv=trace_variation(trace))
  summary.check()
  return summary
# end summarize

def run_drops(config,comm=None,device=None,timer_manager=None,keep_trace=False):
  """
  Simulate config.drops drops, spread round-robin over the ranks of comm,
  and return their DropResults in drop order on every rank.
  """
  if comm is None:
    comm = MPI.COMM_WORLD
  rank = comm.Get_rank()

  partition = DropPartitioner(config.drops,comm.Get_size()).get_partition(rank)
  local = dict()
  for d in partition:
    sim = DropSimulation(config,d,device=device,timer_manager=timer_manager,keep_trace=keep_trace and d==0)
    metrics = sim.run()
    local[d] = reduce_drop(d,metrics,sim.algorithmTrace())
    logger.info('rank %d finished drop %d (%s, %.3g Mbps): mean center power %.1f W',
                rank,d,config.strategy,config.target_rate_mbps,float(local[d].power.mean()))

  return gather_by_drop(comm,local,config.drops)
# end run_drops

def run_experiment(config,rate_sweep,strategies=None,comm=None,device=None,timer_manager=None,keep_trace=False):
  """
  Run every (strategy, target rate) pair and return one RunSummary per
  pair, ordered by strategy then rate. Drop d uses the same geometry and
  channel for every pair.
  """
  if config.drops<1:
    raise ValueError('at least one drop is required')
  if not rate_sweep:
    raise ValueError('empty rate sweep')
  if strategies is None:
    strategies = [config.strategy]

  summaries = []
  for strategy in strategies:
    for rate in rate_sweep:
      cfg = config.replace(strategy=strategy,target_rate_mbps=float(rate))
      results = run_drops(cfg,comm=comm,device=device,timer_manager=timer_manager,
                          keep_trace=keep_trace and strategy=='memory')
      summaries.append(summarize(cfg,results))
  return summaries
# end run_experiment
