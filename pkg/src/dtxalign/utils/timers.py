#@HEADER
# ************************************************************************
#
#                        dtxalign v. 0.1
#
# dtxalign is licensed under 3-clause BSD terms of use, see LICENSE.md.
#
# ************************************************************************
#@HEADER

from timeit import default_timer as timer

import numpy as np
import pandas as pd

class PhaseTimer:
  """
  Accumulates wall clock samples for one phase of the frame loop
  (strategy, allocate, sinr, delivery). Used as a context manager.
  """
  def __init__(self,name):
    self.name   = name
    self.times  = []
    self.timing = False

  def __enter__(self):
    self.timing = True
    self.start_time = timer()
    return self

  def __exit__(self,except_type,except_value,except_traceback):
    self.timing = False
    self.times += [ timer()-self.start_time ]

    # never swallow exceptions raised inside a timed phase
    return False

  def getName(self):
    return self.name

  def isTiming(self):
    return self.timing

  def getTimes(self):
    return self.times
# end PhaseTimer

class PhaseTimerManager:
  def __init__(self):
    self.timers = dict()

  def resetTimers(self):
    self.timers = dict()

  def timer(self,name):
    if name not in self.timers:
      self.timers[name] = PhaseTimer(name)
    return self.timers[name]

  def getTimers(self):
    return list(self.timers.values())

  def samples(self):
    return {name: list(t.getTimes()) for name,t in self.timers.items()}

  def merge(self,samples):
    """
    Fold in the samples of another manager (e.g. gathered from another rank).
    """
    for name,times in samples.items():
      self.timer(name).times += list(times)

  def reduce(self,comm):
    """
    Combine the samples of every rank. Returns a new manager that holds
    the union of all samples; identical on every rank.
    """
    combined = PhaseTimerManager()
    for samples in comm.allgather(self.samples()):
      combined.merge(samples)
    return combined

  def getResultFrame(self):
    """One row per timed phase: count, total, mean and stdev in seconds."""
    rows = []
    for name in sorted(self.timers):
      times = np.asarray(self.timers[name].getTimes(),dtype=float)
      if times.size==0:
        continue
      rows.append((name,times.size,times.sum(),times.mean(),times.std(ddof=1) if times.size>1 else 0.0))
    return pd.DataFrame(rows,columns=["phase","count","total","mean","stdev"]).set_index("phase")

  def getResultString(self):
    frame = self.getResultFrame()
    if frame.empty:
      return "  no phase was timed\n"
    return frame.to_string(float_format="{:.4e}".format)+"\n"
# end PhaseTimerManager
