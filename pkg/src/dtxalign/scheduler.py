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
Sequential resource block allocation.

Mobiles are served in index order, each filled to its per-frame target
before the next one starts. A mobile consumes resource blocks in priority
order: slots as given by the strategy, subcarriers ascending within a
slot. Every block carries the Shannon bits of the SINR reported for it in
the previous frame; the last block of a mobile is not split. Slots nobody
uses are DTX.

The schedule map stores owners 1..K (mobile index + 1) and 0 for an
unscheduled block.
"""

from dataclasses import dataclass

import numpy as np

SUBCARRIER_BW_HZ = 200e3
SLOT_DURATION_S = 1e-3

def rb_bits(s,subcarrier_bw=SUBCARRIER_BW_HZ,slot_duration=SLOT_DURATION_S):
  """Shannon bits carried by one resource block at linear SINR s."""
  s = np.asarray(s,dtype=float)
  assert np.all(s>=0.0)
  bits = subcarrier_bw*slot_duration*np.log2(1.0+s)
  if bits.ndim==0:
    return float(bits)
  return bits

@dataclass(frozen=True,eq=False)
class RateTargets:
  b_k: np.ndarray    # (K,) bits per frame

  def __post_init__(self):
    if np.any(np.asarray(self.b_k)<=0.0):
      raise ValueError('rate targets must be positive')

  @staticmethod
  def from_mbps(rate_mbps,k_per_cell,frame_duration_s):
    """Uniform targets; 2 Mbps over a 10 ms frame is 20000 bits."""
    bits = rate_mbps*1e6*frame_duration_s
    return RateTargets(np.full(k_per_cell,bits,dtype=float))

  def __len__(self):
    return len(self.b_k)
# end RateTargets

@dataclass(frozen=True,eq=False)
class ScheduleMap:
  pi: np.ndarray          # (N, T) owner 1..K, 0 = unscheduled
  bits: np.ndarray        # (N, T) scheduled bits
  infeasible: np.ndarray  # (K,) target could not be scheduled

  @property
  def t_slots(self):
    return self.pi.shape[1]

  @property
  def k_per_cell(self):
    return len(self.infeasible)

  @property
  def t_s(self):
    """Number of slots without any scheduled block (DTX slots)."""
    return int(np.count_nonzero(~np.any(self.pi!=0,axis=0)))

  @property
  def t_tx(self):
    return self.t_slots-self.t_s

  @property
  def num_scheduled_rbs(self):
    return int(np.count_nonzero(self.pi))

  @property
  def used_slots(self):
    return tuple(int(t) for t in np.flatnonzero(np.any(self.pi!=0,axis=0)))

  def scheduled_bits(self):
    """(K,) total scheduled bits per mobile."""
    totals = np.bincount(self.pi.ravel(),weights=self.bits.ravel(),minlength=self.k_per_cell+1)
    return totals[1:]

  def check(self):
    assert np.all((self.bits>0.0)==(self.pi!=0))
    assert np.all((self.pi>=0) & (self.pi<=self.k_per_cell))
# end ScheduleMap

def priority_order(priority,n_subcarriers):
  """
  Flat visiting order of the resource blocks: (subcarrier, slot) index
  arrays, slots in priority order and subcarriers ascending in a slot.
  """
  v = np.asarray(priority.v if hasattr(priority,'v') else priority,dtype=int)
  slots = np.repeat(v,n_subcarriers)
  subcarriers = np.tile(np.arange(n_subcarriers),len(v))
  return subcarriers, slots

def allocate(priority,est,targets,subcarrier_bw=SUBCARRIER_BW_HZ,slot_duration=SLOT_DURATION_S):
  """
  Build the schedule map of one cell for one frame.

  est is the (N, T, K) SINR reported in the previous frame (SinrTensor or
  array). Blocks with zero estimated bits for a mobile are skipped for
  that mobile. A mobile whose target cannot be reached with the blocks
  still available gets none of them and is flagged infeasible, so the
  mobiles after it are still served; allocation never aborts.
  """
  s = est.numpy() if hasattr(est,'numpy') and not isinstance(est,np.ndarray) else np.asarray(est)
  n_subcarriers, t_slots, k_per_cell = s.shape
  b_k = np.asarray(targets.b_k if hasattr(targets,'b_k') else targets,dtype=float)
  assert len(b_k)==k_per_cell
  assert sorted(priority.v)==list(range(t_slots))

  sub, slot = priority_order(priority,n_subcarriers)
  bits_all = rb_bits(s[sub,slot,:],subcarrier_bw,slot_duration)      # (N*T, K)

  owner = np.zeros(len(sub),dtype=int)
  infeasible = np.zeros(k_per_cell,dtype=bool)
  for k in range(k_per_cell):
    avail = (owner==0) & (bits_all[:,k]>0.0)
    cum = np.cumsum(np.where(avail,bits_all[:,k],0.0))

    if len(cum)==0 or cum[-1]<b_k[k]:
      infeasible[k] = True
      continue

    last = int(np.searchsorted(cum,b_k[k],side='left'))
    owner[avail & (np.arange(len(cum))<=last)] = k+1

  pi = np.zeros((n_subcarriers,t_slots),dtype=int)
  bits = np.zeros((n_subcarriers,t_slots),dtype=float)
  pi[sub,slot] = owner
  taken = owner>0
  bits[sub[taken],slot[taken]] = bits_all[np.flatnonzero(taken),owner[taken]-1]

  return ScheduleMap(pi=pi,bits=bits,infeasible=infeasible)
# end allocate

def full_schedule(sinr,subcarrier_bw=SUBCARRIER_BW_HZ,slot_duration=SLOT_DURATION_S):
  """
  Worst-case starting schedule: every block transmits. Subcarrier n
  belongs to mobile n mod K in every slot; bits follow the realized SINR.
  """
  s = sinr.numpy() if hasattr(sinr,'numpy') and not isinstance(sinr,np.ndarray) else np.asarray(sinr)
  n_subcarriers, t_slots, k_per_cell = s.shape

  owner = np.arange(n_subcarriers)%k_per_cell
  pi = np.repeat((owner+1)[:,None],t_slots,axis=1)
  bits = rb_bits(s[np.arange(n_subcarriers)[:,None],np.arange(t_slots)[None,:],owner[:,None]],
                 subcarrier_bw,slot_duration)

  return ScheduleMap(pi=pi,bits=bits,infeasible=np.zeros(k_per_cell,dtype=bool))
# end full_schedule
