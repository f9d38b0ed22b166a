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
Slot prioritization strategies for DTX alignment.

Every strategy turns the slot sum capacities B_t measured in the previous
frame into a priority permutation V of the slot indices 0..T-1; the
scheduler fills slots in that order and leaves the rest in DTX.

  sequential    fixed order 0, 1, ..., T-1
  random        fresh uniform permutation every frame
  p_persistent  rank by B_t, adopt the new ranking with probability p
  memory        bounded integer score per slot, see memory_update

Complexity per frame: sequential and random make no decision; p-persistent
sorts once; memory sorts twice (ranking and output). T is small (10 in
LTE-like numerology), so the cost is negligible next to scheduling.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import torch

logger = logging.getLogger(__name__)

STRATEGY_NAMES = ('sequential','random','p_persistent','memory')

@dataclass(frozen=True,eq=False)
class SlotCapacity:
  b: np.ndarray    # (T,) sum of log2(1 + s) over subcarriers and mobiles

  def __len__(self):
    return len(self.b)

@dataclass(frozen=True)
class SlotPriority:
  v: tuple         # permutation of 0..T-1, highest priority first

  def __len__(self):
    return len(self.v)

  def isPermutation(self,t_slots):
    return sorted(self.v)==list(range(t_slots))

@dataclass
class ScoreState:
  psi: list                      # integer score per slot
  psi_ul: int = 5
  psi_ll: int = 0
  used_last: frozenset = field(default_factory=frozenset)

  @staticmethod
  def initial(t_slots,psi_ul=5,psi_ll=0):
    """
    Starting state: every score at the lower bound and every slot marked
    as used, matching the full-power first frame.
    """
    return ScoreState([psi_ll]*t_slots,psi_ul,psi_ll,frozenset(range(t_slots)))

  def check(self):
    assert self.psi_ll<=self.psi_ul
    assert all(self.psi_ll<=p<=self.psi_ul for p in self.psi)
    assert all(0<=u<len(self.psi) for u in self.used_last)
# end ScoreState

def slot_sum_capacity(sinr):
  """
  B_t = sum_k sum_n log2(1 + s[n, t, k]) for a SinrTensor or an (N, T, K)
  tensor/array.
  """
  s = sinr.s if hasattr(sinr,'s') else sinr
  s = torch.as_tensor(s,dtype=torch.float64)
  return SlotCapacity(torch.log2(1.0+s).sum(dim=(0,2)).cpu().numpy())

def rank_by_capacity(b):
  """Slots by descending capacity; ties resolved by the lower index."""
  b = np.asarray(b.b if isinstance(b,SlotCapacity) else b,dtype=float)
  return tuple(int(i) for i in np.lexsort((np.arange(len(b)),-b)))

def sequential_priority(t_slots):
  if t_slots<1:
    raise ValueError('at least one slot is required')
  return SlotPriority(tuple(range(t_slots)))

def random_priority(t_slots,rng):
  if t_slots<1:
    raise ValueError('at least one slot is required')
  return SlotPriority(tuple(int(i) for i in rng.permutation(t_slots)))

def p_persistent_priority(b,prev,p,rng):
  """
  Fresh capacity ranking, adopted with probability p. Without a previous
  priority the fresh ranking is always adopted. The whole permutation is
  kept or replaced at once.
  """
  if not 0.0<=p<=1.0:
    raise ValueError('p must lie in [0, 1], got {}'.format(p))

  candidate = SlotPriority(rank_by_capacity(b))
  if prev is None:
    return candidate

  # one draw per frame, also when p is 0 or 1, so the stream stays aligned
  if rng.random()<p:
    return candidate
  return prev
# end p_persistent_priority

def memory_update(state,b):
  """
  One iteration of distributed DTX alignment with memory.

    R   <- slots by descending B_t
    psi <- psi + 1 for used slots below psi_ul
    psi <- psi - 1 for unused slots other than R_0 above psi_ll
    psi <- psi + 1 for R_0, at most psi_ul (a used R_0 gets both increments)
    V   <- slots by descending psi, then descending B_t, then lower index

  Returns (new ScoreState, SlotPriority V, R). The new state keeps
  used_last; the caller replaces it after the frame was scheduled.
  """
  b = np.asarray(b.b if isinstance(b,SlotCapacity) else b,dtype=float)
  t_slots = len(b)
  assert len(state.psi)==t_slots

  ranking = rank_by_capacity(b)
  r0 = ranking[0]
  psi = list(state.psi)

  for u in state.used_last:
    if psi[u]<state.psi_ul:
      psi[u] += 1

  for u in range(t_slots):
    if u in state.used_last or u==r0:
      continue
    if psi[u]>state.psi_ll:
      psi[u] -= 1

  psi[r0] = min(psi[r0]+1,state.psi_ul)

  order = np.lexsort((np.arange(t_slots),-b,-np.asarray(psi)))
  priority = SlotPriority(tuple(int(i) for i in order))

  new_state = ScoreState(psi,state.psi_ul,state.psi_ll,state.used_last)
  return new_state, priority, ranking
# end memory_update

class SlotStrategy:
  """
  Per-cell strategy state. A cell calls priority() once per frame with the
  capacities of its last report, then recordUsage() with the slots its
  schedule actually used. Cells never read each other's strategy.
  """
  name = None

  def __init__(self,t_slots,rng=None):
    self.t_slots = t_slots
    self.rng = rng
    self.frame = 0

  def priority(self,capacity):
    raise NotImplementedError()

  def recordUsage(self,used_slots):
    pass

  def _advance(self):
    self.frame += 1
# end SlotStrategy

class SequentialStrategy(SlotStrategy):
  name = 'sequential'

  def priority(self,capacity):
    self._advance()
    return sequential_priority(self.t_slots)

class RandomStrategy(SlotStrategy):
  name = 'random'

  def priority(self,capacity):
    self._advance()
    return random_priority(self.t_slots,self.rng)

class PPersistentStrategy(SlotStrategy):
  name = 'p_persistent'

  def __init__(self,t_slots,rng,p=0.3):
    super().__init__(t_slots,rng)
    if not 0.0<=p<=1.0:
      raise ValueError('p must lie in [0, 1], got {}'.format(p))
    self.p = p
    self.previous = None

  def priority(self,capacity):
    self._advance()
    self.previous = p_persistent_priority(capacity,self.previous,self.p,self.rng)
    return self.previous
# end PPersistentStrategy

class MemoryStrategy(SlotStrategy):
  name = 'memory'

  def __init__(self,t_slots,rng=None,psi_ul=5,psi_ll=0,cell=None,keep_trace=False):
    super().__init__(t_slots,rng)
    if psi_ll>psi_ul:
      raise ValueError('psi_ll ({}) must not exceed psi_ul ({})'.format(psi_ll,psi_ul))
    self.state = ScoreState.initial(t_slots,psi_ul,psi_ll)
    self.cell = cell
    self.keep_trace = keep_trace
    self.trace = []

  def priority(self,capacity):
    self._advance()
    self.state, v, ranking = memory_update(self.state,capacity)

    if self.keep_trace:
      self.trace.append((self.frame,tuple(self.state.psi),ranking,v.v))
    if logger.isEnabledFor(logging.DEBUG):
      logger.debug('frame=%d cell=%s psi=%s R=%s V=%s',self.frame,self.cell,
                   ','.join(map(str,self.state.psi)),','.join(map(str,ranking)),','.join(map(str,v.v)))
    return v

  def recordUsage(self,used_slots):
    self.state.used_last = frozenset(int(u) for u in used_slots)
# end MemoryStrategy

def make_strategy(name,t_slots,rng,p=0.3,psi_ul=5,psi_ll=0,cell=None,keep_trace=False):
  if name=='sequential':
    return SequentialStrategy(t_slots,rng)
  if name=='random':
    return RandomStrategy(t_slots,rng)
  if name=='p_persistent':
    return PPersistentStrategy(t_slots,rng,p)
  if name=='memory':
    return MemoryStrategy(t_slots,rng,psi_ul,psi_ll,cell=cell,keep_trace=keep_trace)
  raise ValueError('unknown strategy "{}", expected one of {}'.format(name,', '.join(STRATEGY_NAMES)))

# Worked example of the memory algorithm: slots a, b, c with psi = {a:0, b:2, c:5}.
# Capacities are chosen so the capacity rankings are (b,c,a), (b,c,a), (b,a,c).
EXAMPLE_LABELS = ('a','b','c')
EXAMPLE_INITIAL_PSI = (0,2,5)
EXAMPLE_STEPS = (
  # (used last frame, capacities B_t for a, b, c)
  (frozenset({2}),   (1.0,3.0,2.0)),
  (frozenset({1,2}), (1.0,3.0,2.0)),
  (frozenset({1}),   (2.0,3.0,1.0)),
)
EXAMPLE_EXPECTED = (
  # (psi after the step, V)
  ((0,3,5),(2,1,0)),
  ((0,5,5),(1,2,0)),
  ((0,5,4),(1,2,0)),
)

def replay_example(steps=len(EXAMPLE_STEPS),psi_ul=5,psi_ll=0):
  """
  Run the worked example for the first `steps` steps. Returns a list of
  (step, psi, R, V) with 0-based slot indices.
  """
  if not 1<=steps<=len(EXAMPLE_STEPS):
    raise ValueError('the worked example has {} steps, got {}'.format(len(EXAMPLE_STEPS),steps))

  state = ScoreState(list(EXAMPLE_INITIAL_PSI),psi_ul,psi_ll,frozenset())
  rows = []
  for step,(used,capacity) in enumerate(EXAMPLE_STEPS[:steps],start=1):
    state.used_last = used
    state, v, ranking = memory_update(state,np.asarray(capacity))
    rows.append((step,tuple(state.psi),ranking,v.v))
  return rows
# end replay_example
