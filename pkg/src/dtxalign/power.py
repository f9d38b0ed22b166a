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
Base station power consumption of one frame:

  P_total = P_S T_S/T + rho_Tx N_Tx + P_0 (T - T_S)/T

N_Tx is the per-slot average number of transmitting resource blocks
(scheduled blocks / T) and rho_Tx = load factor x transmit power per block.
With the default parameters a fully loaded frame costs 350 W and an all-DTX
frame 90 W.
"""

from dataclasses import dataclass, asdict

FULL_LOAD_POWER_W = 350.0
ALL_DTX_POWER_W = 90.0

@dataclass(frozen=True)
class PowerParams:
  p_sleep: float = 90.0      # P_S, W
  p_idle: float = 200.0      # P_0, W
  load_factor: float = 3.75
  p_rb_tx: float = 0.8       # W per block

  def __post_init__(self):
    for name,value in asdict(self).items():
      if value<0.0:
        raise ValueError('{} must be non-negative, got {}'.format(name,value))

  @property
  def rho_tx(self):
    return self.load_factor*self.p_rb_tx
# end PowerParams

@dataclass(frozen=True)
class PowerBreakdown:
  total: float
  sleep_part: float
  tx_part: float
  idle_part: float
  t_s: int
  n_tx_avg: float

  def as_dict(self):
    return asdict(self)

def breakdown(t_s,num_scheduled_rbs,params,t_slots):
  """Power of a frame given its DTX slot count and scheduled block count."""
  assert 0<=t_s<=t_slots
  assert num_scheduled_rbs>=0

  n_tx_avg = num_scheduled_rbs/t_slots
  sleep_part = params.p_sleep*t_s/t_slots
  tx_part = params.rho_tx*n_tx_avg
  idle_part = params.p_idle*(t_slots-t_s)/t_slots
  return PowerBreakdown(total=sleep_part+tx_part+idle_part,sleep_part=sleep_part,tx_part=tx_part,
                        idle_part=idle_part,t_s=int(t_s),n_tx_avg=n_tx_avg)

def total_power(schedule,params,t_slots=None):
  if t_slots is None:
    t_slots = schedule.t_slots
  assert t_slots==schedule.t_slots
  return breakdown(schedule.t_s,schedule.num_scheduled_rbs,params,t_slots)
