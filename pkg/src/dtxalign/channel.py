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
Link gains and per resource block SINR.

Gains are quasi-static for a drop: pathloss (2 GHz macro NLOS curve) with
lognormal shadowing per (base station, mobile) link and an exponential
(Rayleigh power) fading factor per (base station, mobile, subcarrier).
The fading factor is flat across the slots of a frame.
A mobile kept in a drop is served best, in pathloss plus shadowing, by
the cell whose hexagon it lies in.

Tensors are float64 torch tensors. Index conventions:
  gain[b, c, k, n]  base station b -> mobile k of cell c on subcarrier n
  active[c, n, t]   cell c transmits on resource block (n, t)
  s[c, n, t, k]     SINR of mobile k of cell c on (n, t)
"""

import math
from dataclasses import dataclass

import numpy as np
import torch

from .geometry import MobileDrop, sample_in_hexagon

BOLTZMANN = 1.380649e-23   # J/K

PATHLOSS_INTERCEPT_DB = 128.1
PATHLOSS_SLOPE_DB = 37.6
MIN_DISTANCE_M = 35.0
SHADOWING_STD_DB = 8.0

# candidate rounds per cell before a drop is given up
MAX_ASSOCIATION_ROUNDS = 10000

DTYPE = torch.float64

def pathloss_db(distance,min_distance=MIN_DISTANCE_M):
  """
  PL(dB) = 128.1 + 37.6 log10(d / 1 km), with d floored at min_distance.

  Accepts a scalar or an array; non-positive distances are rejected.
  """
  d = np.asarray(distance,dtype=float)
  if np.any(d<=0.0):
    raise ValueError('distance must be positive')

  pl = PATHLOSS_INTERCEPT_DB+PATHLOSS_SLOPE_DB*np.log10(np.maximum(d,min_distance)/1000.0)
  if pl.ndim==0:
    return float(pl)
  return pl

def sample_shadowing(rng,size=None,std_db=SHADOWING_STD_DB):
  """Zero-mean Gaussian shadowing in dB."""
  return rng.normal(0.0,std_db,size=size)

def noise_power(bandwidth_hz,temperature_k):
  """Thermal noise k_B T B in watts."""
  if not bandwidth_hz>0 or not temperature_k>0:
    raise ValueError('bandwidth and temperature must be positive')
  return BOLTZMANN*temperature_k*bandwidth_hz

def watts_to_dbm(watts):
  return 10.0*math.log10(watts)+30.0

@dataclass(frozen=True,eq=False)
class LinkGainMap:
  gain: torch.Tensor     # (C_bs, C, K, N) linear power gain

  @property
  def num_cells(self):
    return self.gain.shape[0]

  @property
  def k_per_cell(self):
    return self.gain.shape[2]

  @property
  def num_subcarriers(self):
    return self.gain.shape[3]

  def desired(self):
    """(C, K, N) gains of every mobile towards its serving base station."""
    idx = torch.arange(self.num_cells)
    return self.gain[idx,idx]

  def interfering(self):
    """Copy of the gains with the serving links zeroed."""
    g = self.gain.clone()
    idx = torch.arange(self.num_cells)
    g[idx,idx] = 0.0
    return g
# end LinkGainMap

@dataclass(frozen=True,eq=False)
class TransmitPattern:
  active: torch.Tensor   # (C, N, T) bool

  @staticmethod
  def full(num_cells,n_subcarriers,t_slots,device=None):
    return TransmitPattern(torch.ones((num_cells,n_subcarriers,t_slots),dtype=torch.bool,device=device))

  @staticmethod
  def silent(num_cells,n_subcarriers,t_slots,device=None):
    return TransmitPattern(torch.zeros((num_cells,n_subcarriers,t_slots),dtype=torch.bool,device=device))

  @staticmethod
  def from_schedules(schedules,device=None):
    """Joint pattern of a list of per-cell ScheduleMaps: active iff pi != 0."""
    active = np.stack([np.asarray(s.pi)!=0 for s in schedules],axis=0)
    return TransmitPattern(torch.as_tensor(active,device=device))
# end TransmitPattern

@dataclass(frozen=True,eq=False)
class SinrTensor:
  s: torch.Tensor        # (N, T, K) linear SINR of one cell

  @property
  def shape(self):
    return tuple(self.s.shape)

  def numpy(self):
    return self.s.detach().cpu().numpy()
# end SinrTensor

def drop_associated_mobiles(layout,k_per_cell,rng,shadowing_rng=None,
                            shadowing_std_db=SHADOWING_STD_DB,min_distance=MIN_DISTANCE_M):
  """
  Drop k_per_cell mobiles uniformly inside every cell, keeping a candidate
  only if its strongest large-scale link (pathloss plus shadowing) comes
  from the cell it was dropped in. The shadowing of the kept candidates is
  returned with the drop and must be passed on to build_link_gains.

  Returns (MobileDrop, shadowing_db of shape (C_bs, C, K)).
  """
  if k_per_cell<1:
    raise ValueError('k_per_cell must be at least 1, got {}'.format(k_per_cell))
  if shadowing_rng is None:
    shadowing_rng = rng

  num_cells = layout.num_cells
  positions = np.empty((num_cells,k_per_cell,2))
  shadowing = np.empty((num_cells,num_cells,k_per_cell))
  for c in range(num_cells):
    kept = 0
    for _ in range(MAX_ASSOCIATION_ROUNDS):
      need = k_per_cell-kept
      cand, _ = sample_in_hexagon(need,layout.cell_positions[c],layout.cell_radius,rng)
      dist = np.linalg.norm(cand[None,:,:]-layout.cell_positions[:,None,:],axis=-1)   # (C_bs, need)
      shadow = sample_shadowing(shadowing_rng,dist.shape,shadowing_std_db)
      ok = np.flatnonzero(np.argmin(pathloss_db(dist,min_distance)+shadow,axis=0)==c)

      positions[c,kept:kept+len(ok)] = cand[ok]
      shadowing[:,c,kept:kept+len(ok)] = shadow[:,ok]
      kept += len(ok)
      if kept==k_per_cell:
        break
    else:
      raise RuntimeError('cell {}: no candidate is served best by its own cell'.format(c))

  serving = np.repeat(np.arange(num_cells)[:,None],k_per_cell,axis=1)
  return MobileDrop(positions=positions,serving_cell=serving), shadowing
# end drop_associated_mobiles

def build_link_gains(layout,drop,rng,shadowing_rng=None,
                     n_subcarriers=50,shadowing_std_db=SHADOWING_STD_DB,
                     min_distance=MIN_DISTANCE_M,device=None,shadowing_db=None):
  """
  Build the frozen link gain map of a drop.

  gain = 10^(-(PL + shadowing)/10) * fading. Shadowing is drawn once per
  (base station, mobile) link from shadowing_rng (defaults to rng) unless
  shadowing_db already holds it, fading once per (base station, mobile,
  subcarrier) from rng.
  """
  if shadowing_rng is None:
    shadowing_rng = rng

  dist = drop.distances(layout)                                  # (C_bs, C, K)
  if shadowing_db is None:
    shadowing_db = sample_shadowing(shadowing_rng,dist.shape,shadowing_std_db)
  elif np.shape(shadowing_db)!=dist.shape:
    raise ValueError('shadowing has shape {}, expected {}'.format(np.shape(shadowing_db),dist.shape))
  loss_db = pathloss_db(dist,min_distance)+shadowing_db
  fading = rng.exponential(1.0,size=dist.shape+(n_subcarriers,))  # unit mean

  gain = np.power(10.0,-loss_db/10.0)[...,None]*fading
  assert np.all(np.isfinite(gain)) and np.all(gain>0.0)

  return LinkGainMap(torch.as_tensor(gain,dtype=DTYPE,device=device))
# end build_link_gains

def compute_sinr(gains,pattern,p_rb,n0):
  """
  SINR of every mobile on every resource block given the joint pattern.

  For cell c, mobile k:
    s[c,n,t,k] = p_rb g[c,c,k,n] / (n0 + sum_{b != c, active[b,n,t]} p_rb g[b,c,k,n])

  The desired term is evaluated on every (n, t), including slots in which
  cell c itself is in DTX (hypothetical SINR). Returns a (C, N, T, K) tensor.
  """
  if not p_rb>0:
    raise ValueError('p_rb must be positive, got {}'.format(p_rb))

  active = pattern.active.to(device=gains.gain.device,dtype=DTYPE)
  signal = p_rb*gains.desired()                                   # (C, K, N)
  interference = p_rb*torch.einsum('bnt,bckn->cntk',active,gains.interfering())

  return signal.permute(0,2,1)[:,:,None,:]/(n0+interference)
# end compute_sinr

def cell_sinr(sinr,cell):
  """SinrTensor view of one cell of a joint (C, N, T, K) SINR tensor."""
  return SinrTensor(sinr[cell])
