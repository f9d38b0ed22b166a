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
Hexagonal multi-cell layout and uniform mobile drops.

Cells are flat-topped hexagons of circumradius r = isd/sqrt(3), so the
centers of neighboring cells are exactly one intersite distance apart.
No wrap-around is applied; only the center cell is fully surrounded.
"""

import math
from dataclasses import dataclass

import numpy as np
from hexalattice.hexalattice import create_hex_grid

SQRT3 = math.sqrt(3.0)

# ring t+1 of the lattice no longer lies outside the crop circle of ring t
_MAX_TIERS = 6

def cell_radius(isd):
  """Circumradius of a cell for a given intersite distance."""
  return isd/SQRT3

def num_cells_for_tiers(tiers):
  return 1+3*tiers*(tiers+1)

def hexagon_vertices(center,radius):
  """
  Vertices (6x2 array) of the flat-topped hexagon around center,
  counter-clockwise starting on the positive x axis.
  """
  angles = np.arange(6)*math.pi/3.0
  return np.asarray(center,dtype=float)+radius*np.stack([np.cos(angles),np.sin(angles)],axis=1)

def point_in_hexagon(points,center,radius):
  """
  Vectorized point-in-hexagon test for a flat-topped hexagon.

  points is an (..., 2) array; returns a boolean array of shape (...).
  Points on the boundary count as inside.
  """
  rel = np.abs(np.asarray(points,dtype=float)-np.asarray(center,dtype=float))
  x, y = rel[...,0], rel[...,1]
  tol = 1e-12*radius
  return (y <= SQRT3/2.0*radius+tol) & (SQRT3*x+y <= SQRT3*radius+tol)

def mean_uniform_hexagon_distance(radius):
  """
  Mean distance between the center of a regular hexagon of circumradius
  radius and a point drawn uniformly inside it: r*(1/3 + ln(3)/4).
  """
  return radius*(1.0/3.0+math.log(3.0)/4.0)

@dataclass(frozen=True)
class NetworkLayout:
  cell_positions: np.ndarray   # (C, 2) meters
  intersite_distance: float
  center_cell_index: int = 0

  @property
  def num_cells(self):
    return self.cell_positions.shape[0]

  @property
  def cell_radius(self):
    return cell_radius(self.intersite_distance)

  def neighbors(self,cell):
    """Indices of the cells one intersite distance away from cell."""
    d = np.linalg.norm(self.cell_positions-self.cell_positions[cell],axis=1)
    close = np.isclose(d,self.intersite_distance,rtol=1e-9)
    return [int(i) for i in np.flatnonzero(close)]
# end NetworkLayout

@dataclass(frozen=True)
class MobileDrop:
  positions: np.ndarray       # (C, K, 2) meters, mobiles of cell c in positions[c]
  serving_cell: np.ndarray    # (C, K) serving cell index of each mobile

  @property
  def k_per_cell(self):
    return self.positions.shape[1]

  def distances(self,layout):
    """
    Distances (C_bs, C, K) from every base station to every mobile,
    where mobile k of cell c is positions[c][k].
    """
    delta = self.positions[None,:,:,:]-layout.cell_positions[:,None,None,:]
    return np.linalg.norm(delta,axis=-1)
# end MobileDrop

def build_hex_layout(tiers,isd):
  """
  Cell centers of a hexagonal network with the given number of
  interference tiers around a center cell at the origin.

  The lattice comes from hexalattice, turned by 30 degrees so the cells are
  flat-topped, and is cropped to the tiers. Ordering: cell 0 is the origin,
  followed by ring 1, ring 2, ... Each ring is walked counter-clockwise
  starting at 30 degrees.
  """
  if tiers<0:
    raise ValueError('tiers must be non-negative, got {}'.format(tiers))
  if not isd>0:
    raise ValueError('intersite distance must be positive, got {}'.format(isd))
  if tiers>_MAX_TIERS:
    raise ValueError('at most {} tiers are supported, got {}'.format(_MAX_TIERS,tiers))

  if tiers==0:
    positions = np.zeros((1,2))
  else:
    side = 2*tiers+1
    centers, _ = create_hex_grid(nx=side,ny=side,min_diam=float(isd),crop_circ=(tiers+1e-6)*isd,
                                 rotate_deg=30.0,align_to_origin=True,do_plot=False)
    centers = np.asarray(centers,dtype=float).reshape(-1,2)
    # the crop is symmetric, so the cell nearest the centroid is the center cell
    centers = centers-centers[np.argmin(np.linalg.norm(centers-centers.mean(axis=0),axis=1))]

    # flat-topped cartesian -> axial, giving the hex ring of every center
    q = np.rint(centers[:,0]/(SQRT3/2.0*isd))
    r = np.rint(centers[:,1]/isd-q/2.0)
    ring = np.maximum(np.abs(q),np.maximum(np.abs(r),np.abs(q+r))).astype(int)
    centers, ring = centers[ring<=tiers], ring[ring<=tiers]

    angle = np.mod(np.arctan2(centers[:,1],centers[:,0])-math.pi/6.0+1e-9,2.0*math.pi)
    positions = centers[np.lexsort((angle,ring))]
    positions[0] = 0.0

  if positions.shape[0]!=num_cells_for_tiers(tiers):
    raise RuntimeError('hex grid has {} cells, expected {}'.format(positions.shape[0],num_cells_for_tiers(tiers)))
  return NetworkLayout(cell_positions=positions,intersite_distance=float(isd),center_cell_index=0)
# end build_hex_layout

def sample_in_hexagon(count,center,radius,rng):
  """
  Rejection sampling of count uniform points in a hexagon from its
  bounding square [-r, r]^2. Returns (points, acceptance), acceptance
  being all accepted over all drawn candidates.
  """
  points = np.empty((0,2))
  drawn = 0
  while points.shape[0]<count:
    need = count-points.shape[0]
    batch = max(8,int(math.ceil(need*1.6)))
    cand = rng.uniform(-radius,radius,size=(batch,2))
    drawn += batch
    ok = point_in_hexagon(cand,(0.0,0.0),radius)
    points = np.concatenate([points,cand[ok]],axis=0)

  return np.asarray(center,dtype=float)+points[:count], points.shape[0]/drawn
# end sample_in_hexagon

def drop_mobiles(layout,k_per_cell,rng):
  """
  Drop k_per_cell mobiles uniformly inside every cell. Deterministic for a
  given rng state.
  """
  if k_per_cell<1:
    raise ValueError('k_per_cell must be at least 1, got {}'.format(k_per_cell))

  radius = layout.cell_radius
  positions = np.empty((layout.num_cells,k_per_cell,2))
  for c in range(layout.num_cells):
    positions[c], _ = sample_in_hexagon(k_per_cell,layout.cell_positions[c],radius,rng)

  serving = np.repeat(np.arange(layout.num_cells)[:,None],k_per_cell,axis=1)
  return MobileDrop(positions=positions,serving_cell=serving)
# end drop_mobiles
