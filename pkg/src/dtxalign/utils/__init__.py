#@HEADER
# ************************************************************************
#
#                        dtxalign v. 0.1
#
# dtxalign is licensed under 3-clause BSD terms of use, see LICENSE.md.
#
# ************************************************************************
#@HEADER

from .timers import PhaseTimer, PhaseTimerManager
from .drop_parallel import DropPartitioner, gather_by_drop

import numpy as np
import torch

try:
  # use the global one
  from mpi4py import MPI
except ImportError:
  # default to the local dummy
  print('\n-- dtxalign Warning: No MPI found, using internal \'fake_mpi\'\n')
  from .fake_mpi import MPI

# names of the independent random streams spawned for every drop
STREAM_NAMES = ('geometry','shadowing','fading','strategies')

def root_print(rank,s):
  if rank==0:
    print(s)

def drop_streams(master_seed,drop_index,num_cells):
  """
  Build the random streams of one Monte-Carlo drop.

  The streams depend only on (master_seed, drop_index), never on the
  rank that simulates the drop. Returns a dictionary with one Generator for
  each of geometry, shadowing and fading, and a list of per-cell Generators
  under 'strategies'.
  """
  assert master_seed>=0 and drop_index>=0

  root = np.random.SeedSequence([master_seed,drop_index])
  geometry, shadowing, fading, strategies = root.spawn(len(STREAM_NAMES))

  streams = dict()
  streams['geometry']   = np.random.default_rng(geometry)
  streams['shadowing']  = np.random.default_rng(shadowing)
  streams['fading']     = np.random.default_rng(fading)
  streams['strategies'] = [np.random.default_rng(s) for s in strategies.spawn(num_cells)]
  return streams
# end drop_streams

def getDevice(comm,use_cuda=False):
  """
  Returns the torch device used for the gain/SINR tensors on this rank.

  CPU unless use_cuda is set and a GPU is present; ranks on one node are
  spread over the visible devices.
  """
  if use_cuda and torch.cuda.is_available():
    dev_cnt = torch.cuda.device_count()
    dev_rank = comm.Get_rank() % dev_cnt
    return torch.device(f'cuda:{dev_rank}')
  return torch.device('cpu')
# end getDevice
