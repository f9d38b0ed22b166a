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
Distribution of Monte-Carlo drops over the ranks of a communicator.

Drops are independent (each has its own seed stream), so every rank runs
a fixed subset and the results are re-assembled in drop order. The
assembled list is the same no matter how many ranks took part.
"""

class DropPartition(object):
  def __init__(self, drops, index):
    self.drops = drops
    self.index = index

  def __len__(self):
    return len(self.index)

  def __getitem__(self, i):
    return self.index[i]

  def __iter__(self):
    return iter(self.index)


class DropPartitioner(object):
  def __init__(self, drops, procs):
    """
    Round-robin assignment of drop indices 0..drops-1 to procs ranks.
    :param drops: Number of Monte-Carlo drops
    :param procs: Number of ranks sharing the work
    """
    assert drops >= 1
    assert procs >= 1

    self.drops = drops
    self.procs = procs
    self.partitions = [[d for d in range(drops) if d % procs == rank] for rank in range(procs)]

  def get_partition(self, rank):
    return DropPartition(self.drops, self.partitions[rank])


def gather_by_drop(comm, local_results, drops):
  """
  Gather {drop index: result} dictionaries from every rank and return the
  results as a list ordered by drop index (available on all ranks).
  """
  merged = {}
  for part in comm.allgather(local_results):
    merged.update(part)

  missing = [d for d in range(drops) if d not in merged]
  if missing:
    raise RuntimeError('drops {} were not simulated by any rank'.format(missing))

  return [merged[d] for d in range(drops)]
