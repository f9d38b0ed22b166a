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
Serial stand-in for the handful of communicator calls the drop
distribution uses. Selected automatically when mpi4py cannot be imported.
"""

class SerialComm:
  def Get_rank(self):
    return 0

  def Get_size(self):
    return 1

  def allgather(self,obj):
    return [obj]

  def Barrier(self):
    pass
# end SerialComm

class MPINamespace:
  def __init__(self):
    self.COMM_WORLD = SerialComm()
    self.COMM_SELF = self.COMM_WORLD
# end serial namespace

MPI = MPINamespace()
