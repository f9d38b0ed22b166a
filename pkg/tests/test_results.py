#@HEADER
# ************************************************************************
#
#                        dtxalign v. 0.1
#
# dtxalign is licensed under 3-clause BSD terms of use, see LICENSE.md.
#
# ************************************************************************
#@HEADER

import filecmp
import os
import shutil
import tempfile
import unittest

import numpy as np

from dtxalign.config import SimConfig, config_hash
from dtxalign.engine import RunSummary
from dtxalign.results import (ALGORITHM_COLUMNS, SWEEP_COLUMNS, TRACE_COLUMNS, emit_results, read_table,
                              sweep_table)
from dtxalign.strategies import EXAMPLE_LABELS, STRATEGY_NAMES, replay_example

def fake_summary(strategy,rate,frames=4):
  trace = np.linspace(350.0,150.0+rate,frames)
  return RunSummary(strategy=strategy,target_rate_mbps=rate,cell_sum_rate_mbps=10*rate,mean_power=150.0+rate/3.0,
                    power_std=1.0/3.0,power_trace=trace,retransmission_probability=0.125,outage_rate=0.0,
                    convergence_frame=3,mean_dtx_slots=7.5,drops=20,
                    algorithm_trace=[(1,(0,1,2),(2,1,0),(2,1,0))])

class TestResults(unittest.TestCase):

  def setUp(self):
    self.dir = tempfile.mkdtemp()
    self.config = SimConfig()
    self.summaries = [fake_summary(s,r) for s in STRATEGY_NAMES for r in (1.0,2.0,3.0)]

  def tearDown(self):
    shutil.rmtree(self.dir)

  def test_sweep_rows(self):
    paths = emit_results(self.dir,self.config,summaries=self.summaries)
    self.assertEqual([os.path.basename(p) for p in paths],['sweep.tsv'])

    df = read_table(paths[0])
    self.assertEqual(len(df),12)
    self.assertListEqual(list(df.columns),SWEEP_COLUMNS)
    self.assertListEqual(list(df['cell_sum_rate_mbps'][:3]),[10.0,20.0,30.0])

  def test_header_and_format(self):
    path = emit_results(self.dir,self.config,summaries=self.summaries[:1])[0]
    with open(path) as f:
      lines = f.read().splitlines()

    self.assertEqual(lines[0],'# dtxalign config-hash={} sweep'.format(config_hash(self.config)))
    self.assertEqual(lines[1].split('\t'),SWEEP_COLUMNS)
    # six significant digits
    self.assertEqual(lines[2].split('\t')[3],'150.333')
    self.assertEqual(lines[2].split('\t')[4],'0.333333')

  def test_trace_and_algorithm(self):
    paths = emit_results(self.dir,self.config,traces=self.summaries[:2],
                         algorithm_trace=self.summaries[0].algorithm_trace)
    self.assertEqual([os.path.basename(p) for p in paths],['trace.tsv','algorithm_trace.tsv'])

    trace = read_table(paths[0])
    self.assertListEqual(list(trace.columns),TRACE_COLUMNS)
    self.assertEqual(len(trace),8)
    self.assertEqual(trace['center_power_w'][0],350.0)

    algo = read_table(paths[1])
    self.assertListEqual(list(algo.columns),ALGORITHM_COLUMNS)
    self.assertEqual(algo['psi'][0],'0,1,2')

  def test_labels(self):
    path = emit_results(self.dir,self.config,algorithm_trace=replay_example(),labels=EXAMPLE_LABELS)[0]
    df = read_table(path)
    self.assertListEqual(list(df['V']),['c,b,a','b,c,a','b,c,a'])
    self.assertListEqual(list(df['psi']),['0,3,5','0,5,5','0,5,4'])

  def test_byte_identical(self):
    a = os.path.join(self.dir,'a')
    b = os.path.join(self.dir,'b')
    for out in (a,b):
      emit_results(out,self.config,summaries=self.summaries,traces=self.summaries)
    for name in ('sweep.tsv','trace.tsv'):
      self.assertTrue(filecmp.cmp(os.path.join(a,name),os.path.join(b,name),shallow=False))

  def test_nothing_to_write(self):
    with self.assertRaises(ValueError):
      emit_results(self.dir,self.config)

  def test_unwritable(self):
    blocker = os.path.join(self.dir,'file')
    with open(blocker,'w') as f:
      f.write('x')
    with self.assertRaises(OSError):
      emit_results(os.path.join(blocker,'out'),self.config,summaries=self.summaries)

  def test_table_frame(self):
    df = sweep_table(self.summaries)
    self.assertEqual(df.shape,(12,len(SWEEP_COLUMNS)))
# end TestResults

if __name__ == '__main__':
  unittest.main()
