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
Tab separated result tables.

Every file starts with one comment line carrying the config hash and the
table kind, followed by a header row. Floats are printed with 6
significant digits so identical runs give byte-identical files.

  sweep.tsv            one row per (strategy, target rate)
  trace.tsv            one row per (strategy, target rate, frame)
  algorithm_trace.tsv  psi, R and V of the memory strategy per frame
"""

import logging
import os

import pandas as pd

from .config import config_hash

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.6g'

SWEEP_COLUMNS = ['strategy','target_rate_mbps','cell_sum_rate_mbps','mean_power_w','power_std_w',
                 'retransmission_probability','outage_rate','convergence_frame','final_cv','mean_dtx_slots','drops']
TRACE_COLUMNS = ['strategy','target_rate_mbps','frame','center_power_w']
ALGORITHM_COLUMNS = ['frame','psi','R','V']

def _join(values,labels=None):
  if labels is not None:
    return ','.join(labels[v] for v in values)
  return ','.join(str(v) for v in values)

def sweep_table(summaries):
  rows = [[s.strategy,s.target_rate_mbps,s.cell_sum_rate_mbps,s.mean_power,s.power_std,
           s.retransmission_probability,s.outage_rate,s.convergence_frame,s.final_cv,s.mean_dtx_slots,s.drops]
          for s in summaries]
  return pd.DataFrame(rows,columns=SWEEP_COLUMNS)

def trace_table(summaries):
  rows = [[s.strategy,s.target_rate_mbps,f,float(p)]
          for s in summaries for f,p in enumerate(s.power_trace)]
  return pd.DataFrame(rows,columns=TRACE_COLUMNS)

def algorithm_table(trace,labels=None):
  """
  trace rows are (frame, psi, R, V). psi is listed in slot order; R and V
  list slot indices, or labels[slot] when labels are given.
  """
  rows = [[frame,_join(psi),_join(ranking,labels),_join(v,labels)] for frame,psi,ranking,v in trace]
  return pd.DataFrame(rows,columns=ALGORITHM_COLUMNS)

def write_table(df,path,config,kind):
  with open(path,'w',newline='') as f:
    f.write('# dtxalign config-hash={} {}\n'.format(config_hash(config),kind))
    df.to_csv(f,sep='\t',index=False,float_format=FLOAT_FORMAT)
  logger.info('wrote %s (%d rows)',path,len(df))
  return path

def read_table(path):
  """Load a table written by write_table."""
  return pd.read_csv(path,sep='\t',comment='#')

def emit_results(outdir,config,summaries=None,traces=None,algorithm_trace=None,labels=None):
  """
  Write the requested tables into outdir and return their paths.

  summaries -> sweep.tsv, traces (RunSummary list) -> trace.tsv,
  algorithm_trace (rows of (frame, psi, R, V)) -> algorithm_trace.tsv.
  Raises ValueError if nothing is given and OSError if outdir cannot be
  written.
  """
  if not summaries and not traces and not algorithm_trace:
    raise ValueError('no results to write')

  os.makedirs(outdir,exist_ok=True)
  paths = []
  if summaries:
    paths.append(write_table(sweep_table(summaries),os.path.join(outdir,'sweep.tsv'),config,'sweep'))
  if traces:
    paths.append(write_table(trace_table(traces),os.path.join(outdir,'trace.tsv'),config,'trace'))
  if algorithm_trace:
    paths.append(write_table(algorithm_table(algorithm_trace,labels),
                             os.path.join(outdir,'algorithm_trace.tsv'),config,'algorithm-trace'))
  return paths
# end emit_results
