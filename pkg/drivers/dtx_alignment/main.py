#@HEADER
# ************************************************************************
#
#                        dtxalign v. 0.1
#
# dtxalign is licensed under 3-clause BSD terms of use, see LICENSE.md.
#
# ************************************************************************
#@HEADER

# Reproduces the data behind the power over cell sum rate, convergence and
# retransmission figures at desk scale and checks the expected behavior.
#
# IN SERIAL
# python main.py --drops 20 --frames 50 --out results
# IN PARALLEL (drops spread over the ranks)
# mpirun -n 4 python main.py --drops 20 --frames 50 --out results

from __future__ import print_function

import argparse
import os
import sys
from timeit import default_timer as timer

import numpy as np
import torch

import dtxalign
from dtxalign.config import parse_rate_range
from dtxalign.engine import convergence_frame
from dtxalign.power import PowerParams, breakdown
from dtxalign.results import emit_results
from dtxalign.strategies import EXAMPLE_EXPECTED, EXAMPLE_LABELS, STRATEGY_NAMES, replay_example
from dtxalign.utils import MPI, PhaseTimerManager, root_print


def by_key(summaries):
  return {(s.strategy, round(s.target_rate_mbps, 6)): s for s in summaries}


def monotone(values, slack=0.01):
  """Non-decreasing, allowing one inversion smaller than slack (relative)."""
  inversions = 0
  for a, b in zip(values[:-1], values[1:]):
    if b < a:
      if b < a * (1.0 - slack):
        return False
      inversions += 1
  return inversions <= 1


def checks(config, sweep, conv):
  results = []

  def check(name, ok):
    results.append((name, bool(ok)))

  rows = replay_example()
  check('worked example psi and V', all((psi, v) == exp for (_, psi, _, v), exp in zip(rows, EXAMPLE_EXPECTED)))

  params = PowerParams()
  n_rbs = config.n_subcarriers * config.t_slots
  check('full load costs 350 W', np.isclose(breakdown(0, n_rbs, params, config.t_slots).total, 350.0))
  check('all DTX costs 90 W', np.isclose(breakdown(config.t_slots, 0, params, config.t_slots).total, 90.0))

  for s in conv:
    trace = s.power_trace
    final = np.mean(trace[-10:])
    check('{} @ {} Mbps within 5% from frame 6'.format(s.strategy, s.target_rate_mbps),
          np.all(np.abs(trace[6:] - final) <= 0.05 * final))
    check('{} @ {} Mbps within 1% by the last frame'.format(s.strategy, s.target_rate_mbps),
          convergence_frame(trace, 0.01) < len(trace))
    check('{} @ {} Mbps last 10 frames vary below 1%'.format(s.strategy, s.target_rate_mbps), s.final_cv < 0.01)

  table = by_key(sweep)
  rates = sorted({r for _, r in table})

  def power(strategy, rate):
    return table[(strategy, rate)].mean_power

  def retx(strategy, rate):
    return table[(strategy, rate)].retransmission_probability

  if 2.0 in rates:
    seq, rnd = power('sequential', 2.0), power('random', 2.0)
    pp, mem = power('p_persistent', 2.0), power('memory', 2.0)
    check('power ordering at 2 Mbps', seq > rnd > max(pp, mem))
    check('memory saves >= 25% against random at 2 Mbps', mem <= 0.75 * rnd)
    check('retransmissions of memory <= 0.8 x random at 2 Mbps', retx('memory', 2.0) <= 0.8 * retx('random', 2.0))

  for r in rates:
    if r <= 0.25 or r >= 3.0:
      rnd, pp = power('random', r), power('p_persistent', r)
      check('random close to p-persistent at {} Mbps'.format(r), abs(rnd - pp) <= 0.1 * pp)
    if r <= 2.0:
      check('sequential without retransmissions at {} Mbps'.format(r), retx('sequential', r) == 0.0)
    if 1.0 <= r <= 2.5:
      check('memory retransmissions in [0.05, 0.35] at {} Mbps'.format(r), 0.05 <= retx('memory', r) <= 0.35)

  for strategy in STRATEGY_NAMES:
    values = [power(strategy, r) for r in rates if r >= 0.5]
    check('{} power non-decreasing over rate'.format(strategy), monotone(values))

  return results


def main():
  parser = argparse.ArgumentParser(description='DTX alignment reference experiments')
  parser.add_argument('--drops', type=int, default=20, metavar='D',
                      help='Monte-Carlo drops (default: 20)')
  parser.add_argument('--frames', type=int, default=50, metavar='F',
                      help='frames per drop (default: 50)')
  parser.add_argument('--seed', type=int, default=1, metavar='S',
                      help='master random seed (default: 1)')
  parser.add_argument('--rates', type=str, default='0.25:3.0:0.25',
                      help='swept per-mobile target rates in Mbps (default: 0.25:3.0:0.25)')
  parser.add_argument('--out', type=str, default='results',
                      help='output directory (default: results)')

  args = parser.parse_args()
  comm = MPI.COMM_WORLD
  rank = comm.Get_rank()
  torch.set_num_threads(1)

  config = dtxalign.SimConfig(drops=args.drops, frames=args.frames, seed=args.seed)
  rates = parse_rate_range(args.rates)
  timers = PhaseTimerManager()

  root_print(rank, 'DTX alignment: {} cells, {} drops x {} frames, {} ranks'.format(
    config.num_cells, config.drops, config.frames, comm.Get_size()))

  start = timer()
  sweep = dtxalign.run_experiment(config, rates, strategies=list(STRATEGY_NAMES), comm=comm, timer_manager=timers)
  root_print(rank, 'sweep done in {:.1f} s'.format(timer() - start))

  conv = []
  for rate in (1.0, 2.0):
    conv += dtxalign.run_experiment(config, [rate], strategies=list(STRATEGY_NAMES), comm=comm,
                                    timer_manager=timers, keep_trace=(rate == 2.0))
  root_print(rank, 'convergence runs done in {:.1f} s'.format(timer() - start))
  root_print(rank, timers.reduce(comm).getResultString())

  if rank != 0:
    return 0

  emit_results(os.path.join(args.out, 'sweep'), config, summaries=sweep)
  emit_results(os.path.join(args.out, 'convergence'), config, traces=conv,
               algorithm_trace=[s for s in conv if s.strategy == 'memory'][-1].algorithm_trace)
  emit_results(os.path.join(args.out, 'example'), config, algorithm_trace=replay_example(), labels=EXAMPLE_LABELS)

  failed = 0
  for name, ok in checks(config, sweep, conv):
    print('  [{}] {}'.format('PASS' if ok else 'FAIL', name))
    failed += 0 if ok else 1
  print('{} check(s) failed'.format(failed))
  return 0 if failed == 0 else 1


if __name__ == '__main__':
  sys.exit(main())
