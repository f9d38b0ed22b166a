#@HEADER
# ************************************************************************
#
#                        dtxalign v. 0.1
#
# dtxalign is licensed under 3-clause BSD terms of use, see LICENSE.md.
#
# ************************************************************************
#@HEADER

# some helpful examples
#
# python -m dtxalign run --strategy memory --rate-mbps 2 --drops 20 --out results
# python -m dtxalign sweep --rates 0.5:3.0:0.25 --strategies all --out results/sweep
# mpirun -n 4 python -m dtxalign convergence --rate-mbps 1 --out results/conv1
# python -m dtxalign trace-algorithm --steps 3 --out results/example

import argparse
import logging
import os
import sys
from timeit import default_timer as timer

import torch

from .config import ConfigError, parse_config, parse_rate_range, parse_strategies, write_resolved_config
from .engine import DropSimulation, run_experiment
from .results import emit_results
from .strategies import EXAMPLE_LABELS, replay_example
from .utils import MPI, PhaseTimerManager, getDevice, root_print

logger = logging.getLogger('dtxalign')

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2

class _ArgumentParser(argparse.ArgumentParser):
  """argparse that raises instead of exiting, so exit codes stay in main()."""
  def error(self,message):
    raise ConfigError(message)

def build_parser():
  common = argparse.ArgumentParser(add_help=False)
  common.add_argument('--config', type=str, default=None, metavar='FILE',
                      help='YAML file of key: value settings (default: reference parameters)')
  common.add_argument('--out', type=str, default='results', metavar='DIR',
                      help='output directory (default: results)')
  common.add_argument('--drops', type=int, default=None, metavar='D',
                      help='Monte-Carlo drops (default: 20)')
  common.add_argument('--frames', type=int, default=None, metavar='F',
                      help='frames per drop including the full-power frame 0 (default: 50)')
  common.add_argument('--seed', type=int, default=None, metavar='X',
                      help='master random seed (default: 1)')
  common.add_argument('--timings', action='store_true', default=False,
                      help='print per-phase timings of the frame loop')
  common.add_argument('--use-cuda', action='store_true', default=False,
                      help='evaluate SINR tensors on a GPU if one is present')
  common.add_argument('-v','--verbose', action='store_true', default=False,
                      help='debug logging, including per-frame strategy traces')

  parser = _ArgumentParser(prog='dtxalign',description='Distributed DTX time slot alignment simulator')
  sub = parser.add_subparsers(dest='command',parser_class=_ArgumentParser)
  sub.required = True

  run = sub.add_parser('run', parents=[common], help='one strategy at one target rate')
  run.add_argument('--strategy', type=str, default=None,
                   help='sequential | random | p_persistent | memory (default: memory)')
  run.add_argument('--rate-mbps', type=float, default=None, metavar='R',
                   help='per-mobile target rate in Mbps (default: 2)')

  sweep = sub.add_parser('sweep', parents=[common], help='power and retransmissions over target rates')
  sweep.add_argument('--rates', type=str, default='0.5:3.0:0.25',
                     help='start:stop:step (stop inclusive) or r1,r2,... in Mbps (default: 0.5:3.0:0.25)')
  sweep.add_argument('--strategies', type=str, default='all',
                     help='all or a comma separated list (default: all)')

  conv = sub.add_parser('convergence', parents=[common], help='center-cell power per frame')
  conv.add_argument('--rate-mbps', type=float, default=1.0, metavar='R',
                    help='per-mobile target rate in Mbps (default: 1)')
  conv.add_argument('--strategies', type=str, default='all',
                    help='all or a comma separated list (default: all)')

  trace = sub.add_parser('trace-algorithm', parents=[common], help='psi, R and V of the memory strategy')
  trace.add_argument('--steps', type=int, default=None, metavar='N',
                     help='steps to trace (default: 3 for the worked example, --frames for a simulation)')
  trace.add_argument('--source', type=str, default='example', choices=['example','simulation'],
                     help='replay the three-step worked example or trace the center cell of drop 0')
  trace.add_argument('--rate-mbps', type=float, default=None, metavar='R',
                     help='per-mobile target rate for --source simulation')

  return parser
# end build_parser

def resolve(args):
  overrides = dict(drops=args.drops,frames=args.frames,seed=args.seed)
  if getattr(args,'strategy',None) is not None:
    overrides['strategy'] = args.strategy
  if getattr(args,'rate_mbps',None) is not None:
    overrides['target_rate_mbps'] = args.rate_mbps
  return parse_config(args.config,overrides)

def command_run(args,config,comm,device,timers):
  summaries = run_experiment(config,[config.target_rate_mbps],comm=comm,device=device,
                             timer_manager=timers,keep_trace=True)
  s = summaries[0]
  root_print(comm.Get_rank(),'{:>12} {:5.2f} Mbps: {:8.2f} W, retransmission {:.3f}, outage {:.3f}, converged at frame {}'.format(
             s.strategy,s.target_rate_mbps,s.mean_power,s.retransmission_probability,s.outage_rate,s.convergence_frame))
  return dict(summaries=summaries,traces=summaries,algorithm_trace=s.algorithm_trace)

def command_sweep(args,config,comm,device,timers):
  rates = parse_rate_range(args.rates)
  strategies = parse_strategies(args.strategies)
  summaries = run_experiment(config,rates,strategies=strategies,comm=comm,device=device,timer_manager=timers)
  for s in summaries:
    root_print(comm.Get_rank(),'{:>12} {:5.2f} Mbps: {:8.2f} W, retransmission {:.3f}'.format(
               s.strategy,s.target_rate_mbps,s.mean_power,s.retransmission_probability))
  return dict(summaries=summaries)

def command_convergence(args,config,comm,device,timers):
  strategies = parse_strategies(args.strategies)
  summaries = run_experiment(config,[args.rate_mbps],strategies=strategies,comm=comm,device=device,
                             timer_manager=timers)
  for s in summaries:
    root_print(comm.Get_rank(),'{:>12}: frame 0 {:8.2f} W, final {:8.2f} W, converged at frame {}'.format(
               s.strategy,s.power_trace[0],s.power_trace[-1],s.convergence_frame))
  return dict(traces=summaries)

def command_trace_algorithm(args,config,comm,device,timers):
  if args.source=='example':
    steps = 3 if args.steps is None else args.steps
    rows = replay_example(steps,psi_ul=config.psi_ul,psi_ll=config.psi_ll)
    for step,psi,ranking,v in rows:
      root_print(comm.Get_rank(),'step {}: psi={} R=({}) V=({})'.format(
                 step,{EXAMPLE_LABELS[i]:p for i,p in enumerate(psi)},
                 ','.join(EXAMPLE_LABELS[i] for i in ranking),','.join(EXAMPLE_LABELS[i] for i in v)))
    return dict(algorithm_trace=rows,labels=EXAMPLE_LABELS)

  frames = config.frames if args.steps is None else args.steps+1
  config = config.replace(strategy='memory',frames=max(frames,2),warmup_frames=0)
  sim = DropSimulation(config,0,device=device,timer_manager=timers,keep_trace=True)
  sim.run()
  return dict(algorithm_trace=sim.algorithmTrace())
# end command_trace_algorithm

COMMANDS = {
  'run': command_run,
  'sweep': command_sweep,
  'convergence': command_convergence,
  'trace-algorithm': command_trace_algorithm,
}

def main(argv=None):
  comm = MPI.COMM_WORLD
  rank = comm.Get_rank()

  try:
    args = build_parser().parse_args(argv)
  except ConfigError as e:
    print('error: {}'.format(e),file=sys.stderr)
    return EXIT_CONFIG

  logging.basicConfig(stream=sys.stdout,format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
                      level=logging.DEBUG if args.verbose else logging.WARNING)
  if not args.verbose:
    logger.setLevel(logging.INFO if rank==0 else logging.WARNING)

  # one intra-op thread per rank keeps tensor reductions identical for any rank count
  torch.set_num_threads(1)

  try:
    config = resolve(args)
    if rank==0:
      os.makedirs(args.out,exist_ok=True)
      write_resolved_config(config,args.out)

    device = getDevice(comm,args.use_cuda)
    timers = PhaseTimerManager()
    start = timer()
    results = COMMANDS[args.command](args,config,comm,device,timers)
    logger.info('%s finished in %.1f s',args.command,timer()-start)

    if args.timings:
      reduced = timers.reduce(comm)
      root_print(rank,reduced.getResultString())

    if rank==0:
      for path in emit_results(args.out,config,**results):
        root_print(rank,'wrote {}'.format(path))
  except ValueError as e:
    # ConfigError and rejected parameters (e.g. --steps outside the worked example)
    print('error: {}'.format(e),file=sys.stderr)
    return EXIT_CONFIG
  except OSError as e:
    print('error: {}'.format(e),file=sys.stderr)
    return EXIT_IO

  return EXIT_OK
# end main
