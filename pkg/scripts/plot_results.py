#@HEADER
# ************************************************************************
#
#                        dtxalign v. 0.1
#
# dtxalign is licensed under 3-clause BSD terms of use, see LICENSE.md.
#
# ************************************************************************
#@HEADER

# Plot the tables written by drivers/dtx_alignment/main.py (or the CLI).
#
# python plot_results.py --results ../drivers/dtx_alignment/results --out figures

import argparse
import os

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

from dtxalign.results import read_table

MARKERS = {'sequential': 'o', 'random': 's', 'p_persistent': '^', 'memory': 'D'}


def plot_power_over_sum_rate(sweep, filename):
  fig, ax = plt.subplots(figsize=(6, 4))
  for strategy, df in sweep.groupby('strategy', sort=False):
    ax.errorbar(df['cell_sum_rate_mbps'], df['mean_power_w'], yerr=df['power_std_w'],
                marker=MARKERS.get(strategy, 'x'), capsize=2, label=strategy)
  ax.set_xlabel('cell sum rate [Mbps]')
  ax.set_ylabel('BS power consumption [W]')
  ax.grid(True, alpha=0.3)
  ax.legend()
  fig.tight_layout()
  fig.savefig(filename)
  plt.close(fig)


def plot_retransmissions(sweep, filename):
  fig, ax = plt.subplots(figsize=(6, 4))
  for strategy, df in sweep.groupby('strategy', sort=False):
    ax.plot(df['target_rate_mbps'], df['retransmission_probability'],
            marker=MARKERS.get(strategy, 'x'), label=strategy)
  ax.set_xlabel('target rate per mobile [Mbps]')
  ax.set_ylabel('retransmission probability')
  ax.set_ylim(0.0, 1.0)
  ax.grid(True, alpha=0.3)
  ax.legend()
  fig.tight_layout()
  fig.savefig(filename)
  plt.close(fig)


def plot_convergence(trace, outdir):
  files = []
  for rate, by_rate in trace.groupby('target_rate_mbps'):
    fig, ax = plt.subplots(figsize=(6, 4))
    for strategy, df in by_rate.groupby('strategy', sort=False):
      ax.plot(df['frame'], df['center_power_w'], marker=MARKERS.get(strategy, 'x'), markevery=5, label=strategy)
    ax.set_title('{:g} Mbps per mobile'.format(rate))
    ax.set_xlabel('OFDMA frame')
    ax.set_ylabel('center cell power [W]')
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    filename = os.path.join(outdir, 'convergence_{:g}mbps.png'.format(rate))
    fig.savefig(filename)
    plt.close(fig)
    files.append(filename)
  return files


def main():
  parser = argparse.ArgumentParser(description='Plot DTX alignment result tables')
  parser.add_argument('--results', type=str, default='results',
                      help='directory holding sweep/ and convergence/ (default: results)')
  parser.add_argument('--out', type=str, default='figures',
                      help='directory for the png files (default: figures)')
  args = parser.parse_args()

  os.makedirs(args.out, exist_ok=True)

  sweep_path = os.path.join(args.results, 'sweep', 'sweep.tsv')
  if os.path.isfile(sweep_path):
    sweep = read_table(sweep_path)
    plot_power_over_sum_rate(sweep, os.path.join(args.out, 'power_over_sum_rate.png'))
    plot_retransmissions(sweep, os.path.join(args.out, 'retransmission_probability.png'))
    print('plotted', sweep_path)

  trace_path = os.path.join(args.results, 'convergence', 'trace.tsv')
  if os.path.isfile(trace_path):
    for f in plot_convergence(read_table(trace_path), args.out):
      print('wrote', f)


if __name__ == '__main__':
  main()
