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
Simulation configuration.

Defaults reproduce the LTE-like reference parameters: 19 cells (two
interference tiers) at 500 m intersite distance, 10 MHz in 50 subcarriers,
10 slots of 1 ms, 10 mobiles per cell, 0.8 W per block, 290 K noise
temperature, 8 dB shadowing, psi bounds 5/0, p = 0.3 and the power model
factors 200 W idle, 3.75 load factor, 90 W DTX.

Values are resolved as: command line flags > config file > defaults.
Config files are YAML mappings of key -> scalar.
"""

import dataclasses
import hashlib
import logging
import os
from dataclasses import dataclass, fields

import yaml

from .power import PowerParams
from .strategies import STRATEGY_NAMES

logger = logging.getLogger(__name__)

class ConfigError(ValueError):
  """Invalid configuration: unknown key, bad value or unreadable file."""

@dataclass(frozen=True)
class SimConfig:
  # network
  tiers: int = 2
  isd_m: float = 500.0
  k_per_cell: int = 10

  # frame numerology
  n_subcarriers: int = 50
  t_slots: int = 10
  bandwidth_hz: float = 10e6
  slot_duration_s: float = 1e-3

  # channel
  noise_temperature_k: float = 290.0
  shadowing_std_db: float = 8.0
  min_distance_m: float = 35.0

  # traffic and alignment
  target_rate_mbps: float = 2.0
  strategy: str = 'memory'
  p: float = 0.3
  psi_ul: int = 5
  psi_ll: int = 0

  # power model
  p_sleep_w: float = 90.0
  p_idle_w: float = 200.0
  load_factor: float = 3.75
  p_rb_tx_w: float = 0.8

  # experiment
  frames: int = 50
  drops: int = 20
  warmup_frames: int = 10
  convergence_tolerance: float = 0.01
  seed: int = 1

  def __post_init__(self):
    self.validate()

  def validate(self):
    def require(cond,msg):
      if not cond:
        raise ConfigError(msg)

    require(self.tiers>=0,'tiers must be >= 0, got {}'.format(self.tiers))
    require(self.isd_m>0,'isd_m must be > 0, got {}'.format(self.isd_m))
    for name in ('k_per_cell','n_subcarriers','t_slots'):
      require(getattr(self,name)>=1,'{} must be >= 1, got {}'.format(name,getattr(self,name)))
    for name in ('bandwidth_hz','slot_duration_s','noise_temperature_k','min_distance_m','target_rate_mbps','p_rb_tx_w'):
      require(getattr(self,name)>0,'{} must be > 0, got {}'.format(name,getattr(self,name)))
    for name in ('shadowing_std_db','p_sleep_w','p_idle_w','load_factor'):
      require(getattr(self,name)>=0,'{} must be >= 0, got {}'.format(name,getattr(self,name)))
    require(self.strategy in STRATEGY_NAMES,
            'strategy must be one of {}, got "{}"'.format(', '.join(STRATEGY_NAMES),self.strategy))
    require(0.0<=self.p<=1.0,'p must lie in [0, 1], got {}'.format(self.p))
    require(self.psi_ll<=self.psi_ul,'psi_ll ({}) must not exceed psi_ul ({})'.format(self.psi_ll,self.psi_ul))
    require(self.frames>=2,'frames must be >= 2, got {}'.format(self.frames))
    require(self.drops>=1,'drops must be >= 1, got {}'.format(self.drops))
    require(0<=self.warmup_frames<self.frames,
            'warmup_frames must lie in [0, frames), got {}'.format(self.warmup_frames))
    require(0.0<self.convergence_tolerance<1.0,
            'convergence_tolerance must lie in (0, 1), got {}'.format(self.convergence_tolerance))
    require(self.seed>=0,'seed must be >= 0, got {}'.format(self.seed))
  # end validate

  @property
  def num_cells(self):
    return 1+3*self.tiers*(self.tiers+1)

  @property
  def subcarrier_bw_hz(self):
    return self.bandwidth_hz/self.n_subcarriers

  @property
  def frame_duration_s(self):
    return self.t_slots*self.slot_duration_s

  @property
  def target_bits(self):
    """Per-mobile target in bits per frame."""
    return self.target_rate_mbps*1e6*self.frame_duration_s

  @property
  def cell_sum_rate_mbps(self):
    return self.k_per_cell*self.target_rate_mbps

  @property
  def power_params(self):
    return PowerParams(p_sleep=self.p_sleep_w,p_idle=self.p_idle_w,
                       load_factor=self.load_factor,p_rb_tx=self.p_rb_tx_w)

  def replace(self,**changes):
    """Validated copy with some fields changed."""
    return dataclasses.replace(self,**coerce_values(changes))

  def as_dict(self):
    return dataclasses.asdict(self)
# end SimConfig

_FIELD_TYPES = {f.name: f.type for f in fields(SimConfig)}

def _type_name(tp):
  return tp if isinstance(tp,str) else tp.__name__

def coerce_values(values):
  """
  Check keys against SimConfig and convert values to the field types.
  Integers are accepted for float fields; booleans never are.
  """
  out = dict()
  for key,value in values.items():
    if key not in _FIELD_TYPES:
      raise ConfigError('unknown configuration key "{}"'.format(key))

    tp = _type_name(_FIELD_TYPES[key])
    if isinstance(value,bool):
      raise ConfigError('{} expects a {} value, got {!r}'.format(key,tp,value))

    if tp=='float':
      if not isinstance(value,(int,float)):
        raise ConfigError('{} expects a number, got {!r}'.format(key,value))
      value = float(value)
    elif tp=='int':
      if isinstance(value,float) and value.is_integer():
        value = int(value)
      if not isinstance(value,int):
        raise ConfigError('{} expects an integer, got {!r}'.format(key,value))
    elif tp=='str':
      if not isinstance(value,str):
        raise ConfigError('{} expects a string, got {!r}'.format(key,value))
    out[key] = value
  return out
# end coerce_values

def load_config_file(path):
  """Read a YAML key/value file; an empty file yields no values."""
  if not os.path.isfile(path):
    raise ConfigError('config file "{}" does not exist'.format(path))

  try:
    with open(path,'r') as f:
      data = yaml.safe_load(f)
  except yaml.YAMLError as e:
    raise ConfigError('config file "{}" is not valid YAML: {}'.format(path,e))

  if data is None:
    return dict()
  if not isinstance(data,dict):
    raise ConfigError('config file "{}" must hold a mapping of key: value pairs'.format(path))
  return coerce_values(data)

def parse_config(path=None,overrides=None):
  """
  Resolve a SimConfig from defaults, an optional file and flag overrides.
  Overrides set to None are ignored.
  """
  values = dict()
  if path is not None:
    values.update(load_config_file(path))

  if overrides:
    values.update(coerce_values({k:v for k,v in overrides.items() if v is not None}))

  try:
    config = SimConfig(**values)
  except TypeError as e:
    raise ConfigError(str(e))

  logger.info('resolved configuration: %s',config)
  return config
# end parse_config

def dump_config(config):
  """Canonical YAML text of a resolved configuration (sorted keys)."""
  return yaml.safe_dump(config.as_dict(),sort_keys=True,default_flow_style=False)

def config_hash(config):
  """First 16 hex digits of the SHA-256 of the canonical config text."""
  return hashlib.sha256(dump_config(config).encode('utf-8')).hexdigest()[:16]

def write_resolved_config(config,outdir):
  path = os.path.join(outdir,'resolved_config.yaml')
  with open(path,'w') as f:
    f.write('# dtxalign config-hash={}\n'.format(config_hash(config)))
    f.write(dump_config(config))
  return path

def parse_rate_range(text):
  """
  Parse 'start:stop:step' (stop inclusive) or a comma separated list of
  rates in Mbps.
  """
  try:
    if ':' in text:
      parts = [float(x) for x in text.split(':')]
      if len(parts)!=3:
        raise ValueError()
      start, stop, step = parts
      if step<=0 or stop<start:
        raise ValueError()
      count = int(round((stop-start)/step))
      rates = [round(start+i*step,9) for i in range(count+1)]
    else:
      rates = [float(x) for x in text.split(',') if x.strip()]
  except ValueError:
    raise ConfigError('cannot parse rates "{}", expected start:stop:step or r1,r2,...'.format(text))

  if not rates or any(r<=0 for r in rates):
    raise ConfigError('rates must be positive, got "{}"'.format(text))
  return rates
# end parse_rate_range

def parse_strategies(text):
  if text=='all':
    return list(STRATEGY_NAMES)
  names = [s.strip() for s in text.split(',') if s.strip()]
  for n in names:
    if n not in STRATEGY_NAMES:
      raise ConfigError('unknown strategy "{}", expected one of {}'.format(n,', '.join(STRATEGY_NAMES)))
  if not names:
    raise ConfigError('no strategy given')
  return names
