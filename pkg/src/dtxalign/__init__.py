from .config import SimConfig, ConfigError, parse_config
from .geometry import build_hex_layout, drop_mobiles
from .channel import build_link_gains, compute_sinr, pathloss_db, noise_power, sample_shadowing
from .strategies import make_strategy, memory_update, slot_sum_capacity, STRATEGY_NAMES
from .scheduler import allocate, rb_bits, RateTargets, ScheduleMap
from .power import PowerParams, total_power
from .engine import DropSimulation, run_drop, run_experiment, retransmission_probability
from .results import emit_results

__version__ = '0.1'
