"""Simulator for MIMO visible-light links with a tunable liquid-lens imaging receiver."""
from .ber import BerEstimate, ber_monte_carlo, ber_upper_bound, q_function
from .geometry import PdLayout, ReceiverPose, lens_center, lens_normal, pd_position, receiver_normal
from .gsm import GsmConfig, SignalSet, bpcu, build_signal_set, intensity_levels, ml_detect, transmit
from .lenscontrol import (ControlBounds, SchemeResult, cls_scheme, optimize_exhaustive,
                          static_baseline, vulo_scheme)
from .optics import LensState, channel_matrix, los_gain, project_vertex, refract, spot_polygon
from .scenario import ConfigError, ScenarioConfig, load_config, paper_defaults

__version__ = "0.1.0"
SCHEMA = "lumenlens-v1"
