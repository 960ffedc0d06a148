"""Opportunistic coded-caching delivery over Rayleigh-fading broadcast channels."""
from .caching import (CacheState, CodewordBatch, Placement, SystemParams, build_codewords,
                      caching_weights, centralized_place, collapse_weights, decentralized_place,
                      decode, effective_weight, load, make_library, place)
from .channel import ChannelDraw, PowerBudget, multicast_rate, sample, sample_trial
from .errors import DecodeError, DomainError
from .harness import RateEstimate, SimParams, SweepSpec, estimate, sweep, write_csv
from .power_alloc import (PowerAllocation, envelope, feasible, optimal_alloc, solve_lambda,
                          utility, weighted_sum_rate)
from .schemes import Scheme, SchemeOutcome, batch_rates, evaluate

__version__ = "0.1.0"
