"""One-way state merging and distillation workbench (C++ core)."""

import json as _json

from . import _qmerge
from ._qmerge import (
    CapExceeded,
    ParseError,
    State,
    StateSet,
    coherent_information,
    conditional_entropy,
    d1_rate,
    distance_to_hull,
    entropy_bin_probabilities,
    fidelity,
    hausdorff_distance,
    maximally_entangled,
    misbin_probability,
    mutual_info_env,
    partial_trace,
    run_cli,
    state_from_json,
    state_set_from_json,
    trace_norm,
    von_neumann_entropy,
)


def _report(fn):
    def wrapper(*args, **kwargs):
        return _json.loads(fn(*args, **kwargs))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


compound_merging_cost = _report(_qmerge.compound_merging_cost)
compound_classical_cost = _report(_qmerge.compound_classical_cost)
distillation_rate_lower_bound = _report(_qmerge.distillation_rate_lower_bound)
check_robustification = _report(_qmerge.check_robustification)
rate_gap_report = _report(_qmerge.rate_gap_report)


def avqs_distillation_capacity(states, **kwargs):
    return distillation_rate_lower_bound(states, hull=True, **kwargs)


__all__ = [name for name in dir() if not name.startswith("_")]
