"""Trial-kernel dispatch.

The compiled kernel (``ssbsim._kernels``) is used when the extension was
built; otherwise the pure-Python kernel runs.  Both consume the same
counter-based random streams and return bit-identical arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled
BACKEND = "cython" if _compiled is not None else "python"


@dataclass(frozen=True)
class TrialArrays:
    """Per-trial kernel output.

    ``reversed`` rows are zero and ``fidelity`` is NaN for discarded trials.
    Without reversal, ``fidelity`` refers to the posterior state.
    """

    outcomes: np.ndarray
    posterior: np.ndarray
    reversed: np.ndarray
    fidelity: np.ndarray


def _join(re, im) -> np.ndarray:
    out = np.empty(re.shape, dtype=np.complex128)
    out.real = re
    out.imag = im
    return out


def _split(a) -> tuple:
    a = np.asarray(a, dtype=np.complex128)
    return np.ascontiguousarray(a.real), np.ascontiguousarray(a.imag)


def run_trials(
    seed: int,
    n_trials: int,
    start,
    prep,
    outcome_index,
    meas_ops,
    renormalize: bool,
    rev_ops,
    reverse: bool,
    discard: int,
    target,
    backend: Optional[str] = None,
) -> TrialArrays:
    """Run ``n_trials`` independent prepare-measure(-reverse) trials.

    Parameters
    ----------
    seed : int
        64-bit run seed; trial ``t`` draws from stream ``(seed, t)``.
    start : array (dim,)
        Input state of every trial.
    prep : array (dim, dim)
        Preparation unitary applied to ``start``.
    outcome_index : pair of int
        Basis index whose weight is the probability of outcome 0 and 1.
    meas_ops : array (2, dim, dim)
        State update for each outcome.
    renormalize : bool
        Divide the updated state by its norm (projective collapse).
    rev_ops : array (2, dim, dim)
        Reversal operator applied after outcome ``m`` when ``reverse``.
    discard : int
        Outcome whose trials are dropped before reversal, or -1.
    target : array (dim,)
        State the final per-trial fidelity is measured against.
    """
    impl = BACKENDS[backend or BACKEND]
    dim = len(start)
    if not 1 <= dim <= 4:
        raise ValueError("trial kernel supports dimension 1 to 4")
    start_r, start_i = _split(start)
    prep_r, prep_i = _split(prep)
    meas_r, meas_i = _split(meas_ops)
    rev_r, rev_i = _split(rev_ops)
    tgt_r, tgt_i = _split(target)

    outcomes = np.empty(n_trials, dtype=np.int8)
    post_r = np.empty((n_trials, dim))
    post_i = np.empty((n_trials, dim))
    out_r = np.empty((n_trials, dim))
    out_i = np.empty((n_trials, dim))
    fid = np.empty(n_trials)
    impl.run_trials(
        seed, n_trials, start_r, start_i, prep_r, prep_i,
        int(outcome_index[0]), int(outcome_index[1]),
        meas_r, meas_i, bool(renormalize), rev_r, rev_i, bool(reverse), int(discard),
        tgt_r, tgt_i, outcomes, post_r, post_i, out_r, out_i, fid,
    )
    return TrialArrays(
        outcomes=outcomes,
        posterior=_join(post_r, post_i),
        reversed=_join(out_r, out_i),
        fidelity=fid,
    )
