"""Pauli-basis state tomography for one and two qubits.

Pipeline: sample counts in every product Pauli setting, turn them into
Pauli expectation values (marginals such as ``ZI`` pooled over all
settings that contain them), reconstruct by linear inversion and project
onto the unit-trace PSD cone by eigenvalue clipping.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .errors import ContractViolation, CountsFormatError, IncompleteDataError
from .qcore import PAULI, DensityMatrix, Ket, fidelity_pure, purity

AXES = ("X", "Y", "Z")
SIGNS = "+-"
METHOD = "linear-inversion+psd"
TRACE_PRE_TOL = 1e-9


def nqubits_for_dim(dim: int) -> int:
    if dim == 2:
        return 1
    if dim == 4:
        return 2
    raise ContractViolation(f"tomography supports 1 or 2 qubits, got dimension {dim}")


@dataclass(frozen=True)
class PauliSetting:
    axes: tuple

    def __post_init__(self):
        axes = tuple(self.axes)
        if not axes or any(a not in AXES for a in axes):
            raise ContractViolation(f"invalid Pauli setting {self.axes!r}")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def from_label(cls, label: str) -> "PauliSetting":
        return cls(tuple(label))

    @property
    def label(self) -> str:
        return "".join(self.axes)

    @property
    def nqubits(self) -> int:
        return len(self.axes)


def all_settings(nqubits: int) -> List[PauliSetting]:
    return [PauliSetting(p) for p in itertools.product(AXES, repeat=nqubits)]


def outcome_labels(nqubits: int) -> List[str]:
    return ["".join(s) for s in itertools.product(SIGNS, repeat=nqubits)]


def pauli_strings(nqubits: int) -> List[str]:
    """All non-identity Pauli strings on ``nqubits`` qubits."""
    return ["".join(p) for p in itertools.product("IXYZ", repeat=nqubits) if set(p) != {"I"}]


def pauli_matrix(label: str) -> np.ndarray:
    return reduce(np.kron, [PAULI[c] for c in label])


def _strings_from_setting(label: str) -> List[str]:
    """Pauli strings whose value can be read off a setting (all marginals)."""
    out = []
    for mask in itertools.product((False, True), repeat=len(label)):
        if any(mask):
            out.append("".join(a if keep else "I" for a, keep in zip(label, mask)))
    return out


def missing_strings(setting_labels: Iterable[str], nqubits: int) -> List[str]:
    covered = set()
    for lab in setting_labels:
        covered.update(_strings_from_setting(lab))
    return sorted(set(pauli_strings(nqubits)) - covered)


@dataclass
class CountsTable:
    """Outcome counts per Pauli setting.

    ``counts[setting_label][outcome_label]`` with labels such as ``"ZX"``
    and ``"+-"``; every setting is sampled ``shots_per_setting`` times.
    """

    counts: Dict[str, Dict[str, int]]
    shots_per_setting: int
    nqubits: int = field(init=False)

    def __post_init__(self):
        if not self.counts:
            raise CountsFormatError("counts table is empty")
        lengths = {len(lab) for lab in self.counts}
        if len(lengths) != 1:
            raise CountsFormatError("settings have mixed qubit counts")
        self.nqubits = lengths.pop()
        if self.nqubits not in (1, 2):
            raise CountsFormatError(f"unsupported qubit count {self.nqubits}")
        valid = set(outcome_labels(self.nqubits))
        for lab, row in self.counts.items():
            PauliSetting.from_label(lab)
            for out, c in row.items():
                if out not in valid:
                    raise CountsFormatError(f"setting {lab}: invalid outcome {out!r}")
                if c < 0:
                    raise CountsFormatError(f"setting {lab}: negative count")
            total = sum(row.values())
            if total != self.shots_per_setting:
                raise CountsFormatError(
                    f"setting {lab}: counts sum to {total}, expected {self.shots_per_setting}"
                )

    def rows(self):
        for lab in sorted(self.counts):
            for out in outcome_labels(self.nqubits):
                yield lab, out, self.counts[lab].get(out, 0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["setting", "outcome", "count"])
        for row in self.rows():
            w.writerow(row)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CountsTable":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["setting", "outcome", "count"]:
            raise CountsFormatError("expected header 'setting,outcome,count'", line=1)
        counts: Dict[str, Dict[str, int]] = {}
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise CountsFormatError(f"expected 3 fields, got {len(row)}", line=line_no)
            lab, out, raw = (c.strip() for c in row)
            if not lab or any(a not in AXES for a in lab):
                raise CountsFormatError(f"invalid setting {lab!r}", line=line_no)
            if len(out) != len(lab) or any(s not in SIGNS for s in out):
                raise CountsFormatError(f"invalid outcome {out!r} for setting {lab}", line=line_no)
            try:
                c = int(raw)
            except ValueError:
                raise CountsFormatError(f"count {raw!r} is not an integer", line=line_no) from None
            if c < 0:
                raise CountsFormatError("negative count", line=line_no)
            row_counts = counts.setdefault(lab, {})
            if out in row_counts:
                raise CountsFormatError(f"duplicate row for {lab},{out}", line=line_no)
            row_counts[out] = c
        if not counts:
            raise CountsFormatError("no data rows")
        totals = {sum(r.values()) for r in counts.values()}
        if len(totals) != 1:
            raise CountsFormatError("settings have different shot totals")
        shots = totals.pop()
        if shots <= 0:
            raise CountsFormatError("shots per setting must be positive")
        return cls(counts, shots)


def _setting_probabilities(rho: np.ndarray, setting: PauliSetting) -> np.ndarray:
    n = setting.nqubits
    probs = []
    for signs in itertools.product((1, -1), repeat=n):
        proj = reduce(np.kron, [(PAULI["I"] + s * PAULI[a]) / 2 for s, a in zip(signs, setting.axes)])
        probs.append(np.trace(rho @ proj).real)
    p = np.clip(np.array(probs), 0.0, None)
    return p / p.sum()


def simulate_counts(rho: DensityMatrix, settings: Sequence[PauliSetting], shots: int,
                    rng: np.random.Generator) -> CountsTable:
    """Sample ``shots`` outcomes per setting from the exact Born distribution."""
    if shots <= 0:
        raise ContractViolation("shots must be positive")
    n = nqubits_for_dim(rho.dim)
    labels = [s.label for s in settings]
    if any(len(lab) != n for lab in labels):
        raise ContractViolation(f"settings must act on {n} qubit(s)")
    missing = missing_strings(labels, n)
    if missing:
        raise IncompleteDataError(missing)
    outs = outcome_labels(n)
    counts = {}
    for s in settings:
        draws = rng.multinomial(shots, _setting_probabilities(rho.entries, s))
        counts[s.label] = {o: int(c) for o, c in zip(outs, draws)}
    return CountsTable(counts, shots)


def _eigenvalue_product(outcome: str, pauli: str) -> int:
    v = 1
    for s, p in zip(outcome, pauli):
        if p != "I" and s == "-":
            v = -v
    return v


def setting_expectation(counts: CountsTable, setting: str, pauli: str) -> float:
    """Expectation of ``pauli`` estimated from one setting only."""
    if pauli not in _strings_from_setting(setting):
        raise ContractViolation(f"{pauli} cannot be read from setting {setting}")
    row = counts.counts[setting]
    total = sum(c * _eigenvalue_product(o, pauli) for o, c in row.items())
    return total / counts.shots_per_setting


def expectations_from_counts(counts: CountsTable) -> Dict[str, float]:
    """Empirical Pauli expectations, pooling every setting that yields each string."""
    num: Dict[str, int] = {}
    den: Dict[str, int] = {}
    for lab in sorted(counts.counts):
        row = counts.counts[lab]
        for pauli in _strings_from_setting(lab):
            num[pauli] = num.get(pauli, 0) + sum(c * _eigenvalue_product(o, pauli) for o, c in row.items())
            den[pauli] = den.get(pauli, 0) + counts.shots_per_setting
    return {p: num[p] / den[p] for p in sorted(num)}


def exact_expectations(rho: DensityMatrix) -> Dict[str, float]:
    n = nqubits_for_dim(rho.dim)
    return {p: float(np.trace(rho.entries @ pauli_matrix(p)).real) for p in pauli_strings(n)}


def linear_inversion(expectations: Dict[str, float], nqubits: int) -> np.ndarray:
    """``(1/2^n) sum_P <P> P`` with ``<I> = 1``; Hermitian, unit trace, maybe not PSD."""
    if nqubits not in (1, 2):
        raise ContractViolation("linear_inversion supports 1 or 2 qubits")
    required = pauli_strings(nqubits)
    missing = [p for p in required if p not in expectations]
    if missing:
        raise IncompleteDataError(missing)
    dim = 2 ** nqubits
    rho = np.eye(dim, dtype=complex)
    for p in required:
        rho = rho + expectations[p] * pauli_matrix(p)
    return rho / dim


def project_psd(h) -> DensityMatrix:
    """Closest unit-trace PSD matrix under eigenvalue clipping.

    Negative eigenvalues are zeroed from the most negative upward and
    their mass is spread evenly over the eigenvalues that remain.
    """
    h = np.asarray(getattr(h, "entries", h), dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ContractViolation("project_psd needs a square matrix")
    if np.max(np.abs(h - h.conj().T)) > TRACE_PRE_TOL:
        raise ContractViolation("project_psd needs a Hermitian matrix")
    tr = np.trace(h).real
    if abs(tr - 1.0) > TRACE_PRE_TOL:
        raise ContractViolation(f"project_psd needs unit trace, got {tr:.12g}")
    h = 0.5 * (h + h.conj().T)
    vals, vecs = np.linalg.eigh(h)
    lam = vals[::-1].copy()
    vecs = vecs[:, ::-1]
    d = len(lam)
    i = d
    carried = 0.0
    while i > 0 and lam[i - 1] + carried / i < 0:
        carried += lam[i - 1]
        lam[i - 1] = 0.0
        i -= 1
    lam[:i] += carried / i
    rho = (vecs * lam) @ vecs.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    return DensityMatrix(rho)


@dataclass(frozen=True)
class TomographyResult:
    rho_hat: DensityMatrix
    purity_hat: float
    fidelity_hat: float
    shots_per_setting: int
    method: str = METHOD
    counts: Optional[CountsTable] = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        m = self.rho_hat.entries
        return {
            "rho_hat": {"re": m.real.tolist(), "im": m.imag.tolist()},
            "purity_hat": self.purity_hat,
            "fidelity_hat": self.fidelity_hat,
            "shots_per_setting": self.shots_per_setting,
            "method": self.method,
        }


def reconstruct(expectations: Dict[str, float], nqubits: int, target: Ket,
                shots: int, counts: Optional[CountsTable] = None) -> TomographyResult:
    rho_hat = project_psd(linear_inversion(expectations, nqubits))
    return TomographyResult(
        rho_hat=rho_hat,
        purity_hat=purity(rho_hat),
        fidelity_hat=fidelity_pure(target, rho_hat),
        shots_per_setting=shots,
        counts=counts,
    )


def tomography_pipeline(rho_source: DensityMatrix, target: Ket, shots: int,
                        rng: Optional[np.random.Generator] = None) -> TomographyResult:
    """Simulate counts, reconstruct, and score against ``target``.

    ``shots == 0`` skips sampling and feeds the exact expectations through
    the same reconstruction.
    """
    n = nqubits_for_dim(rho_source.dim)
    if target.dim != rho_source.dim:
        raise ContractViolation("target and source dimensions differ")
    if shots < 0:
        raise ContractViolation("shots must be non-negative")
    if shots == 0:
        return reconstruct(exact_expectations(rho_source), n, target, 0)
    if rng is None:
        raise ContractViolation("sampled tomography needs an rng")
    counts = simulate_counts(rho_source, all_settings(n), shots, rng)
    return reconstruct(expectations_from_counts(counts), n, target, shots, counts)
