"""Formula families with exponentially large interpolants, and a size/time table
comparing the interpolation back ends on them."""

from __future__ import annotations

import csv
import io
import itertools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence

from .errors import PreconditionError, ResourceGuardError
from .formula import (
    Box, Diamond, Formula, Neg, Or, Prop, conj, disj, expand_nabla, iff, implies, size_dag, size_string,
)
from .interpolation import METHODS, interpolate
from .limits import deadline
from .parsing import to_text
from .verify import check_craig, equivalent


@dataclass
class BenchRow:
    n: int
    method: str
    size_string: Optional[int]
    size_dag: Optional[int]
    millis: float
    verified: bool
    equivalent_to_target: Optional[bool] = None
    interpolant: Optional[str] = None
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)


def _state(n: int, subset: Iterable[int]) -> Formula:
    """Conjunction fixing every p_i: positive for i in ``subset``, negative otherwise."""
    chosen = set(subset)
    return conj(Prop(f"p{i}") if i in chosen else Neg(Prop(f"p{i}")) for i in range(1, n + 1))


def lower_bound_family(n: int) -> tuple[Formula, Formula, Formula]:
    """``(phi, psi, chi)`` where ``phi -> psi`` is valid and every interpolant
    is equivalent to ``chi``, a disjunction over all 2^n valuations of p1..pn."""
    if n < 1:
        raise PreconditionError("lower_bound_family needs n >= 1")
    s = Prop("s")
    idx = range(1, n + 1)
    p = {i: Prop(f"p{i}") for i in idx}
    q = {i: Prop(f"q{i}") for i in idx}
    phi = conj([Diamond(s)] + [
        conj([implies(p[i], Box(implies(s, p[i]))), implies(Neg(p[i]), Box(implies(s, Neg(p[i]))))])
        for i in idx
    ])
    transfer = conj(
        conj([implies(p[i], Box(q[i])), implies(Neg(p[i]), Box(Neg(q[i])))]) for i in idx
    )
    psi = implies(transfer, Diamond(conj(iff(p[i], q[i]) for i in idx)))
    chi = disj(
        conj([_state(n, xs), Diamond(_state(n, xs))])
        for k in range(n + 1)
        for xs in itertools.combinations(idx, k)
    )
    return phi, psi, chi


def _noncontingent(f: Formula) -> Formula:
    return Or(Box(f), Box(Neg(f)))


def chi_hat(n: int) -> Formula:
    """Nested non-contingency: ``[]p | []~p`` wrapped ``n`` more times."""
    if n < 0:
        raise PreconditionError("chi_hat needs n >= 0")
    f = _noncontingent(Prop("p"))
    for _ in range(n):
        f = _noncontingent(f)
    return f


def _run_row(n: int, method: str, timeout_ms: Optional[float], check_target: bool) -> BenchRow:
    phi, psi, chi = lower_bound_family(n)
    start = time.monotonic()
    try:
        with deadline(timeout_ms):
            theta = interpolate(phi, psi, method)
    except ResourceGuardError as exc:
        millis = (time.monotonic() - start) * 1000.0
        return BenchRow(n, method, None, None, millis, False, error=f"{type(exc).__name__}: {exc}")
    millis = (time.monotonic() - start) * 1000.0
    theta = expand_nabla(theta)
    verified = check_craig(theta, phi, psi).ok
    row = BenchRow(n, method, size_string(theta), size_dag(theta), millis, verified,
                   interpolant=to_text(theta))
    if check_target:
        row.equivalent_to_target = equivalent(theta, chi)
    if verified and row.size_dag < 2 ** n:
        raise AssertionError(f"verified interpolant below the 2^n DAG bound at n={n} ({method})")
    return row


def run_bench(n_max: int = 3, methods: Iterable[str] = tuple(METHODS), n_min: int = 1,
              timeout_ms: Optional[float] = None, jobs: int = 1,
              check_target: bool = True) -> list[BenchRow]:
    methods = set(methods)
    unknown = methods - set(METHODS)
    if unknown:
        raise PreconditionError(f"unknown methods: {sorted(unknown)}")
    methods = [m for m in METHODS if m in methods]
    tasks = [(n, m) for n in range(max(1, n_min), n_max + 1) for m in methods]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = [pool.submit(_run_row, n, m, timeout_ms, check_target) for n, m in tasks]
            return [f.result() for f in futs]
    return [_run_row(n, m, timeout_ms, check_target) for n, m in tasks]


_COLUMNS = ("n", "method", "size_string", "size_dag", "millis", "verified")


def rows_to_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_COLUMNS)
    for r in rows:
        w.writerow([r.n, r.method, r.size_string, r.size_dag, f"{r.millis:.1f}", r.verified])
    return buf.getvalue()


def rows_to_json(rows: Sequence[BenchRow]) -> str:
    return json.dumps([r.to_dict() for r in rows], indent=2, sort_keys=True)
