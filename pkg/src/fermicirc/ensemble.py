"""Disorder-ensemble orchestration: seeding, workers, aggregation, checkpoints.

A scan is a grid of sweep points (model value x geometry) with N
realizations each.  Cell (k, r) always runs with seed hash(base_seed, k, r),
so results are independent of worker count and scheduling; outputs are
folded in (k, r) order and rewritten deterministically, which makes a
resumed run byte-identical to an uninterrupted one.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .circuits import EVOLUTION, PARTITION, PBC, build_schedule
from .disorder import COHERENT, INCOHERENT, ErrorModel, sample_field
from .entanglement import (correlation_profile, half_cut_entropy,
                           half_cut_spectrum, profile_decay_fit,
                           profile_power_fit, zero_mode_and_gap, entropy)
from .errors import FermicircError, InvalidInput, PointFailed, RefusedResume
from .gaussian import (CorrelationMatrix, EvolutionReport, evolve,
                       half_filled_occupations, initial_state, OCCUPATIONS)
from .network import (compose_network, conductivity, quasienergies,
                      topological_invariant)

TASK_ENTANGLEMENT = "entanglement"
TASK_CONDUCTIVITY = "conductivity"
TASK_INVARIANT = "invariant"

ENTANGLEMENT_COLUMNS = ["realization", "M", "p_or_phi", "bc", "q", "parity",
                        "lambda_0", "lambda_1", "S_half"]
TRANSPORT_COLUMNS = ["realization", "M", "L", "p_or_phi", "g_sample", "eps_min",
                     "detRp_pbc_sign", "detRp_apbc_sign", "I_sample", "gapped"]
TRACE_COLUMNS = ["realization", "layer", "S_half", "parity", "bc", "q"]

WORKERS_ENV = "FERMICIRC_WORKERS"


@dataclass
class ScanSpec:
    """Everything needed to reproduce a scan, hashable for checkpointing."""

    task: str
    model_kind: str
    values: List[float]
    M_values: List[int]
    realizations: int
    base_seed: int
    twirl: bool = True
    p_fixed: Optional[float] = None
    aspect: Optional[str] = None       # "L=5M" or "M=5L"
    L_values: Optional[List[int]] = None
    bc: str = PBC
    q: int = 0
    tol_conv: float = 1e-6
    gap_threshold: float = 2.0
    with_profile: bool = False

    def __post_init__(self):
        if self.task not in (TASK_ENTANGLEMENT, TASK_CONDUCTIVITY, TASK_INVARIANT):
            raise InvalidInput(f"unknown task {self.task!r}")
        if self.model_kind not in (INCOHERENT, COHERENT):
            raise InvalidInput(f"unknown model kind {self.model_kind!r}")
        if self.realizations < 1:
            raise InvalidInput("realizations must be >= 1")
        for v in self.values:
            self.model_for(v)  # validates domain
        if self.aspect is None and self.L_values is None:
            self.aspect = "L=5M" if self.task != TASK_CONDUCTIVITY else "M=5L"
        if self.L_values is not None and len(self.L_values) != len(self.M_values):
            raise InvalidInput("L_values must pair with M_values")

    def model_for(self, value: float) -> ErrorModel:
        if self.model_kind == INCOHERENT:
            return ErrorModel.incoherent(value)
        if self.twirl:
            return ErrorModel.coherent_twirl(value)
        if self.p_fixed is None:
            raise InvalidInput("coherent non-twirl sweep needs p_fixed")
        return ErrorModel.coherent(value, self.p_fixed)

    def geometry(self) -> List[Tuple[int, int]]:
        if self.L_values is not None:
            return list(zip(self.M_values, self.L_values))
        out = []
        for M in self.M_values:
            if self.aspect == "L=5M":
                out.append((M, 5 * M))
            elif self.aspect == "M=5L":
                if M % 5 != 0:
                    raise InvalidInput(f"M={M} not a multiple of 5 for M=5L")
                out.append((M, M // 5))
            else:
                raise InvalidInput(f"unknown aspect rule {self.aspect!r}")
        return out

    def points(self) -> List[dict]:
        pts = []
        k = 0
        for value in self.values:
            for M, L in self.geometry():
                pts.append({"k": k, "value": value, "M": M, "L": L})
                k += 1
        return pts

    def canonical_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def spec_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]

    @classmethod
    def from_dict(cls, d: dict) -> "ScanSpec":
        return cls(**d)


@dataclass
class EnsembleRecord:
    """Aggregated statistics of one sweep point."""

    point: dict
    n: int
    dropped: int
    means: Dict[str, float]
    stderr: Dict[str, float]
    medians: Dict[str, float]
    values: Optional[Dict[str, np.ndarray]] = None


def cell_seed(base_seed: int, k: int, r: int) -> int:
    digest = hashlib.sha256(f"{base_seed}:{k}:{r}".encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def _ground_sector_evolve(field, spec: ScanSpec, seed: int):
    """Evolve both fermion-parity sectors and keep the lower-entropy one.

    In a gapped phase only one parity hosts the long-time ground state; the
    other converges to a sector-lowest excited state whose extra quasiparticle
    inflates the half-cut entropy.  In gapless runs the two sectors are
    statistically equivalent and the choice is immaterial.
    """
    M = field.M
    occ = half_filled_occupations(M, seed)
    occ_b = occ.copy()
    occ_b[0] ^= 1  # flip one site: opposite fermion parity
    schedule = build_schedule(field, bc=spec.bc, q=spec.q, ordering=EVOLUTION)
    rep_a = evolve(initial_state(OCCUPATIONS, M, occupations=occ), schedule,
                   tol_conv=spec.tol_conv)
    rep_b = evolve(initial_state(OCCUPATIONS, M, occupations=occ_b), schedule,
                   tol_conv=spec.tol_conv)
    s_a = half_cut_entropy(rep_a.C_final)
    s_b = half_cut_entropy(rep_b.C_final)
    if s_b < s_a - 1e-9:
        return rep_b, 1
    return rep_a, 0


def _entanglement_row(spec: ScanSpec, point: dict, r: int, seed: int) -> dict:
    model = spec.model_for(point["value"])
    field = sample_field(model, point["M"], point["L"], seed)
    rep, sector = _ground_sector_evolve(field, spec, seed)
    es = half_cut_spectrum(rep.C_final)
    lam0, lam1 = zero_mode_and_gap(es)
    row = {
        "realization": r, "M": point["M"], "p_or_phi": point["value"],
        "bc": spec.bc, "q": spec.q, "parity": rep.parity,
        "lambda_0": lam0, "lambda_1": lam1, "S_half": entropy(es),
        "converged": int(rep.converged), "sector": sector,
        "layers_applied": rep.layers_applied,
    }
    if spec.with_profile:
        prof = correlation_profile(rep.C_final)
        d_lo, d_hi = 4, max(point["M"] // 4, 8)
        try:
            length, r2 = profile_decay_fit(prof, d_lo, d_hi)
            row["corr_length"], row["corr_r2_exp"] = length, r2
        except FermicircError:
            row["corr_length"], row["corr_r2_exp"] = float("nan"), float("nan")
        try:
            power, r2p = profile_power_fit(prof, d_lo, d_hi)
            row["corr_power"], row["corr_r2_pow"] = power, r2p
        except FermicircError:
            row["corr_power"], row["corr_r2_pow"] = float("nan"), float("nan")
    return row


def _conductivity_row(spec: ScanSpec, point: dict, r: int, seed: int) -> dict:
    model = spec.model_for(point["value"])
    field = sample_field(model, point["M"], point["L"], seed)
    schedule = build_schedule(field, bc=spec.bc, q=spec.q, ordering=PARTITION)
    state = compose_network(schedule)
    qe = quasienergies(schedule, state)
    return {
        "realization": r, "M": point["M"], "L": point["L"],
        "p_or_phi": point["value"],
        "g_sample": conductivity(state, point["L"], point["M"]),
        "eps_min": float(qe.eps[0]), "eps0_signed": qe.eps0_signed,
        "detRp_pbc_sign": "", "detRp_apbc_sign": "", "I_sample": "", "gapped": "",
        "unitarity_defect": state.unitarity_defect,
    }


def _invariant_row(spec: ScanSpec, point: dict, r: int, seed: int) -> dict:
    model = spec.model_for(point["value"])
    field = sample_field(model, point["M"], point["L"], seed)
    res = topological_invariant(field, gap_threshold=spec.gap_threshold, q=spec.q)
    return {
        "realization": r, "M": point["M"], "L": point["L"],
        "p_or_phi": point["value"], "g_sample": res["g_pbc"],
        "eps_min": res["eps_min"],
        "detRp_pbc_sign": res["detRp_pbc_sign"],
        "detRp_apbc_sign": res["detRp_apbc_sign"],
        "I_sample": res["I_sample"], "gapped": int(res["gapped"]),
    }


_ROW_BUILDERS = {
    TASK_ENTANGLEMENT: _entanglement_row,
    TASK_CONDUCTIVITY: _conductivity_row,
    TASK_INVARIANT: _invariant_row,
}


def _cell_worker(args):
    spec_dict, point, r = args
    spec = ScanSpec.from_dict(spec_dict)
    seed = cell_seed(spec.base_seed, point["k"], r)
    try:
        row = _ROW_BUILDERS[spec.task](spec, point, r, seed)
        return point["k"], r, "ok", row
    except FermicircError as exc:
        return point["k"], r, "dropped", {"error": type(exc).__name__, "msg": str(exc)}


def _load_checkpoint(path: str, spec: ScanSpec) -> Dict[Tuple[int, int], tuple]:
    done = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                entry = json.loads(line)
                if entry["spec_hash"] != spec.spec_hash():
                    raise RefusedResume("checkpoint belongs to a different spec")
                done[(entry["k"], entry["r"])] = (entry["status"], entry["payload"])
            except (json.JSONDecodeError, KeyError) as exc:
                raise RefusedResume(f"corrupt checkpoint line: {exc}") from exc
    return done


def run_scan(spec: ScanSpec, out_dir: Optional[str] = None,
             workers: int = 1, keep_values: bool = True) -> List[EnsembleRecord]:
    """Run (or complete) a scan; returns per-point records in sweep order.

    With ``out_dir`` set, finished cells are checkpointed one JSON line at a
    time and final CSVs are (re)written from the complete cell set, so a
    rerun over an interrupted directory finishes the remaining cells only.
    """
    points = spec.points()
    cells = [(p, r) for p in points for r in range(spec.realizations)]
    done: Dict[Tuple[int, int], tuple] = {}
    ck_path = None
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        ck_path = os.path.join(out_dir, "checkpoint.jsonl")
        if os.path.exists(ck_path):
            done = _load_checkpoint(ck_path, spec)
        _write_manifest(out_dir, spec, finished=False, dropped=None)

    todo = [(p, r) for (p, r) in cells if (p["k"], r) not in done]
    args = [(asdict(spec), p, r) for p, r in todo]
    if args:
        ck_fh = open(ck_path, "a") if ck_path else None
        try:
            if workers > 1:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    results = pool.map(_cell_worker, args, chunksize=1)
                    for k, r, status, payload in results:
                        done[(k, r)] = (status, payload)
                        _checkpoint_line(ck_fh, spec, k, r, status, payload)
            else:
                for a in args:
                    k, r, status, payload = _cell_worker(a)
                    done[(k, r)] = (status, payload)
                    _checkpoint_line(ck_fh, spec, k, r, status, payload)
        finally:
            if ck_fh:
                ck_fh.close()

    records = _aggregate(spec, points, done, keep_values)
    if out_dir is not None:
        write_outputs(out_dir, spec, points, done, records)
    return records


def resume(out_dir: str, workers: int = 1) -> List[EnsembleRecord]:
    """Complete an interrupted scan directory; no-op when already finished."""
    manifest_path = os.path.join(out_dir, "manifest.json")
    if not os.path.exists(manifest_path):
        raise RefusedResume(f"no manifest in {out_dir}")
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    spec = ScanSpec.from_dict(manifest["spec"])
    if manifest["spec_hash"] != spec.spec_hash():
        raise RefusedResume("manifest hash does not match its own spec")
    return run_scan(spec, out_dir=out_dir, workers=workers)


def _checkpoint_line(fh, spec, k, r, status, payload):
    if fh is None:
        return
    fh.write(json.dumps({"spec_hash": spec.spec_hash(), "k": k, "r": r,
                         "status": status, "payload": payload}) + "\n")
    fh.flush()


def _aggregate(spec: ScanSpec, points, done, keep_values) -> List[EnsembleRecord]:
    numeric = {
        TASK_ENTANGLEMENT: ["lambda_0", "lambda_1", "S_half"],
        TASK_CONDUCTIVITY: ["g_sample", "eps_min"],
        TASK_INVARIANT: ["g_sample", "eps_min", "I_sample"],
    }[spec.task]
    if spec.with_profile and spec.task == TASK_ENTANGLEMENT:
        numeric = numeric + ["corr_length", "corr_r2_exp", "corr_r2_pow"]
    records = []
    for p in points:
        rows = []
        dropped = 0
        for r in range(spec.realizations):
            status, payload = done[(p["k"], r)]
            if status == "ok":
                rows.append(payload)
            else:
                dropped += 1
        if not rows:
            raise PointFailed(f"all {spec.realizations} realizations dropped at {p}")
        means, stderr, medians, values = {}, {}, {}, {}
        for key in numeric:
            vals = np.array([row[key] for row in rows], dtype=float)
            means[key] = float(np.mean(vals))
            stderr[key] = float(np.std(vals, ddof=1) / np.sqrt(len(vals))) \
                if len(vals) > 1 else float("nan")
            medians[key] = float(np.median(vals))
            if keep_values:
                values[key] = vals
        records.append(EnsembleRecord(p, len(rows), dropped, means, stderr,
                                      medians, values if keep_values else None))
    return records


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_rows_csv(path: str, columns: Sequence[str], rows: Sequence[dict]) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(c, "")) for c in columns) + "\n")


def write_outputs(out_dir: str, spec: ScanSpec, points, done,
                  records: List[EnsembleRecord]) -> None:
    """Rewrite raw and summary CSVs (sorted by cell) plus the manifest."""
    rows = []
    for p in points:
        for r in range(spec.realizations):
            status, payload = done[(p["k"], r)]
            if status == "ok":
                row = dict(payload)
                row.setdefault("L", p["L"])
                rows.append(row)
    if spec.task == TASK_ENTANGLEMENT:
        base = ENTANGLEMENT_COLUMNS
        extras = [c for c in rows[0] if c not in base and c != "L"] if rows else []
        raw_name = "entanglement.csv"
    else:
        base = TRANSPORT_COLUMNS
        extras = [c for c in rows[0] if c not in base] if rows else []
        raw_name = "transport.csv"
    write_rows_csv(os.path.join(out_dir, raw_name), list(base) + extras, rows)

    summary = []
    for rec in records:
        row = {"p_or_phi": rec.point["value"], "M": rec.point["M"],
               "L": rec.point["L"], "n": rec.n, "dropped": rec.dropped}
        for key, val in rec.means.items():
            row[f"mean_{key}"] = val
            # error bars are twice the standard error in every emitted table
            row[f"stderr2_{key}"] = 2.0 * rec.stderr[key]
            row[f"median_{key}"] = rec.medians[key]
        summary.append(row)
    cols = list(summary[0].keys()) if summary else []
    write_rows_csv(os.path.join(out_dir, "summary.csv"), cols, summary)
    dropped_total = sum(rec.dropped for rec in records)
    _write_manifest(out_dir, spec, finished=True, dropped=dropped_total)


def _write_manifest(out_dir: str, spec: ScanSpec, finished: bool, dropped) -> None:
    path = os.path.join(out_dir, "manifest.json")
    manifest = {
        "spec_hash": spec.spec_hash(),
        "spec": asdict(spec),
        "finished": finished,
        "dropped_total": dropped,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1
