"""Experiment scenarios tying the samplers, oracles, and solvers together.

Each scenario resolves its parameters against defaults, runs a deterministic
set of seeded tasks (optionally on a thread pool; results are merged in task
order so worker count never changes the output), and returns a
:class:`~strongconv.records.RunRecord` whose metric tables are reproducible
bit for bit from the same seed.

Scenario ids:

* ``S1 ht-strong``      single-tuple norms and spectra vs the limit oracles
* ``S2 asym-free``      mixed-moment gaps for independent tuples
* ``S3 tensor-probe``   tensor-leg polynomial norms vs the limit oracles
* ``S4 collapse``       orbit distances of mapped independent tuples
* ``S5 entropy-probe``  covering numbers of sampled pushforward tuples
* ``S6 concentration``  empirical deviation profiles
* ``S7 nonamen-gap``    spectral gap of the commutator Laplacian
* ``S8 haar-variant``   S1-S4 rerun with the Haar ensemble
* ``S9 witness``        averaged conjugation operator norms vs the oracle
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import freeprob, orbit, spectral, tensorops
from .concentration import deviation_profile
from .ensembles import MatTuple, SeedSpec, sample_tuple, sample_tuple_bounded
from .freeprob import BudgetExceededError, GeneratorSpec
from .ncpoly import NcPoly, all_monomials, monomial_str, parse
from .records import MetricTable, RunRecord

_ORACLE_KIND = {"gue": "semicircular", "haar": "haar_unitary"}


@dataclass(frozen=True)
class ScenarioSpec:
    """A scenario id plus parameter overrides (merged over the defaults)."""

    id: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.id not in DEFAULTS:
            raise ValueError(
                f"unknown scenario {self.id!r}; known: {sorted(DEFAULTS)}"
            )


DEFAULTS: dict = {
    "ht-strong": {
        "kind": "gue",
        "k_list": [32, 64, 128, 256],
        "reps": 5,
        "polys": ["T1"],
        "supports": {"T1": [-2.0, 2.0]},
        "q_max": 10,
        "seed": 7,
    },
    "asym-free": {
        "kind": "gue",
        "k_list": [32, 64],
        "reps": 100,
        "r": 2,
        "degree": 4,
        "seed": 7,
    },
    "tensor-probe": {
        "kind": "gue",
        "k_list": [16, 32, 64],
        "reps": 3,
        "r": 1,
        "polys": ["T1 + T2"],
        "q_max": 9,
        "seed": 7,
    },
    "collapse": {
        "kind": "gue",
        "k_list": [32, 64, 128],
        "pairs": 12,
        "r": 2,
        "maps": [
            {"name": "coord1", "polys": ["T1"]},
            {"name": "identity", "polys": None},
        ],
        "restarts": 4,
        "max_iters": 200,
        "seed": 7,
    },
    "entropy-probe": {
        "kind": "gue",
        "k_list": [16, 32],
        "samples": 60,
        "eps_grid": [0.25, 0.5, 1.0],
        "map_polys": ["T1"],
        "r": 2,
        "radius": 2.5,
        "seed": 7,
    },
    "concentration": {
        "kind": "gue",
        "k_list": [16, 32, 64],
        "reps": 200,
        "observable": "T1^2",
        "statistic": "trace_moment",
        "eps_grid": [0.05, 0.1, 0.2, 0.5],
        "seed": 7,
    },
    "nonamen-gap": {
        "kind": "gue",
        "k_list": [8, 16, 32],
        "reps": 3,
        "r": 2,
        "mu": None,
        "seed": 7,
    },
    "haar-variant": {
        "base": ["ht-strong", "asym-free"],
        "k_list": [32, 64],
        "reps": 5,
        "seed": 7,
    },
    "witness": {
        "k_list": [16, 32, 64],
        "reps": 2,
        "r": 2,
        "q_max": 7,
        "seed": 7,
    },
}

_ALIASES = {
    "s1": "ht-strong", "s2": "asym-free", "s3": "tensor-probe",
    "s4": "collapse", "s5": "entropy-probe", "s6": "concentration",
    "s7": "nonamen-gap", "s8": "haar-variant", "s9": "witness",
}


def canonical_id(scenario_id: str) -> str:
    sid = scenario_id.lower()
    return _ALIASES.get(sid, sid)


def _pmap(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))


def _resolve(spec: ScenarioSpec) -> dict:
    params = dict(DEFAULTS[spec.id])
    for key, value in spec.params.items():
        if key not in params:
            raise ValueError(f"unknown parameter {key!r} for scenario {spec.id}")
        params[key] = value
    ks = params.get("k_list")
    if ks is not None:
        if not ks or any(a >= b for a, b in zip(ks, ks[1:])):
            raise ValueError("k_list must be nonempty and strictly ascending")
    for key in ("polys", "map_polys"):
        for text in params.get(key) or []:
            parse(text)
    if "observable" in params:
        parse(params["observable"])
    return params


def run_scenario(spec: ScenarioSpec | str, workers: int = 1,
                 seed: int | None = None) -> RunRecord:
    """Execute a scenario and return its record (not yet written to disk)."""
    if isinstance(spec, str):
        spec = ScenarioSpec(canonical_id(spec))
    params = _resolve(spec)
    if seed is not None:
        params["seed"] = int(seed)
    root = SeedSpec(int(params["seed"]))
    runner = _RUNNERS[spec.id]
    t0 = time.perf_counter()
    tables = runner(params, root, workers)
    wall = time.perf_counter() - t0
    return RunRecord(
        scenario_id=spec.id,
        params=params,
        seed=root,
        tables=tables,
        wall_clock_s=wall,
    )


# -- S1: single-tuple strong-convergence surrogate -------------------------


def _oracle_norm_row(poly: NcPoly, spec: GeneratorSpec, q_max: int):
    try:
        ln = freeprob.limit_norm(poly, spec, q_max)
        return ln.extrapolated, max(ln.raw_lower_bounds), ""
    except BudgetExceededError as exc:
        return math.nan, math.nan, str(exc)


def _run_ht_strong(params, root, workers, kind=None, prefix=""):
    kind = kind or params["kind"]
    polys = [parse(t) for t in params["polys"]]
    supports = params.get("supports") or {}
    r = max(max(p.max_generator_index() for p in polys), 1)
    ospec = GeneratorSpec(_ORACLE_KIND[kind], r)
    oracle = {text: _oracle_norm_row(p, ospec, params["q_max"])
              for text, p in zip(params["polys"], polys)}

    def task(args):
        ki, rep = args
        k = params["k_list"][ki]
        tup = sample_tuple(kind, r, k, root.child(1, ki, rep))
        rows = []
        for text, poly in zip(params["polys"], polys):
            mat = poly.evaluate(tup.entries)
            norm_fin = spectral.op_norm(mat)
            extrap, raw_max, err = oracle[text]
            sup = supports.get(text)
            herms = np.linalg.norm(mat - mat.conj().T) <= 1e-10 * (1 + np.linalg.norm(mat))
            if sup is not None and herms:
                haus = spectral.hausdorff(
                    spectral.spectrum_set(mat), [tuple(sup)]
                )
            else:
                haus = math.nan
            rows.append((k, rep, text, norm_fin, extrap, raw_max,
                         norm_fin - extrap, haus, err))
        return rows

    tasks = [(ki, rep) for ki in range(len(params["k_list"]))
             for rep in range(params["reps"])]
    table = MetricTable(
        prefix + "strong_norms",
        ("k", "rep", "poly", "norm_fin", "norm_oracle", "norm_raw_max",
         "norm_gap", "hausdorff_support", "error"),
    )
    for rows in _pmap(task, tasks, workers):
        for row in rows:
            table.append(*row)
    return {table.name: table}


# -- S2: moment gaps against the freeness oracle ----------------------------


def _run_asym_free(params, root, workers, kind=None, prefix=""):
    kind = kind or params["kind"]
    r = params["r"]
    words = list(all_monomials(r, params["degree"]))
    ospec = GeneratorSpec(_ORACLE_KIND[kind], r)
    oracle = [freeprob.poly_moment(NcPoly.from_monomial(w), ospec) for w in words]

    def task(args):
        ki, rep = args
        k = params["k_list"][ki]
        tup = sample_tuple(kind, r, k, root.child(2, ki, rep))
        law = _word_values(tup, words)
        return law

    table = MetricTable(
        prefix + "moment_gaps",
        ("k", "word", "mc_mean_re", "mc_mean_im", "oracle_re", "oracle_im",
         "abs_gap", "stderr"),
    )
    for ki, k in enumerate(params["k_list"]):
        tasks = [(ki, rep) for rep in range(params["reps"])]
        samples = np.asarray(_pmap(task, tasks, workers))  # reps x words
        mean = samples.mean(axis=0)
        stderr = samples.std(axis=0, ddof=1) / math.sqrt(params["reps"]) \
            if params["reps"] > 1 else np.zeros(len(words))
        for wi, w in enumerate(words):
            gap = abs(mean[wi] - oracle[wi])
            table.append(k, monomial_str(w), float(mean[wi].real),
                         float(mean[wi].imag), float(oracle[wi].real),
                         float(oracle[wi].imag), float(gap),
                         float(abs(stderr[wi])))
    return {table.name: table}


def _word_values(tup: MatTuple, words) -> np.ndarray:
    """Normalized traces of a word list, sharing prefix products."""
    k = tup.dim
    letters = {}
    for j, m in enumerate(tup.entries, start=1):
        letters[(j, False)] = m
        letters[(j, True)] = m.conj().T
    products = {(): np.eye(k, dtype=complex)}
    values = np.empty(len(words), dtype=complex)
    for i, w in enumerate(words):
        if w not in products:
            products[w] = products[w[:-1]] @ letters[(w[-1].index, w[-1].star)]
        values[i] = np.trace(products[w]) / k
    return values


# -- S3: tensor-leg norms ----------------------------------------------------


def _run_tensor_probe(params, root, workers, kind=None, prefix=""):
    kind = kind or params["kind"]
    r = params["r"]
    polys = [parse(t) for t in params["polys"]]
    for p in polys:
        if p.max_generator_index() > 2 * r:
            raise ValueError("tensor polynomials live on 2r generators")
    ospec = GeneratorSpec(_ORACLE_KIND[kind], r)
    oracle = {t: _oracle_norm_row(p, ospec, params["q_max"])
              for t, p in zip(params["polys"], polys)}

    def task(args):
        ki, rep = args
        k = params["k_list"][ki]
        x = sample_tuple(kind, r, k, root.child(3, ki, rep, 0))
        y = sample_tuple(kind, r, k, root.child(3, ki, rep, 1))
        rows = []
        for text, poly in zip(params["polys"], polys):
            op = tensorops.eval_tensor_poly(poly, x, y)
            norm_fin = tensorops.tensor_norm(op, seed=root.child(3, ki, rep, 2))
            extrap, raw_max, err = oracle[text]
            rows.append((k, rep, text, float(norm_fin), norm_fin.converged,
                         extrap, raw_max, norm_fin - extrap, err))
        return rows

    tasks = [(ki, rep) for ki in range(len(params["k_list"]))
             for rep in range(params["reps"])]
    table = MetricTable(
        prefix + "tensor_norms",
        ("k", "rep", "poly", "norm_fin", "norm_converged", "norm_oracle",
         "norm_raw_max", "norm_gap", "error"),
    )
    for rows in _pmap(task, tasks, workers):
        for row in rows:
            table.append(*row)
    return {table.name: table}


# -- S4: orbit-distance collapse probe --------------------------------------


def _apply_map(tup: MatTuple, polys) -> MatTuple:
    if polys is None:
        return tup
    return MatTuple(tuple(p.evaluate(tup.entries) for p in polys))


def _run_collapse(params, root, workers, kind=None, prefix=""):
    kind = kind or params["kind"]
    r = params["r"]
    maps = [(m["name"], None if m["polys"] is None else [parse(t) for t in m["polys"]])
            for m in params["maps"]]

    def task(args):
        ki, pair = args
        k = params["k_list"][ki]
        a = sample_tuple(kind, r, k, root.child(4, ki, pair, 0))
        b = sample_tuple(kind, r, k, root.child(4, ki, pair, 1))
        rows = []
        for name, polys in maps:
            fa, fb = _apply_map(a, polys), _apply_map(b, polys)
            if fa.r == 1 and fa.is_hermitian() and fb.is_hermitian():
                value = orbit.dorb_exact_herm1(fa[0], fb[0])
                certified, restarts = "exact", 0
            else:
                res = orbit.dorb_upper(
                    fa, fb, restarts=params["restarts"],
                    max_iters=params["max_iters"],
                    seed=root.child(4, ki, pair, 2),
                )
                value, certified, restarts = res.value, res.certified, res.restarts_used
            rows.append((k, pair, name, value, certified, restarts))
        return rows

    tasks = [(ki, pair) for ki in range(len(params["k_list"]))
             for pair in range(params["pairs"])]
    table = MetricTable(
        prefix + "collapse",
        ("k", "pair", "map", "value", "certified", "restarts"),
    )
    for rows in _pmap(task, tasks, workers):
        for row in rows:
            table.append(*row)
    return {table.name: table}


# -- S5: covering numbers of pushforward samples -----------------------------


def _run_entropy_probe(params, root, workers, kind=None, prefix=""):
    kind = kind or params["kind"]
    r = params["r"]
    polys = [parse(t) for t in params["map_polys"]]

    def sample_task(args):
        ki, idx = args
        k = params["k_list"][ki]
        tup, rejections = sample_tuple_bounded(
            kind, r, k, root.child(5, ki, idx), radius=params["radius"]
        )
        return _apply_map(tup, polys), rejections

    table = MetricTable(
        prefix + "covering",
        ("k", "epsilon", "sample_count", "cover_size", "h_estimate",
         "rejections"),
    )
    for ki, k in enumerate(params["k_list"]):
        tasks = [(ki, idx) for idx in range(params["samples"])]
        pushed = _pmap(sample_task, tasks, workers)
        samples = [p[0] for p in pushed]
        rejections = sum(p[1] for p in pushed)
        herm1 = samples[0].r == 1 and all(s.is_hermitian() for s in samples)
        dist = "exact_herm1" if herm1 else "dorb_upper"
        for eps in params["eps_grid"]:
            probe = orbit.covering_number(samples, eps, dist=dist)
            table.append(k, float(eps), probe.sample_count, probe.cover_size,
                         probe.h_estimate, rejections)
    return {table.name: table}


# -- S6: deviation profiles ---------------------------------------------------


def _run_concentration(params, root, workers, kind=None, prefix=""):
    kind = kind or params["kind"]
    rows = deviation_profile(
        kind,
        parse(params["observable"]),
        params["statistic"],
        params["k_list"],
        params["reps"],
        root.child(6),
        eps_grid=params["eps_grid"],
    )
    table = MetricTable(
        prefix + "deviation",
        ("k", "epsilon", "tail_prob", "neg_log_tail_over_k2", "censored_flag"),
    )
    for row in rows:
        table.append(row["k"], row["epsilon"], row["tail_prob"],
                     row["neg_log_tail_over_k2"], row["censored_flag"])
    return {table.name: table}


# -- S7: commutator Laplacian gaps --------------------------------------------


def _run_nonamen_gap(params, root, workers, kind=None, prefix=""):
    kind = kind or params["kind"]
    r = params["r"]
    mu = params["mu"] or [1.0 / r] * r

    def task(args):
        ki, rep = args
        k = params["k_list"][ki]
        tup = sample_tuple(kind, r, k, root.child(7, ki, rep))
        if kind == "haar":
            # Hermitian coordinates are required; use the real parts
            tup = MatTuple(tuple((m + m.conj().T) / 2 for m in tup.entries))
        res = tensorops.nonamen_laplacian(
            tup, mu, seed=root.child(7, ki, rep, 1)
        )
        return (k, rep, res.lambda_min, res.lambda_gap, res.converged)

    tasks = [(ki, rep) for ki in range(len(params["k_list"]))
             for rep in range(params["reps"])]
    table = MetricTable(
        prefix + "laplacian",
        ("k", "rep", "lambda_min", "lambda_gap", "converged"),
    )
    for row in _pmap(task, tasks, workers):
        table.append(*row)
    return {table.name: table}


# -- S8: Haar-unitary variants -------------------------------------------------


def _run_haar_variant(params, root, workers, kind=None, prefix=""):
    tables = {}
    base_runners = {
        "ht-strong": (_run_ht_strong, {
            "polys": ["T1 + T1'"],
            "supports": {"T1 + T1'": [-2.0, 2.0]},
            "q_max": 10,
        }),
        "asym-free": (_run_asym_free, {"r": 2, "degree": 4}),
        "tensor-probe": (_run_tensor_probe, {
            "r": 1, "polys": ["T1 + T2"], "q_max": 7,
        }),
        "collapse": (_run_collapse, {
            "r": 2, "pairs": 10,
            "maps": [{"name": "coord1_real", "polys": ["T1 + T1'"]},
                     {"name": "identity", "polys": None}],
            "restarts": 4, "max_iters": 200,
        }),
    }
    for base in params["base"]:
        base = canonical_id(base)
        if base not in base_runners:
            raise ValueError(f"haar-variant cannot wrap scenario {base!r}")
        runner, extra = base_runners[base]
        sub = dict(DEFAULTS[base])
        sub.update(extra)
        sub["k_list"] = params["k_list"]
        if "reps" in sub:
            sub["reps"] = params["reps"]
        tables.update(runner(sub, root, workers, kind="haar", prefix="haar_"))
    return tables


# -- S9: averaged conjugation witness -------------------------------------------


def witness_poly(r: int) -> NcPoly:
    acc = NcPoly.zero()
    for j in range(1, r + 1):
        acc = acc + NcPoly.generator(j) * NcPoly.generator(r + j)
    return (1.0 / r) * acc


def _run_witness(params, root, workers, kind=None, prefix=""):
    r = params["r"]
    ospec = GeneratorSpec("haar_unitary", r)
    extrap, raw_max, err = _oracle_norm_row(witness_poly(r), ospec, params["q_max"])

    def task(args):
        ki, rep = args
        k = params["k_list"][ki]
        u = sample_tuple("haar", r, k, root.child(9, ki, rep, 0))
        v = sample_tuple("haar", r, k, root.child(9, ki, rep, 1))
        w_self = tensorops.haagerup_witness(u, u, seed=root.child(9, ki, rep, 2))
        w_ind = tensorops.haagerup_witness(u, v, seed=root.child(9, ki, rep, 3))
        return (k, rep, float(w_self), w_self.converged, float(w_ind),
                w_ind.converged, extrap, raw_max)

    tasks = [(ki, rep) for ki in range(len(params["k_list"]))
             for rep in range(params["reps"])]
    table = MetricTable(
        prefix + "witness",
        ("k", "rep", "value_self", "self_converged", "value_indep",
         "indep_converged", "oracle_extrapolated", "oracle_raw_max"),
    )
    for row in _pmap(task, tasks, workers):
        table.append(*row)
    return {table.name: table}


_RUNNERS = {
    "ht-strong": _run_ht_strong,
    "asym-free": _run_asym_free,
    "tensor-probe": _run_tensor_probe,
    "collapse": _run_collapse,
    "entropy-probe": _run_entropy_probe,
    "concentration": _run_concentration,
    "nonamen-gap": _run_nonamen_gap,
    "haar-variant": _run_haar_variant,
    "witness": _run_witness,
}
