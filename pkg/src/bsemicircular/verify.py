"""Randomized identity suites and their deterministic reports.

Every trial draws from ``numpy.random.default_rng([seed, suite_id, trial])``,
so a failing instance can be replayed from the seed and trial index printed
in the report.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .amplify import amplified_cheb_block, embed_corner
from .balgebra import (
    BAlgebra,
    algebra_from_json,
    algebra_to_json,
    check_trace_symmetry,
    random_element,
    random_symmetric_cp,
)
from .calculus import check_product_rule, ibp_residual, number_op, poincare_report, stein_residual
from .chebyshev import ChebProduct, ChebSpec, cheb_decompose, cheb_fdq, cheb, product_poly
from .errors import ConfigError
from .fock import FockSpace, apply_poly, basis_vector, expect, gram, make_space, vacuum, vector_residual
from .moments import expect_oracle
from .ncpoly import BiTensor, fdq, random_poly, residual, residual_tensor

SUITES = ("moments", "chebyshev", "stein", "divergence", "ibp", "poincare", "amplify")
DEFAULT_TOL = {"identity": 1e-10, "inequality": 1e-9}


@dataclass
class RunConfig:
    algebra: BAlgebra
    etas: list
    d: int
    fock_depth: int
    seed: int
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOL))

    def to_json(self) -> dict:
        return {
            "algebra": algebra_to_json(self.algebra, self.etas),
            "d": self.d,
            "fock_depth": self.fock_depth,
            "seed": self.seed,
            "tolerances": dict(sorted(self.tolerances.items())),
        }


def _check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return seed


def default_config(seed: int = 42) -> RunConfig:
    return config_from_json({"seed": seed})


def config_from_json(obj: dict) -> RunConfig:
    """Build a run configuration; missing covariance maps are drawn from the seed."""
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    seed = _check_seed(obj.get("seed", 42))
    alg_obj = obj.get("algebra", {"kind": "full", "dim": 2})
    alg, etas = algebra_from_json(alg_obj)
    d = obj.get("d", len(etas) if etas else 2)
    if not isinstance(d, int) or d < 1:
        raise ConfigError(f"d must be a positive integer, got {d!r}")
    if etas and len(etas) != d:
        raise ConfigError(f"{len(etas)} covariance maps given for d={d}")
    if not etas:
        rng = np.random.default_rng([seed])
        etas = [random_symmetric_cp(alg, rng) for _ in range(d)]
    depth = obj.get("fock_depth", 6)
    if not isinstance(depth, int) or depth < 2:
        raise ConfigError(f"fock_depth must be an integer >= 2, got {depth!r}")
    tol = dict(DEFAULT_TOL)
    extra = obj.get("tolerances", {})
    if not isinstance(extra, dict) or any(k not in DEFAULT_TOL for k in extra):
        raise ConfigError(f"tolerances may only set {sorted(DEFAULT_TOL)}")
    for k, v in extra.items():
        if not isinstance(v, (int, float)) or v <= 0:
            raise ConfigError(f"tolerance {k} must be positive")
        tol[k] = float(v)
    return RunConfig(alg, etas, d, depth, seed, tol)


@dataclass(frozen=True)
class CheckResult:
    suite: str
    check: str
    trials: int
    value: float  # max residual, or min gap for inequalities
    tolerance: float
    status: str  # pass | fail | skipped
    worst_trial: int
    seed: int


class _Tracker:
    """Worst value of one check over the trials of a suite."""

    def __init__(self, check: str, kind: str = "residual"):
        self.check = check
        self.kind = kind
        self.value = None
        self.worst = -1
        self.trials = 0

    def add(self, trial: int, value: float) -> None:
        self.trials += 1
        value = float(value)
        if self.value is None:
            better = True
        elif self.kind == "gap":
            better = value < self.value
        else:
            better = not value <= self.value  # nan counts as worse
        if better:
            self.value, self.worst = value, trial

    def result(self, suite: str, tol: float, seed: int, skipped: bool = False) -> CheckResult:
        if skipped or self.value is None:
            return CheckResult(suite, self.check, self.trials, float("nan"), tol, "skipped", -1, seed)
        ok = self.value >= -tol if self.kind == "gap" else self.value <= tol
        return CheckResult(suite, self.check, self.trials, self.value, tol, "pass" if ok else "fail", self.worst, seed)


# ----------------------------------------------------------------------------
# random helpers shared by the suites and the tests

def random_spec(alg: BAlgebra, letter: int, n: int, rng: np.random.Generator, scale: float = 1.0) -> ChebSpec:
    return ChebSpec(letter, tuple((random_element(alg, rng, scale), random_element(alg, rng, scale)) for _ in range(n)))


def random_product(alg: BAlgebra, d: int, total: int, rng: np.random.Generator, scale: float = 1.0) -> ChebProduct:
    """Random alternating Chebyshev product of the given total degree (``total >= 1``)."""
    degrees = []
    left = total
    while left:
        n = int(rng.integers(1, left + 1))
        degrees.append(n)
        left -= n
    if d == 1:
        degrees = [total]
    letters = []
    for _ in degrees:
        choices = [j for j in range(d) if not letters or j != letters[-1]]
        letters.append(int(rng.choice(choices)))
    return ChebProduct([random_spec(alg, j, n, rng, scale) for j, n in zip(letters, degrees)])


def monomial_of_product(prod: ChebProduct) -> tuple:
    """Letters and coefficient chain of the leading monomial ``(b_1 X b_1') ... (b_n X b_n')``."""
    letters, coeffs = [], []
    carry = None
    for f in prod.factors:
        for b, c in f.pairs:
            letters.append(f.letter)
            coeffs.append(b if carry is None else carry @ b)
            carry = c
    coeffs.append(carry)
    return letters, coeffs


# ----------------------------------------------------------------------------
# suites

def _rng(cfg: RunConfig, suite: str, trial: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, SUITES.index(suite), trial])


def _space(cfg: RunConfig) -> FockSpace:
    return make_space(cfg.algebra, cfg.etas, cfg.fock_depth)


def suite_moments(cfg: RunConfig, trials: int) -> list[CheckResult]:
    sp = _space(cfg)
    tr = _Tracker("fock_vs_pairings")
    for t in range(trials):
        rng = _rng(cfg, "moments", t)
        p = random_poly(cfg.algebra, cfg.d, min(6, cfg.fock_depth), rng)
        tr.add(t, np.max(np.abs(expect(sp, p) - expect_oracle(p, cfg.etas))))
    return [tr.result("moments", cfg.tolerances["identity"], cfg.seed)]


def suite_chebyshev(cfg: RunConfig, trials: int) -> list[CheckResult]:
    sp = _space(cfg)
    alg, d = cfg.algebra, cfg.d
    top = min(5, cfg.fock_depth)
    names = ("closed_fdq", "vacuum_monomial", "orthogonality", "centering", "decomposition")
    trs = {n: _Tracker(n) for n in names}
    for t in range(trials):
        rng = _rng(cfg, "chebyshev", t)
        spec = random_spec(alg, int(rng.integers(0, d)), int(rng.integers(1, top + 1)), rng)
        trs["closed_fdq"].add(t, residual_tensor(fdq(cheb(spec, cfg.etas), spec.letter) - cheb_fdq(spec, cfg.etas)))
        prod = random_product(alg, d, int(rng.integers(1, top + 1)), rng)
        letters, coeffs = monomial_of_product(prod)
        v = apply_poly(product_poly(prod, cfg.etas), vacuum(sp))
        trs["vacuum_monomial"].add(t, vector_residual(v - basis_vector(sp, letters, coeffs)))
        trs["centering"].add(t, np.max(np.abs(expect(sp, product_poly(prod, cfg.etas)))))
        other = random_product(alg, d, int(rng.integers(1, top + 1)), rng)
        if other.signature[2:] != prod.signature[2:]:
            va = apply_poly(product_poly(prod, cfg.etas), vacuum(sp))
            vb = apply_poly(product_poly(other, cfg.etas), vacuum(sp))
            trs["orthogonality"].add(t, np.max(np.abs(gram(va, vb))))
        p = random_poly(alg, d, top, rng)
        trs["decomposition"].add(t, residual(cheb_decompose(p, cfg.etas).poly(cfg.etas) - p))
    return [trs[n].result("chebyshev", cfg.tolerances["identity"], cfg.seed) for n in names]


def suite_stein(cfg: RunConfig, trials: int) -> list[CheckResult]:
    sp = _space(cfg)
    tr = _Tracker("stein")
    for t in range(trials):
        rng = _rng(cfg, "stein", t)
        p = random_poly(cfg.algebra, cfg.d, min(4, cfg.fock_depth - 1), rng)
        lhs, rhs = stein_residual(sp, int(rng.integers(0, cfg.d)), p)
        tr.add(t, abs(lhs - rhs))
    return [tr.result("stein", cfg.tolerances["identity"], cfg.seed)]


def suite_divergence(cfg: RunConfig, trials: int) -> list[CheckResult]:
    sp = _space(cfg)
    alg, d = cfg.algebra, cfg.d
    leg = max(1, min(2, (cfg.fock_depth - 1) // 2))
    names = ("product_rule_left", "product_rule_right", "number_operator")
    trs = {n: _Tracker(n) for n in names}
    for t in range(trials):
        rng = _rng(cfg, "divergence", t)
        j = int(rng.integers(0, d))
        a = random_poly(alg, d, leg, rng)
        xi = BiTensor.simple(random_poly(alg, d, leg, rng), random_poly(alg, d, leg, rng))
        left, right = check_product_rule(sp, j, a, xi)
        trs["product_rule_left"].add(t, left)
        trs["product_rule_right"].add(t, right)
        prod = random_product(alg, d, int(rng.integers(1, min(5, cfg.fock_depth - 1) + 1)), rng)
        p = product_poly(prod, cfg.etas)
        eig = sum(f.n for f in prod.factors if f.letter == j)
        trs["number_operator"].add(t, residual(number_op(sp, j, p) - eig * p))
    return [trs[n].result("divergence", cfg.tolerances["identity"], cfg.seed) for n in names]


def suite_ibp(cfg: RunConfig, trials: int) -> list[CheckResult]:
    sp = _space(cfg)
    alg, d = cfg.algebra, cfg.d
    tr = _Tracker("integration_by_parts")
    symmetric = [check_trace_symmetry(e) for e in cfg.etas]
    leg = max(1, min(3, (cfg.fock_depth - 1) // 2))
    for t in range(trials):
        rng = _rng(cfg, "ibp", t)
        j = int(rng.integers(0, d))
        xi_t = BiTensor.simple(random_poly(alg, d, leg, rng), random_poly(alg, d, leg, rng))
        xi = random_poly(alg, d, leg, rng)
        if not symmetric[j]:
            continue
        lhs, rhs = ibp_residual(sp, j, xi_t, xi)
        tr.add(t, abs(lhs - rhs))
    return [tr.result("ibp", cfg.tolerances["inequality"], cfg.seed, skipped=not any(symmetric))]


def suite_poincare(cfg: RunConfig, trials: int) -> list[CheckResult]:
    sp = _space(cfg)
    alg, d = cfg.algebra, cfg.d
    gap = _Tracker("poincare_gap", kind="gap")
    sharp = _Tracker("homogeneous_sharpness")
    top = min(4, cfg.fock_depth)
    for t in range(trials):
        rng = _rng(cfg, "poincare", t)
        rep = poincare_report(sp, random_poly(alg, d, top, rng))
        gap.add(t, rep.gap)
        prod = random_product(alg, d, int(rng.integers(1, top + 1)), rng)
        rep = poincare_report(sp, product_poly(prod, cfg.etas))
        sharp.add(t, abs(sum(rep.rhs_sq_by_letter) - prod.total_degree * rep.lhs_sq))
    tol = cfg.tolerances["inequality"]
    return [gap.result("poincare", tol, cfg.seed), sharp.result("poincare", tol, cfg.seed)]


def suite_amplify(cfg: RunConfig, trials: int) -> list[CheckResult]:
    alg, d = cfg.algebra, cfg.d
    names = ("block_chebyshev", "corner_identity", "norm_ratio")
    trs = {n: _Tracker(n) for n in names}
    top = min(3, cfg.fock_depth)
    for t in range(trials):
        rng = _rng(cfg, "amplify", t)
        n = int(rng.integers(1, 5))
        blocks = int(rng.integers(1, 4))
        j = int(rng.integers(0, d))
        specs = [random_spec(alg, j, n, rng) for _ in range(blocks)]
        trs["block_chebyshev"].add(t, amplified_cheb_block(specs, blocks + int(rng.integers(0, 2)), cfg.etas))
        p = random_poly(alg, d, top, rng)
        emb = embed_corner(p, cfg.etas)
        trs["corner_identity"].add(t, emb.residual)
        errs = [abs(r - 1.0 / emb.N) for r in emb.norm_ratio_by_letter if not math.isnan(r)]
        if errs:
            trs["norm_ratio"].add(t, max(errs))
    tol = cfg.tolerances
    return [trs["block_chebyshev"].result("amplify", tol["identity"], cfg.seed),
            trs["corner_identity"].result("amplify", tol["inequality"], cfg.seed),
            trs["norm_ratio"].result("amplify", 1e-8, cfg.seed)]


SUITE_FUNCS: dict[str, Callable[[RunConfig, int], list[CheckResult]]] = {
    "moments": suite_moments,
    "chebyshev": suite_chebyshev,
    "stein": suite_stein,
    "divergence": suite_divergence,
    "ibp": suite_ibp,
    "poincare": suite_poincare,
    "amplify": suite_amplify,
}


def run_suites(cfg: RunConfig, suite: str = "all", trials: int = 100) -> list[CheckResult]:
    if suite != "all" and suite not in SUITE_FUNCS:
        raise ConfigError(f"unknown suite {suite!r}")
    if trials < 1:
        raise ConfigError("trials must be positive")
    names = SUITES if suite == "all" else (suite,)
    out = []
    for name in names:
        out += SUITE_FUNCS[name](cfg, trials)
    return out


def all_passed(results: list[CheckResult]) -> bool:
    return all(r.status != "fail" for r in results)


REPORT_COLUMNS = ("suite", "check", "trials", "value", "tolerance", "status", "worst_trial", "seed")


def _num(x: float):
    return None if math.isnan(x) else x


def report_json(cfg: RunConfig, results: list[CheckResult]) -> str:
    obj = {
        "config": cfg.to_json(),
        "passed": all_passed(results),
        "results": [{k: (_num(v) if isinstance(v, float) else v) for k, v in asdict(r).items()} for r in results],
    }
    return json.dumps(obj, indent=2) + "\n"


def report_csv(results: list[CheckResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in results:
        w.writerow([repr(v) if isinstance(v, float) else v for v in (getattr(r, c) for c in REPORT_COLUMNS)])
    return buf.getvalue()
