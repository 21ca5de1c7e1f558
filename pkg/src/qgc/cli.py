"""Command-line front end: rate tables, reproductions, simulations, checks.

Configs are TOML files; outputs are CSV (default) or JSON with UTF-8 text,
LF line endings and ``.`` decimals.  All randomness flows from ``--seed``
(default 0) — never from the clock — so identical invocations produce
byte-identical output files; wall-clock timings go to standard error only.

Exit codes: 0 ok, 1 usage/parse error, 2 validation error, 3 guard
exceeded, 4 verification failure.
"""

from __future__ import annotations

import csv
import io
import json
import sys
import time
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import click
import numpy as np

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from . import mcsim, oracle, presets, regions
from .errors import GuardExceeded, ParseError, ValidationError, VerificationFailure
from .prob import CondPmf, JointPmf, Pmf
from .typical import IndexSetSpec
from .zring import Modulus

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_VALIDATION = 2
EXIT_GUARD = 3
EXIT_VERIFICATION = 4


# ---------------------------------------------------------------------------
# config ingestion
# ---------------------------------------------------------------------------


def _load_toml(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ParseError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"invalid TOML in {path}: {exc}") from exc


def _require(tree: dict, key_path: str):
    node = tree
    for part in key_path.split("."):
        if not isinstance(node, dict) or part not in node:
            raise ValidationError(f"missing config key: {key_path}")
        node = node[part]
    return node


def _pmf(values, where: str) -> Pmf:
    try:
        return Pmf(tuple(float(v) for v in values))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{where}: not a probability vector") from exc
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def _modulus(tree: dict) -> Modulus:
    return Modulus(int(_require(tree, "modulus.p")), int(_require(tree, "modulus.r")))


def _aux_from_tree(tree: dict, names: Sequence[str]) -> regions.AuxSpec:
    aux_tree = _require(tree, "aux")
    q = _pmf(_require(aux_tree, "q"), "aux.q")
    laws: Dict[str, Tuple[Pmf, ...]] = {}
    for name in names:
        rows = _require(aux_tree, name)
        laws[name] = tuple(_pmf(row, f"aux.{name}[{i}]") for i, row in enumerate(rows))
    return regions.AuxSpec(q, laws)


def _source_config(tree: dict) -> regions.SourcePairConfig:
    mod = _modulus(tree)
    joint = _require(tree, "source.joint")
    return regions.SourcePairConfig(
        mod, JointPmf(("x1", "x2"), np.asarray(joint, dtype=float))
    )


def _mac_config(tree: dict) -> regions.MacConfig:
    mod = _modulus(tree)
    rows = _require(tree, "channel.rows")
    chan = CondPmf(tuple(_pmf(row, f"channel.rows[{i}]") for i, row in enumerate(rows)))
    inputs = None
    if "inputs" in tree:
        inputs = (
            _pmf(_require(tree, "inputs.x1"), "inputs.x1"),
            _pmf(_require(tree, "inputs.x2"), "inputs.x2"),
        )
    return regions.MacConfig(mod, chan, inputs)


def _mac_states_config(tree: dict) -> regions.MacStatesConfig:
    if tree.get("preset") == "state-adder-example":
        return presets.mac_states_example()
    mod = _modulus(tree)
    m = mod.m
    chan_tree = _require(tree, "channel")
    if chan_tree.get("kind") == "modular-adder":
        channel = np.zeros((m, m, m, m, m))
        for x1 in range(m):
            for x2 in range(m):
                for s1 in range(m):
                    for s2 in range(m):
                        channel[x1, x2, s1, s2, (x1 + x2 + s1 + s2) % m] = 1.0
    else:
        channel = np.asarray(_require(chan_tree, "table"), dtype=float)

    def cond(rows, where) -> CondPmf:
        return CondPmf(tuple(_pmf(r, where) for r in rows))

    return regions.MacStatesConfig(
        mod=mod,
        state1=_pmf(_require(tree, "states.s1"), "states.s1"),
        state2=_pmf(_require(tree, "states.s2"), "states.s2"),
        channel=channel,
        cost1=np.asarray(_require(tree, "costs.c1"), dtype=float),
        cost2=np.asarray(_require(tree, "costs.c2"), dtype=float),
        tau1=float(_require(tree, "costs.tau1")),
        tau2=float(_require(tree, "costs.tau2")),
        q_probs=_pmf(_require(tree, "aux.q"), "aux.q"),
        v1=tuple(_pmf(r, "aux.v1") for r in _require(tree, "aux.v1")),
        v2=tuple(_pmf(r, "aux.v2") for r in _require(tree, "aux.v2")),
        z1=tuple(cond(rows, "aux.z1") for rows in _require(tree, "aux.z1")),
        z2=tuple(cond(rows, "aux.z2") for rows in _require(tree, "aux.z2")),
        x1=tuple(cond(rows, "aux.x1") for rows in _require(tree, "aux.x1")),
        x2=tuple(cond(rows, "aux.x2") for rows in _require(tree, "aux.x2")),
    )


# ---------------------------------------------------------------------------
# output emission
# ---------------------------------------------------------------------------


def _fmt(value, precision: int):
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.{precision}f}"
    return value


def _emit(rows: List[Dict[str, object]], fmt: str, out: Optional[str], precision: int) -> None:
    if fmt == "json":
        payload = [
            {k: _fmt(v, precision) for k, v in row.items()} for row in rows
        ]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        keys: List[str] = []
        for row in rows:
            for k in row:
                if k not in keys:
                    keys.append(k)
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v, precision) for k, v in row.items()})
        text = buf.getvalue()
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _common_options(fn):
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")(fn)
    fn = click.option("--out", type=click.Path(), default=None)(fn)
    fn = click.option("--precision", type=int, default=4)(fn)
    fn = click.option("--threads", type=int, default=1)(fn)
    return fn


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


@click.group()
def cli() -> None:
    """Rate regions, simulations and brute-force checks for quasi group codes."""


@cli.group()
def rates() -> None:
    """Evaluate achievable-rate expressions from a TOML config."""


@rates.command("dist-src")
@click.option("-c", "--config", "config_path", required=True, type=click.Path())
@click.option("--optimize", is_flag=True, default=False)
@_common_options
def rates_dist_src(config_path, optimize, fmt, out, precision, threads) -> None:
    """Distributed sum compression: quasi-group bound plus baselines."""
    tree = _load_toml(config_path)
    src = _source_config(tree)
    rows: List[Dict[str, object]] = []
    if optimize:
        def evaluate(aux: regions.AuxSpec) -> float:
            return regions.km_qgc_rate(src, aux).values.get("sum_rate", float("inf"))

        def build(point):
            law = Pmf(tuple(point[0]))
            return regions.AuxSpec(Pmf((1.0,)), {"w1": (law,), "w2": (law,)})

        opt = regions.optimize_aux(evaluate, build, [src.mod.m], maximize=False)
        aux = opt.aux
    else:
        aux = _aux_from_tree(tree, ("w1", "w2"))
    res = regions.km_qgc_rate(src, aux)
    for key, value in sorted(res.values.items()):
        rows.append({"scheme": "qgc", "quantity": key, "value": value})
    for name, value in regions.km_baselines(src).items():
        rows.append({"scheme": name, "quantity": "sum_rate", "value": value})
    _emit(rows, fmt, out, precision)


@rates.command("comp-mac")
@click.option("-c", "--config", "config_path", required=True, type=click.Path())
@click.option("--optimize", is_flag=True, default=False)
@_common_options
def rates_comp_mac(config_path, optimize, fmt, out, precision, threads) -> None:
    """Sum computation over a channel: quasi-group bound plus baselines."""
    tree = _load_toml(config_path)
    mac = _mac_config(tree)
    aux = _aux_from_tree(tree, ("v1", "v2", "w1", "w2"))
    rows: List[Dict[str, object]] = []
    res = regions.comp_mac_qgc_rate(mac, aux)
    for key, value in sorted(res.values.items()):
        rows.append({"scheme": "qgc", "quantity": key, "value": value})
    uni = regions.comp_mac_uniform_input_rate(mac, aux)
    for key, value in sorted(uni.values.items()):
        rows.append({"scheme": "qgc-uniform", "quantity": key, "value": value})
    if optimize:
        for name, value in regions.comp_mac_baselines(mac).items():
            rows.append({"scheme": name, "quantity": "symmetric_rate", "value": value})
    _emit(rows, fmt, out, precision)


@rates.command("mac-states")
@click.option("-c", "--config", "config_path", required=True, type=click.Path())
@_common_options
def rates_mac_states(config_path, fmt, out, precision, threads) -> None:
    """State-dependent channel: nested quasi-group sum-rate bound."""
    tree = _load_toml(config_path)
    cfg = _mac_states_config(tree)
    res = regions.mac_states_sum_rate(cfg)
    rows = [{"quantity": "sum_rate", "value": res.values["sum_rate"]}]
    for key in ("h_vsum_given_q", "h_zsum_given_yq", "penalty", "raw"):
        rows.append({"quantity": key, "value": float(res.trace[key])})
    _emit(rows, fmt, out, precision)


_REPRODUCE_TARGETS = ("table1", "table2", "table3", "mac-states-example")


@cli.command("reproduce")
@click.argument("target", type=click.Choice(_REPRODUCE_TARGETS))
@_common_options
def cmd_reproduce(target, fmt, out, precision, threads) -> None:
    """Regenerate a built-in example table (skew parameter 0.6)."""
    rows: List[Dict[str, object]] = []
    if target == "table1":
        rows = presets.table1_rows()
    elif target == "table2":
        src = presets.sum_source()
        bl = regions.km_baselines(src)
        res = regions.km_qgc_rate(src, presets.km_example_aux())
        rows = [
            {"scheme": "unstructured", "formula": "H(X1,X2)", "value": bl["unstructured"]},
            {"scheme": "linear_embed", "formula": "2 H(X1 +_7 X2)", "value": bl["linear_embed"]},
            {"scheme": "group", "formula": "2 max_s (r/(r-s)) H(Z|[Z]_s)", "value": bl["group"]},
            {"scheme": "qgc", "formula": "R1 + R2 at the example index laws", "value": res.values["sum_rate"]},
        ]
    elif target == "table3":
        mac = presets.adder_mac()
        bl = regions.comp_mac_baselines(mac)
        res = regions.comp_mac_uniform_input_rate(mac, presets.comp_mac_example_aux())
        rows = [
            {"scheme": "unstructured", "formula": "I(X1 X2; Y)/2", "value": bl["unstructured_sym"]},
            {"scheme": "linear_embed", "formula": "max min(H(X1),H(X2)) - H(X1 +_7 X2|Y)", "value": bl["linear_embed_sym"]},
            {"scheme": "group", "formula": "min_s (r/(r-s)) I(Z;Y|[Z]_s)", "value": bl["group_sym"]},
            {"scheme": "qgc", "formula": "per-sender rate at the example index laws", "value": res.values["r1"]},
        ]
    else:  # mac-states-example
        res = regions.mac_states_sum_rate(presets.mac_states_example())
        gp = regions.gp_example_outer_check()
        rows = [
            {"quantity": "qgc_sum_rate", "value": res.values["sum_rate"]},
            {"quantity": "h_vsum_given_q", "value": float(res.trace["h_vsum_given_q"])},
            {"quantity": "h_zsum_given_yq", "value": float(res.trace["h_zsum_given_yq"])},
            {"quantity": "unstructured_outer_below_1", "value": bool(gp["verdict"])},
            {"quantity": "unstructured_outer_margin", "value": float(gp["reduced_margin"])},
            {"quantity": "unstructured_direct_search_max", "value": float(gp["empirical_max"])},
        ]
    _emit(rows, fmt, out, precision)


_SIM_SCHEMES = ("km", "comp-mac", "covering", "packing")


def _sim_rows_km(tree: dict, trials: Optional[int], seed: int) -> List[Dict[str, object]]:
    src = _source_config(tree)
    sim = _require(tree, "sim")
    w = _pmf(_require(sim, "w"), "sim.w")
    rows_out: List[Dict[str, object]] = []
    for row in _require(sim, "rows"):
        cfg = mcsim.KmSimConfig(
            source=src,
            n=int(row["n"]), k=int(row["k"]), l=int(row["l"]), w_pmf=w,
            eps_w=float(row["eps_w"]), eps_d=float(row["eps_d"]),
            eps_x=float(row["eps_x"]), eps_z=float(row["eps_z"]),
            trials=trials if trials is not None else int(row["trials"]),
            seed=seed,
        )
        rep = mcsim.simulate_km(cfg)
        p, lo, hi = rep.rates["ed_given_enc_ok"]
        rows_out.append({
            "n": cfg.n, "k": cfg.k, "l": cfg.l, "trials": cfg.trials,
            "enc_ok": rep.counts["enc_ok"],
            "ed_given_enc_ok": p, "ci_lo": lo, "ci_hi": hi,
            "no_candidate": rep.counts["ed_no_candidate"],
            "multiple": rep.counts["ed_multiple"],
            "bin_rate": rep.realized["bin_index_rate"],
        })
    return rows_out


def _sim_rows_comp_mac(tree: dict, trials: Optional[int], seed: int) -> List[Dict[str, object]]:
    mac = _mac_config(tree)
    sim = _require(tree, "sim")
    cfg = mcsim.CompMacSimConfig(
        mod=mac.mod, channel=mac.channel,
        n=int(_require(sim, "n")), k=int(_require(sim, "k")), l=int(_require(sim, "l")),
        u_pmf=_pmf(_require(sim, "u"), "sim.u"), v_pmf=_pmf(_require(sim, "v"), "sim.v"),
        eps_u=float(_require(sim, "eps_u")), eps_v=float(_require(sim, "eps_v")),
        eps_x=float(_require(sim, "eps_x")), eps_y=float(_require(sim, "eps_y")),
        trials=trials if trials is not None else int(_require(sim, "trials")),
        seed=seed, inputs=mac.inputs,
    )
    rep = mcsim.simulate_comp_mac(cfg)
    p, lo, hi = rep.rates["success_given_unique"]
    return [{
        "n": cfg.n, "trials": cfg.trials, "enc_ok": rep.counts["enc_ok"],
        "success": rep.counts["success"],
        "success_given_unique": p, "ci_lo": lo, "ci_hi": hi,
        "no_candidate": rep.counts["no_candidate"],
        "multiple_candidates": rep.counts["multiple_candidates"],
    }]


def _sim_rows_cover_pack(
    scheme: str, tree: dict, trials: Optional[int], seed: int
) -> List[Dict[str, object]]:
    mod = _modulus(tree)
    sim = _require(tree, "sim")
    axes = ("x", "xhat") if scheme == "covering" else ("x", "y")
    joint = JointPmf(axes, np.asarray(_require(tree, "joint.table"), dtype=float))
    common = dict(
        mod=mod, joint=joint, n=int(_require(sim, "n")), k=int(_require(sim, "k")),
        u_pmf=_pmf(_require(sim, "u"), "sim.u"), eps_u=float(_require(sim, "eps_u")),
        eps=float(_require(sim, "eps")),
        trials=trials if trials is not None else int(_require(sim, "trials")),
        seed=seed,
    )
    if scheme == "covering":
        rep = mcsim.empirical_covering(mcsim.CoveringSimConfig(**common))
        key = "failure"
    else:
        rep = mcsim.empirical_packing(mcsim.PackingSimConfig(**common))
        key = "false_candidate"
    p, lo, hi = rep.rates[key]
    row = {"n": common["n"], "k": common["k"], "trials": common["trials"],
           key: p, "ci_lo": lo, "ci_hi": hi}
    row.update({k: v for k, v in rep.realized.items()})
    return [row]


@cli.command("simulate")
@click.argument("scheme", type=click.Choice(_SIM_SCHEMES))
@click.option("-c", "--config", "config_path", required=True, type=click.Path())
@click.option("--trials", type=int, default=None)
@click.option("--seed", type=int, default=0)
@_common_options
def cmd_simulate(scheme, config_path, trials, seed, fmt, out, precision, threads) -> None:
    """Run a Monte Carlo experiment described by a TOML config."""
    tree = _load_toml(config_path)
    started = time.time()
    if scheme == "km":
        rows = _sim_rows_km(tree, trials, seed)
    elif scheme == "comp-mac":
        rows = _sim_rows_comp_mac(tree, trials, seed)
    else:
        rows = _sim_rows_cover_pack(scheme, tree, trials, seed)
    for row in rows:
        row["seed"] = seed
    # wall clock goes to stderr so output files stay byte-identical
    click.echo(f"elapsed: {time.time() - started:.2f}s", err=True)
    _emit(rows, fmt, out, precision)


_VERIFY_IDS = (
    "pphi",
    "typical-intersection",
    "sum-typical",
    "entropy-conv",
    "noise-bound",
    "claims",
    "injectivity",
)


def _default_verify_suite(check_id: str) -> List[oracle.OracleVerdict]:
    out: List[oracle.OracleVerdict] = []
    if check_id == "pphi":
        for args in ((2, 2, 1, 1), (2, 2, 1, 2), (2, 2, 2, 1), (3, 1, 1, 2)):
            out.append(oracle.verify_pphi(*args))
    elif check_id == "typical-intersection":
        table = np.outer([0.4, 0.3, 0.2, 0.1], [0.6, 0.4])
        joint = JointPmf(("x", "y"), table)
        for s in (0, 1, 2):
            out.append(oracle.verify_typical_intersection(2, 2, joint, 4, s, 1.2))
        out.append(oracle.verify_typical_intersection(2, 2, joint, 5, 1, 1.2))
    elif check_id == "sum-typical":
        pairs = [
            (Pmf((0.5, 0.3, 0.1, 0.1)), Pmf.uniform(4), 5, 1.0),
            (Pmf((0.7, 0.1, 0.1, 0.1)), Pmf((0.4, 0.2, 0.2, 0.2)), 6, 1.5),
            (Pmf((1.0, 0.0, 0.0, 0.0)), Pmf((0.0, 1.0, 0.0, 0.0)), 4, 0.5),
        ]
        for p_x, p_y, n, eps in pairs:
            out.append(oracle.verify_sum_typical(p_x, p_y, 4, n, eps))
    elif check_id == "entropy-conv":
        out.append(oracle.verify_entropy_conv(4))
    elif check_id == "noise-bound":
        out.append(oracle.verify_noise_entropy_bound())
    elif check_id == "claims":
        out.append(oracle.verify_claim_decompositions())
    elif check_id == "injectivity":
        binary = Pmf((0.5, 0.5, 0.0, 0.0))

        def build_binary(k: int) -> IndexSetSpec:
            return IndexSetSpec((Fraction(1),), (binary,), k, 4.0)

        def build_full(k: int) -> IndexSetSpec:
            return IndexSetSpec((Fraction(1),), (Pmf.uniform(4),), k, 4.0)

        out.append(
            oracle.verify_injectivity_condition(2, 2, 0.5, build_binary, [6, 10, 14])
        )
        out.append(
            oracle.verify_injectivity_condition(2, 2, 2.0, build_full, [2, 3])
        )
    return out


@cli.command("verify")
@click.argument("check_id", metavar="CHECK")
@_common_options
def cmd_verify(check_id, fmt, out, precision, threads) -> None:
    """Run brute-force verification suites; nonzero exit on any failure."""
    ids = _VERIFY_IDS if check_id == "all" else (check_id,)
    for i in ids:
        if i not in _VERIFY_IDS:
            raise ParseError(
                f"unknown check id {i!r}; choose from {', '.join(_VERIFY_IDS)} or 'all'"
            )
    rows: List[Dict[str, object]] = []
    failures: List[oracle.OracleVerdict] = []
    for i in ids:
        for verdict in _default_verify_suite(i):
            rows.append({
                "check": verdict.check,
                "params": json.dumps(verdict.params, sort_keys=True),
                "passed": verdict.passed,
            })
            if not verdict.passed:
                failures.append(verdict)
    _emit(rows, fmt, out, precision)
    if failures:
        for v in failures:
            click.echo(f"FAIL {v.check}: witness {v.witness}", err=True)
        raise VerificationFailure(f"{len(failures)} verification check(s) failed")


def main() -> None:
    """Entry point translating errors to the documented exit codes."""
    try:
        cli.main(standalone_mode=False)
    except ParseError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    except GuardExceeded as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_GUARD)
    except VerificationFailure as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VERIFICATION)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        sys.exit(EXIT_PARSE)
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(EXIT_PARSE)
    except click.exceptions.Abort:
        sys.exit(EXIT_PARSE)
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
