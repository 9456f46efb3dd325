"""Command-line front end; a thin client over the service API.

By default requests run against the in-process app (no server needed); pass
--server to target a running `kplab serve` instance instead.  All numeric
inputs are exact rational strings: floats never enter exact-mode checks.
"""

from __future__ import annotations

import csv
import io
import json
import sys

import click

from .config import VERIFY_CHECKS

_PARAM_FLAGS = [
    ("--g", "g", "lattice base (value of e^{beta/M})"),
    ("--x", "x", "alias for the lattice base"),
    ("--M", "M", "lattice denominator (generic mode)"),
    ("--jQ", "jQ", "Q as a lattice power: Q = base^jQ"),
    ("--Q", "Q", "independent rational Q"),
    ("--q", "q", "q value (framed mode; must be an exact lattice power)"),
    ("--sigma", "sigma", "sqrt(q) (framed mode)"),
    ("--base", "base", "framed-mode lattice base q^(1/lattice-pow)"),
    ("--lattice-pow", "lattice_pow", "framed-mode lattice fineness P (q = base^P)"),
    ("--f", "f", "framing number (integer or rational tau)"),
    ("--a", "a", "deformation parameter a"),
    ("--kappa", "kappa", "fixed aQ for the scaling trend"),
    ("--bn", "bn", "comma-separated exponents b_n"),
    ("--an", "an", "comma-separated exponents a_n"),
]


def _param_options(fn):
    for flag, key, help_text in reversed(_PARAM_FLAGS):
        fn = click.option(flag, key, default=None, help=help_text)(fn)
    return fn


def _collect_params(kw) -> dict:
    return {key: kw[key] for _, key, _ in _PARAM_FLAGS if kw.get(key) is not None}


def make_client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _post(client, path, payload):
    resp = client.post(path, json=payload)
    if resp.status_code >= 400:
        try:
            detail = resp.json()
        except Exception:
            detail = {"error": resp.text}
        click.echo(f"error: {detail.get('error', detail)}", err=True)
        sys.exit(2)
    return resp.json()


def _emit(data: str, output: str | None):
    if output:
        with open(output, "w") as fh:
            fh.write(data)
    else:
        click.echo(data)


def _rows_to_csv(rows, fields) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        out = dict(row)
        if isinstance(out.get("partition"), list):
            out["partition"] = " ".join(str(p) for p in out["partition"]) or "-"
        writer.writerow(out)
    return buf.getvalue()


@click.group()
def main():
    """Exact-arithmetic laboratory for lattice KP tau functions and reductions."""


@main.command()
@click.option("--family", default="a", help="c-vector family: a, b, c, d, gbin, grr")
@click.option("--max-size", default=4, type=int, help="largest partition size")
@click.option("--format", "fmt", default="csv", type=click.Choice(["csv", "json"]))
@click.option("-o", "--output", default=None, help="write to file instead of stdout")
@click.option("--server", default=None, help="service URL (default: in-process)")
@_param_options
def schur(family, max_size, fmt, output, server, **kw):
    """Tables of Schur-polynomial special values per partition."""
    client = make_client(server)
    data = _post(client, "/v1/schur", {
        "family": family, "max_size": max_size, "params": _collect_params(kw),
    })
    if fmt == "json":
        _emit(json.dumps(data, indent=2, sort_keys=True), output)
    else:
        fields = ["partition", "value"] + (["closed"] if family in ("a", "c") else [])
        _emit(_rows_to_csv(data["rows"], fields), output)


@main.command()
@click.option("--case", default="a", help="specialization: a, b, c, d, gbin, grr")
@click.option("--s", "s_values", default="-1,0,1", help="comma-separated grid points")
@click.option("--D", "cap", default=6, type=int, help="weighted-degree cap")
@click.option("--ncut", default=6, type=int, help="shift truncation depth")
@click.option("--K", "nvars", default=6, type=int, help="number of time variables")
@click.option("--seed", default=1, type=int)
@click.option("--format", "fmt", default="json", type=click.Choice(["csv", "json"]))
@click.option("-o", "--output", default=None)
@click.option("--server", default=None)
@_param_options
def tau(case, s_values, cap, ncut, nvars, seed, fmt, output, server, **kw):
    """Tau coefficients, weights, and wave amplitudes on a grid window."""
    client = make_client(server)
    data = _post(client, "/v1/tau", {
        "case": case,
        "s_values": [s.strip() for s in s_values.split(",")],
        "params": _collect_params(kw),
        "caps": {"cap": cap, "n_cut": ncut, "nvars": nvars},
        "seed": seed,
    })
    if fmt == "json":
        _emit(json.dumps(data, indent=2, sort_keys=True), output)
    else:
        parts = [
            "# tau coefficients",
            _rows_to_csv(data["tau"], ["s", "monomial", "value"]),
            "# weights",
            _rows_to_csv(data["weights"], ["s", "partition", "h_weight"]),
            "# wave amplitudes",
            _rows_to_csv(data["wave"], ["s", "n", "monomial", "value"]),
        ]
        _emit("\n".join(parts), output)


@main.command()
@click.argument("check", type=click.Choice(VERIFY_CHECKS))
@click.option("--case", default=None, help="specialization: a, b, c, d, gbin, grr")
@click.option("--D", "cap", default=6, type=int)
@click.option("--ncut", default=6, type=int)
@click.option("--K", "nvars", default=6, type=int)
@click.option("--window", default="-40:12", help="grid validity window lo:hi")
@click.option("--seed", default=1, type=int)
@click.option("--points", default=3, type=int, help="random parameter points per exact check")
@click.option("--strict", is_flag=True, help="treat inconclusive verdicts as failures")
@click.option("-o", "--output", default=None)
@click.option("--server", default=None)
@_param_options
def verify(check, case, cap, ncut, nvars, window, seed, points, strict, output, server, **kw):
    """Run verification checks and emit JSON reports (exit 1 on failure)."""
    try:
        lo, hi = (int(v) for v in window.split(":"))
    except ValueError:
        raise click.UsageError(f"bad window {window!r}; expected lo:hi")
    client = make_client(server)
    data = _post(client, "/v1/verify", {
        "check": check, "case": case, "params": _collect_params(kw),
        "caps": {"cap": cap, "n_cut": ncut, "nvars": nvars, "window_lo": lo, "window_hi": hi},
        "seed": seed, "points": points,
    })
    _emit(json.dumps(data, indent=2, sort_keys=True), output)
    summary = data["summary"]
    for rep in data["reports"]:
        click.echo(f"{rep['id']}: {rep['verdict']} ({rep['asserted_count']} assertions)",
                   err=True)
    if summary["any_fail"]:
        sys.exit(1)
    if summary["any_inconclusive"]:
        click.echo("warning: inconclusive verdicts present", err=True)
        if strict:
            sys.exit(1)
    sys.exit(0)


@main.command()
@click.argument("files", nargs=-1, type=click.Path(exists=True))
@click.option("--strict", is_flag=True)
@click.option("-o", "--output", default=None)
@click.option("--server", default=None)
def report(files, strict, output, server):
    """Merge verification reports from JSON files into one summary."""
    reports = []
    for path in files:
        with open(path) as fh:
            data = json.load(fh)
        if isinstance(data, dict) and "reports" in data:
            reports.extend(data["reports"])
        elif isinstance(data, list):
            reports.extend(data)
        else:
            reports.append(data)
    client = make_client(server)
    data = _post(client, "/v1/report/merge", {"reports": reports})
    _emit(json.dumps(data, indent=2, sort_keys=True), output)
    if data["summary"]["any_fail"] or (strict and data["summary"]["any_inconclusive"]):
        sys.exit(1)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8787, type=int)
def serve(host, port):
    """Run the verification service over HTTP."""
    import uvicorn

    uvicorn.run("kplab.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
