"""Command line client for the scheduling service.

Subcommands never compute anything themselves: each one posts to the HTTP
API, in process by default or against a running server via --server.  Exit
codes: 0 on success, 1 when inputs fail validation, 2 on usage errors.
"""

from __future__ import annotations

import json
import sys
from typing import Any

import click

from .errors import SchedError

FAMILIES = ("gadget", "multiresource", "greedy-killer", "random")


class ServiceClient:
    """POST helper that speaks to the app in process or over HTTP."""

    def __init__(self, server: str | None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            import warnings

            with warnings.catch_warnings():
                # the bundled test client import warns about its own httpx pin
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service.app import app

            self._client = TestClient(app)

    def post(self, path: str, payload: dict) -> dict:
        resp = self._client.post(path, json=payload)
        if resp.status_code == 400:
            body = resp.json()
            raise SchedError(body.get("code", "ERROR"), body.get("message", ""))
        resp.raise_for_status()
        return resp.json()


def _post(server: str | None, path: str, payload: dict) -> dict:
    try:
        return ServiceClient(server).post(path, payload)
    except click.ClickException:
        raise
    except SchedError as err:
        click.echo(f"{err.code}: {err.detail}", err=True)
        sys.exit(1)
    except Exception as err:
        click.echo(str(err), err=True)
        sys.exit(1)


def _read_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        click.echo(f"cannot read {path}: {err}", err=True)
        sys.exit(1)


def _write_json(path: str, data: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


@click.group()
@click.option(
    "--server",
    default=None,
    metavar="URL",
    help="Base URL of a running service; defaults to in-process.",
)
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Precedence-constrained multi-resource scheduling toolkit."""
    ctx.obj = server


@main.command()
@click.option("--family", required=True, type=click.Choice(FAMILIES))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--m", type=int, default=None, help="chain types / jobs per layer")
@click.option("--d", type=int, default=None, help="number of resources")
@click.option("--n", type=int, default=None, help="number of jobs")
@click.option("--num-gadgets", type=int, default=None)
@click.option("--fat-duration", type=int, default=None)
@click.option("--edge-prob", type=float, default=None)
@click.option("--max-dur", type=int, default=None)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.pass_obj
def gen(server: str | None, family: str, seed: int, out: str, **params) -> None:
    """Generate a family instance and write instance JSON (with metadata)."""
    clean = {k: v for k, v in params.items() if v is not None}
    data = _post(server, "/gen", {"family": family, "params": clean, "seed": seed})
    _write_json(out, data)
    click.echo(f"wrote {out}: {len(data['jobs'])} jobs, d={data['d']}")


@main.command()
@click.option("--inst", "inst_path", required=True, type=click.Path(exists=True))
@click.option(
    "--scheduler",
    default="onl",
    show_default=True,
    type=click.Choice(["onl", "greedy"]),
)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--trace", "trace_path", default=None, type=click.Path(dir_okay=False))
@click.pass_obj
def run(
    server: str | None,
    inst_path: str,
    scheduler: str,
    out: str,
    trace_path: str | None,
) -> None:
    """Run a scheduler under online reveal and write the schedule."""
    payload = {"instance": _read_json(inst_path), "scheduler": scheduler}
    data = _post(server, "/run", payload)
    _write_json(out, data["schedule"])
    if trace_path:
        if not data.get("trace"):
            click.echo("scheduler produced no trace", err=True)
            sys.exit(1)
        _write_json(trace_path, data["trace"])
    click.echo(f"{scheduler} makespan {data['makespan']}")


@main.command()
@click.option("--inst", "inst_path", required=True, type=click.Path(exists=True))
@click.option("--schedule", "sched_path", required=True, type=click.Path(exists=True))
@click.pass_obj
def verify(server: str | None, inst_path: str, sched_path: str) -> None:
    """Check a schedule against an instance; exit 1 when infeasible."""
    payload = {
        "instance": _read_json(inst_path),
        "schedule": _read_json(sched_path),
    }
    data = _post(server, "/verify", payload)
    if data["feasible"]:
        click.echo("feasible")
        return
    for v in data["violations"][:10]:
        at = "" if v["instant"] is None else f" at t={v['instant']}"
        click.echo(f"{v['kind']}: jobs {v['jobs']}{at}", err=True)
    click.echo(f"infeasible ({len(data['violations'])} violations)", err=True)
    sys.exit(1)


@main.group()
def oracle() -> None:
    """Exact brute-force solvers for small inputs."""


@oracle.command("rs")
@click.option("--inst", "inst_path", required=True, type=click.Path(exists=True))
@click.option("--limit", default=9, show_default=True, type=int)
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@click.pass_obj
def oracle_rs(
    server: str | None, inst_path: str, limit: int, out: str | None
) -> None:
    """Optimal makespan for a small scheduling instance."""
    data = _post(
        server, "/oracle/rs", {"instance": _read_json(inst_path), "limit": limit}
    )
    if out:
        _write_json(out, data["schedule"])
    click.echo(f"optimal makespan {data['makespan']}")


@oracle.command("scs")
@click.option("--scs", "scs_path", required=True, type=click.Path(exists=True))
@click.option("--limit", default=25, show_default=True, type=int)
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@click.pass_obj
def oracle_scs(
    server: str | None, scs_path: str, limit: int, out: str | None
) -> None:
    """Shortest common supersequence of small sequence sets."""
    data = _post(server, "/oracle/scs", {"scs": _read_json(scs_path), "limit": limit})
    if out:
        _write_json(out, {"supersequence": data["supersequence"]})
    click.echo(f"length {data['length']}: {data['supersequence']}")


@oracle.command("lts")
@click.option("--lts", "lts_path", required=True, type=click.Path(exists=True))
@click.option("--limit", default=15, show_default=True, type=int)
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@click.pass_obj
def oracle_lts(
    server: str | None, lts_path: str, limit: int, out: str | None
) -> None:
    """Minimum total loading time for small machine-loading inputs."""
    data = _post(server, "/oracle/lts", {"lts": _read_json(lts_path), "limit": limit})
    if out:
        _write_json(out, data["solution"])
    click.echo(f"optimal cost {data['cost']}")


@main.group()
def reduce() -> None:
    """Encode other problems as scheduling instances."""


@reduce.command("scs-to-rs")
@click.argument("infile", type=click.Path(exists=True))
@click.argument("outfile", type=click.Path(dir_okay=False))
@click.option("--map", "map_path", default=None, type=click.Path(dir_okay=False))
@click.pass_obj
def reduce_scs_to_rs(
    server: str | None, infile: str, outfile: str, map_path: str | None
) -> None:
    """Supersequence input -> chain instance (+ lift map)."""
    data = _post(server, "/reduce/scs-to-rs", {"scs": _read_json(infile)})
    _write_json(outfile, data["instance"])
    if map_path:
        _write_json(map_path, data["map"])
    click.echo(f"wrote {outfile}: {len(data['instance']['jobs'])} jobs")


@reduce.command("lts-prep")
@click.argument("infile", type=click.Path(exists=True))
@click.argument("outfile", type=click.Path(dir_okay=False))
@click.pass_obj
def reduce_lts_prep(server: str | None, infile: str, outfile: str) -> None:
    """Rewrite edges, cut the load gap, round loads; write the prepared input."""
    data = _post(server, "/reduce/lts-prep", {"lts": _read_json(infile)})
    _write_json(outfile, data["instance"])
    click.echo(
        f"wrote {outfile}: dropped {data['dropped']}, {data['iterations']} rewrites"
    )


@reduce.command("lts-to-rs")
@click.argument("infile", type=click.Path(exists=True))
@click.argument("outfile", type=click.Path(dir_okay=False))
@click.option("--map", "map_path", default=None, type=click.Path(dir_okay=False))
@click.pass_obj
def reduce_lts_to_rs(
    server: str | None, infile: str, outfile: str, map_path: str | None
) -> None:
    """Prepared loading-time input -> chain instance (+ lift map)."""
    data = _post(server, "/reduce/lts-to-rs", {"lts": _read_json(infile)})
    _write_json(outfile, data["instance"])
    if map_path:
        _write_json(map_path, data["map"])
    click.echo(f"wrote {outfile}: {len(data['instance']['jobs'])} jobs")


@main.group()
def lift() -> None:
    """Read solutions of the encoded problem off schedules."""


@lift.command("supersequence")
@click.option("--map", "map_path", required=True, type=click.Path(exists=True))
@click.option("--schedule", "sched_path", required=True, type=click.Path(exists=True))
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@click.pass_obj
def lift_supersequence(
    server: str | None, map_path: str, sched_path: str, out: str | None
) -> None:
    """Schedule of an encoded supersequence input -> supersequence."""
    payload = {"map": _read_json(map_path), "schedule": _read_json(sched_path)}
    data = _post(server, "/lift/supersequence", payload)
    if out:
        _write_json(out, {"supersequence": data["supersequence"]})
    z = data["supersequence"]
    click.echo(f"length {len(z)}: {z}")


@lift.command("lts")
@click.option("--map", "map_path", required=True, type=click.Path(exists=True))
@click.option("--schedule", "sched_path", required=True, type=click.Path(exists=True))
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@click.pass_obj
def lift_lts(
    server: str | None, map_path: str, sched_path: str, out: str | None
) -> None:
    """Schedule of an encoded loading-time input -> block plan."""
    payload = {"map": _read_json(map_path), "schedule": _read_json(sched_path)}
    data = _post(server, "/lift/lts", payload)
    if out:
        _write_json(out, data["solution"])
    click.echo(f"cost {data['cost']}, {len(data['solution']['blocks'])} blocks")


def _parse_grid(text: str) -> list[dict]:
    points: list[dict] = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        point: dict[str, Any] = {}
        for pair in chunk.split(","):
            key, sep, raw = pair.partition("=")
            key, raw = key.strip().replace("-", "_"), raw.strip()
            if not sep or not key or not raw:
                raise click.BadParameter(f"expected key=value, got {pair!r}")
            try:
                point[key] = int(raw)
            except ValueError:
                try:
                    point[key] = float(raw)
                except ValueError:
                    raise click.BadParameter(f"grid value {raw!r} is not a number")
        points.append(point)
    if not points:
        raise click.BadParameter("empty grid")
    return points


@main.command()
@click.option("--family", required=True, type=click.Choice(FAMILIES))
@click.option(
    "--grid",
    required=True,
    help='Semicolon-separated points of comma-separated key=value, e.g. "m=3;m=4".',
)
@click.option("--schedulers", default="onl", show_default=True)
@click.option("--trials", default=10, show_default=True, type=int)
@click.option("--seed-base", default=0, show_default=True, type=int)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.pass_obj
def experiment(
    server: str | None,
    family: str,
    grid: str,
    schedulers: str,
    trials: int,
    seed_base: int,
    out: str,
) -> None:
    """Competitive-ratio sweep; --out extension picks csv or json."""
    if not (out.endswith(".csv") or out.endswith(".json")):
        raise click.BadParameter("--out must end in .csv or .json")
    payload = {
        "family": family,
        "grid": _parse_grid(grid),
        "schedulers": [s.strip() for s in schedulers.split(",") if s.strip()],
        "trials": trials,
        "seed_base": seed_base,
    }
    data = _post(server, "/experiment", payload)
    if out.endswith(".csv"):
        _write_text(out, data["csv"])
    else:
        _write_json(out, data["report"])
    for agg in data["report"]["aggregates"]:
        click.echo(
            f"{agg['scheduler']:>8} m={agg['m']} d={agg['d']} n={agg['n']}: "
            f"mean ratio {agg['mean_ratio']:.3f} (std {agg['std_ratio']:.3f}, "
            f"{agg['runs']} runs)"
        )
    click.echo(f"wrote {out}")


@main.command()
@click.option("--inst", "inst_path", required=True, type=click.Path(exists=True))
@click.option("--schedule", "sched_path", required=True, type=click.Path(exists=True))
@click.option("--width", default=64, show_default=True, type=int)
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@click.pass_obj
def gantt(
    server: str | None,
    inst_path: str,
    sched_path: str,
    width: int,
    out: str | None,
) -> None:
    """Static text chart of a schedule (needs the instance for durations)."""
    payload = {
        "instance": _read_json(inst_path),
        "schedule": _read_json(sched_path),
        "width": width,
    }
    data = _post(server, "/gantt", payload)
    if out:
        _write_text(out, data["text"])
        click.echo(f"wrote {out}")
    else:
        click.echo(data["text"], nl=False)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("presched.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
