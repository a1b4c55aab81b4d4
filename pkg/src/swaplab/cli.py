"""Command-line harness: every pipeline stage as a subcommand with a stable report.

Exit codes: 0 success, 1 no collision or a language mismatch, 2 bad input.
Reports are ``key: value`` text nested by indentation (``--json`` for a JSON
mirror); the closing ``timing`` line is the only part that varies between runs.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import sys
import time
from pathlib import Path

import click

from swaplab import fixtures
from swaplab.automata import (
    Dfa,
    Npda,
    dfa_run,
    enumerate_accepting_paths,
    format_machine,
    language_upto,
    npda_accepts,
    parse_machine,
)
from swaplab.core import SampleSet, budget, format_samples, format_string, format_symbol, parse_samples, word
from swaplab.errors import SwapLabError
from swaplab.grammar import (
    bound_stack_growth,
    cfg_to_npda,
    format_grammar,
    generate_upto,
    parse_grammar,
    to_greibach,
)
from swaplab.swap_cfl import CflSwapWitness, find_cfl_swap
from swaplab.swap_regular import MultiCutWitness, RegularSwapWitness, find_swap, find_swap_multi

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2


class InputProblem(Exception):
    pass


# --- loading ------------------------------------------------------------------

class Source:
    """A loaded input file (or ``fixture:NAME``) with a stable identity."""

    def __init__(self, spec: str):
        self.spec = spec
        if spec.startswith("fixture:"):
            self.fixture = spec.split(":", 1)[1]
            self.text = None
            self.label = spec
            self.digest = hashlib.sha256(spec.encode()).hexdigest()
            return
        self.fixture = None
        try:
            self.text = Path(spec).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputProblem(f"cannot read {spec}: {exc.strerror}") from None
        self.label = Path(spec).name
        self.digest = hashlib.sha256(self.text.encode()).hexdigest()

    def identity(self) -> dict:
        return {"name": self.label, "sha256": self.digest}


def load_grammar(src: Source):
    if src.fixture:
        return fixtures.fixture_grammar(src.fixture)
    return parse_grammar(src.text)


def load_machine(src: Source):
    if src.fixture:
        return fixtures.fixture_machine(src.fixture)
    return parse_machine(src.text, name=src.label)


def load_samples(src: Source) -> SampleSet:
    if src.fixture:
        name, _, n = src.fixture.partition("@")
        if not n.isdigit():
            raise InputProblem("sample fixtures read fixture:NAME@N")
        return fixtures.fixture_samples(name, int(n))
    return parse_samples(src.text)


def require(kind, value, what: str):
    if not isinstance(value, kind):
        raise InputProblem(f"{what} must be a {kind.__name__.lower()}")
    return value


# --- reports ------------------------------------------------------------------

def _scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    return str(value)


def render(report: dict, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    for key, value in report.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines += render(value, indent + 1)
        elif isinstance(value, list):
            lines.append(f"{pad}{key}:")
            for item in value:
                if isinstance(item, dict):
                    inner = render(item, indent + 2)
                    lines.append(f"{pad}  - " + inner[0].lstrip())
                    lines += inner[1:]
                else:
                    lines.append(f"{pad}  - {_scalar(item)}")
        else:
            lines.append(f"{pad}{key}: {_scalar(value)}")
    return lines


def emit(report: dict, started: float, as_json: bool) -> None:
    elapsed = round(time.perf_counter() - started, 3)
    if as_json:
        click.echo(json.dumps({**report, "timing_seconds": elapsed}, indent=2))
    else:
        click.echo("\n".join(render(report)))
        click.echo(f"timing: {elapsed:.3f}s")


def s(w) -> str:
    return format_string(w)


def _finish(ctx, code: int):
    ctx.exit(code)


class Command(click.Command):
    """Maps library and input errors to exit code 2."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (SwapLabError, InputProblem) as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_INPUT)


json_flag = click.option("--json", "as_json", is_flag=True, help="Emit the report as JSON.")


@click.group()
def main():
    """Swap-witness finders and stack-transition analysis for regular and context-free languages."""


# --- grammar and machine building --------------------------------------------

@main.command(cls=Command)
@click.option("--grammar", "grammar_file", required=True, help="Grammar file or fixture:NAME.")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the result here instead of stdout.")
def gnf(grammar_file, out):
    """Convert a grammar to Greibach normal form."""
    text = format_grammar(to_greibach(load_grammar(Source(grammar_file))))
    _write(text, out)


@main.command("build-pda", cls=Command)
@click.option("--grammar", "grammar_file", required=True, help="GNF grammar file or fixture:NAME.")
@click.option("--bound", is_flag=True, help="Regroup the stack so each move pushes at most two symbols.")
@click.option("--out", type=click.Path(dir_okay=False))
def build_pda(grammar_file, bound, out):
    """Compile a grammar into a one-cell-per-move pushdown acceptor."""
    src = Source(grammar_file)
    m = cfg_to_npda(to_greibach(load_grammar(src)), name=src.label)
    if bound:
        m = bound_stack_growth(m)
    _write(format_machine(m), out)


def _write(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


# --- simulation ---------------------------------------------------------------

@main.command(cls=Command)
@click.option("--machine", "machine_file", required=True)
@click.option("--input", "text", required=True, help="Input string; symbols separated by spaces or single characters.")
@click.option("--show-stack", is_flag=True, help="List the stack at every boundary of the first accepting path.")
@json_flag
@click.pass_context
def run(ctx, machine_file, text, show_stack, as_json):
    """Simulate a DFA or pushdown acceptor on one input."""
    started = time.perf_counter()
    src = Source(machine_file)
    m = load_machine(src)
    x = word(text)
    report = {"command": "run", "subject": src.identity(), "parameters": {"input": s(x)}}
    if isinstance(m, Dfa):
        r = dfa_run(m, x)
        report["result"] = {"accepted": r.accepted, "trace": s(r.trace)}
        accepted = r.accepted
    else:
        paths = enumerate_accepting_paths(m, x, budget(10_000))
        accepted = bool(paths)
        report["result"] = {"accepted": accepted, "accepting_paths": len(paths)}
        if show_stack and paths:
            report["result"]["stack"] = [
                f"{c.boundary}: {s(c.stack)}" for c in paths[0].configurations
            ]
    emit(report, started, as_json)
    _finish(ctx, EXIT_OK if accepted else EXIT_NEGATIVE)


@main.command(cls=Command)
@click.option("--pda", "machine_file", required=True)
@click.option("--input", "text", required=True)
@click.option("--format", "fmt", type=click.Choice(["csv"]), default="csv")
@click.pass_context
def profile(ctx, machine_file, text, fmt):
    """Heights of the first accepting path as CSV rows boundary,height,stack."""
    m = require(Npda, load_machine(Source(machine_file)), "--pda")
    p = npda_accepts(m, word(text))
    if p is None:
        click.echo("error: input rejected", err=True)
        _finish(ctx, EXIT_NEGATIVE)
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["boundary", "height", "stack"])
    for c in p.configurations:
        out.writerow([c.boundary, c.height, s(c.stack)])
    click.echo(buf.getvalue(), nl=False)


# --- swap finders -------------------------------------------------------------

def _blocks(value):
    if value is None:
        return None
    try:
        return tuple(int(v) for v in value.split(","))
    except ValueError:
        raise click.BadParameter("expected comma-separated integers") from None


@main.command("swap-reg", cls=Command)
@click.option("--dfa", "dfa_file", required=True)
@click.option("--samples", "samples_file", required=True, help="Sample file or fixture:NAME@N.")
@click.option("--cut", type=int, help="Exchange suffixes after this many cells.")
@click.option("--blocks", help="Comma-separated block lengths for the multi-cut finder.")
@click.option("--all-cuts", is_flag=True, help="Try every cut 0..n.")
@json_flag
@click.pass_context
def swap_reg(ctx, dfa_file, samples_file, cut, blocks, all_cuts, as_json):
    """Find two samples that can exchange a block under a DFA."""
    started = time.perf_counter()
    if sum(opt is not None and opt is not False for opt in (cut, blocks, all_cuts or None)) != 1:
        raise click.UsageError("give exactly one of --cut, --blocks, --all-cuts")
    dsrc, ssrc = Source(dfa_file), Source(samples_file)
    d = require(Dfa, load_machine(dsrc), "--dfa")
    S = load_samples(ssrc)
    report = {"command": "swap-reg", "subject": dsrc.identity(), "samples": ssrc.identity()}
    found = True
    if blocks is not None:
        bl = _blocks(blocks)
        report["parameters"] = {"n": S.n, "size": len(S), "blocks": ",".join(map(str, bl))}
        r = find_swap_multi(d, S, bl)
        if isinstance(r, MultiCutWitness):
            report["result"] = {
                "x": s(r.x), "y": s(r.y), "states": s(r.state_tuple),
                "swaps": [{"xy": s(a), "yx": s(b)} for a, b in r.swapped],
            }
            report["verification"] = {"all_accepted": r.verified}
        else:
            found = False
            report["result"] = _no_collision(r)
    else:
        cuts = range(S.n + 1) if all_cuts else [cut]
        report["parameters"] = {"n": S.n, "size": len(S), "cuts": ",".join(map(str, cuts))}
        results = []
        for i in cuts:
            r = find_swap(d, S, i)
            if isinstance(r, RegularSwapWitness):
                results.append({
                    "cut": i, "x": s(r.x), "y": s(r.y), "state": _scalar(r.collision_state),
                    "xy": s(r.swapped_xy), "yx": s(r.swapped_yx), "verified": r.verified,
                })
            else:
                found = False
                results.append({"cut": i, **_no_collision(r)})
        report["result"] = results if all_cuts else results[0]
    emit(report, started, as_json)
    _finish(ctx, EXIT_OK if found else EXIT_NEGATIVE)


def _no_collision(r) -> dict:
    out = {"outcome": "no collision", "reason": r.reason}
    if hasattr(r, "constant"):
        out.update(size=r.size, constant=r.constant)
    return out


@main.command("swap-cfl", cls=Command)
@click.option("--pda", "machine_file", required=True)
@click.option("--samples", "samples_file", required=True, help="Sample file or fixture:NAME@N.")
@click.option("--j0", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--path-budget", type=int, default=None, help="Accepting paths enumerated per sample.")
@click.option("--parallel", type=int, default=1, show_default=True)
@json_flag
@click.pass_context
def swap_cfl(ctx, machine_file, samples_file, j0, k, path_budget, parallel, as_json):
    """Find two samples whose middles can be exchanged under a pushdown acceptor."""
    started = time.perf_counter()
    msrc, ssrc = Source(machine_file), Source(samples_file)
    m = require(Npda, load_machine(msrc), "--pda")
    S = load_samples(ssrc)
    report = {
        "command": "swap-cfl", "subject": msrc.identity(), "samples": ssrc.identity(),
        "parameters": {"n": S.n, "size": len(S), "j0": j0, "k": k,
                       "path_budget": path_budget or budget(10_000)},
    }
    r = find_cfl_swap(m, S, j0, k, path_budget, parallel)
    stats = dict(r.stats)
    if isinstance(r, CflSwapWitness):
        idx = r.index
        report["result"] = {
            "x": s(r.x), "y": s(r.y),
            "index": {"i": idx.i, "j": idx.j, "v": format_symbol(idx.v), "w": format_symbol(idx.w)},
            "x_mid": s(r.x_mid), "y_mid": s(r.y_mid),
            "swapped_x": s(r.swapped_x), "swapped_y": s(r.swapped_y),
            "middle_counts_differ": r.middle_counts_differ,
        }
        report["verification"] = {"swapped_x_accepted": True, "swapped_y_accepted": True}
    else:
        report["result"] = _no_collision(r)
    report["stats"] = stats
    emit(report, started, as_json)
    _finish(ctx, EXIT_OK if isinstance(r, CflSwapWitness) else EXIT_NEGATIVE)


# --- fixtures -----------------------------------------------------------------

@main.command("fixtures", cls=Command)
@click.option("--name", required=True, type=click.Choice(sorted(fixtures.SAMPLE_BUILDERS)))
@click.option("--n", "length", type=int, help="String length.")
@click.option("--n-param", type=int, help="The builder's own parameter (for gt: m, giving length m*m).")
@click.option("--header", is_flag=True, help="Prefix the alphabet line so the output is a sample file.")
def fixtures_cmd(name, length, n_param, header):
    """Print a fixture sample set, one string per line."""
    if (length is None) == (n_param is None):
        raise click.UsageError("give exactly one of --n, --n-param")
    param = n_param
    if length is not None:
        param = length
        if name == "gt":
            param = math.isqrt(length)
            if param * param != length:
                raise InputProblem("gt samples have square length m*m")
    S = fixtures.fixture_samples(name, param)
    text = format_samples(S)
    if not header:
        text = text.split("\n", 1)[1]
    click.echo(text, nl=False)


@main.command("advice", cls=Command)
@click.option("--name", required=True, type=click.Choice(sorted(fixtures.ADVICE)))
@click.option("--n", "length", type=int, required=True)
@json_flag
def advice_cmd(name, length, as_json):
    """Print the advice string of a given length."""
    started = time.perf_counter()
    h = fixtures.advice(name)(length)
    emit({"command": "advice", "parameters": {"name": name, "n": length}, "result": {"advice": s(h)}},
         started, as_json)


# --- verification -------------------------------------------------------------

@main.command(cls=Command)
@click.option("--grammar", "grammar_file", required=True)
@click.option("--machine", "machine_file", required=True)
@click.option("--maxlen", type=int, required=True)
@json_flag
@click.pass_context
def verify(ctx, grammar_file, machine_file, maxlen, as_json):
    """Compare a grammar with an acceptor on all strings up to a length."""
    started = time.perf_counter()
    gsrc, msrc = Source(grammar_file), Source(machine_file)
    g, m = load_grammar(gsrc), load_machine(msrc)
    generated, accepted = generate_upto(g, maxlen), language_upto(m, maxlen)
    report = {"command": "verify", "grammar": gsrc.identity(), "machine": msrc.identity(),
              "parameters": {"maxlen": maxlen}}
    diff = sorted(generated ^ accepted, key=lambda w: (len(w), s(w)))
    if not diff:
        report["result"] = {"outcome": f"equal up to {maxlen}", "strings": len(generated)}
    else:
        w = diff[0]
        report["result"] = {
            "outcome": "mismatch",
            "counterexample": s(w),
            "generated_by_grammar": w in generated,
            "accepted_by_machine": w in accepted,
        }
    emit(report, started, as_json)
    _finish(ctx, EXIT_NEGATIVE if diff else EXIT_OK)


if __name__ == "__main__":
    sys.exit(main())
