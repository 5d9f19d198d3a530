"""Command line workbench.

Exit codes are part of the contract: 0 success, 1 negative verdict
(an unsafe term, unequal terms, a false formula, a failing suite),
2 usage error, 3 budget exhaustion, 4 broken internal contract.
"""

import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from . import __version__
from .corpus import run_one_suite, run_suites, suite_names
from .encodings import (
    DecodeError,
    Word,
    church_nat,
    church_word,
    compile_polynomial,
    compile_word_function,
    decode_nat,
    decode_word,
    apply_word_function,
    parse_polynomial,
    word_spec_from_json,
)
from .games import (
    build_computation_tree,
    core_indices,
    enumerate_traversals,
    p_view_indices,
    parity,
    traversal_normal_form,
)
from .hardness import CHURCH_TRUE, equality_instance, qbf_to_term
from .qbf import parse_qbf, qbf_text
from .qbf_oracle import eval_qbf
from .reduction import (
    BudgetExceededError,
    CaptureViolation,
    ReductionBudget,
    beta_eta_equal,
    reduction_sequence,
)
from .reduction import normalize as _normalize
from .safety import Level, TypeCheckError, safety_check
from .syntax import ParseError, mk_app, parse, parse_env, pretty

EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_CONTRACT = 4


def _fail(code: int, message: str, as_json: bool):
    if as_json:
        click.echo(json.dumps({"error": message}))
    else:
        click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _emit(as_json: bool, payload: dict, lines):
    if as_json:
        click.echo(json.dumps(payload, indent=2))
    else:
        for line in lines:
            click.echo(line)


def _load_term(path: str, as_json: bool):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        _fail(EXIT_USAGE, f"cannot read {path}: {exc}", as_json)
    try:
        return parse(text)
    except ParseError as exc:
        _fail(EXIT_USAGE, f"{path}: {exc}", as_json)


def _load_env(text: str, as_json: bool):
    try:
        return parse_env(text or "")
    except (ParseError, ValueError) as exc:
        _fail(EXIT_USAGE, f"bad --env: {exc}", as_json)


_ENV_HELP = "types of free variables, e.g. 'z:o, f:o->o'"


@click.group()
@click.version_option(version=__version__, prog_name="safelc")
def main():
    """Workbench for safe lambda terms."""


@main.command()
@click.argument("termfile", type=click.Path(exists=True, dir_okay=False))
@click.option("--env", "env_text", default="", help=_ENV_HELP)
@click.option("--trace", is_flag=True, help="print the full derivation")
@click.option("--json", "as_json", is_flag=True)
def check(termfile, env_text, trace, as_json):
    """Safety verdict and simple type of the term in TERMFILE."""
    env = _load_env(env_text, as_json)
    term = _load_term(termfile, as_json)
    verdict = safety_check(env, term)
    failures = [e.describe() for e in verdict.failures]
    lines = [verdict.describe()]
    if trace:
        lines += [f"  {e.describe()}" for e in verdict.trace]
    else:
        lines += [f"  {f}" for f in failures]
    payload = {
        "level": str(verdict.level),
        "type": str(verdict.type) if verdict.type is not None else None,
        "failures": failures,
    }
    if trace:
        payload["trace"] = [e.describe() for e in verdict.trace]
    _emit(as_json, payload, lines)
    sys.exit(0 if verdict.level is Level.SAFE else EXIT_NEGATIVE)


@main.command()
@click.argument("termfile", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--strategy",
    type=click.Choice(["plain", "safe"]),
    default="plain",
    show_default=True,
)
@click.option("--max-steps", default=100_000, show_default=True)
@click.option("--max-size", default=1_000_000, show_default=True)
@click.option("--trace", is_flag=True, help="print every reduction step")
@click.option("--json", "as_json", is_flag=True)
def normalize(termfile, strategy, max_steps, max_size, trace, as_json):
    """Normal form of the term in TERMFILE."""
    term = _load_term(termfile, as_json)
    budget = ReductionBudget(max_steps, max_size)
    steps = []
    count = -1
    last = term
    try:
        for t in reduction_sequence(term, strategy, budget):
            count += 1
            last = t
            if trace:
                steps.append(pretty(t))
    except BudgetExceededError as exc:
        _fail(EXIT_BUDGET, str(exc), as_json)
    except CaptureViolation as exc:
        _fail(EXIT_CONTRACT, f"capture flag raised: {exc}", as_json)
    lines = [f"[{i}] {s}" for i, s in enumerate(steps)]
    lines.append(pretty(last))
    payload = {"normal_form": pretty(last), "steps": count}
    if trace:
        payload["chain"] = steps
    _emit(as_json, payload, lines)


@main.command()
@click.argument("left", type=click.Path(exists=True, dir_okay=False))
@click.argument("right", type=click.Path(exists=True, dir_okay=False))
@click.option("--env", "env_text", default="", help=_ENV_HELP)
@click.option("--max-steps", default=100_000, show_default=True)
@click.option("--max-size", default=1_000_000, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def eq(left, right, env_text, max_steps, max_size, as_json):
    """Beta-eta equality of the terms in LEFT and RIGHT."""
    env = _load_env(env_text, as_json)
    a = _load_term(left, as_json)
    b = _load_term(right, as_json)
    try:
        equal = beta_eta_equal(env, a, b, ReductionBudget(max_steps, max_size))
    except TypeCheckError as exc:
        _fail(EXIT_USAGE, str(exc), as_json)
    except BudgetExceededError as exc:
        _fail(EXIT_BUDGET, str(exc), as_json)
    text = "beta-eta equal" if equal else "not beta-eta equal"
    _emit(as_json, {"equal": equal}, [text])
    sys.exit(0 if equal else EXIT_NEGATIVE)


def _parse_assignment(text: str, variables, as_json: bool) -> dict:
    values = {}
    for piece in text.split(","):
        name, sep, raw = piece.partition("=")
        name = name.strip()
        if not sep or not name:
            _fail(EXIT_USAGE, f"bad assignment {piece!r}", as_json)
        try:
            n = int(raw)
        except ValueError:
            _fail(EXIT_USAGE, f"bad assignment value {raw!r}", as_json)
        if n < 0:
            _fail(EXIT_USAGE, f"negative value for {name}", as_json)
        if name not in variables:
            _fail(EXIT_USAGE, f"unknown polynomial variable {name!r}", as_json)
        if name in values:
            _fail(EXIT_USAGE, f"{name} assigned twice", as_json)
        values[name] = n
    missing = [v for v in variables if v not in values]
    if missing:
        _fail(EXIT_USAGE, f"missing value(s) for {', '.join(missing)}", as_json)
    return values


@main.command()
@click.argument("expression")
@click.option("--at", "at_text", default=None, help="inputs like x=2,y=1")
@click.option("--emit-term", is_flag=True, help="print the compiled term")
@click.option("--json", "as_json", is_flag=True)
def poly(expression, at_text, emit_term, as_json):
    """Compile EXPRESSION to a term over church numerals."""
    try:
        p = parse_polynomial(expression)
    except (ParseError, ValueError) as exc:
        _fail(EXIT_USAGE, str(exc), as_json)
    term = compile_polynomial(p)
    verdict = safety_check({}, term)
    lines = [verdict.describe()]
    payload = {
        "variables": list(p.variables),
        "level": str(verdict.level),
        "type": str(verdict.type),
    }
    if emit_term:
        lines.append(pretty(term))
        payload["term"] = pretty(term)
    if at_text is not None:
        values = _parse_assignment(at_text, p.variables, as_json)
        direct = p.evaluate(values)
        applied = mk_app(term, tuple(church_nat(values[v]) for v in p.variables))
        try:
            computed = decode_nat(_normalize(applied))
        except (BudgetExceededError,) as exc:
            _fail(EXIT_BUDGET, str(exc), as_json)
        except DecodeError as exc:
            _fail(EXIT_CONTRACT, f"normal form is not a numeral: {exc}", as_json)
        if computed != direct:
            _fail(
                EXIT_CONTRACT,
                f"term computes {computed}, polynomial says {direct}",
                as_json,
            )
        shown = ", ".join(f"{v}={values[v]}" for v in p.variables)
        lines.append(f"p({shown}) = {computed}")
        payload["assignment"] = values
        payload["value"] = computed
    _emit(as_json, payload, lines)


@main.command()
@click.option("--alphabet", required=True, help="ordered distinct letters")
@click.option(
    "--spec",
    "spec_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="word function description (json)",
)
@click.option("--input", "input_text", required=True, help="input word")
@click.option("--emit-term", is_flag=True, help="print the compiled term")
@click.option("--json", "as_json", is_flag=True)
def word(alphabet, spec_path, input_text, emit_term, as_json):
    """Run a catalogued word function on INPUT via its term."""
    try:
        data = json.loads(Path(spec_path).read_text())
        spec = word_spec_from_json(data)
        w = Word(alphabet, input_text)
        term = compile_word_function(spec, alphabet)
    except (ValueError, KeyError) as exc:
        _fail(EXIT_USAGE, str(exc), as_json)
    direct = apply_word_function(spec, w)
    try:
        got = decode_word(_normalize(mk_app(term, (church_word(w),))), alphabet)
    except BudgetExceededError as exc:
        _fail(EXIT_BUDGET, str(exc), as_json)
    except DecodeError as exc:
        _fail(EXIT_CONTRACT, f"normal form is not a word: {exc}", as_json)
    if got.letters != direct.letters:
        _fail(
            EXIT_CONTRACT,
            f"term computes {got.letters!r}, evaluator says {direct.letters!r}",
            as_json,
        )
    verdict = safety_check({}, term)
    lines = [direct.letters]
    payload = {
        "output": direct.letters,
        "level": str(verdict.level),
        "type": str(verdict.type),
    }
    if emit_term:
        lines.append(pretty(term))
        payload["term"] = pretty(term)
    _emit(as_json, payload, lines)


@main.command()
@click.argument("formula")
@click.option(
    "--emit-instance",
    "emit_dir",
    type=click.Path(file_okay=False),
    default=None,
    help="write the equality instance term files here",
)
@click.option("--json", "as_json", is_flag=True)
def qbf(formula, emit_dir, as_json):
    """Decide FORMULA by normalizing its term; cross-check the oracle."""
    try:
        f = parse_qbf(formula)
        oracle = eval_qbf(f)
    except (ParseError, ValueError) as exc:
        _fail(EXIT_USAGE, str(exc), as_json)
    term = qbf_to_term(f)
    try:
        holds = beta_eta_equal({}, term, CHURCH_TRUE)
    except BudgetExceededError as exc:
        _fail(EXIT_BUDGET, str(exc), as_json)
    value = "true" if holds else "false"
    if holds != oracle:
        _fail(
            EXIT_CONTRACT,
            f"term normalizes to church {value} but the oracle says {oracle}",
            as_json,
        )
    lines = [f"{value}; term normalizes to church {value}; oracle agrees"]
    payload = {"formula": qbf_text(f), "value": value, "oracle_agrees": True}
    if emit_dir is not None:
        directory = Path(emit_dir)
        directory.mkdir(parents=True, exist_ok=True)
        lhs, rhs = equality_instance(f)
        (directory / "lhs.term").write_text(pretty(lhs) + "\n")
        (directory / "rhs.term").write_text(pretty(rhs) + "\n")
        lines.append(f"instance written to {directory}")
        payload["instance_dir"] = str(directory)
    _emit(as_json, payload, lines)
    sys.exit(0 if holds else EXIT_NEGATIVE)


@main.command()
@click.argument("termfile", type=click.Path(exists=True, dir_okay=False))
@click.option("--env", "env_text", default="", help=_ENV_HELP)
@click.option("--max-length", default=200, show_default=True)
@click.option("--show-views", is_flag=True, help="print final views")
@click.option("--json", "as_json", is_flag=True)
def traverse(termfile, env_text, max_length, show_views, as_json):
    """Enumerate traversals of TERMFILE's computation tree."""
    env = _load_env(env_text, as_json)
    term = _load_term(termfile, as_json)
    try:
        tree = build_computation_tree(env, term)
    except TypeCheckError as exc:
        _fail(EXIT_USAGE, str(exc), as_json)
    try:
        traversals = enumerate_traversals(tree, max_len=max_length)
    except ValueError as exc:
        _fail(EXIT_USAGE, str(exc), as_json)
    try:
        nf = traversal_normal_form(tree, budget=max_length)
    except BudgetExceededError as exc:
        _fail(EXIT_BUDGET, str(exc), as_json)

    lines = [f"computation tree: {len(tree.nodes)} nodes"]
    payload = {
        "nodes": [
            {
                "id": n.id,
                "label": n.label,
                "order": n.order,
                "parity": parity(n),
            }
            for n in tree.nodes
        ],
        "traversals": [],
        "normal_form": pretty(nf),
    }
    for i, t in enumerate(traversals):
        status = "maximal" if t.maximal else f"cut at {len(t)}"
        lines.append(f"traversal {i} ({status}):")
        entry_rows = []
        for k, occ in enumerate(t.occurrences):
            j = "-" if occ.justifier is None else occ.justifier
            lines.append(
                f"  {k:3}  {occ.node.label:<16} justifier={j!s:>3}  {occ.rule}"
            )
            entry_rows.append(
                {
                    "position": k,
                    "node": occ.node.id,
                    "label": occ.node.label,
                    "justifier": occ.justifier,
                    "rule": occ.rule,
                    "parity": parity(occ.node),
                }
            )
        core = core_indices(t)
        lines.append("  core: " + " ".join(str(c) for c in core))
        row = {"maximal": t.maximal, "steps": entry_rows, "core": core}
        if show_views:
            view = p_view_indices(t.occurrences)
            lines.append("  view: " + " ".join(str(v) for v in view))
            row["view"] = view
        payload["traversals"].append(row)
    lines.append(f"normal form: {pretty(nf)}")
    _emit(as_json, payload, lines)


def _suite_job(args):
    name, count, seed = args
    return run_one_suite(name, count=count, seed=seed)


@main.command()
@click.option("--count", default=200, show_default=True, type=click.IntRange(0))
@click.option("--seed", default=0, show_default=True)
@click.option("--jobs", default=1, show_default=True, type=click.IntRange(1))
@click.option("--json", "as_json", is_flag=True)
def corpus(count, seed, jobs, as_json):
    """Run the built-in corpus through every property suite."""
    if jobs == 1:
        results = run_suites(count=count, seed=seed)
    else:
        names = suite_names()
        work = [(n, count, seed) for n in names]
        with ProcessPoolExecutor(max_workers=min(jobs, len(names))) as pool:
            results = list(pool.map(_suite_job, work))
    lines = [f"{'suite':<24} {'checked':>8}  result"]
    for r in results:
        state = "ok" if r.ok else f"{len(r.failures)} failed"
        lines.append(f"{r.name:<24} {r.checked:>8}  {state}")
        for failure in r.failures[:5]:
            lines.append(f"    {failure}")
    bad = [r for r in results if not r.ok]
    lines.append(
        "all suites passed" if not bad else f"{len(bad)} suite(s) failed"
    )
    payload = {
        "count": count,
        "seed": seed,
        "suites": [
            {
                "name": r.name,
                "checked": r.checked,
                "ok": r.ok,
                "failures": list(r.failures),
            }
            for r in results
        ],
    }
    _emit(as_json, payload, lines)
    sys.exit(0 if not bad else EXIT_NEGATIVE)
