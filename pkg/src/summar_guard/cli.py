"""Command line front end.

``summar-guard run <script>`` replays a session script and prints a
transcript; ``repl`` starts an interactive loop; ``serve`` exposes the HTTP
API; ``graph`` prints a dimension's attribute graph.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import dsl, properties
from .errors import SummarGuardError
from .model import AnalyticTable, render_value
from .session import Session

MODE_FLAG = {"basic": properties.BASIC, "sum": properties.SUM_MODE,
             "gsum": properties.GSUM}


def render_table(table: AnalyticTable, name: str = "", limit: int = 50) -> list[str]:
    names = table.schema.names
    rows = [[render_value(v) for v in r] for r in table.rows[:limit]]
    widths = [len(n) for n in names]
    for r in rows:
        for i, cell in enumerate(r):
            widths[i] = max(widths[i], len(cell))
    head = name or table.name or "result"
    lines = [f"{head} ({len(table)} row{'s' if len(table) != 1 else ''})"]
    lines.append("  " + "  ".join(n.ljust(w) for n, w in zip(names, widths)).rstrip())
    for r in rows:
        lines.append("  " + "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    if len(table) > limit:
        lines.append(f"  ... {len(table) - limit} more rows")
    return lines


def _fmt_set(names) -> str:
    return "{" + ", ".join(sorted(names)) + "}"


def render_rejection(stmt_text: str, verdict) -> list[str]:
    reason = verdict.reason or {}
    if "allowed_x" in reason:
        line = (f"REJECTED {stmt_text}: allowed along {_fmt_set(reason['allowed_x'])}; "
                f"required grouping {_fmt_set(reason['required_grouping'])}")
        if reason.get("suggestion"):
            line += f"; backtrack to {reason['suggestion']}"
    else:
        line = f"REJECTED {stmt_text}: {reason.get('message', 'engine error')}"
    return [line]


class ScriptRunner:
    """Executes parsed statements against one session and renders events."""

    def __init__(self, mode: str = properties.GSUM, base_dir: Path | None = None,
                 json_events: bool = False):
        self.session = Session(mode=mode)
        self.base_dir = base_dir or Path.cwd()
        self.json_events = json_events
        self.rejected = 0
        self.lines: list[str] = []

    def emit(self, event: dict, text_lines: list[str]) -> None:
        if self.json_events:
            self.lines.append(json.dumps(event, sort_keys=True, default=str))
        else:
            self.lines.extend(text_lines)

    def _read(self, path: str) -> str:
        return (self.base_dir / path).read_text(encoding="utf-8")

    def run_statement(self, stmt) -> None:
        s = self.session
        text = dsl.print_statement(stmt)
        if isinstance(stmt, dsl.LoadDimension):
            parents: dict[str, list[str]] = {}
            for child, parent in stmt.hierarchy:
                parents.setdefault(child, []).append(parent)
            for a in stmt.attrs:
                parents.setdefault(a, [])
            table = s.declare_dimension(stmt.name, self._read(stmt.path), parents,
                                        nullable={a: True for a in stmt.nullable})
            self.emit({"event": "load", "table": stmt.name, "rows": len(table)},
                      [f"LOADED DIMENSION {stmt.name} ({len(table)} rows)"])
        elif isinstance(stmt, dsl.LoadFact):
            table = s.declare_fact(stmt.name, self._read(stmt.path),
                                   dims={d: list(a) for d, a in stmt.dims},
                                   measures=dict(stmt.measures))
            self.emit({"event": "load", "table": stmt.name, "rows": len(table)},
                      [f"LOADED FACT {stmt.name} ({len(table)} rows)"])
        elif isinstance(stmt, dsl.SetProperty):
            prop = s.set_property(stmt.table, stmt.attr, stmt.x_d, stmt.x_f)
            self.emit({"event": "property", **prop.to_json()},
                      [f"PROPERTY {stmt.table}.{stmt.attr}: aggregable along "
                       f"{_fmt_set(prop.x)}"])
        elif isinstance(stmt, dsl.SetMode):
            s.mode = stmt.mode
            self.emit({"event": "mode", "mode": stmt.mode},
                      [f"MODE {stmt.mode.upper()}"])
        elif isinstance(stmt, dsl.Assign):
            inputs = stmt.inputs or ((s.focus,) if s.focus else ())
            if not inputs:
                raise SummarGuardError("no input table: load one first")
            node, verdict = s.apply(stmt.spec, list(inputs), alias=stmt.alias,
                                    force=stmt.force)
            if verdict.accepted:
                table = s.resolve(node)
                event = {"event": "node", "node": node, "rows": len(table),
                         "verdict": verdict.to_json()}
                self.emit(event, render_table(table, node))
            else:
                self.rejected += 1
                self.emit({"event": "rejected", "statement": text,
                           "verdict": verdict.to_json()},
                          render_rejection(text, verdict))
        elif isinstance(stmt, dsl.Explain):
            doc = s.explain(stmt.ref, stmt.attr)
            lines = [f"EXPLAIN {stmt.ref}.{stmt.attr}: {doc['narrative']}"]
            for p in doc["properties"]:
                lines.append(
                    f"  {p['fn']} along {_fmt_set(p['x'])}"
                    f" (x_d={_fmt_set(p['x_d']) if p['x_d'] is not None else 'n/a'},"
                    f" x_f={_fmt_set(p['x_f'])},"
                    f" pending={','.join(p['pending']) or 'none'},"
                    f" {p['provenance']})")
            self.emit({"event": "explain", **doc}, lines)
        elif isinstance(stmt, dsl.Backtrack):
            s.backtrack(stmt.ref)
            self.emit({"event": "focus", "focus": s.focus},
                      [f"FOCUS {s.focus}"])
        elif isinstance(stmt, dsl.SaveView):
            s.save_view(stmt.name, stmt.ref)
            self.emit({"event": "view", "name": stmt.name, "node": stmt.ref},
                      [f"VIEW {stmt.name} = {stmt.ref}"])
        elif isinstance(stmt, dsl.Export):
            csv_path, sidecar = s.export(stmt.ref, self.base_dir / stmt.path)
            self.emit({"event": "export", "csv": str(csv_path),
                       "sidecar": str(sidecar)},
                      [f"EXPORTED {stmt.ref} TO {stmt.path}"])
        else:
            raise SummarGuardError(f"unhandled statement {stmt!r}")

    def run_text(self, text: str) -> None:
        for stmt in dsl.parse(text):
            self.run_statement(stmt)


def run_script(path: Path, mode: str, allow_reject: bool,
               json_events: bool) -> tuple[int, str]:
    runner = ScriptRunner(mode=mode, base_dir=path.parent, json_events=json_events)
    try:
        runner.run_text(path.read_text(encoding="utf-8"))
    except (SummarGuardError, OSError) as exc:
        runner.lines.append(f"ERROR: {exc}")
        return 2, "\n".join(runner.lines) + "\n"
    transcript = "\n".join(runner.lines) + ("\n" if runner.lines else "")
    code = 0 if (runner.rejected == 0 or allow_reject) else 1
    return code, transcript


def repl(mode: str) -> int:
    runner = ScriptRunner(mode=mode, base_dir=Path.cwd())
    print(f"summar-guard repl (mode {mode}); empty line or Ctrl-D to exit")
    while True:
        try:
            prompt = f"{runner.session.focus or '∅'}> "
            line = input(prompt)
        except EOFError:
            print()
            return 0
        if not line.strip():
            return 0
        before = len(runner.lines)
        try:
            runner.run_text(line)
        except SummarGuardError as exc:
            print(f"error: {exc}")
            continue
        for out in runner.lines[before:]:
            print(out)


def graph_command(script: Path, dimension: str, fmt: str) -> tuple[int, str]:
    runner = ScriptRunner(base_dir=script.parent)
    try:
        runner.run_text(script.read_text(encoding="utf-8"))
    except (SummarGuardError, OSError) as exc:
        return 2, f"ERROR: {exc}\n"
    g = runner.session.graphs.get(dimension)
    if g is None:
        return 2, f"ERROR: no dimension {dimension!r} declared by the script\n"
    if fmt == "json":
        return 0, json.dumps(g.to_json(), indent=2, sort_keys=True) + "\n"
    return 0, g.to_dot() + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="summar-guard")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="replay a session script")
    p_run.add_argument("script", type=Path)
    p_run.add_argument("--mode", choices=sorted(MODE_FLAG), default="gsum")
    p_run.add_argument("--allow-reject", action="store_true",
                       help="exit 0 even when aggregations were rejected")
    p_run.add_argument("--json", action="store_true",
                       help="line-delimited JSON events instead of text")

    p_repl = sub.add_parser("repl", help="interactive session")
    p_repl.add_argument("--mode", choices=sorted(MODE_FLAG), default="gsum")

    p_serve = sub.add_parser("serve", help="HTTP API for the companion UI")
    p_serve.add_argument("--port", type=int, default=None)

    p_graph = sub.add_parser("graph", help="print a dimension's attribute graph")
    p_graph.add_argument("script", type=Path,
                         help="script whose LOAD statements declare the dimension")
    p_graph.add_argument("dimension")
    fmt = p_graph.add_mutually_exclusive_group()
    fmt.add_argument("--dot", dest="fmt", action="store_const", const="dot")
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    p_graph.set_defaults(fmt="dot")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        code, transcript = run_script(args.script, MODE_FLAG[args.mode],
                                      args.allow_reject, args.json)
        sys.stdout.write(transcript)
        return code
    if args.command == "repl":
        return repl(MODE_FLAG[args.mode])
    if args.command == "serve":
        import os

        import uvicorn

        from .service import create_app

        port = args.port or int(os.environ.get("SUMMAR_GUARD_PORT", "8765"))
        uvicorn.run(create_app(), host="127.0.0.1", port=port)
        return 0
    if args.command == "graph":
        code, out = graph_command(args.script, args.dimension, args.fmt)
        sys.stdout.write(out)
        return code
    return 2


if __name__ == "__main__":
    sys.exit(main())
