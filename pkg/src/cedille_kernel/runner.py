"""The embedded corpus: manifest, batch checking and step-count measurements."""

from __future__ import annotations

import json
import os
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .checker import CheckOptions, TypeCheckError
from .modules import CheckedModule, ModuleError, Workspace, read_unit
from .pure import PApp, PureTerm, pretty_pure
from .reduce import normalize
from .syntax import Definition

# Definitions whose bodies had to be written for the corpus, by file.
ELIDED = {
    "monoNuF": "nu/nu.ced",
    "monoTF": "nu/lambek.ced",
    "monoStreamF": "examples/streamf.ced",
    "unfoldStream": "examples/streamf.ced",
    "monoStreamRelF": "examples/streamrelf.ced",
    "headRel": "examples/streamrelf.ced",
    "tailRel": "examples/streamrelf.ced",
    "unfoldStreamRel": "examples/streamrelf.ced",
}


def corpus_root() -> Path:
    """The corpus directory: `$CEDK_CORPUS` if set, else the packaged copy."""
    env = os.environ.get("CEDK_CORPUS")
    if env:
        return Path(env)
    return Path(str(resources.files(__package__) / "corpus"))


@dataclass(frozen=True)
class CorpusFile:
    path: Path
    source: str
    expect: str  # accept | reject
    error: Optional[str]  # expected error kind when rejected
    tags: tuple[str, ...]


@dataclass
class FileResult:
    file: str
    outcome: str  # accept | reject
    expected: str
    error_kind: Optional[str] = None
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.outcome == self.expected


@dataclass
class StepResult:
    file: str
    term: str
    steps: int
    fuel_exhausted: bool
    normal_form: str


@dataclass
class CorpusReport:
    files: list[FileResult]
    steps: list[StepResult]
    overhead: dict[str, int]
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return all(f.ok for f in self.files)

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "ok": self.ok,
            "files": [
                {
                    "file": f.file,
                    "outcome": f.outcome,
                    "expected": f.expected,
                    "errors": f.errors,
                    "warnings": f.warnings,
                    "steps": {s.term: s.steps for s in self.steps if s.file == f.file} or None,
                    **({"seconds": round(f.seconds, 4)} if timing else {}),
                }
                for f in self.files
            ],
            "measurements": [asdict(s) for s in self.steps],
            "overhead": self.overhead,
        }
        if timing:
            out["seconds"] = round(self.seconds, 4)
        return out

    def lines(self, timing: bool = True) -> list[str]:
        out = []
        for f in self.files:
            status = "ok" if f.ok else "UNEXPECTED"
            line = f"{f.file}: {f.outcome} ({status})"
            if f.error_kind:
                line += f" [{f.error_kind}]"
            if timing:
                line += f" {f.seconds:.2f}s"
            out.append(line)
            out.extend(f"  {e}" for e in f.errors)
        for s in self.steps:
            extra = " (fuel exhausted)" if s.fuel_exhausted else ""
            out.append(f"steps {s.file} {s.term}: {s.steps}{extra}")
        for depth, k in self.overhead.items():
            out.append(f"overhead depth {depth}: {k}")
        total = sum(f.ok for f in self.files)
        out.append(f"{total}/{len(self.files)} files as expected" + (f" in {self.seconds:.2f}s" if timing else ""))
        return out


def load_manifest(root: Optional[Path] = None) -> tuple[list[CorpusFile], dict]:
    root = Path(root) if root else corpus_root()
    data = json.loads((root / "manifest.json").read_text(encoding="utf-8"))
    files = [
        CorpusFile(
            Path(entry["path"]),
            (root / entry["path"]).read_text(encoding="utf-8"),
            entry["expect"],
            entry.get("error"),
            tuple(entry.get("tags", ())),
        )
        for entry in data["files"]
    ]
    return files, data


def run_corpus(root: Optional[Path] = None, options: Optional[CheckOptions] = None) -> CorpusReport:
    """Check every manifest entry and take the step-count measurements."""
    root = Path(root) if root else corpus_root()
    start = time.perf_counter()
    files, data = load_manifest(root)
    ws = Workspace(options, search=[root])
    results = []
    for cf in files:
        t0 = time.perf_counter()
        res = FileResult(cf.path.as_posix(), "accept", cf.expect)
        try:
            mod = ws.load(root / cf.path)
            res.warnings = [f"{w.kind}: {w.message}" for w in mod.warnings]
        except (TypeCheckError, ModuleError) as err:
            res.outcome = "reject"
            res.error_kind = str(err.kind.value if hasattr(err.kind, "value") else err.kind)
            res.errors = [_relative(str(err), root)]
        if cf.expect == "reject" and res.outcome == "reject" and cf.error and cf.error != res.error_kind:
            res.outcome = f"reject:{res.error_kind}"
        res.seconds = time.perf_counter() - t0
        results.append(res)

    steps = []
    for entry in data.get("steps", []):
        mod = ws.load(root / entry["path"])
        tr = normalize(ws.erased(mod, entry["term"], "raw"), ws.options.fuel)
        steps.append(StepResult(entry["path"], entry["term"], tr.steps, tr.fuel_exhausted, pretty_pure(tr.result, True)))

    overhead = {}
    if "overhead" in data:
        plan = data["overhead"]
        mod = ws.load(root / plan["path"])
        overhead = constructor_overhead(ws, mod, plan["observation"], plan["inputs"])
    return CorpusReport(results, steps, overhead, time.perf_counter() - start)


def constructor_overhead(ws: Workspace, mod: CheckedModule, observation: str, inputs: dict[str, str]) -> dict[str, int]:
    """Steps to normalize `observation v` for each input, with v already normal.

    Pre-normalizing the input isolates the reductions spent by the
    observation itself from the cost of building its argument.
    """
    obs = ws.erased(mod, observation, "raw")
    out = {}
    for label, src in inputs.items():
        v = normalize(ws.erased(mod, src, "raw"), ws.options.fuel).result
        out[label] = normalize(PApp(obs, v), ws.options.fuel).steps
    return out


def observe(ws: Workspace, mod: CheckedModule, stream: str, count: int, head: str = "head", tail: str = "tail") -> list[PureTerm]:
    """Normal forms of the first `count` heads of a stream."""
    h = ws.erased(mod, head)
    t = ws.erased(mod, tail)
    cur = ws.erased(mod, stream)
    out = []
    for _ in range(count):
        out.append(normalize(PApp(h, cur), ws.options.fuel).result)
        cur = normalize(PApp(t, cur), ws.options.fuel).result
    return out


def complete_elided_proofs(root: Optional[Path] = None) -> dict[str, Definition]:
    """The corpus bodies written for definitions whose bodies are not given elsewhere."""
    root = Path(root) if root else corpus_root()
    out = {}
    for name, rel in ELIDED.items():
        unit = read_unit(root / rel)
        out[name] = next(d for d in unit.defs if d.name == name)
    return out


def _relative(message: str, root: Path) -> str:
    prefix = str(root.resolve()) + os.sep
    return message.replace(prefix, "")
