"""Reading and writing the sectioned model-file format.

A model file is a sequence of ``[section]`` blocks; ``#`` starts a comment.
See ``docs/model-format.md`` for the grammar. Sections are always built in
the same order (variables, csp, sequence with its kernels, constraints,
objective) regardless of where they appear in the file, and unknown
sections, keys and tokens are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple, Union

from .csp import Codebook, CspInstance, encode_csp, graph_coloring
from .errors import ModelError, ParseError, ReifMilpError
from .model import (
    Model,
    Objective,
    ObjectiveSense,
    Sense,
    Variable,
    VarId,
    VarKind,
    from_parts,
)
from .reify import CongruenceSpec, ReifiedTerm, maximize_weighted, reify_congruence, require
from .sequence import (
    KernelApplication,
    Mode,
    SequenceSpec,
    apply_kernels,
    build_sequence,
    parse_kernel_id,
)

SECTIONS = ("variables", "csp", "sequence", "kernels", "constraints", "objective")
NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN = re.compile(r"<=|>=|==|=|[+\-*:]|\d+|[A-Za-z_][A-Za-z0-9_]*|\S")
_SENSES = {"<=": Sense.LE, ">=": Sense.GE, "=": Sense.EQ, "==": Sense.EQ}


@dataclass
class Line:
    number: int
    text: str
    tokens: List[Tuple[str, int]]  # (token, 1-based column)

    def fail(self, message: str, index: Optional[int] = None) -> ParseError:
        column = self.tokens[index][1] if index is not None and index < len(self.tokens) else 1
        return ParseError(message, self.number, column)


@dataclass
class ParsedModel:
    """A model plus what the front-ends need to talk about it by name."""

    model: Model
    csp: Optional[Codebook] = None
    csp_rows: Set[int] = field(default_factory=set)
    states: Optional[List[VarId]] = None
    sequence: Optional[SequenceSpec] = None
    applications: List[KernelApplication] = field(default_factory=list)
    auxiliary: Set[VarId] = field(default_factory=set)
    soft: List[ReifiedTerm] = field(default_factory=list)


def _split(text: str) -> Dict[str, List[Line]]:
    sections: Dict[str, List[Line]] = {}
    current: Optional[List[Line]] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        stripped = body.strip()
        if stripped.startswith("["):
            column = body.index("[") + 1
            if not stripped.endswith("]"):
                raise ParseError("unterminated section header", number, column)
            name = stripped[1:-1].strip()
            if name not in SECTIONS:
                raise ParseError(f"unknown section [{name}]", number, column)
            if name in sections:
                raise ParseError(f"section [{name}] appears twice", number, column)
            current = sections[name] = []
            continue
        if current is None:
            raise ParseError("content before the first section header", number, len(raw) - len(raw.lstrip()) + 1)
        tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(body)]
        current.append(Line(number, body, tokens))
    return sections


def _int(line: Line, index: int) -> int:
    if index >= len(line.tokens):
        raise line.fail("expected an integer", index)
    tok = line.tokens[index][0]
    sign = 1
    if tok == "-" and index + 1 < len(line.tokens):
        sign, index = -1, index + 1
        tok = line.tokens[index][0]
    if not tok.isdigit():
        raise line.fail(f"expected an integer, got {tok!r}", index)
    return sign * int(tok)


def _int_end(line: Line, index: int) -> Tuple[int, int]:
    """Parse an integer at ``index``; return it and the index after it."""
    value = _int(line, index)
    return value, index + (2 if line.tokens[index][0] == "-" else 1)


def _words(line: Line) -> List[str]:
    return line.text.split()


def _parse_expr(line: Line, start: int, stop: int, model: Model) -> List[Tuple[VarId, int]]:
    """Terms like ``x - 2 n + 10*b``; a lone ``0`` is the empty expression."""
    toks = line.tokens[start:stop]
    if len(toks) == 1 and toks[0][0] == "0":
        return []
    if not toks:
        raise line.fail("empty expression", start)
    terms: List[Tuple[VarId, int]] = []
    seen: Set[VarId] = set()
    i = 0
    while i < len(toks):
        sign = 1
        if toks[i][0] in "+-":
            sign = -1 if toks[i][0] == "-" else 1
            i += 1
        elif terms:
            raise line.fail(f"expected + or -, got {toks[i][0]!r}", start + i)
        coef = 1
        if i < len(toks) and toks[i][0].isdigit():
            coef = int(toks[i][0])
            i += 1
            if i < len(toks) and toks[i][0] == "*":
                i += 1
        if i >= len(toks) or not NAME.fullmatch(toks[i][0]):
            raise line.fail("expected a variable name", start + i)
        name = toks[i][0]
        if not model.has_var(name):
            raise line.fail(f"unknown variable {name!r}", start + i)
        vid = model.var(name)
        if vid in seen:
            raise line.fail(f"variable {name!r} appears twice", start + i)
        seen.add(vid)
        terms.append((vid, sign * coef))
        i += 1
    return terms


def _parse_variables(lines: List[Line]) -> Model:
    variables: List[Variable] = []
    for line in lines:
        words = _words(line)
        if not NAME.fullmatch(words[0]):
            raise line.fail(f"bad variable name {words[0]!r}", 0)
        if len(words) == 2 and words[1] == "binary":
            variables.append(Variable(len(variables), words[0], VarKind.BINARY, 0, 1))
        elif len(words) >= 2 and words[1] == "int":
            lo, after = _int_end(line, 2)
            hi, after = _int_end(line, after)
            if after != len(line.tokens):
                raise line.fail("unexpected trailing tokens", after)
            variables.append(Variable(len(variables), words[0], VarKind.INTEGER, lo, hi))
        else:
            raise line.fail("expected '<name> int <lo> <hi>' or '<name> binary'", 1 if len(words) > 1 else 0)
    model = from_parts(variables, [])
    model.check()
    return model


def _parse_csp(lines: List[Line]) -> CspInstance:
    domain: Optional[List[str]] = None
    names: Optional[List[str]] = None
    edges: List[Tuple[str, str]] = []
    for line in lines:
        words = _words(line)
        key, rest = words[0], words[1:]
        if key == "domain":
            domain = rest
        elif key == "variables":
            names = rest
        elif key == "neq_edges":
            for w in rest:
                u, sep, v = w.partition("-")
                if not sep or not NAME.fullmatch(u) or not NAME.fullmatch(v):
                    raise line.fail(f"bad edge {w!r}; expected u-v", 1)
                edges.append((u, v))
        else:
            raise line.fail(f"unknown csp key {key!r}", 0)
        if key != "neq_edges":
            if not rest:
                raise line.fail(f"{key} needs at least one value", 0)
            bad = [w for w in rest if not NAME.fullmatch(w)]
            if bad:
                raise line.fail(f"bad {key} entry {bad[0]!r}", 1)
    if domain is None or names is None:
        where = lines[0] if lines else Line(0, "", [])
        raise where.fail("csp block needs 'domain' and 'variables'")
    try:
        return graph_coloring(domain, names, edges)
    except ReifMilpError as exc:
        raise lines[0].fail(str(exc)) from None


def _parse_sequence(lines: List[Line]) -> SequenceSpec:
    values: Dict[str, int] = {}
    for line in lines:
        key = line.tokens[0][0]
        if key not in ("T", "lo", "hi"):
            raise line.fail(f"unknown sequence key {key!r}", 0)
        if key in values:
            raise line.fail(f"duplicate sequence key {key!r}", 0)
        value, after = _int_end(line, 1)
        if after != len(line.tokens):
            raise line.fail("unexpected trailing tokens", after)
        values[key] = value
    missing = [k for k in ("T", "lo", "hi") if k not in values]
    if missing:
        raise lines[0].fail(f"sequence block is missing {', '.join(missing)}")
    try:
        return SequenceSpec(values["T"], values["lo"], values["hi"])
    except ModelError as exc:
        raise lines[0].fail(str(exc)) from None


def _parse_kernels(lines: List[Line], parsed: ParsedModel) -> None:
    model = parsed.model
    for line in lines:
        words = _words(line)
        if len(words) not in (3, 4):
            raise line.fail("expected '<kind> <@step|variable> <require|soft> [weight]'", 0)
        kind, target, mode_word = words[:3]
        try:
            modulus, remainder = parse_kernel_id(kind)
        except ModelError as exc:
            raise line.fail(str(exc), 0) from None
        try:
            mode = Mode(mode_word)
        except ValueError:
            raise line.fail(f"mode must be 'require' or 'soft', got {mode_word!r}", 2) from None
        weight = 1
        if len(words) == 4:
            try:
                weight = int(words[3])
            except ValueError:
                raise line.fail(f"bad weight {words[3]!r}", len(line.tokens) - 1) from None
        before = model.num_vars
        try:
            if target.startswith("@"):
                if parsed.states is None:
                    raise line.fail("step targets need a [sequence] block", 1)
                try:
                    step = int(target[1:])
                except ValueError:
                    raise line.fail(f"bad step {target!r}", 1) from None
                app = KernelApplication(step, kind, mode, weight)
                parsed.applications.append(app)
                parsed.soft.extend(apply_kernels(model, parsed.states, [app]))
            else:
                if not model.has_var(target):
                    raise line.fail(f"unknown variable {target!r}", 1)
                term = reify_congruence(model, CongruenceSpec(model.var(target), modulus, remainder), weight)
                if mode is Mode.REQUIRE:
                    require(model, term)
                else:
                    parsed.soft.append(term)
        except ModelError as exc:
            raise line.fail(str(exc), 1) from None
        parsed.auxiliary.update(range(before, model.num_vars))


def _parse_constraints(lines: List[Line], model: Model) -> None:
    for line in lines:
        toks = line.tokens
        start, label = 0, None
        if len(toks) >= 2 and toks[1][0] == ":":
            label = toks[0][0]
            if not NAME.fullmatch(label):
                raise line.fail(f"bad label {label!r}", 0)
            start = 2
        ops = [i for i in range(start, len(toks)) if toks[i][0] in _SENSES]
        if len(ops) != 1:
            raise line.fail("expected exactly one of <=, >=, =", ops[1] if len(ops) > 1 else start)
        op = ops[0]
        terms = _parse_expr(line, start, op, model)
        rhs, after = _int_end(line, op + 1)
        if after != len(toks):
            raise line.fail("unexpected trailing tokens", after)
        try:
            model.add_constraint(terms, _SENSES[toks[op][0]], rhs, label=label)
        except ModelError as exc:
            raise line.fail(str(exc), start) from None


def _parse_objective(lines: List[Line], model: Model) -> None:
    if len(lines) != 1:
        raise (lines[1] if len(lines) > 1 else Line(0, "", [])).fail("objective section takes exactly one line")
    line = lines[0]
    head = line.tokens[0][0]
    if head == "feasibility":
        if len(line.tokens) != 1:
            raise line.fail("feasibility takes no terms", 1)
        model.set_objective(ObjectiveSense.FEASIBILITY)
        return
    senses = {"max": ObjectiveSense.MAXIMIZE, "min": ObjectiveSense.MINIMIZE}
    if head not in senses:
        raise line.fail(f"objective must start with max, min or feasibility, got {head!r}", 0)
    model.set_objective(senses[head], _parse_expr(line, 1, len(line.tokens), model))


def parse_text(text: str) -> ParsedModel:
    sections = _split(text)
    model = _parse_variables(sections.get("variables", []))
    parsed = ParsedModel(model)

    if "csp" in sections:
        instance = _parse_csp(sections["csp"])
        first_row = len(model.constraints)
        try:
            _, parsed.csp = encode_csp(instance, model)
        except ModelError as exc:
            raise sections["csp"][0].fail(str(exc)) from None
        parsed.csp_rows = set(range(first_row, len(model.constraints)))

    if "sequence" in sections:
        parsed.sequence = _parse_sequence(sections["sequence"])
        try:
            parsed.states = build_sequence(model, parsed.sequence)
        except ModelError as exc:
            raise sections["sequence"][0].fail(str(exc)) from None
    if "kernels" in sections:
        _parse_kernels(sections["kernels"], parsed)

    _parse_constraints(sections.get("constraints", []), model)

    if "objective" in sections:
        if parsed.soft:
            raise sections["objective"][0].fail("an explicit objective cannot be combined with soft kernels")
        _parse_objective(sections["objective"], model)
    elif parsed.soft:
        maximize_weighted(model, parsed.soft)

    model.check()
    return parsed


def parse_model(path: Union[str, Path]) -> ParsedModel:
    return parse_text(Path(path).read_text())


def format_expr(model: Model, terms) -> str:
    """``x - 2 n_even + 10 b_even``; unit coefficients are implicit."""
    if not terms:
        return "0"
    parts: List[str] = []
    for k, (var, coef) in enumerate(terms):
        name = model.variables[var].name
        mag = abs(coef)
        body = name if mag == 1 else f"{mag} {name}"
        if k == 0:
            parts.append(body if coef >= 0 else f"- {body}")
        else:
            parts.append(f"{'-' if coef < 0 else '+'} {body}")
    return " ".join(parts)


def print_model(model: Model) -> str:
    """Flat model file (variables, constraints, objective) that parses back to ``model``."""
    out = ["[variables]"]
    for v in model.variables:
        out.append(f"{v.name} binary" if v.kind is VarKind.BINARY else f"{v.name} int {v.lo} {v.hi}")
    if model.constraints:
        out.append("")
        out.append("[constraints]")
        for c in model.constraints:
            out.append(f"{c.label}: {format_expr(model, c.terms)} {c.sense.value} {c.rhs}")
    obj: Objective = model.objective
    out.append("")
    out.append("[objective]")
    if obj.sense is ObjectiveSense.FEASIBILITY:
        out.append("feasibility")
    else:
        out.append(f"{obj.sense.value} {format_expr(model, obj.terms)}")
    return "\n".join(out) + "\n"

