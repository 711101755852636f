"""Model-file ingestion: JSON documents describing a Lagrangian system, its
declared symmetries, constraint-set strata, reduction chart and expected
results for the verification suite."""

from __future__ import annotations

import json
from fractions import Fraction

from .legendre import ModelSpec
from .phase import VectorField
from .strata import Stratum, StratifiedSet
from .symexpr import PARAMETER, SymbolTable, parse_expr


class ModelError(ValueError):
    pass


_ALLOWED_KEYS = {
    "name",
    "coordinates",
    "lagrangian",
    "algebraic_parameters",
    "parameters",
    "symmetries",
    "strata",
    "reduction_chart",
    "initial_data",
    "known",
    "discrepancies",
}

_STRATUM_KEYS = {"name", "equalities", "nonvanishing", "signs"}
_CHART_KEYS = {"qbar", "pbar", "j", "reduced_h"}


def load_model(path: str) -> ModelSpec:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ModelError(f"invalid JSON in {path}: {e}") from None
    return model_from_dict(doc, default_name=path)


def model_from_dict(doc: dict, default_name: str = "model") -> ModelSpec:
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")
    unknown = set(doc) - _ALLOWED_KEYS
    if unknown:
        raise ModelError(f"unknown model keys: {', '.join(sorted(unknown))}")
    for key in ("coordinates", "lagrangian"):
        if key not in doc:
            raise ModelError(f"model is missing required key {key!r}")

    table = SymbolTable()
    coordinates = []
    for name in doc["coordinates"]:
        try:
            coordinates.append(table.add_coordinate(name))
        except ValueError as e:
            raise ModelError(str(e)) from None
    roots = {}
    for spec in doc.get("algebraic_parameters", []):
        extra = set(spec) - {"name", "relation", "root_hint"}
        if extra:
            raise ModelError(f"unknown algebraic parameter keys: {sorted(extra)}")
        table.add_algebraic(spec["name"], [Fraction(c) for c in spec["relation"]])
        if "root_hint" in spec:
            roots[spec["name"]] = float(spec["root_hint"])
    for name in doc.get("parameters", []):
        table.add(name, PARAMETER)

    def expr(text):
        return parse_expr(str(text), table)

    lagrangian = expr(doc["lagrangian"])

    symmetries = {}
    for name, comps in doc.get("symmetries", {}).items():
        symmetries[name] = VectorField(
            {table.get(c): expr(e) for c, e in comps.items()}
        )

    phase_strata = None
    if "strata" in doc:
        strata = []
        for s in doc["strata"]:
            extra = set(s) - _STRATUM_KEYS
            if extra:
                raise ModelError(f"unknown stratum keys: {sorted(extra)}")
            strata.append(
                Stratum(
                    name=s["name"],
                    equalities=[expr(e) for e in s.get("equalities", [])],
                    nonvanishing=[expr(e) for e in s.get("nonvanishing", [])],
                    signs=[(expr(e), int(sign)) for e, sign in s.get("signs", [])],
                )
            )
        phase_strata = StratifiedSet(strata)

    chart = None
    if "reduction_chart" in doc:
        c = doc["reduction_chart"]
        extra = set(c) - _CHART_KEYS
        if extra:
            raise ModelError(f"unknown reduction_chart keys: {sorted(extra)}")
        qbar_e, pbar_e, j_e = expr(c["qbar"]), expr(c["pbar"]), expr(c["j"])
        qb = table.add("qbar", PARAMETER)
        pb = table.add("pbar", PARAMETER)
        mu = table.add("mu", PARAMETER)
        from .dynamics import ReductionChart

        chart = ReductionChart(qbar_e, pbar_e, j_e, qb, pb, mu, expr(c["reduced_h"]))

    m = ModelSpec(
        name=doc.get("name", default_name),
        table=table,
        coordinates=coordinates,
        lagrangian=lagrangian,
        symmetries=symmetries,
        phase_strata=phase_strata,
        reduction_chart=chart,
        initial_data=[expr(e) for e in doc.get("initial_data", [])],
        known=doc.get("known", {}),
        discrepancies=list(doc.get("discrepancies", [])),
        algebraic_roots=roots,
    )
    return m
