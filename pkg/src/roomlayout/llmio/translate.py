"""Translation of constraint sentences into cost-function calls.

Runs once per constraint family (intra, inter, tertiary).  The model sees the
registry manifest and the numbered sentences and proposes calls; anything it
proposes outside the registry, or pointing at unknown objects, is dropped
with a Translation diagnostic.  Sentences left unmapped are likewise dropped
and recorded.  Parameter shapes are not judged here: a call with malformed
params still goes into the graph and binds to a zero-cost term later.
"""

from __future__ import annotations

import json
from typing import Optional, Sequence

from ..costlib import REGISTRY, registry_manifest
from ..scene import ConstraintCall, ObjectSpec
from .providers import Provider
from .stages import TEMP_EXACT, StageFailure, TaggedSentence, ask_stage

TRANSLATE_FAMILIES = ("intra", "inter", "tertiary")


def _manifest_text(manifest: Optional[Sequence[dict]]) -> str:
    if manifest is None:
        manifest = registry_manifest()
    return json.dumps(list(manifest), sort_keys=True)


def translate(
    provider: Provider,
    sentences: Sequence[TaggedSentence],
    objects: Sequence[ObjectSpec],
    family: str,
    diagnostics: Optional[list] = None,
    manifest: Optional[Sequence[dict]] = None,
) -> list[ConstraintCall]:
    """Map sentences to registry calls; unmappable sentences are dropped.

    Every returned call's function_id exists in the registry and its subject
    and second object resolve to graph indices.  Results keep sentence order.
    """
    if family not in TRANSLATE_FAMILIES:
        raise ValueError(f"unknown translation family {family!r}")
    if not sentences:
        return []
    if diagnostics is None:
        diagnostics = []

    by_name: dict[str, int] = {}
    for i, o in enumerate(objects):
        by_name.setdefault(o.name, i)

    numbered = [
        {"index": k, "subject": s.subject, "sentence": s.sentence}
        for k, s in enumerate(sentences)
    ]
    prompt = (
        f"Cost function library: {_manifest_text(manifest)}\n\n"
        f"Objects by name: {json.dumps([o.name for o in objects])}\n"
        f"Constraint family: {family}\n"
        f"Sentences: {json.dumps(numbered)}\n\n"
        "Map each sentence to a call against the library. Choose the closest "
        "matching function; give params matching its schema; set object2 to "
        "the other object's name for pairwise functions, else null. Skip "
        "sentences with no reasonable match. Reply with JSON "
        '{"calls": [{"sentence": 0, "function": "ind_next_to_wall", '
        '"object2": null, "params": {}}]}'
    )
    try:
        resp = ask_stage(provider, "translate", prompt, TEMP_EXACT)
    except StageFailure as err:
        diagnostics.append(
            {
                "category": "Translation",
                "stage": f"translate.{family}",
                "error": f"translation stage failed, all sentences dropped: {err.reason}",
            }
        )
        return []

    calls: list[ConstraintCall] = []
    covered: set[int] = set()
    for c in resp.parsed["calls"]:
        k = c["sentence"]
        if not 0 <= k < len(sentences):
            diagnostics.append(
                {
                    "category": "Translation",
                    "stage": f"translate.{family}",
                    "error": f"call references sentence {k}, out of range",
                }
            )
            continue
        sentence = sentences[k]
        fn = c["function"]
        if fn not in REGISTRY:
            diagnostics.append(
                {
                    "category": "Translation",
                    "stage": f"translate.{family}",
                    "error": f"unknown function {fn!r}, dropped",
                    "sentence": sentence.sentence,
                }
            )
            covered.add(k)  # mapped, just badly; do not double-report
            continue
        subject = by_name.get(sentence.subject)
        if subject is None:
            diagnostics.append(
                {
                    "category": "Translation",
                    "stage": f"translate.{family}",
                    "error": f"subject {sentence.subject!r} not in object list, dropped",
                    "sentence": sentence.sentence,
                }
            )
            covered.add(k)
            continue
        object2: Optional[int] = None
        name2 = c.get("object2")
        if name2 is not None:
            object2 = by_name.get(name2)
            if object2 is None:
                diagnostics.append(
                    {
                        "category": "Translation",
                        "stage": f"translate.{family}",
                        "error": f"second object {name2!r} not in object list, dropped",
                        "sentence": sentence.sentence,
                    }
                )
                covered.add(k)
                continue
        params = dict(c.get("params", {}))
        # pair_between names its anchor object; resolve it to an index
        if fn == "pair_between" and isinstance(params.get("other"), str):
            other = by_name.get(params["other"])
            if other is None:
                diagnostics.append(
                    {
                        "category": "Translation",
                        "stage": f"translate.{family}",
                        "error": f"between-anchor {params['other']!r} not in object list, dropped",
                        "sentence": sentence.sentence,
                    }
                )
                covered.add(k)
                continue
            params["other"] = other
        calls.append(
            ConstraintCall(
                function_id=fn,
                subject=subject,
                object2=object2,
                params=params,
                source=sentence.sentence,
            )
        )
        covered.add(k)
    for k, s in enumerate(sentences):
        if k not in covered:
            diagnostics.append(
                {
                    "category": "Translation",
                    "stage": f"translate.{family}",
                    "error": "no mapping produced, sentence dropped",
                    "sentence": s.sentence,
                }
            )
    return calls
