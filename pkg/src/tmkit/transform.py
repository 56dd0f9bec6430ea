"""Gate elimination and reconstruction.

`simplify` removes every release/transfer/receive stage and replaces each
maximal gate chain between surviving create/process stages with one direct
flow; the arrow direction alone then carries the routing.  `expand` is the
inverse: it reintroduces the canonical gate chain
``source -> release -> transfer -> transfer -> receive -> target`` for every
inter-machine flow, sharing the single gate stage of each kind a machine may
own.

Chain walking is routed: a transfer reached from the machine's own release
continues outward to other machines' transfers, while a transfer reached from
outside delivers inward to the machine's receive.  Without this rule a
machine that both sends and receives would leak phantom connections through
its shared transfer gate.  A receive may hand over to the machine's release
(a relay machine the thing merely passes through).

A release with no incoming flow is anchored at its machine's surviving stage
(process preferred over create): the five-stage layout feeds release from
inside the machine even when the feeding arrow is left undrawn.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from .model import (
    ActionKind,
    CORE_KINDS,
    Flow,
    GATE_KINDS,
    Machine,
    Stage,
    StaticModel,
    TmError,
    Trigger,
    natural_key,
)

C, P, R, T, V = (
    ActionKind.CREATE,
    ActionKind.PROCESS,
    ActionKind.RELEASE,
    ActionKind.TRANSFER,
    ActionKind.RECEIVE,
)


class DanglingChain(TmError):
    """A gate chain misses a surviving endpoint on one side."""

    def __init__(self, stage_ids):
        self.stage_ids = tuple(sorted(stage_ids, key=natural_key))
        super().__init__(
            "gate stages on no complete chain between surviving stages: "
            + ", ".join(self.stage_ids)
        )


class NotSimplified(TmError):
    """Expansion requires a model without gate stages."""


def _implicit_anchor(model: StaticModel, release: Stage) -> Optional[Stage]:
    machine = model.machines_by_id[release.owner]
    return machine.stage_of(P) or machine.stage_of(C)


def _gate_mode(at: Stage, came_from: Optional[Stage]) -> str:
    """Routing state at a transfer: fed by the machine's own release means the
    thing is on its way out; fed from elsewhere means it is being delivered."""
    if at.kind is not T:
        return ""
    outbound = came_from is not None and came_from.owner == at.owner and came_from.kind is R
    return "out" if outbound else "in"


def _routed_next(model: StaticModel, at: Stage, mode: str) -> list[Stage]:
    """Successor stages of a gate stage along the routing discipline."""
    outs = [model.stages_by_id[f.target] for f in model.flows_from.get(at.id, ())]
    if at.kind is R:
        return [s for s in outs if s.kind is T and s.owner == at.owner]
    if at.kind is T:
        if mode == "out":
            return [s for s in outs if s.kind is T and s.owner != at.owner]
        return [s for s in outs if s.kind is V and s.owner == at.owner]
    if at.kind is V:
        return [s for s in outs if s.owner == at.owner and s.kind in (P, R)]
    return []


def _walk_chains(
    model: StaticModel, anchor: Stage, entry: Stage
) -> tuple[set[str], set[str]]:
    """All surviving targets reachable from `anchor` entering the gate chain
    at `entry`, plus every gate stage lying on a completing path.

    A relay machine revisits its shared transfer gate once inbound and once
    outbound, so cycle detection keys on (stage, routing state)."""
    targets: set[str] = set()
    covered: set[str] = set()

    def step(at: Stage, came_from: Optional[Stage], path: tuple) -> bool:
        key = (at.id, _gate_mode(at, came_from))
        if key in path:
            return False  # genuine gate cycle: nothing completes along here
        reached = False
        for nxt in _routed_next(model, at, key[1]):
            if nxt.kind in CORE_KINDS:
                targets.add(nxt.id)
                reached = True
            elif step(nxt, at, path + (key,)):
                reached = True
        if reached:
            covered.add(at.id)
        return reached

    step(entry, anchor, ())
    return targets, covered


def _chain_map(model: StaticModel) -> tuple[dict[str, set[str]], set[str]]:
    """Map each surviving source stage to the surviving stages its gate chains
    deliver to.  Raises DanglingChain if any gate stage never completes."""
    delivered: dict[str, set[str]] = {}
    covered: set[str] = set()
    gate_ids = {s.id for s in model.all_stages() if s.kind in GATE_KINDS}

    entries: list[tuple[Stage, Stage]] = []
    for stage in model.all_stages():
        if stage.kind not in CORE_KINDS:
            continue
        for flow in model.flows_from.get(stage.id, ()):
            nxt = model.stages_by_id[flow.target]
            if nxt.kind in GATE_KINDS:
                entries.append((stage, nxt))
    # releases fed by nothing anchor at their machine's surviving stage
    for stage in model.all_stages():
        if stage.kind is R and not model.flows_into.get(stage.id):
            anchor = _implicit_anchor(model, stage)
            if anchor is not None:
                entries.append((anchor, stage))

    for anchor, entry in entries:
        targets, walked = _walk_chains(model, anchor, entry)
        covered |= walked
        if targets:
            delivered.setdefault(anchor.id, set()).update(targets)

    uncovered = gate_ids - covered
    if uncovered:
        raise DanglingChain(uncovered)
    return delivered, gate_ids


def _nearest_surviving(
    model: StaticModel, start: str, *, downstream: bool
) -> Optional[str]:
    """BFS through gate stages to the closest create/process stage.  Ties
    break on natural id order.  Walking upstream follows flows backwards and
    falls through an unfed release to its machine's surviving stage."""
    frontier = [start]
    seen = {start}
    while frontier:
        found: list[str] = []
        nxt: list[str] = []
        for sid in frontier:
            stage = model.stages_by_id[sid]
            if downstream:
                neighbors = [f.target for f in model.flows_from.get(sid, ())]
            else:
                neighbors = [f.source for f in model.flows_into.get(sid, ())]
                if stage.kind is R and not neighbors:
                    anchor = _implicit_anchor(model, stage)
                    if anchor is not None:
                        neighbors = [anchor.id]
            for n in neighbors:
                if n in seen:
                    continue
                seen.add(n)
                if model.stages_by_id[n].kind in CORE_KINDS:
                    found.append(n)
                else:
                    nxt.append(n)
        if found:
            return min(found, key=natural_key)
        frontier = nxt
    return None


def _fresh_edge_ids(used: set[str], prefix: str):
    counter = 1

    def make() -> str:
        nonlocal counter
        while f"{prefix}{counter}" in used:
            counter += 1
        used.add(f"{prefix}{counter}")
        return f"{prefix}{counter}"

    return make


def _rebuild_machines(
    model: StaticModel, keep_storage_for: dict[str, bool]
) -> tuple[Machine, ...]:
    """Drop gate stages; flip has_storage on for stages marked in the map."""

    def rebuild(machine: Machine) -> Machine:
        stages = tuple(
            replace(s, has_storage=s.has_storage or keep_storage_for.get(s.id, False))
            for s in machine.stages
            if s.kind in CORE_KINDS
        )
        subs = tuple(rebuild(sub) for sub in machine.submachines)
        return replace(machine, stages=stages, submachines=subs)

    return tuple(rebuild(root) for root in model.machines)


def simplify(model: StaticModel) -> StaticModel:
    """Remove all gate stages, contracting each chain to a direct flow.

    Triggers anchored on removed stages re-anchor to the nearest surviving
    stage (upstream for sources, downstream for targets); storage markers on
    removed stages migrate to the nearest surviving upstream stage.
    """
    delivered, gate_ids = _chain_map(model)

    direct_pairs = set()
    flows: list[Flow] = []
    for flow in model.flows:
        src = model.stages_by_id[flow.source]
        dst = model.stages_by_id[flow.target]
        if src.kind in CORE_KINDS and dst.kind in CORE_KINDS:
            flows.append(flow)
            direct_pairs.add((flow.source, flow.target))

    used_ids = {f.id for f in model.flows} | {t.id for t in model.triggers}
    fresh = _fresh_edge_ids(used_ids, "f")
    for source_id in sorted(delivered, key=natural_key):
        for target_id in sorted(delivered[source_id], key=natural_key):
            if (source_id, target_id) in direct_pairs or source_id == target_id:
                continue
            direct_pairs.add((source_id, target_id))
            flows.append(Flow(fresh(), source_id, target_id))

    triggers: list[Trigger] = []
    for trig in model.triggers:
        source, target = trig.source, trig.target
        if source in gate_ids:
            source = _nearest_surviving(model, source, downstream=False)
        if target in gate_ids:
            target = _nearest_surviving(model, target, downstream=True)
        if source is None or target is None:
            raise DanglingChain([trig.source if source is None else trig.target])
        if source == target:
            continue  # the chain collapsed under the trigger; nothing to say
        triggers.append(replace(trig, source=source, target=target))

    storage_moves: dict[str, bool] = {}
    for stage in model.all_stages():
        if stage.kind in GATE_KINDS and stage.has_storage:
            home = _nearest_surviving(model, stage.id, downstream=False)
            if home is None:
                raise DanglingChain([stage.id])
            storage_moves[home] = True

    machines = _rebuild_machines(model, storage_moves)
    return StaticModel.build(machines, flows, triggers)


def expand(model: StaticModel) -> StaticModel:
    """Reintroduce canonical gate chains for every inter-machine flow."""
    leftover = sorted(
        (s.id for s in model.all_stages() if s.kind in GATE_KINDS), key=natural_key
    )
    if leftover:
        raise NotSimplified(
            "model still contains gate stages: " + ", ".join(leftover)
        )

    inter = []
    intra_flows = []
    for flow in model.flows:
        src = model.stages_by_id[flow.source]
        dst = model.stages_by_id[flow.target]
        if src.owner == dst.owner:
            intra_flows.append(flow)
        else:
            inter.append((src, dst))

    needed: dict[str, set[ActionKind]] = {}
    for src, dst in inter:
        needed.setdefault(src.owner, set()).update({R, T})
        needed.setdefault(dst.owner, set()).update({T, V})

    def rebuild(machine: Machine) -> Machine:
        extra = []
        for kind in (R, T, V):
            if kind in needed.get(machine.id, ()):
                sid = f"{machine.id}.{kind.value}"
                if sid in model.stages_by_id:
                    raise TmError(f"stage id {sid!r} already taken; cannot expand")
                extra.append(Stage(sid, kind, machine.id))
        subs = tuple(rebuild(sub) for sub in machine.submachines)
        return replace(machine, stages=machine.stages + tuple(extra), submachines=subs)

    machines = tuple(rebuild(root) for root in model.machines)

    used_ids = {f.id for f in model.flows} | {t.id for t in model.triggers}
    fresh = _fresh_edge_ids(used_ids, "f")
    flows = list(intra_flows)
    pairs: set[tuple[str, str]] = set()

    def connect(source_id: str, target_id: str) -> None:
        if (source_id, target_id) in pairs:
            return
        pairs.add((source_id, target_id))
        flows.append(Flow(fresh(), source_id, target_id))

    order = sorted(inter, key=lambda st: (natural_key(st[0].id), natural_key(st[1].id)))
    for src, dst in order:
        src_rel = f"{src.owner}.release"
        src_tra = f"{src.owner}.transfer"
        dst_tra = f"{dst.owner}.transfer"
        dst_rec = f"{dst.owner}.receive"
        connect(src.id, src_rel)
        connect(src_rel, src_tra)
        connect(src_tra, dst_tra)
        connect(dst_tra, dst_rec)
        connect(dst_rec, dst.id)

    return StaticModel.build(machines, flows, model.triggers)
