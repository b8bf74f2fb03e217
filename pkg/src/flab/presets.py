"""Named presets and seeded factories backing the verifier suites.

Every randomized suite takes an explicit rng so runs are reproducible
from a single seed.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .entropy import FinitePartition
from .groups import FiniteGroup, all_automorphisms, preset_group
from .skew import (
    Cocycle,
    FiniteAction,
    FiniteGroupAction,
    SkewBundle,
    SpecialPartition,
    ZSkewSystem,
    cocycle_from_section,
)

DEFAULT_SEED = 20120717


def identity_perm(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def group_action(group: FiniteGroup, auto_indices, rank: int) -> FiniteGroupAction:
    """Action with generator images picked from the automorphism catalog."""
    autos = all_automorphisms(group)
    perms = [autos[i % len(autos)] for i in auto_indices]
    if len(perms) != rank:
        raise ValueError("need one automorphism index per generator")
    return FiniteGroupAction(group, perms, rank)


def trivial_action(group: FiniteGroup, rank: int) -> FiniteGroupAction:
    return FiniteGroupAction(group, [identity_perm(group.order())] * rank, rank)


def nontrivial_auto_assignments(group: FiniteGroup, rank: int, count: int = 2) -> list[list[int]]:
    """Deterministic distinct automorphism assignments, identity first."""
    autos = all_automorphisms(group)
    assignments = [[0] * rank]
    idx = 1
    while len(assignments) < count and idx < len(autos) * rank:
        pick = [0] * rank
        pick[idx % rank] = idx % len(autos)
        if pick not in assignments and any(pick):
            assignments.append(pick)
        idx += 1
    while len(assignments) < count:
        assignments.append([len(assignments) % max(1, len(autos) - 1) + 1] * rank)
    return assignments[:count]


def normal_subgroups(group: FiniteGroup) -> list[frozenset[int]]:
    """All normal subgroups, by closing generator pairs (fine up to order 8)."""
    n = group.order()
    found = {frozenset([group.identity]), frozenset(range(n))}
    for a in range(n):
        for b in range(n):
            found.add(group.subgroup_closure((a, b)))
    return sorted(
        (s for s in found if group.is_normal(s)), key=lambda s: (len(s), sorted(s))
    )


def invariant_normal_subgroups(ga: FiniteGroupAction) -> list[frozenset[int]]:
    return [s for s in normal_subgroups(ga.group) if ga.subgroup_invariant(s)]


def _auto_fixing_subgroup(group: FiniteGroup, sub: frozenset[int], skip_identity=True):
    for perm in all_automorphisms(group):
        if skip_identity and perm == identity_perm(group.order()):
            continue
        if frozenset(perm[x] for x in sub) == sub:
            return perm
    return identity_perm(group.order())


def section_pair_catalog(rank: int = 2) -> list[dict]:
    """(G, N) preset pairs with invariant normal subgroups and mixed actions."""
    out = []

    z4 = preset_group("Z/4")
    neg = next(p for p in all_automorphisms(z4) if p != identity_perm(4))
    half = frozenset({z4.index("0"), z4.index("2")})
    out.append(
        {
            "name": "Z/4 over Z/2, negating generator",
            "action": FiniteGroupAction(z4, [neg] + [identity_perm(4)] * (rank - 1), rank),
            "subgroup": half,
        }
    )
    out.append(
        {
            "name": "Z/4 with trivial fiber",
            "action": FiniteGroupAction(z4, [neg] * rank, rank),
            "subgroup": frozenset({z4.identity}),
        }
    )
    out.append(
        {
            "name": "Z/4 with trivial base",
            "action": FiniteGroupAction(z4, [identity_perm(4), neg][:rank] + [neg] * max(0, rank - 2), rank),
            "subgroup": frozenset(range(4)),
        }
    )

    klein = preset_group("Z/2xZ/2")
    fixed = frozenset({klein.identity, klein.index("(1,0)")})
    swap = _auto_fixing_subgroup(klein, fixed)
    out.append(
        {
            "name": "Klein four over Z/2, swapping the complement",
            "action": FiniteGroupAction(klein, [swap] + [identity_perm(4)] * (rank - 1), rank),
            "subgroup": fixed,
        }
    )

    d4 = preset_group("D4")
    autos_d4 = all_automorphisms(d4)
    center = frozenset({d4.index("r0"), d4.index("r2")})
    rotations = frozenset({d4.index(f"r{k}") for k in range(4)})
    out.append(
        {
            "name": "D4 over its center",
            "action": FiniteGroupAction(d4, [autos_d4[1], autos_d4[2]][:rank] + [autos_d4[0]] * max(0, rank - 2), rank),
            "subgroup": center,
        }
    )
    out.append(
        {
            "name": "D4 over the rotation subgroup",
            "action": FiniteGroupAction(d4, [autos_d4[3], autos_d4[1]][:rank] + [autos_d4[0]] * max(0, rank - 2), rank),
            "subgroup": rotations,
        }
    )

    q8 = preset_group("Q8")
    autos_q8 = all_automorphisms(q8)
    q8_center = frozenset({q8.index("1"), q8.index("-1")})
    out.append(
        {
            "name": "Q8 over its center",
            "action": FiniteGroupAction(q8, [autos_q8[1], autos_q8[5]][:rank] + [autos_q8[0]] * max(0, rank - 2), rank),
            "subgroup": q8_center,
        }
    )
    return out


def skew_test_cases(rank: int = 2) -> list[dict]:
    """Finite skew bundles with a special fiber partition, cocycles mixed
    trivial and nontrivial."""
    cases = []
    for pair in section_pair_catalog(rank):
        bundle_src = cocycle_from_section(pair["action"], pair["subgroup"])
        fiber_group = bundle_src.fiber_group
        specials = [
            SpecialPartition(fiber_group, sub)
            for sub in normal_subgroups(fiber_group)
            if bundle_src.fiber_action.subgroup_invariant(sub)
        ]
        nontrivial = any(
            v != fiber_group.identity for vals in bundle_src.cocycle.gen_values for v in vals
        )
        for sp in specials:
            cases.append(
                {
                    "name": pair["name"] + f" (blocks={sp.partition.num_blocks()})",
                    "bundle": bundle_src.skew,
                    "special": sp,
                    "nontrivial_cocycle": nontrivial,
                }
            )
    return cases


# -- seeded factories ----------------------------------------------------------


def make_rng(seed: int | None = None) -> random.Random:
    return random.Random(DEFAULT_SEED if seed is None else seed)


def random_permutation(rng: random.Random, n: int) -> list[int]:
    perm = list(range(n))
    rng.shuffle(perm)
    return perm


def random_partition(rng: random.Random, n: int, max_blocks: int = 3) -> FinitePartition:
    weights = FinitePartition.uniform_space(n)
    labels = [rng.randrange(max_blocks) for _ in range(n)]
    return FinitePartition(weights, labels)


def random_finite_action(rng: random.Random, rank: int = 2, min_size: int = 3, max_size: int = 6) -> FiniteAction:
    n = rng.randint(min_size, max_size)
    perms = [random_permutation(rng, n) for _ in range(rank)]
    return FiniteAction(FinitePartition.uniform_space(n), perms, rank)


_FIBER_PRESETS = ["Z/2", "Z/3", "Z/4", "Z/2xZ/2", "D4", "Q8"]


def random_z_skew(rng: random.Random) -> tuple[ZSkewSystem, FinitePartition, bool]:
    """(system, fiber partition, partition-is-special) with a random cocycle."""
    fiber = preset_group(_FIBER_PRESETS[rng.randrange(len(_FIBER_PRESETS))])
    autos = all_automorphisms(fiber)
    s_perm = autos[rng.randrange(len(autos))]
    base_size = rng.randint(2, 4)
    t_perm = random_permutation(rng, base_size)
    gen_value = [rng.randrange(fiber.order()) for _ in range(base_size)]
    zs = ZSkewSystem(
        FinitePartition.uniform_space(base_size), t_perm, fiber, s_perm, gen_value
    )
    if rng.random() < 0.5:
        subs = normal_subgroups(fiber)
        q = SpecialPartition(fiber, subs[rng.randrange(len(subs))]).partition
        return zs, q, True
    return zs, random_partition(rng, fiber.order(), max_blocks=3), False


def random_group_skew_bundle(rng: random.Random, rank: int = 2) -> tuple[SkewBundle, FiniteGroupAction]:
    """A skew bundle with random base action and random finite-group cocycle."""
    fiber_group = preset_group(_FIBER_PRESETS[rng.randrange(len(_FIBER_PRESETS))])
    autos = all_automorphisms(fiber_group)
    fiber = FiniteGroupAction(
        fiber_group, [autos[rng.randrange(len(autos))] for _ in range(rank)], rank
    )
    base = random_finite_action(rng, rank)
    gen_values = [
        [rng.randrange(fiber_group.order()) for _ in range(base.size())]
        for _ in range(rank)
    ]
    cocycle = Cocycle(base, fiber, gen_values)
    return SkewBundle(base, fiber, cocycle), fiber
