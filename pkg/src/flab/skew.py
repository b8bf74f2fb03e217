"""Skew products of free-group actions over finite bases and finite fiber groups.

A cocycle is determined by its generator values; values on arbitrary
reduced words come from the cocycle identity

    sigma(g h, x) = (beta_g sigma(h, x)) . sigma(g, alpha_h x)

which a free group imposes no relations on.  The skew action moves the
base and then right-multiplies the fiber by the cocycle value.  All
verifiers here are exhaustive and exact: finite spaces make the "up to
measure zero" clauses literal equalities.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from .entropy import (
    EntropyValue,
    FinitePartition,
    check_permutation_preserves,
    conditional_entropy,
    join,
    join_many,
    shannon_entropy,
)
from .groups import FiniteGroup, compose_perms, invert_perm
from .words import FreeWord, WordSet, ball, format_word, identity as word_identity


class FiniteAction:
    """A free-group action on a finite measured space by per-generator bijections."""

    def __init__(self, weights: Sequence[Fraction], gen_perms: Sequence[Sequence[int]], rank: int):
        weights = tuple(Fraction(w) for w in weights)
        if len(gen_perms) != rank:
            raise ValueError("need one permutation per generator")
        perms = tuple(tuple(p) for p in gen_perms)
        for p in perms:
            check_permutation_preserves(weights, p)
        self.weights = weights
        self.rank = rank
        self.gen_perms = perms
        self._inv_perms = tuple(invert_perm(p) for p in perms)
        self._memo: dict[tuple, tuple[int, ...]] = {}

    def size(self) -> int:
        return len(self.weights)

    def letter_perm(self, letter: int) -> tuple[int, ...]:
        return self.gen_perms[letter - 1] if letter > 0 else self._inv_perms[-letter - 1]

    def word_perm(self, w: FreeWord) -> tuple[int, ...]:
        """alpha_w as a permutation; alpha_{uv} = alpha_u after alpha_v."""
        key = w.letters
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if not key:
            perm = tuple(range(self.size()))
        else:
            rest = self.word_perm(FreeWord(w.rank, key[1:]))
            perm = compose_perms(self.letter_perm(key[0]), rest)
        self._memo[key] = perm
        return perm

    def window_partition(self, p: FinitePartition, W: WordSet) -> FinitePartition:
        """P^W: the join of alpha_w P over the window."""
        return join_many(p.apply_permutation(self.word_perm(w)) for w in W)


class FiniteGroupAction:
    """A free-group action on a finite group by automorphisms, with Haar measure."""

    def __init__(self, group: FiniteGroup, auto_perms: Sequence[Sequence[int]], rank: int):
        for p in auto_perms:
            if not group.is_automorphism(p):
                raise ValueError("generator image is not a group automorphism")
        self.group = group
        self.rank = rank
        self.action = FiniteAction(
            FinitePartition.uniform_space(group.order()), auto_perms, rank
        )

    def size(self) -> int:
        return self.group.order()

    def subgroup_invariant(self, sub: frozenset[int]) -> bool:
        return all(
            frozenset(p[x] for x in sub) == sub for p in self.action.gen_perms
        )


class SpecialPartition:
    """The partition of a finite group into cosets of a normal subgroup."""

    def __init__(self, group: FiniteGroup, subgroup: frozenset[int]):
        if not group.is_normal(subgroup):
            raise ValueError("special partitions need a normal subgroup")
        self.group = group
        self.subgroup = subgroup
        labels = [0] * group.order()
        for i, coset in enumerate(group.left_cosets(subgroup)):
            for x in coset:
                labels[x] = i
        self.partition = FinitePartition(
            FinitePartition.uniform_space(group.order()), labels
        )


def is_special(group: FiniteGroup, p: FinitePartition) -> bool:
    """Structural check: blocks are exactly the cosets of a normal subgroup."""
    block_of_identity = frozenset(
        x for x in range(group.order()) if p.labels[x] == p.labels[group.identity]
    )
    if not group.is_normal(block_of_identity):
        return False
    expected = SpecialPartition(group, block_of_identity).partition
    return p.equal_mod_null(expected)


class Cocycle:
    """A cocycle for (base, fiber) actions, given by its generator values."""

    def __init__(
        self,
        base: FiniteAction,
        fiber: FiniteGroupAction,
        gen_values: Sequence[Sequence[int]],
    ):
        if len(gen_values) != base.rank:
            raise ValueError("need cocycle values for every generator")
        for vals in gen_values:
            if len(vals) != base.size():
                raise ValueError("cocycle table must cover every base point")
        self.base = base
        self.fiber = fiber
        self.gen_values = tuple(tuple(v) for v in gen_values)
        self._memo: dict[tuple, tuple[int, ...]] = {}

    def _letter_values(self, letter: int) -> tuple[int, ...]:
        g = self.fiber.group
        if letter > 0:
            return self.gen_values[letter - 1]
        i = -letter
        beta_inv = invert_perm(self.fiber.action.gen_perms[i - 1])
        alpha_inv = invert_perm(self.base.gen_perms[i - 1])
        vals = self.gen_values[i - 1]
        # sigma(s^-1, x) = (beta_s^-1 sigma(s, alpha_s^-1 x))^-1
        return tuple(g.inv(beta_inv[vals[alpha_inv[x]]]) for x in range(self.base.size()))

    def values(self, w: FreeWord) -> tuple[int, ...]:
        """sigma(w, .) as a table over base points."""
        key = w.letters
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        g = self.fiber.group
        if not key:
            out = tuple(g.identity for _ in range(self.base.size()))
        elif len(key) == 1:
            out = self._letter_values(key[0])
        else:
            t, rest = key[0], FreeWord(w.rank, key[1:])
            rest_vals = self.values(rest)
            head_vals = self._letter_values(t)
            beta_t = self.fiber.action.letter_perm(t)
            alpha_rest = self.base.word_perm(rest)
            out = tuple(
                g.mul(beta_t[rest_vals[x]], head_vals[alpha_rest[x]])
                for x in range(self.base.size())
            )
        self._memo[key] = out
        return out

    def sigma(self, w: FreeWord, x: int) -> int:
        return self.values(w)[x]


def verify_cocycle_identity(
    sigma: Callable[[FreeWord, int], int],
    base: FiniteAction,
    fiber: FiniteGroupAction,
    max_len: int = 3,
) -> tuple[bool, dict | None]:
    """Exhaustive check of the cocycle identity over pairs of words.

    Returns (ok, witness); the witness names the first failing (g, h, x).
    """
    g_group = fiber.group
    rank = base.rank
    words = list(ball(rank, max_len))
    for g in words:
        beta_g = fiber.action.word_perm(g)
        for h in words:
            gh = FreeWord(rank, g.letters + h.letters)
            alpha_h = base.word_perm(h)
            for x in range(base.size()):
                lhs = sigma(gh, x)
                rhs = g_group.mul(beta_g[sigma(h, x)], sigma(g, alpha_h[x]))
                if lhs != rhs:
                    return False, {
                        "g": format_word(g),
                        "h": format_word(h),
                        "x": x,
                        "lhs": g_group.labels[lhs],
                        "rhs": g_group.labels[rhs],
                    }
    return True, None


class SkewBundle:
    """The skew product action on base x fiber, with its lifted partitions."""

    def __init__(self, base: FiniteAction, fiber: FiniteGroupAction, cocycle: Cocycle):
        if base.rank != fiber.rank:
            raise ValueError("base and fiber must share the acting group rank")
        self.base = base
        self.fiber = fiber
        self.cocycle = cocycle
        nx, ny = base.size(), fiber.size()
        g = fiber.group
        weights = []
        for x in range(nx):
            for y in range(ny):
                weights.append(base.weights[x] * Fraction(1, ny))
        perms = []
        for i in range(base.rank):
            alpha = base.gen_perms[i]
            beta = fiber.action.gen_perms[i]
            vals = cocycle.gen_values[i]
            perm = [0] * (nx * ny)
            for x in range(nx):
                for y in range(ny):
                    perm[x * ny + y] = alpha[x] * ny + g.mul(beta[y], vals[x])
            perms.append(perm)
        self.product = FiniteAction(weights, perms, base.rank)
        self._ny = ny

    def encode(self, x: int, y: int) -> int:
        return x * self._ny + y

    def lift_base(self, p: FinitePartition) -> FinitePartition:
        labels = []
        for x in range(self.base.size()):
            labels.extend([p.labels[x]] * self._ny)
        return FinitePartition(self.product.weights, labels)

    def lift_fiber(self, q: FinitePartition) -> FinitePartition:
        labels = []
        for _x in range(self.base.size()):
            labels.extend(q.labels)
        return FinitePartition(self.product.weights, labels)

    def base_marker(self) -> FinitePartition:
        """B_X as a partition of the product: one block per base point."""
        return self.lift_base(FinitePartition.points(self.base.weights))

    def product_partition(self, p: FinitePartition, q: FinitePartition) -> FinitePartition:
        return join(self.lift_base(p), self.lift_fiber(q))

    def pullback_partition(self, g: FreeWord, q: FinitePartition) -> FinitePartition:
        """P_g: the base partition pulling beta_g(Q) back under sigma(g, .)."""
        beta_gq = q.apply_permutation(self.fiber.action.word_perm(g))
        vals = self.cocycle.values(g)
        return FinitePartition(
            self.base.weights,
            [beta_gq.labels[vals[x]] for x in range(self.base.size())],
        )


# -- the section cocycle realizing quotient-by-subgroup as a skew product ----


def subgroup_as_group(g: FiniteGroup, sub: frozenset[int]) -> tuple[FiniteGroup, dict[int, int]]:
    elems = sorted(sub)
    to_local = {e: i for i, e in enumerate(elems)}
    table = [[to_local[g.mul(a, b)] for b in elems] for a in elems]
    return FiniteGroup(f"{g.name}|sub", [g.labels[e] for e in elems], table), to_local


def quotient_group(g: FiniteGroup, sub: frozenset[int]) -> tuple[FiniteGroup, list[int], list[frozenset[int]]]:
    """(G/N, coset index per element, coset list); requires N normal."""
    if not g.is_normal(sub):
        raise ValueError("quotient needs a normal subgroup")
    cosets = g.left_cosets(sub)
    coset_of = [0] * g.order()
    for i, coset in enumerate(cosets):
        for x in coset:
            coset_of[x] = i
    reps = [min(c) for c in cosets]
    table = [
        [coset_of[g.mul(reps[a], reps[b])] for b in range(len(cosets))]
        for a in range(len(cosets))
    ]
    q = FiniteGroup(f"{g.name}/N", [g.labels[r] for r in reps], table)
    return q, coset_of, cosets


class SectionCocycleBundle:
    """Skew realization of a group action along an invariant normal subgroup.

    Splits G into base G/N and fiber N through the least-representative
    section s, with sigma(g, c) = alpha_g(s(c)) . s(alpha_g c)^{-1}, and
    carries the conjugacy Phi(c, n) = n . s(c) used to verify the
    realization is measurably the original action.
    """

    def __init__(self, ga: FiniteGroupAction, sub: frozenset[int]):
        g = ga.group
        if not g.is_normal(sub):
            raise ValueError("subgroup is not normal")
        if not ga.subgroup_invariant(sub):
            raise ValueError("subgroup is not invariant under the action")
        self.parent = ga
        self.sub = sub
        fiber_group, to_local = subgroup_as_group(g, sub)
        quot, coset_of, cosets = quotient_group(g, sub)
        self.coset_of = coset_of
        self.section = [min(c) for c in cosets]

        base_perms = []
        fiber_perms = []
        gen_values = []
        for perm in ga.action.gen_perms:
            base_perms.append([coset_of[perm[self.section[c]]] for c in range(len(cosets))])
            fiber_perms.append([to_local[perm[e]] for e in sorted(sub)])
            vals = []
            for c in range(len(cosets)):
                moved = perm[self.section[c]]
                target_rep = self.section[coset_of[moved]]
                vals.append(to_local[g.mul(moved, g.inv(target_rep))])
            gen_values.append(vals)

        self.quotient = quot
        self.fiber_group = fiber_group
        self._to_local = to_local
        self._from_local = sorted(sub)
        self.base_action = FiniteAction(
            FinitePartition.uniform_space(len(cosets)), base_perms, ga.rank
        )
        self.fiber_action = FiniteGroupAction(fiber_group, fiber_perms, ga.rank)
        self.cocycle = Cocycle(self.base_action, self.fiber_action, gen_values)
        self.skew = SkewBundle(self.base_action, self.fiber_action, self.cocycle)

    def phi(self, c: int, n_local: int) -> int:
        """The intertwining bijection (coset, fiber) -> parent element."""
        return self.parent.group.mul(self._from_local[n_local], self.section[c])

    def verify_conjugacy(self, max_len: int = 3) -> tuple[bool, dict | None]:
        """Phi intertwines the skew action with the original one, exhaustively."""
        g = self.parent.group
        ny = self.fiber_group.order()
        phi_flat = [
            self.phi(c, n) for c in range(self.base_action.size()) for n in range(ny)
        ]
        if sorted(phi_flat) != list(range(g.order())):
            return False, {"reason": "phi is not a bijection"}
        for w in ball(self.parent.rank, max_len):
            skew_perm = self.skew.product.word_perm(w)
            parent_perm = self.parent.action.word_perm(w)
            for idx in range(len(phi_flat)):
                if phi_flat[skew_perm[idx]] != parent_perm[phi_flat[idx]]:
                    c, n = divmod(idx, ny)
                    return False, {
                        "word": format_word(w),
                        "coset": c,
                        "fiber": self.fiber_group.labels[n],
                    }
        return True, None


def cocycle_from_section(ga: FiniteGroupAction, sub: frozenset[int]) -> SectionCocycleBundle:
    return SectionCocycleBundle(ga, sub)


# -- partition functionals ----------------------------------------------------


def right_translate(group: FiniteGroup, q: FinitePartition, g: int) -> FinitePartition:
    """Q g = {A g : A in Q}."""
    perm = tuple(group.mul(x, g) for x in range(group.order()))
    return q.apply_permutation(perm)


def K_of(q: FinitePartition, group: FiniteGroup) -> EntropyValue:
    """sup over group elements of H(Qg | Q) + H(Q | Qg); zero iff Q is
    invariant under every right translation."""
    best = EntropyValue.zero()
    for g in range(group.order()):
        qg = right_translate(group, q, g)
        value = conditional_entropy(qg, q) + conditional_entropy(q, qg)
        if value > best:
            best = value
    return best


def sigma_generated(action: FiniteAction, q: FinitePartition) -> FinitePartition:
    """Smallest action-invariant partition algebra containing q (as a partition)."""
    current = q
    letters = [i for i in range(1, action.rank + 1)] + [
        -i for i in range(1, action.rank + 1)
    ]
    while True:
        nxt = current
        for letter in letters:
            nxt = join(nxt, current.apply_permutation(action.letter_perm(letter)))
        if nxt.equal_mod_null(current):
            return current
        current = nxt


def join_special(
    group: FiniteGroup, items: Sequence[tuple[Sequence[int], SpecialPartition]]
) -> SpecialPartition:
    """The join of automorphism images T_i Q_i, verified to be special again.

    The resulting blocks are the cosets of the intersection of the T_i(N_i).
    """
    parts = []
    expected: set[int] | None = None
    for perm, sp in items:
        if not group.is_automorphism(perm):
            raise ValueError("translate by a non-automorphism")
        parts.append(sp.partition.apply_permutation(perm))
        image = {perm[x] for x in sp.subgroup}
        expected = image if expected is None else (expected & image)
    joined = join_many(parts)
    block = frozenset(
        x for x in range(group.order()) if joined.labels[x] == joined.labels[group.identity]
    )
    if block != frozenset(expected):
        raise AssertionError("joined identity block is not the intersected subgroup")
    result = SpecialPartition(group, block)
    if not joined.equal_mod_null(result.partition):
        raise AssertionError("join of special partitions failed to be special")
    return result


# -- executable partition-identity verifiers -----------------------------------


def verify_pullback_exchange(
    bundle: SkewBundle,
    g: FreeWord,
    special_q: SpecialPartition,
    p_prime: FinitePartition,
) -> bool:
    """Moving (P_g v P') x Q by the skew action equals moving both factors
    separately: exact partition identity on the finite product space."""
    q = special_q.partition
    p_g = bundle.pullback_partition(g, q)
    combined = join(p_g, p_prime)
    lhs = bundle.product_partition(combined, q).apply_permutation(
        bundle.product.word_perm(g)
    )
    rhs = join(
        bundle.lift_base(combined.apply_permutation(bundle.base.word_perm(g))),
        bundle.lift_fiber(q.apply_permutation(bundle.fiber.action.word_perm(g))),
    )
    return lhs.equal_mod_null(rhs)


def verify_generated_algebra(
    bundle: SkewBundle, p_base: FinitePartition, special_q: SpecialPartition
) -> bool:
    """The invariant algebra of P x Q equals the one generated by
    B_X x Sigma(Q), for generating base partitions."""
    if not sigma_generated(bundle.base, p_base).equal_mod_null(
        FinitePartition.points(bundle.base.weights)
    ):
        raise ValueError("base partition is not generating")
    lhs = sigma_generated(
        bundle.product, bundle.product_partition(p_base, special_q.partition)
    )
    sigma_q = sigma_generated(bundle.fiber.action, special_q.partition)
    rhs = join(bundle.base_marker(), bundle.lift_fiber(sigma_q))
    return lhs.equal_mod_null(rhs)


def verify_window_split(
    bundle: SkewBundle, n: int, p_base: FinitePartition, special_q: SpecialPartition
) -> bool:
    """((P v R_n) x Q)^{B(n)} splits as (P v R_n)^{B(n)} x Q^{B(n)}."""
    q = special_q.partition
    window = ball(bundle.base.rank, n)
    r_n = join_many(bundle.pullback_partition(g, q) for g in window)
    enriched = join(p_base, r_n)
    lhs = bundle.product.window_partition(
        bundle.product_partition(enriched, q), window
    )
    rhs = join(
        bundle.lift_base(bundle.base.window_partition(enriched, window)),
        bundle.lift_fiber(bundle.fiber.action.window_partition(q, window)),
    )
    return lhs.equal_mod_null(rhs)


# -- integer-time skew systems (the key one-dimensional inequality) -----------


class ZSkewSystem:
    """A skew product over a single transformation with a finite fiber group."""

    def __init__(
        self,
        weights: Sequence[Fraction],
        t_perm: Sequence[int],
        fiber: FiniteGroup,
        s_perm: Sequence[int],
        gen_value: Sequence[int],
    ):
        weights = tuple(Fraction(w) for w in weights)
        check_permutation_preserves(weights, t_perm)
        if not fiber.is_automorphism(s_perm):
            raise ValueError("S must be a group automorphism")
        if len(gen_value) != len(weights):
            raise ValueError("cocycle value needed at every base point")
        self.weights = weights
        self.t_perm = tuple(t_perm)
        self.fiber = fiber
        self.s_perm = tuple(s_perm)
        self.gen_value = tuple(gen_value)

    def sigma(self, k: int, x: int) -> int:
        """sigma(k, x) for k >= 0 via sigma(k, x) = S^{k-1} sigma(1, x) . sigma(k-1, Tx)."""
        if k < 0:
            raise ValueError("only forward times are needed here")
        g = self.fiber
        if k == 0:
            return g.identity
        img = self.gen_value[x]
        for _ in range(k - 1):
            img = self.s_perm[img]
        return g.mul(img, self.sigma(k - 1, self.t_perm[x]))

    def s_power_perm(self, k: int) -> tuple[int, ...]:
        perm = tuple(range(self.fiber.order()))
        step = self.s_perm if k >= 0 else invert_perm(self.s_perm)
        for _ in range(abs(k)):
            perm = compose_perms(step, perm)
        return perm

    def q_m(self, q: FinitePartition, m: int) -> FinitePartition:
        """Q^m = join of S^{-k} Q for 0 <= k < m."""
        return join_many(
            q.apply_permutation(self.s_power_perm(-k)) for k in range(m)
        )

    def q_m_twisted(self, q: FinitePartition, m: int, x: int) -> FinitePartition:
        """Q_x^m = join of S^{-k}(Q sigma(k,x)^{-1})."""
        parts = []
        for k in range(m):
            t = self.fiber.inv(self.sigma(k, x))
            translated = right_translate(self.fiber, q, t)
            parts.append(translated.apply_permutation(self.s_power_perm(-k)))
        return join_many(parts)


def verify_skew_entropy_bound(
    zs: ZSkewSystem, q: FinitePartition, m_max: int
) -> list[dict]:
    """|H(Q^m) - H(Q_x^m)| <= m K(Q) for every base point and m <= m_max.

    Returns one record per (x, m) with both sides and whether equality held.
    """
    k_q = K_of(q, zs.fiber)
    records = []
    for m in range(1, m_max + 1):
        h_plain = shannon_entropy(zs.q_m(q, m))
        bound = m * k_q
        for x in range(len(zs.weights)):
            h_twisted = shannon_entropy(zs.q_m_twisted(q, m, x))
            diff = h_plain - h_twisted
            ok = diff <= bound and (-1 * diff) <= bound
            records.append(
                {
                    "m": m,
                    "x": x,
                    "h_plain": h_plain,
                    "h_twisted": h_twisted,
                    "k_q": k_q,
                    "holds": ok,
                    "equal": diff.is_zero(),
                }
            )
    return records
