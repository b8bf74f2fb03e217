"""Measured free-group processes answering exact window-entropy queries.

A process exposes entropy(W) = H of the coordinate partition joined over
the window W, exactly, together with a certificate string:

    EXACT                entropies computed on a materialized finite model
    EXTENSION-CERTIFIED  kernel marginal backed by the constructive
                         extension proof
    STABILIZED           kernel marginal backed by agreement of two
                         successive enclosing windows

Window results are memoized per canonical window key.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Callable, Mapping, Sequence

from .entropy import (
    EntropyValue,
    FinitePartition,
    conditional_entropy,
    shannon_entropy,
)
from .groups import invert_perm
from .kernels import ConvolutionKernel, KernelSubshift
from .skew import FiniteAction, FiniteGroupAction, SkewBundle
from .words import FreeWord, WordSet, inv, mul

CERT_STRENGTH = {"EXACT": 0, "EXTENSION-CERTIFIED": 1, "STABILIZED": 2, "UPPER-BOUND": 3}


def weakest_certificate(certs) -> str:
    return max(certs, key=lambda c: CERT_STRENGTH[c])


class BernoulliProcess:
    """The shift on K^Gamma with uniform one-coordinate marginals.

    Window entropies have the closed form |W| log k, so every query is
    exact and the per-n functionals are constant in n.
    """

    iid_closed_form = True
    conditional_capable = False

    def __init__(self, rank: int, alphabet_size: int, label: str | None = None):
        if alphabet_size < 1:
            raise ValueError("alphabet must have at least one symbol")
        self.rank = rank
        self.alphabet_size = alphabet_size
        self.label = label or f"bernoulli({alphabet_size})"

    def entropy(self, W: WordSet) -> EntropyValue:
        return len(W) * EntropyValue.log_int(self.alphabet_size)

    def entropy_certificate(self, W: WordSet) -> str:
        return "EXACT"

    def describe(self) -> dict:
        return {"type": "bernoulli", "alphabet": self.alphabet_size, "rank": self.rank}


class FiniteActionProcess:
    """A finite measured free-group action observed through a fixed partition."""

    iid_closed_form = False
    conditional_capable = True

    def __init__(self, action: FiniteAction, partition: FinitePartition, label: str = "finite"):
        if partition.weights != action.weights:
            raise ValueError("partition lives on a different space than the action")
        self.rank = action.rank
        self.action = action
        self.partition = partition
        self.label = label
        self._windows: dict[tuple, FinitePartition] = {}

    def window_partition(self, W: WordSet) -> FinitePartition:
        key = W.key()
        hit = self._windows.get(key)
        if hit is None:
            hit = self.action.window_partition(self.partition, W)
            self._windows[key] = hit
        return hit

    def entropy(self, W: WordSet) -> EntropyValue:
        return shannon_entropy(self.window_partition(W))

    def entropy_certificate(self, W: WordSet) -> str:
        return "EXACT"

    def conditional_entropy(self, W: WordSet, given: FinitePartition) -> EntropyValue:
        return conditional_entropy(self.window_partition(W), given)

    def with_partition(self, partition: FinitePartition, label: str | None = None):
        return FiniteActionProcess(self.action, partition, label or self.label)

    def describe(self) -> dict:
        return {
            "type": "finite-action",
            "atoms": self.action.size(),
            "blocks": self.partition.num_blocks(),
            "rank": self.rank,
            "label": self.label,
        }


class KernelProcess:
    """The Haar system on the kernel subshift of a convolution operator."""

    iid_closed_form = False
    conditional_capable = False

    def __init__(self, kernel: ConvolutionKernel, label: str | None = None, **subshift_kwargs):
        self.kernel = kernel
        self.subshift = KernelSubshift(kernel, **subshift_kwargs)
        self.rank = kernel.rank
        self.label = label or f"ker(phi) {kernel!r}"

    def entropy(self, W: WordSet) -> EntropyValue:
        value, _cert = self.subshift.window_entropy(W)
        return value

    def entropy_certificate(self, W: WordSet) -> str:
        _value, cert = self.subshift.window_entropy(W)
        return cert

    def describe(self) -> dict:
        return {"type": "kernel", "kernel": self.kernel.to_json(), "rank": self.rank}


class SkewProductProcess(FiniteActionProcess):
    """A finite skew product observed through P x Q, with base conditioning.

    Also exposes the base and fiber processes so the two sides of the
    collapse identity can be computed independently.
    """

    def __init__(
        self,
        bundle: SkewBundle,
        base_partition: FinitePartition,
        fiber_partition: FinitePartition,
        label: str = "skew",
    ):
        super().__init__(
            bundle.product,
            bundle.product_partition(base_partition, fiber_partition),
            label,
        )
        self.bundle = bundle
        self.base_partition = base_partition
        self.fiber_partition = fiber_partition
        self._base_marker = bundle.base_marker()

    def base_marker(self) -> FinitePartition:
        return self._base_marker

    def conditional_entropy(self, W: WordSet, given: FinitePartition | None = None) -> EntropyValue:
        marker = self._base_marker if given is None else given
        return conditional_entropy(self.window_partition(W), marker)

    def fiber_process(self) -> FiniteActionProcess:
        return FiniteActionProcess(
            self.bundle.fiber.action, self.fiber_partition, self.label + "/fiber"
        )

    def base_process(self) -> FiniteActionProcess:
        return FiniteActionProcess(self.bundle.base, self.base_partition, self.label + "/base")

    def describe(self) -> dict:
        return {
            "type": "skew-product",
            "base_atoms": self.bundle.base.size(),
            "fiber_order": self.bundle.fiber.size(),
            "rank": self.rank,
            "label": self.label,
        }


class BernoulliBaseSkewProcess:
    """A skew product over a Bernoulli base with a finitely supported cocycle.

    The cocycle generator values read the base configuration on a declared
    dependence window D; window entropies enumerate base patterns on the
    dependency closure, which must stay small.
    """

    iid_closed_form = False
    conditional_capable = True

    def __init__(
        self,
        rank: int,
        base_alphabet: int,
        dependence: WordSet,
        fiber: FiniteGroupAction,
        gen_values: Sequence[Callable[[Mapping[FreeWord, int]], int]],
        fiber_partition: FinitePartition,
        label: str = "bernoulli-skew",
        closure_guard: int = 18,
    ):
        if len(gen_values) != rank:
            raise ValueError("need a cocycle value function per generator")
        self.rank = rank
        self.base_alphabet = base_alphabet
        self.dependence = dependence
        self.fiber = fiber
        self.gen_values = tuple(gen_values)
        self.fiber_partition = fiber_partition
        self.label = label
        self.closure_guard = closure_guard

    def _needed(self, w: FreeWord) -> set[FreeWord]:
        """Base coordinates sigma(w, .) reads."""
        if not w.letters:
            return set()
        t, rest = w.letters[0], FreeWord(w.rank, w.letters[1:])
        if t > 0:
            window = self.dependence
        else:
            window = self.dependence.translate(FreeWord(w.rank, (-t,)))
        rest_inv = inv(rest)
        out = {mul(rest_inv, d) for d in window}
        out |= self._needed(rest)
        return out

    def _sigma(self, w: FreeWord, pattern: Mapping[FreeWord, int]) -> int:
        g = self.fiber.group
        if not w.letters:
            return g.identity
        t = w.letters[0]
        rest = FreeWord(w.rank, w.letters[1:])
        shifted = _shift_pattern(pattern, rest)
        head = self._sigma_letter(t, shifted)
        if not rest.letters:
            return head
        beta_t = self.fiber.action.letter_perm(t)
        return g.mul(beta_t[self._sigma(rest, pattern)], head)

    def _sigma_letter(self, t: int, pattern: Mapping[FreeWord, int]) -> int:
        g = self.fiber.group
        if t > 0:
            return self.gen_values[t - 1](pattern)
        i = -t
        s = FreeWord(self.rank, (i,))
        shifted = _shift_pattern(pattern, inv(s))
        beta_inv = invert_perm(self.fiber.action.gen_perms[i - 1])
        return g.inv(beta_inv[self.gen_values[i - 1](shifted)])

    def _enumerated_partitions(self, W: WordSet) -> tuple[FinitePartition, FinitePartition]:
        """(joint partition, base-marker partition) over enumerated patterns x fiber."""
        closure = set(W)
        for w in W:
            closure |= self._needed(inv(w))
        coords = sorted(closure, key=FreeWord.sort_key)
        if len(coords) > self.closure_guard:
            raise ValueError(f"dependency closure too large ({len(coords)} coordinates)")
        k = self.base_alphabet
        ny = self.fiber.size()
        g = self.fiber.group
        weight = Fraction(1, k ** len(coords) * ny)
        weights = []
        joint_labels = []
        base_labels = []
        w_list = list(W)
        inv_perms = {w: self.fiber.action.word_perm(inv(w)) for w in w_list}
        for values in product(range(k), repeat=len(coords)):
            pattern = dict(zip(coords, values))
            sigmas = {w: self._sigma(inv(w), pattern) for w in w_list}
            base_part = tuple(pattern[w] for w in w_list)
            for y in range(ny):
                weights.append(weight)
                fiber_part = tuple(
                    self.fiber_partition.labels[g.mul(inv_perms[w][y], sigmas[w])]
                    for w in w_list
                )
                joint_labels.append((base_part, fiber_part))
                base_labels.append(values)
        joint = FinitePartition(weights, joint_labels)
        marker = FinitePartition(weights, base_labels)
        return joint, marker

    def entropy(self, W: WordSet) -> EntropyValue:
        joint, _ = self._enumerated_partitions(W)
        return shannon_entropy(joint)

    def entropy_certificate(self, W: WordSet) -> str:
        return "EXACT"

    def conditional_entropy(self, W: WordSet, given=None) -> EntropyValue:
        if given is not None:
            raise ValueError("bernoulli-base skew products condition on the base only")
        joint, marker = self._enumerated_partitions(W)
        return conditional_entropy(joint, marker)

    def describe(self) -> dict:
        return {
            "type": "bernoulli-base-skew",
            "base_alphabet": self.base_alphabet,
            "fiber_order": self.fiber.size(),
            "rank": self.rank,
        }


def _shift_pattern(pattern: Mapping[FreeWord, int], u: FreeWord) -> dict[FreeWord, int]:
    """The pattern of alpha_u x: (alpha_u x)(u c) = x(c) over the known keys."""
    if not u.letters:
        return dict(pattern)
    return {mul(u, c): v for c, v in pattern.items()}


def skew_action(
    base: FiniteAction,
    fiber: FiniteGroupAction,
    cocycle,
    base_partition: FinitePartition | None = None,
    fiber_partition: FinitePartition | None = None,
    label: str = "skew",
) -> SkewProductProcess:
    """The skew-product process on base x fiber observed through P x Q.

    Defaults to the points partitions on both factors.
    """
    bundle = SkewBundle(base, fiber, cocycle)
    if base_partition is None:
        base_partition = FinitePartition.points(base.weights)
    if fiber_partition is None:
        fiber_partition = FinitePartition.points(fiber.action.weights)
    return SkewProductProcess(bundle, base_partition, fiber_partition, label)
