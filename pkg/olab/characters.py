"""Exact character tables of small permutation groups and the scans built on them.

Tables are computed with Dixon's modular method: the class matrices are
simultaneously diagonalized over F_p with p = 1 (mod e), the normalized rows are
lifted to Z[zeta_e] through eigenvalue multiplicities, and the lifted table is
accepted only after both orthogonality relations hold exactly.
"""

import json
import logging
from dataclasses import dataclass, field
from math import lcm

from sympy import FiniteField, Poly, Symbol, nextprime, primitive_root, sqrt_mod
from sympy.combinatorics import Permutation, PermutationGroup
from sympy.polys.matrices import DomainMatrix

from olab.config import load_limits
from olab.cyclotomic import Cyclotomic
from olab.errors import CharacterError, LiftFailureError, PreconditionError
from olab.groups import (
    ConjugacyClass,
    check_order,
    conjugacy_classes,
    enumerate_elements,
    orbit_of_tuple,
)
from olab.models import IrrepLabel

logger = logging.getLogger(__name__)


@dataclass
class CharacterTable:
    group: PermutationGroup = field(repr=False)
    classes: list[ConjugacyClass] = field(repr=False)
    exponent: int
    prime: int
    values: list[list[Cyclotomic]]  # [irrep][class]
    lookup: dict[tuple[int, ...], int] = field(repr=False)  # array form -> class

    @property
    def order(self) -> int:
        return sum(c.size for c in self.classes)

    @property
    def degrees(self) -> list[int]:
        return [row[0].to_int() for row in self.values]

    def __len__(self) -> int:
        return len(self.values)

    def class_of(self, g: Permutation) -> int:
        return self.lookup[tuple(g.array_form)]

    def label(self, i: int, standard: bool | None = None) -> IrrepLabel:
        return IrrepLabel(index=i, degree=self.degrees[i], standard=standard)

    def is_trivial(self, i: int) -> bool:
        one = Cyclotomic.from_int(self.exponent, 1)
        return all(v == one for v in self.values[i])

    def inner(self, a: list[Cyclotomic], b: list[Cyclotomic]) -> int:
        """<a, b> = (1/|G|) sum_c |c| a(c) conj(b(c)), required to be an integer."""
        total = Cyclotomic.from_int(self.exponent, 0)
        for cls, x, y in zip(self.classes, a, b, strict=True):
            total = total + x * y.conjugate() * cls.size
        return total.exact_div(self.order).to_int()


# Modular phase


def _class_matrices(classes: list[ConjugacyClass], lookup) -> list[list[list[int]]]:
    """M_r[i][t] = #{g in C_r : rep_t * g in C_i}."""
    n = len(classes)
    reps = [c.representative.array_form for c in classes]
    matrices = []
    for cls in classes:
        m = [[0] * n for _ in range(n)]
        for g in cls.elements:
            af = g.array_form
            for t, rep in enumerate(reps):
                m[lookup[tuple(rep[x] for x in af)]][t] += 1
        matrices.append(m)
    return matrices


def _eigenspaces(a: DomainMatrix) -> list[DomainMatrix]:
    a = a.transpose()
    fp = a.domain
    charpoly = Poly(a.charpoly(), Symbol("x"), domain=fp)
    spaces = []
    for z in charpoly.ground_roots():
        b = a - a.diag([fp(z)] * a.shape[0], fp)
        basis, _ = b.nullspace().rref()
        spaces.append(basis)
    return spaces


def _common_eigenspaces(
    matrices: list[list[list[int]]], fp
) -> list[DomainMatrix] | None:
    n = len(matrices)
    spaces = _eigenspaces(DomainMatrix.from_list(matrices[0], fp))
    for m in matrices[1:]:
        if len(spaces) == n:
            break
        dm = DomainMatrix.from_list(m, fp)
        refined = []
        for s in spaces:
            if s.shape[0] <= 1:
                refined.append(s)
                continue
            _, pivots = s.rref()
            restricted = dm.extract(range(s.shape[1]), pivots)
            refined += [sub * s for sub in _eigenspaces(s * restricted)]
        spaces = refined
    if len(spaces) != n or any(s.shape[0] != 1 for s in spaces):
        return None
    return spaces


def _normalize(classes: list[ConjugacyClass], inverse: list[int], rows, fp, p: int):
    order = fp(sum(c.size for c in classes))
    sizes = [fp(c.size) for c in classes]
    normalized = []
    for row in rows:
        if int(row[0]) % p == 0:
            return None
        row = [x / row[0] for x in row]
        dot = sum((sizes[k] * row[k] * row[inverse[k]] for k in range(len(row))), fp(0))
        if int(dot) % p == 0:
            return None
        root = sqrt_mod(int(order / dot) % p, p)
        if root is None:
            return None
        # the degree is the smaller square root because p > 4|G|
        degree = fp(min(root, p - root))
        normalized.append([x * degree for x in row])
    return normalized


def _power_map(classes: list[ConjugacyClass], lookup, e: int) -> list[list[int]]:
    """pm[t][j] = class of rep_t^j."""
    pm = []
    for cls in classes:
        g = cls.representative.array_form
        power = list(range(len(g)))
        row = []
        for _ in range(e):
            row.append(lookup[tuple(power)])
            power = [g[x] for x in power]
        pm.append(row)
    return pm


def _lift(normalized, pm, e: int, p: int) -> list[list[Cyclotomic]] | None:
    """Recover eigenvalue multiplicities m_k of rho(g) and return sum_k m_k zeta^k."""
    z = pow(primitive_root(p), (p - 1) // e, p)
    e_inv = pow(e, -1, p)
    table = []
    for row in normalized:
        values = [int(x) % p for x in row]
        degree = values[0]
        lifted = []
        for t in range(len(values)):
            chi = [values[pm[t][j]] for j in range(e)]
            multiplicities = []
            for k in range(e):
                w = pow(z, (-k) % e, p)
                acc = sum(c * pow(w, j, p) for j, c in enumerate(chi)) % p
                multiplicities.append(acc * e_inv % p)
            if any(m > degree for m in multiplicities) or sum(multiplicities) != degree:
                return None
            lifted.append(Cyclotomic.from_multiplicities(e, multiplicities))
        table.append(lifted)
    return table


def dixon_prime(order: int, exponent: int, after: int | None = None) -> int:
    """Smallest prime p = 1 (mod exponent) above 4|G| (or above `after`)."""
    p = 4 * order if after is None else after
    while True:
        p = nextprime(p)
        if p % exponent == 1:
            return p


def _verify(table: CharacterTable) -> bool:
    n = len(table)
    order = table.order
    if sum(d * d for d in table.degrees) != order:
        return False
    if any(order % d for d in table.degrees):
        return False
    try:
        for i in range(n):
            for j in range(i, n):
                if table.inner(table.values[i], table.values[j]) != int(i == j):
                    return False
        for s in range(n):
            for t in range(s, n):
                total = Cyclotomic.from_int(table.exponent, 0)
                for row in table.values:
                    total = total + row[s] * row[t].conjugate()
                expected = order // table.classes[s].size if s == t else 0
                if total != Cyclotomic.from_int(table.exponent, expected):
                    return False
    except CharacterError:
        return False
    return True


def _row_key(e: int):
    one = Cyclotomic.from_int(e, 1)

    def key(row: list[Cyclotomic]):
        trivial = all(v == one for v in row)
        return (row[0].to_int(), not trivial, [v.coeffs for v in row])

    return key


def character_table(group: PermutationGroup) -> CharacterTable:
    """Exact character table, rows sorted by degree with the trivial character first.

    Raises:
        CapacityError: If the group or its class count exceeds the configured caps.
        LiftFailureError: If no attempted prime yields a verified table.
    """
    limits = load_limits()
    order = check_order(group)
    classes = conjugacy_classes(group)
    lookup = {tuple(g.array_form): i for i, c in enumerate(classes) for g in c.elements}
    inverse = [lookup[tuple((~c.representative).array_form)] for c in classes]
    e = lcm(*(int(c.representative.order()) for c in classes))
    matrices = _class_matrices(classes, lookup)
    pm = _power_map(classes, lookup, e)

    p = dixon_prime(order, e)
    for attempt in range(limits.prime_attempts):
        fp = FiniteField(p)
        spaces = _common_eigenspaces(matrices, fp)
        normalized = None
        if spaces is not None:
            rows = [s.to_list()[0] for s in spaces]
            normalized = _normalize(classes, inverse, rows, fp, p)
        values = _lift(normalized, pm, e, p) if normalized is not None else None
        if values is not None:
            values.sort(key=_row_key(e))
            table = CharacterTable(group, classes, e, p, values, lookup)
            if _verify(table):
                logger.debug(
                    "Character table of order %d: %d classes, p=%d",
                    order,
                    len(classes),
                    p,
                )
                return table
        logger.warning(
            "Prime %d failed for group of order %d (attempt %d)", p, order, attempt + 1
        )
        p = dixon_prime(order, e, after=p)
    raise LiftFailureError(
        f"No verified character table after {limits.prime_attempts} primes "
        f"(|G|={order}, e={e})"
    )


# Scans


def class_counts(table: CharacterTable, h: PermutationGroup) -> list[int]:
    """How many elements of H fall in each class of G.

    Raises:
        PreconditionError: If H is not contained in G.
    """
    counts = [0] * len(table.classes)
    for g in enumerate_elements(h):
        key = tuple(g.array_form)
        if key not in table.lookup:
            raise PreconditionError(f"Subgroup element {g.cyclic_form} is not in G")
        counts[table.lookup[key]] += 1
    return counts


def _fixed_from_counts(table: CharacterTable, i: int, counts: list[int]) -> int:
    total = Cyclotomic.from_int(table.exponent, 0)
    for value, count in zip(table.values[i], counts, strict=True):
        if count:
            total = total + value * count
    multiplicity = total.exact_div(sum(counts)).to_int()
    if multiplicity < 0:
        raise CharacterError(f"Negative fixed multiplicity {multiplicity} (irrep {i})")
    return multiplicity


def fixed_multiplicity(table: CharacterTable, i: int, h: PermutationGroup) -> int:
    """dim of the H-fixed subspace of irrep i, (1/|H|) sum_h chi_i(h)."""
    return _fixed_from_counts(table, i, class_counts(table, h))


def standard_reps(
    table: CharacterTable, family: list[PermutationGroup]
) -> list[IrrepLabel]:
    """Irreps without nonzero fixed vectors for every subgroup in `family`."""
    counts = [class_counts(table, h) for h in family]
    return [
        table.label(i, standard=True)
        for i in range(len(table))
        if all(_fixed_from_counts(table, i, c) == 0 for c in counts)
    ]


def permutation_character_split(table: CharacterTable, points: list[int]) -> list[int]:
    """Multiplicity of each irrep in the permutation character on `points`."""
    e = table.exponent
    pi = [
        Cyclotomic.from_int(e, sum(1 for x in points if c.representative(x) == x))
        for c in table.classes
    ]
    return [table.inner(pi, row) for row in table.values]


def two_transitive_witness(
    group: PermutationGroup, points: list[int]
) -> IrrepLabel | None:
    """An irrep with no fixed vector under a point stabilizer of a 2-transitive action.

    Returns None when the action is not 2-transitive or |G| <= 2.

    Raises:
        PreconditionError: If G is not transitive on `points`.
    """
    points = sorted(points)
    if not points or set(group.orbit(points[0])) != set(points):
        raise PreconditionError(f"Group is not transitive on {points}")
    n = len(points)
    if n < 2 or check_order(group) <= 2:
        return None
    if len(orbit_of_tuple(group, (points[0], points[1]))) != n * (n - 1):
        return None
    table = character_table(group)
    split = permutation_character_split(table, points)
    others = [i for i, m in enumerate(split) if m and not table.is_trivial(i)]
    trivial_mult = sum(m for i, m in enumerate(split) if table.is_trivial(i))
    if trivial_mult != 1 or len(others) != 1 or split[others[0]] != 1:
        raise CharacterError(f"Permutation character on {points} is not 1 + psi")
    stab = group.stabilizer(points[0])
    for i in range(len(table)):
        if fixed_multiplicity(table, i, stab) == 0:
            return table.label(i, standard=True)
    return None


def _check_product_preconditions(
    group: PermutationGroup, subgroups: list[PermutationGroup]
) -> None:
    orders = [int(h.order()) for h in subgroups]
    for a in range(len(subgroups)):
        for b in range(a + 1, len(subgroups)):
            ha, hb = subgroups[a], subgroups[b]
            for x in ha.generators:
                for y in hb.generators:
                    if x * y != y * x:
                        raise PreconditionError(f"H_{a} and H_{b} do not commute")
            joined = PermutationGroup(list(ha.generators) + list(hb.generators))
            if int(joined.order()) != orders[a] * orders[b]:
                raise PreconditionError(f"H_{a} and H_{b} intersect nontrivially")
    for g in group.generators:
        for a, h in enumerate(subgroups):
            conjugate = PermutationGroup([~g * x * g for x in h.generators])
            if not any(
                orders[b] == orders[a]
                and all(other.contains(x) for x in conjugate.generators)
                for b, other in enumerate(subgroups)
            ):
                raise PreconditionError(f"Conjugation moves H_{a} off the list")


def direct_product_witness(
    group: PermutationGroup, subgroups: list[PermutationGroup]
) -> IrrepLabel | None:
    """An irrep without nonzero fixed vectors for every H_i, by exhaustive scan.

    Raises:
        PreconditionError: If a pair of subgroups fails the commuting or
            trivial-intersection checks, or G does not permute the list.
    """
    _check_product_preconditions(group, subgroups)
    table = character_table(group)
    standard = standard_reps(table, subgroups)
    if standard:
        return standard[0]
    if all(int(h.order()) > 1 for h in subgroups):
        logger.warning(
            "No irrep avoids fixed vectors of all %d subgroups "
            "(counterexample candidate)",
            len(subgroups),
        )
    return None


def dump_table(table: CharacterTable) -> str:
    data = {
        "exponent": table.exponent,
        "prime": table.prime,
        "classes": [
            {"representative": c.representative.array_form, "size": c.size}
            for c in table.classes
        ],
        "degrees": table.degrees,
        "values": [[list(v.coeffs) for v in row] for row in table.values],
    }
    return json.dumps(data, indent=2, sort_keys=True)
