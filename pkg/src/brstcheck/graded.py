"""Free super-commutative bigraded polynomial algebra over exact rationals.

Every quantity handled by the engine lives here: scalar field components,
coordinate differentials dx^mu, ghost components and the diffeomorphism
ghost xi^mu, all with jet prolongations (symmetrized partial-derivative
multi-indices).  An Expr is a normal-form linear combination of monomials;
odd generators anticommute and square to zero, the sign bookkeeping is a
single Koszul sign by total degree (form + ghost).

Coefficients are fractions.Fraction throughout; there is no floating point
anywhere in the identity-checking path.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Union

# generator kinds, in canonical sort order: even field components first,
# then coordinate differentials, then gauge ghosts, then diffeo ghosts
KIND_FIELD = "field"
KIND_DX = "dx"
KIND_GHOST = "ghost"
KIND_XI = "xi"

_KIND_RANK = {KIND_FIELD: 0, KIND_DX: 1, KIND_GHOST: 2, KIND_XI: 3}

Rational = Union[Fraction, int]


class GradedError(Exception):
    """Base class for algebra errors."""


class TruncationError(GradedError):
    """Jet order of a generator would exceed the configured truncation."""


class UndefinedActionError(GradedError):
    """A derivation has no rule for a generator it was applied to."""


class ParityError(GradedError):
    """A substitution image does not match the parity of its generator."""


class Generator:
    """One symbol: name, index tuple, sorted jet multi-index, bidegree, kind.

    Instances are interned; construction goes through :func:`gen`.
    """

    __slots__ = ("name", "indices", "jet", "form", "ghost", "kind", "_key", "_hash")

    def __init__(self, name, indices, jet, form, ghost, kind):
        self.name = name
        self.indices = indices
        self.jet = jet
        self.form = form
        self.ghost = ghost
        self.kind = kind
        self._key = (_KIND_RANK[kind], name, indices, jet, form, ghost)
        self._hash = hash(self._key)

    @property
    def parity(self):
        return (self.form + self.ghost) & 1

    @property
    def bidegree(self):
        return (self.form, self.ghost)

    def sort_key(self):
        return self._key

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Generator):
            return NotImplemented
        return self._key == other._key

    def __repr__(self):
        return self.render()

    def render(self):
        if self.kind == KIND_DX:
            return "dx%d" % self.indices[0]
        base = self.name
        if self.indices:
            base += "(" + ",".join(str(i) for i in self.indices) + ")"
        if self.jet:
            base += ".d" + "".join(str(i) for i in self.jet)
        return base


_GEN_CACHE: dict = {}


def gen(name, indices=(), jet=(), form=0, ghost=0, kind=KIND_FIELD):
    """Interning constructor; jets are sorted (mixed partials commute)."""
    key = (name, tuple(indices), tuple(sorted(jet)), form, ghost, kind)
    g = _GEN_CACHE.get(key)
    if g is None:
        g = Generator(key[0], key[1], key[2], form, ghost, kind)
        _GEN_CACHE[key] = g
    return g


def _normalize_monomial(gens):
    """Sort generators into canonical order, tracking the Koszul sign.

    Returns (sign, tuple) or None when the monomial vanishes (an odd
    generator repeated).  Only transpositions of two odd generators flip
    the sign; even generators commute freely.
    """
    lst = list(gens)
    sign = 1
    # insertion sort; monomials are short
    for i in range(1, len(lst)):
        g = lst[i]
        k = g.sort_key()
        j = i - 1
        while j >= 0 and lst[j].sort_key() > k:
            if g.parity and lst[j].parity:
                sign = -sign
            lst[j + 1] = lst[j]
            j -= 1
        lst[j + 1] = g
    for a, b in zip(lst, lst[1:]):
        if a is b and a.parity:
            return None
        if a == b and a.parity:
            return None
    return sign, tuple(lst)


def _mono_sort_key(mono):
    return (len(mono),) + tuple(g.sort_key() for g in mono)


class Expr:
    """Normal-form element: map canonical monomial -> nonzero Fraction."""

    __slots__ = ("terms",)

    def __init__(self, terms=None, _internal=False):
        if terms is None:
            self.terms = {}
        elif _internal:
            self.terms = terms
        else:
            acc = {}
            for mono, c in terms.items():
                _accumulate(acc, mono, Fraction(c))
            self.terms = acc

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero():
        return Expr({}, _internal=True)

    @staticmethod
    def const(c):
        c = Fraction(c)
        if c == 0:
            return Expr.zero()
        return Expr({(): c}, _internal=True)

    @staticmethod
    def from_gen(g, coeff=1):
        c = Fraction(coeff)
        if c == 0:
            return Expr.zero()
        return Expr({(g,): c}, _internal=True)

    @staticmethod
    def from_terms(pairs):
        """pairs: iterable of (generator list, coefficient) in any order."""
        acc = {}
        for gens, c in pairs:
            _accumulate(acc, tuple(gens), Fraction(c))
        return Expr(acc, _internal=True)

    # -- basic queries -------------------------------------------------

    @property
    def is_zero(self):
        return not self.terms

    def term_count(self):
        return len(self.terms)

    def generators(self):
        seen = set()
        for mono in self.terms:
            seen.update(mono)
        return seen

    def bidegree_split(self):
        """Group terms by (form, ghost); the parts sum back to self."""
        out = {}
        for mono, c in self.terms.items():
            f = sum(g.form for g in mono)
            q = sum(g.ghost for g in mono)
            out.setdefault((f, q), {})[mono] = c
        return {bd: Expr(t, _internal=True) for bd, t in sorted(out.items())}

    def bidegree(self):
        """Bidegree of a homogeneous Expr; None for 0, error if mixed."""
        split = self.bidegree_split()
        if not split:
            return None
        if len(split) > 1:
            raise GradedError("expression is not homogeneous: %s" % sorted(split))
        return next(iter(split))

    def max_form_degree(self):
        deg = 0
        for mono in self.terms:
            deg = max(deg, sum(g.form for g in mono))
        return deg

    def parity(self):
        bd = self.bidegree()
        if bd is None:
            return None
        return (bd[0] + bd[1]) & 1

    # -- ring operations -----------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Expr.const(other)
        res = dict(self.terms)
        for mono, c in other.terms.items():
            v = res.get(mono)
            if v is None:
                res[mono] = c
            else:
                v = v + c
                if v:
                    res[mono] = v
                else:
                    del res[mono]
        return Expr(res, _internal=True)

    __radd__ = __add__

    def __neg__(self):
        return Expr({m: -c for m, c in self.terms.items()}, _internal=True)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Expr.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if c == 0:
                return Expr.zero()
            return Expr({m: v * c for m, v in self.terms.items()}, _internal=True)
        if not isinstance(other, Expr):
            return NotImplemented
        acc = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                _accumulate(acc, m1 + m2, c1 * c2)
        return Expr(acc, _internal=True)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.__mul__(other)
        return NotImplemented

    def __truediv__(self, other):
        return self * Fraction(1, other) if isinstance(other, int) else self * (1 / Fraction(other))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Expr.const(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- substitution ---------------------------------------------------

    def substitute(self, assignment):
        """Map generators to Exprs or rationals, monomial by monomial.

        Expr images must match the parity of the generator they replace
        (a homomorphic, sign-safe substitution).  Rational images are the
        multilinear evaluation used by the randomized tier: the normal
        form is evaluated term-wise, coefficient times product of values.
        """
        for g, val in assignment.items():
            if isinstance(val, Expr) and not val.is_zero:
                p = val.parity() if len(val.bidegree_split()) == 1 else None
                if p is not None and p != g.parity:
                    raise ParityError("image of %s has parity %s" % (g, p))
        acc = {}
        for mono, c in self.terms.items():
            part = Expr.const(c)
            for g in mono:
                val = assignment.get(g)
                if val is None:
                    part = part * Expr.from_gen(g)
                elif isinstance(val, Expr):
                    part = part * val
                else:
                    part = part * Fraction(val)
                if part.is_zero:
                    break
            for m2, c2 in part.terms.items():
                _accumulate(acc, m2, c2)
        return Expr(acc, _internal=True)

    def evaluate(self, valuation):
        """Full multilinear evaluation to a Fraction.

        valuation: Generator -> Fraction.  Raises UndefinedActionError on
        an unmapped generator.
        """
        total = Fraction(0)
        for mono, c in self.terms.items():
            v = c
            for g in mono:
                try:
                    v *= valuation[g]
                except KeyError:
                    raise UndefinedActionError("no value for generator %s" % g) from None
            total += v
        return total

    # -- rendering -------------------------------------------------------

    def render(self):
        if not self.terms:
            return "0"
        bits = []
        for mono in sorted(self.terms, key=_mono_sort_key):
            c = self.terms[mono]
            body = "*".join(g.render() for g in mono) if mono else "1"
            if c == 1 and mono:
                s = body
            elif c == -1 and mono:
                s = "-" + body
            elif mono:
                s = "%s*%s" % (c, body)
            else:
                s = str(c)
            bits.append(s)
        out = bits[0]
        for s in bits[1:]:
            out += " - " + s[1:] if s.startswith("-") else " + " + s
        return out

    __repr__ = render


def _accumulate(acc, gens, coeff):
    if coeff == 0:
        return
    norm = _normalize_monomial(gens)
    if norm is None:
        return
    sign, mono = norm
    v = acc.get(mono)
    if v is None:
        acc[mono] = sign * coeff
    else:
        v = v + sign * coeff
        if v:
            acc[mono] = v
        else:
            del acc[mono]


def normalize(raw):
    """Canonicalize an unordered term list [(generators, coeff), ...]."""
    return Expr.from_terms(raw)


def multiply(a, b):
    return a * b


def bidegree_split(e):
    return e.bidegree_split()


def substitute(e, assignment):
    return e.substitute(assignment)


class Derivation:
    """Graded operator defined by its action on generators.

    Extension to products is the graded Leibniz rule with the sign
    (-1)^(parity * total degree of the left factor).  ``rule`` maps a
    Generator to an Expr; results are cached per generator.
    """

    __slots__ = ("name", "form_shift", "ghost_shift", "parity", "rule", "_cache")

    def __init__(self, name, form_shift, ghost_shift, parity, rule):
        self.name = name
        self.form_shift = form_shift
        self.ghost_shift = ghost_shift
        self.parity = parity & 1
        self.rule = rule
        self._cache = {}

    def shift(self):
        return (self.form_shift, self.ghost_shift)

    def of_gen(self, g):
        img = self._cache.get(g)
        if img is None:
            img = self.rule(g)
            if img is None:
                raise UndefinedActionError("%s has no rule for %s" % (self.name, g))
            self._cache[g] = img
        return img

    def __call__(self, e):
        if isinstance(e, (int, Fraction)):
            return Expr.zero()
        acc = {}
        odd = self.parity
        for mono, c in e.terms.items():
            pre_parity = 0
            for i, g in enumerate(mono):
                img = self.of_gen(g)
                if not img.is_zero:
                    sgn = -1 if (odd and (pre_parity & 1)) else 1
                    head = mono[:i]
                    tail = mono[i + 1:]
                    for m2, c2 in img.terms.items():
                        _accumulate(acc, head + m2 + tail, sgn * c * c2)
                pre_parity += g.parity
        return Expr(acc, _internal=True)


def apply_derivation(D, e):
    return D(e)


class Algebra:
    """Ambient context: dimension, jet truncation, inverse-family table.

    Supplies the canonical operators: jet prolongation partial(mu, .),
    exterior differential d (odd, shift (+1,0)), interior product i_xi
    (even, shift (-1,+1)) and the ghost Lie derivative
    L_xi = i_xi d - d i_xi (odd, shift (0,+1)).
    """

    def __init__(self, m, trunc_order=4):
        self.m = m
        self.trunc_order = trunc_order
        # inverse family name -> (base family name, size); entries of the
        # inverse are independent generators whose derivative expands via
        # D(X^-1) = -X^-1 (D X) X^-1 so that X X^-1 = 1 is never needed
        # by the differential calculus itself.
        self.inverse_families = {}
        self.d = Derivation("d", 1, 0, 1, self._d_rule)
        self.i_xi = Derivation("i_xi", -1, 1, 0, self._i_xi_rule)

    # -- distinguished generators ---------------------------------------

    def dx(self, mu):
        return gen("dx", (mu,), (), form=1, ghost=0, kind=KIND_DX)

    def xi(self, mu, jet=()):
        return gen("xi", (mu,), jet, form=0, ghost=1, kind=KIND_XI)

    def dx_expr(self, mu):
        return Expr.from_gen(self.dx(mu))

    def xi_expr(self, mu, jet=()):
        return Expr.from_gen(self.xi(mu, jet))

    def register_inverse(self, inv_name, base_name, size):
        self.inverse_families[inv_name] = (base_name, size)

    # -- jet prolongation -------------------------------------------------

    def partial_gen(self, mu, g):
        if g.kind == KIND_DX:
            return Expr.zero()
        if g.name in self.inverse_families:
            base, size = self.inverse_families[g.name]
            # (X^-1)[i,j] with X[a,b]: d(X^-1) = -X^-1 dX X^-1
            i, j = g.indices
            out = Expr.zero()
            for k in range(size):
                for l in range(size):
                    out = out - (
                        Expr.from_gen(gen(g.name, (i, k), (), g.form, g.ghost, g.kind))
                        * self. partial_gen(mu, gen(self._base_gen_name(g.name), (k, l), (),
                                                    g.form, g.ghost, KIND_FIELD))
                        * Expr.from_gen(gen(g.name, (l, j), (), g.form, g.ghost, g.kind))
                    )
            return out
        if len(g.jet) + 1 > self.trunc_order:
            raise TruncationError(
                "jet order %d exceeded differentiating %s" % (self.trunc_order, g))
        return Expr.from_gen(gen(g.name, g.indices, g.jet + (mu,), g.form, g.ghost, g.kind))

    def _base_gen_name(self, inv_name):
        return self.inverse_families[inv_name][0]

    def partial(self, mu, e):
        """Even jet-prolongation derivation."""
        acc = {}
        for mono, c in e.terms.items():
            for i, g in enumerate(mono):
                img = self.partial_gen(mu, g)
                if not img.is_zero:
                    head = mono[:i]
                    tail = mono[i + 1:]
                    for m2, c2 in img.terms.items():
                        _accumulate(acc, head + m2 + tail, c * c2)
        return Expr(acc, _internal=True)

    def partial_multi(self, jet, e):
        for mu in jet:
            e = self.partial(mu, e)
        return e

    # -- canonical derivations --------------------------------------------

    def _d_rule(self, g):
        # d(g) = sum_mu dx^mu * partial_mu(g); zero on dx itself
        if g.kind == KIND_DX:
            return Expr.zero()
        out = Expr.zero()
        for mu in range(self.m):
            p = self.partial_gen(mu, g)
            if not p.is_zero:
                out = out + self.dx_expr(mu) * p
        return out

    def _i_xi_rule(self, g):
        if g.kind == KIND_DX:
            return self.xi_expr(g.indices[0])
        return Expr.zero()

    def lie_xi(self, e):
        """L_xi = i_xi d - d i_xi; odd, ghost shift +1."""
        return self.i_xi(self.d(e)) - self.d(self.i_xi(e))

    def interior(self, components, name="i_chi"):
        """Interior product along a ghost-valued vector with given components.

        components: list of m Exprs; dx^mu -> components[mu], everything
        else -> 0.  Parity follows the components' ghost degree.
        """
        ghost = 0
        for c in components:
            if not c.is_zero:
                ghost = c.bidegree()[1]
                break
        parity = (ghost - 1) & 1

        def rule(g, comps=tuple(components)):
            if g.kind == KIND_DX:
                return comps[g.indices[0]]
            return Expr.zero()

        return Derivation(name, -1, ghost, parity, rule)

    def exp_interior(self, e):
        """e^{i_xi} = sum_k (i_xi)^k / k!; finite on bounded form degree."""
        out = e
        term = e
        k = 0
        while True:
            term = self.i_xi(term)
            if term.is_zero:
                return out
            k += 1
            out = out + term * Fraction(1, _factorial(k))

    def xi_bracket_half(self):
        """Components of (1/2)[xi,xi]: xi^nu d_nu xi^rho."""
        comps = []
        for rho in range(self.m):
            total = Expr.zero()
            for nu in range(self.m):
                total = total + self.xi_expr(nu) * self.xi_expr(rho, (nu,))
            comps.append(total)
        return comps


def _factorial(k):
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


class TableDerivation(Derivation):
    """Derivation given by a finite rule table on unjetted generators.

    Jetted generators get the prolonged rule (the operator commutes with
    coordinate partials), inverse-family generators the closed form
    -X^-1 (D X) X^-1, dx a configurable image (zero for the BRST operator
    and for the shifted operator).
    """

    __slots__ = ("algebra", "table", "dx_image", "xi_rule")

    def __init__(self, name, algebra, table, ghost_shift=1, parity=1,
                 dx_image=None, xi_rule=None, form_shift=0):
        self.algebra = algebra
        self.table = dict(table)
        self.dx_image = dx_image
        self.xi_rule = xi_rule
        super().__init__(name, form_shift, ghost_shift, parity, self._table_rule)

    def _table_rule(self, g):
        if g.kind == KIND_DX:
            return self.dx_image(g) if self.dx_image is not None else Expr.zero()
        if g.kind == KIND_XI:
            if self.xi_rule is None:
                return Expr.zero()
            base = self.xi_rule(gen(g.name, g.indices, (), g.form, g.ghost, g.kind))
            return self.algebra.partial_multi(g.jet, base)
        alg = self.algebra
        if g.name in alg.inverse_families and g.jet == ():
            base_name, size = alg.inverse_families[g.name]
            i, j = g.indices
            out = Expr.zero()
            for k in range(size):
                for l in range(size):
                    mid = self._table_rule(gen(base_name, (k, l), (), 0, 0, KIND_FIELD))
                    if mid.is_zero:
                        continue
                    out = out - (
                        Expr.from_gen(gen(g.name, (i, k), (), g.form, g.ghost, g.kind))
                        * mid
                        * Expr.from_gen(gen(g.name, (l, j), (), g.form, g.ghost, g.kind))
                    )
            return out
        base = gen(g.name, g.indices, (), g.form, g.ghost, g.kind)
        img = self.table.get(base)
        if img is None:
            raise UndefinedActionError("%s has no rule for %s" % (self.name, base))
        if g.jet:
            return self.algebra.partial_multi(g.jet, img)
        return img


def left_dx_coefficients(algebra, e):
    """Decompose e = sum over ascending dx monomials dx^I * C_I.

    Returns {I: C_I} with I an ascending tuple of spacetime indices.  In
    canonical monomial order the dx block sits after the even field part,
    so pulling it to the front crosses even generators only: no signs.
    """
    out = {}
    for mono, c in e.terms.items():
        dxs = tuple(g.indices[0] for g in mono if g.kind == KIND_DX)
        rest = tuple(g for g in mono if g.kind != KIND_DX)
        out.setdefault(dxs, {})
        _accumulate(out[dxs], rest, c)
    return {I: Expr(t, _internal=True) for I, t in out.items() if t}
