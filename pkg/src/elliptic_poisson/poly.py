"""Exact sparse polynomial algebra over a formal-parameter coefficient ring.

Two layers:

* ``ParamPoly``: polynomials in the formal symbols ``n, g2, g3, l1, l2, l3,
  t, s2, s3`` with exact rational (``fractions.Fraction``) coefficients.
  This is the coefficient ring for everything symbolic; floats never enter.
* ``EPoly``: elements of the symmetric algebra on generators ``e[alpha]``
  for arbitrary integer ``alpha``, with ``ParamPoly`` coefficients.
  Monomials are sorted integer multisets.

Values are immutable and canonical: two values are equal exactly when their
term maps are equal, zero coefficients are never stored, and the textual
form produced by ``to_text`` round-trips bit-exactly through the matching
``parse_*`` function.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterator, Mapping, Union

__all__ = [
    "SYMBOLS",
    "ParamPoly",
    "EPoly",
    "IndexSet",
    "parse_parampoly",
    "parse_epoly",
]

SYMBOLS = ("n", "g2", "g3", "l1", "l2", "l3", "t", "s2", "s3")
_SYM_INDEX = {s: i for i, s in enumerate(SYMBOLS)}
_NSYM = len(SYMBOLS)
_ZERO_EXP = (0,) * _NSYM

# Grading: weight(e_alpha) = alpha, weight(g2) = 4, weight(g3) = 6, all
# other symbols weight 0.
_SYMBOL_WEIGHTS = (0, 4, 6, 0, 0, 0, 0, 0, 0)

Rational = Union[Fraction, int]


def _as_fraction(value: Rational) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


class ParamPoly:
    """Polynomial in the formal symbols with exact rational coefficients.

    Terms map exponent vectors (tuples indexed like ``SYMBOLS``) to nonzero
    ``Fraction`` values.  Instances are immutable; all operators return new
    values.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple, Rational] | None = None):
        clean: dict[tuple, Fraction] = {}
        if terms:
            for exp, coeff in terms.items():
                if len(exp) != _NSYM or any(e < 0 or not isinstance(e, int) for e in exp):
                    raise ValueError(f"bad exponent vector {exp!r}")
                c = _as_fraction(coeff)
                if c:
                    clean[tuple(exp)] = c
        self._terms = clean
        self._hash = None

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls) -> "ParamPoly":
        return _PP_ZERO

    @classmethod
    def one(cls) -> "ParamPoly":
        return _PP_ONE

    @classmethod
    def const(cls, value: Rational) -> "ParamPoly":
        c = _as_fraction(value)
        if not c:
            return _PP_ZERO
        return cls({_ZERO_EXP: c})

    @classmethod
    def symbol(cls, name: str) -> "ParamPoly":
        if name not in _SYM_INDEX:
            raise KeyError(f"unknown symbol {name!r}")
        exp = [0] * _NSYM
        exp[_SYM_INDEX[name]] = 1
        return cls({tuple(exp): Fraction(1)})

    # -- ring operations ------------------------------------------------

    @staticmethod
    def _coerce(other) -> "ParamPoly | None":
        if isinstance(other, ParamPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return ParamPoly.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        acc = dict(self._terms)
        for exp, c in o._terms.items():
            s = acc.get(exp, 0) + c
            if s:
                acc[exp] = s
            elif exp in acc:
                del acc[exp]
        out = ParamPoly.__new__(ParamPoly)
        out._terms = acc
        out._hash = None
        return out

    __radd__ = __add__

    def __neg__(self):
        out = ParamPoly.__new__(ParamPoly)
        out._terms = {exp: -c for exp, c in self._terms.items()}
        out._hash = None
        return out

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        acc: dict[tuple, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                s = acc.get(exp, 0) + c1 * c2
                if s:
                    acc[exp] = s
                elif exp in acc:
                    del acc[exp]
        out = ParamPoly.__new__(ParamPoly)
        out._terms = acc
        out._hash = None
        return out

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = _PP_ONE
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- queries ----------------------------------------------------------

    def terms(self) -> Iterator[tuple[tuple, Fraction]]:
        """Terms in canonical order (exponent vectors, descending lex)."""
        for exp in sorted(self._terms, reverse=True):
            yield exp, self._terms[exp]

    def symbols_used(self) -> frozenset[str]:
        used = set()
        for exp in self._terms:
            for i, e in enumerate(exp):
                if e:
                    used.add(SYMBOLS[i])
        return frozenset(used)

    def degree_in(self, name: str) -> int:
        i = _SYM_INDEX[name]
        return max((exp[i] for exp in self._terms), default=0)

    def constant_value(self) -> Fraction:
        """The rational value of a constant polynomial."""
        if not self._terms:
            return Fraction(0)
        if set(self._terms) == {_ZERO_EXP}:
            return self._terms[_ZERO_EXP]
        raise ValueError(f"not a constant: {self.to_text()}")

    # -- substitution and evaluation ---------------------------------------

    def substitute(self, assignment: Mapping[str, Rational]) -> "ParamPoly":
        """Assign exact rational values to some symbols; keep the rest formal."""
        idx = {_SYM_INDEX[name]: _as_fraction(v) for name, v in assignment.items()}
        if not idx:
            return self
        acc: dict[tuple, Fraction] = {}
        for exp, c in self._terms.items():
            for i, v in idx.items():
                if exp[i]:
                    c = c * v ** exp[i]
            if not c:
                continue
            new_exp = tuple(0 if i in idx else e for i, e in enumerate(exp))
            s = acc.get(new_exp, 0) + c
            if s:
                acc[new_exp] = s
            elif new_exp in acc:
                del acc[new_exp]
        out = ParamPoly.__new__(ParamPoly)
        out._terms = acc
        out._hash = None
        return out

    def compose(self, assignment: Mapping[str, "ParamPoly"]) -> "ParamPoly":
        """Substitute polynomials for symbols (e.g. g2 -> g2 + t*s2)."""
        idx = {_SYM_INDEX[name]: poly for name, poly in assignment.items()}
        if not idx:
            return self
        result = _PP_ZERO
        for exp, c in self._terms.items():
            factor = ParamPoly.const(c)
            residual = [0] * _NSYM
            for i, e in enumerate(exp):
                if not e:
                    continue
                if i in idx:
                    factor = factor * idx[i] ** e
                else:
                    residual[i] = e
            result = result + factor * ParamPoly({tuple(residual): Fraction(1)})
        return result

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        """Numeric evaluation; every symbol that occurs must be assigned."""
        vals = {}
        for name, v in values.items():
            vals[_SYM_INDEX[name]] = complex(v) if not isinstance(v, complex) else v
        total = 0j
        for exp, c in self._terms.items():
            term = complex(c)
            for i, e in enumerate(exp):
                if e:
                    if i not in vals:
                        raise KeyError(f"symbol {SYMBOLS[i]!r} not assigned")
                    term *= vals[i] ** e
            total += term
        return total

    def collect(self, name: str) -> dict[int, "ParamPoly"]:
        """Coefficients by degree in ``name`` (the symbol is removed)."""
        i = _SYM_INDEX[name]
        buckets: dict[int, dict[tuple, Fraction]] = {}
        for exp, c in self._terms.items():
            d = exp[i]
            stripped = tuple(0 if j == i else e for j, e in enumerate(exp))
            bucket = buckets.setdefault(d, {})
            bucket[stripped] = bucket.get(stripped, Fraction(0)) + c
        out = {}
        for d, terms in buckets.items():
            p = ParamPoly(terms)
            if p:
                out[d] = p
        return out

    # -- text -------------------------------------------------------------

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        chunks: list[str] = []
        for exp in sorted(self._terms, reverse=True):
            coeff = self._terms[exp]
            mono = "*".join(
                s if e == 1 else f"{s}^{e}"
                for s, e in zip(SYMBOLS, exp)
                if e
            )
            mag = abs(coeff)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not chunks:
                chunks.append(body if coeff > 0 else f"-{body}")
            else:
                chunks.append(f" + {body}" if coeff > 0 else f" - {body}")
        return "".join(chunks)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"ParamPoly({self.to_text()!r})"


_PP_ZERO = ParamPoly()
_PP_ONE = ParamPoly({_ZERO_EXP: Fraction(1)})

_RAT_RE = re.compile(r"-?\d+(?:/\d+)?")
_SYMFACT_RE = re.compile(rf"({'|'.join(SYMBOLS)})(?:\^(\d+))?")


def parse_parampoly(text: str) -> ParamPoly:
    """Inverse of :meth:`ParamPoly.to_text` (also accepts any sum of terms)."""
    s = text.strip()
    if s == "0":
        return ParamPoly.zero()
    sign = 1
    if s.startswith("-"):
        sign = -1
        s = s[1:]
    pieces = re.split(r" ([+-]) ", s)
    terms: dict[tuple, Fraction] = {}
    chunk_signs = [sign] + [1 if op == "+" else -1 for op in pieces[1::2]]
    chunks = pieces[0::2]
    for sgn, chunk in zip(chunk_signs, chunks):
        coeff = Fraction(sgn)
        exp = [0] * _NSYM
        for factor in chunk.split("*"):
            factor = factor.strip()
            if _RAT_RE.fullmatch(factor):
                coeff *= Fraction(factor)
                continue
            m = _SYMFACT_RE.fullmatch(factor)
            if not m:
                raise ValueError(f"cannot parse factor {factor!r} in {text!r}")
            exp[_SYM_INDEX[m.group(1)]] += int(m.group(2) or 1)
        key = tuple(exp)
        terms[key] = terms.get(key, Fraction(0)) + coeff
    return ParamPoly(terms)


def _mono_key(mono: tuple[int, ...]) -> tuple:
    # Graded lexicographic on sorted index multisets.
    return (len(mono), mono)


class EPoly:
    """Element of the symmetric algebra on the generators ``e[alpha]``.

    Terms map sorted integer tuples (monomials, multiset semantics) to
    nonzero ``ParamPoly`` coefficients.  Immutable and canonical.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple, ParamPoly | Rational] | None = None):
        clean: dict[tuple, ParamPoly] = {}
        if terms:
            for mono, coeff in terms.items():
                if any(not isinstance(a, int) for a in mono):
                    raise ValueError(f"bad monomial {mono!r}")
                m = tuple(sorted(mono))
                c = coeff if isinstance(coeff, ParamPoly) else ParamPoly.const(coeff)
                if m in clean:
                    c = clean[m] + c
                if c:
                    clean[m] = c
                elif m in clean:
                    del clean[m]
        self._terms = clean

    @classmethod
    def _raw(cls, clean: dict[tuple, ParamPoly]) -> "EPoly":
        """Wrap an already-canonical term dict without copying (internal)."""
        out = cls.__new__(cls)
        out._terms = clean
        return out

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls) -> "EPoly":
        return _EP_ZERO

    @classmethod
    def one(cls) -> "EPoly":
        return _EP_ONE

    @classmethod
    def gen(cls, alpha: int) -> "EPoly":
        return cls({(alpha,): Fraction(1)})

    @classmethod
    def monomial(cls, indices, coeff: ParamPoly | Rational = 1) -> "EPoly":
        return cls({tuple(indices): coeff})

    # -- ring operations ------------------------------------------------

    @staticmethod
    def _coerce_scalar(other) -> ParamPoly | None:
        if isinstance(other, ParamPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return ParamPoly.const(other)
        return None

    def __add__(self, other):
        if not isinstance(other, EPoly):
            scalar = self._coerce_scalar(other)
            if scalar is None:
                return NotImplemented
            other = EPoly({(): scalar})
        acc = dict(self._terms)
        for m, c in other._terms.items():
            s = acc.get(m)
            s = c if s is None else s + c
            if s:
                acc[m] = s
            elif m in acc:
                del acc[m]
        return EPoly._raw(acc)

    __radd__ = __add__

    def __neg__(self):
        return EPoly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, EPoly):
            scalar = self._coerce_scalar(other)
            if scalar is None:
                return NotImplemented
            other = EPoly({(): scalar})
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, EPoly):
            scalar = self._coerce_scalar(other)
            if scalar is None:
                return NotImplemented
            if not scalar:
                return _EP_ZERO
            return EPoly._raw({m: c * scalar for m, c in self._terms.items()})
        acc: dict[tuple, ParamPoly] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = tuple(sorted(m1 + m2))
                c = c1 * c2
                s = acc.get(mono)
                s = c if s is None else s + c
                if s:
                    acc[mono] = s
                elif mono in acc:
                    del acc[mono]
        return EPoly._raw(acc)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = _EP_ONE
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, EPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return not self._terms
            return self._terms == {(): ParamPoly.const(other)}
        return NotImplemented

    def __hash__(self):
        return hash(frozenset((m, c) for m, c in self._terms.items()))

    # -- queries ----------------------------------------------------------

    def terms(self) -> Iterator[tuple[tuple, ParamPoly]]:
        """Terms in canonical (graded lexicographic) monomial order."""
        for m in sorted(self._terms, key=_mono_key):
            yield m, self._terms[m]

    def num_terms(self) -> int:
        return len(self._terms)

    def support(self) -> set[int]:
        """Generator indices occurring with nonzero coefficient."""
        out: set[int] = set()
        for m in self._terms:
            out.update(m)
        return out

    def degree(self) -> int:
        """Largest monomial size (0 for the zero polynomial)."""
        return max((len(m) for m in self._terms), default=0)

    def homogeneous_degree(self) -> int | None:
        """Common monomial size, or None if zero or mixed."""
        sizes = {len(m) for m in self._terms}
        if len(sizes) == 1:
            return sizes.pop()
        return None

    def is_linear(self) -> bool:
        """True when every monomial is a single generator."""
        return bool(self._terms) and all(len(m) == 1 for m in self._terms)

    def weight_profile(self) -> int | str:
        """Common weight of all terms, or "inhomogeneous" / "zero".

        The weight of a term is the sum of its generator indices plus
        4 * (g2 exponent) + 6 * (g3 exponent); all other symbols have
        weight zero.
        """
        if not self._terms:
            return "zero"
        seen: set[int] = set()
        for mono, coeff in self._terms.items():
            base = sum(mono)
            for exp in coeff._terms:
                w = base
                for i, e in enumerate(exp):
                    if e:
                        w += _SYMBOL_WEIGHTS[i] * e
                seen.add(w)
                if len(seen) > 1:
                    return "inhomogeneous"
        return seen.pop()

    # -- substitution -----------------------------------------------------

    def substitute_params(self, assignment: Mapping[str, Rational]) -> "EPoly":
        """Assign exact rationals to formal symbols in every coefficient."""
        acc: dict[tuple, ParamPoly] = {}
        for m, c in self._terms.items():
            c2 = c.substitute(assignment)
            if c2:
                acc[m] = c2
        return EPoly._raw(acc)

    def compose_params(self, assignment: Mapping[str, ParamPoly]) -> "EPoly":
        """Substitute polynomials for formal symbols in every coefficient."""
        acc: dict[tuple, ParamPoly] = {}
        for m, c in self._terms.items():
            c2 = c.compose(assignment)
            if c2:
                acc[m] = c2
        return EPoly._raw(acc)

    def collect_symbol(self, name: str) -> dict[int, "EPoly"]:
        """Split into coefficients by degree in one formal symbol."""
        buckets: dict[int, dict[tuple, ParamPoly]] = {}
        for m, c in self._terms.items():
            for d, part in c.collect(name).items():
                bucket = buckets.setdefault(d, {})
                cur = bucket.get(m)
                cur = part if cur is None else cur + part
                if cur:
                    bucket[m] = cur
                elif m in bucket:
                    del bucket[m]
        return {d: EPoly._raw(b) for d, b in sorted(buckets.items()) if b}

    def split_linear(self, index: int) -> tuple["EPoly", "EPoly"]:
        """Write ``self = A + B*e[index]`` with neither part containing e[index].

        Raises ValueError when some monomial contains e[index] with
        multiplicity greater than one.
        """
        a_terms: dict[tuple, ParamPoly] = {}
        b_terms: dict[tuple, ParamPoly] = {}
        for m, c in self._terms.items():
            k = m.count(index)
            if k == 0:
                a_terms[m] = c
            elif k == 1:
                reduced = list(m)
                reduced.remove(index)
                key = tuple(reduced)
                cur = b_terms.get(key)
                cur = c if cur is None else cur + c
                if cur:
                    b_terms[key] = cur
                elif key in b_terms:
                    del b_terms[key]
            else:
                raise ValueError(f"degree in e[{index}] exceeds 1: monomial {m}")
        return EPoly._raw(a_terms), EPoly._raw(b_terms)

    # -- text -------------------------------------------------------------

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, key=_mono_key):
            coeff = self._terms[m].to_text()
            mono = "*".join(f"e[{a}]" for a in m) if m else "1"
            parts.append(f"({coeff})*{mono}")
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"EPoly({self.to_text()!r})"


_EP_ZERO = EPoly()
_EP_ONE = EPoly({(): Fraction(1)})

_EP_TERM_RE = re.compile(r"\(([^()]*)\)\*((?:e\[-?\d+\])(?:\*e\[-?\d+\])*|1)")
_EP_IDX_RE = re.compile(r"e\[(-?\d+)\]")


def parse_epoly(text: str) -> EPoly:
    """Inverse of :meth:`EPoly.to_text` (bit-exact round trip)."""
    s = text.strip()
    if s == "0":
        return EPoly.zero()
    terms: dict[tuple, ParamPoly] = {}
    pos = 0
    first = True
    while pos < len(s):
        if not first:
            if not s.startswith(" + ", pos):
                raise ValueError(f"malformed polynomial text at {s[pos:pos+20]!r}")
            pos += 3
        m = _EP_TERM_RE.match(s, pos)
        if not m:
            raise ValueError(f"malformed term at {s[pos:pos+40]!r}")
        coeff = parse_parampoly(m.group(1))
        mono_text = m.group(2)
        mono = () if mono_text == "1" else tuple(
            sorted(int(i) for i in _EP_IDX_RE.findall(mono_text))
        )
        cur = terms.get(mono)
        cur = coeff if cur is None else cur + coeff
        if cur:
            terms[mono] = cur
        elif mono in terms:
            del terms[mono]
        pos = m.end()
        first = False
    return EPoly._raw(terms)


class IndexSet:
    """Generator index windows: all of Z, F_n = {0} u {2..n}, or a range."""

    __slots__ = ("kind", "lo", "hi", "n")

    def __init__(self, kind: str, lo: int | None = None, hi: int | None = None,
                 n: int | None = None):
        if kind not in ("all", "fn", "window"):
            raise ValueError(f"unknown IndexSet kind {kind!r}")
        if kind == "fn" and (n is None or n < 1):
            raise ValueError("F_n needs a positive n")
        if kind == "window" and (lo is None or hi is None or lo > hi):
            raise ValueError("window needs lo <= hi")
        self.kind = kind
        self.lo = lo
        self.hi = hi
        self.n = n

    @classmethod
    def full_z(cls) -> "IndexSet":
        return cls("all")

    @classmethod
    def fn(cls, n: int) -> "IndexSet":
        return cls("fn", n=n)

    @classmethod
    def window(cls, lo: int, hi: int) -> "IndexSet":
        return cls("window", lo=lo, hi=hi)

    def __contains__(self, alpha: int) -> bool:
        if self.kind == "all":
            return True
        if self.kind == "fn":
            return alpha == 0 or 2 <= alpha <= self.n
        return self.lo <= alpha <= self.hi

    def members(self) -> list[int]:
        if self.kind == "all":
            raise ValueError("the full index set is infinite")
        if self.kind == "fn":
            return [0] + list(range(2, self.n + 1))
        return list(range(self.lo, self.hi + 1))

    def __iter__(self):
        return iter(self.members())

    def describe(self) -> str:
        if self.kind == "all":
            return "Z"
        if self.kind == "fn":
            return f"F{self.n}"
        return f"{self.lo}..{self.hi}"

    def __repr__(self) -> str:
        return f"IndexSet({self.describe()!r})"
