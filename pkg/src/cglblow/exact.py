"""Exact scalar tower and univariate polynomial algebra.

The tower has four levels, each closed under field operations where that
makes sense:

    Fraction                     rationals (stdlib, always reduced)
    GaussComplex                 a + b*i with rational a, b
    ExtScalar                    c0 + c1*B where B**2 is a fixed rational
    KappaGraded                  value * kappa**grade, kappa kept symbolic

``B`` stands for the profile coefficient whose square is rational but which
is itself irrational; a degree-2 extension is enough for every identity we
verify.  ``kappa`` is never evaluated: products add grades, and sums demand
equal grades, so any inhomogeneous formula raises instead of silently mixing
scales.  Addition with an exact zero is grade-agnostic.

``Poly`` is a univariate polynomial with coefficients from any level of the
tower (they are promoted on contact); it also accepts Python complex for the
float pipeline.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence, Union

Rational = Fraction

RationalLike = Union[int, Fraction]


class DivideByZero(ZeroDivisionError):
    """Division by an exact zero scalar."""


class MixedKappaGrade(ValueError):
    """Sum of kappa-graded scalars with different grades."""


class KindMismatch(TypeError):
    """Operation between scalars that cannot be promoted to a common kind."""


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise KindMismatch(f"expected rational, got {type(x).__name__}")


class GaussComplex:
    """Gaussian rational: exact complex number with rational re/im parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: RationalLike = 0, im: RationalLike = 0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, *a):
        raise AttributeError("GaussComplex is immutable")

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def conj(self) -> "GaussComplex":
        return GaussComplex(self.re, -self.im)

    def real_part(self) -> "GaussComplex":
        return GaussComplex(self.re)

    def imag_part(self) -> "GaussComplex":
        return GaussComplex(self.im)

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(x):
        if isinstance(x, GaussComplex):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussComplex(x)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussComplex(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussComplex(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise DivideByZero("division by zero GaussComplex")
        return GaussComplex(
            (self.re * o.re + self.im * o.im) / n,
            (self.im * o.re - self.re * o.im) / n,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return GaussComplex(1) / self ** (-n)
        out = GaussComplex(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __reduce__(self):
        return (GaussComplex, (self.re, self.im))

    def __repr__(self):
        return f"GaussComplex({self.re!r}, {self.im!r})"

    def __str__(self):
        return format_scalar(self)


GC_ZERO = GaussComplex(0)
GC_ONE = GaussComplex(1)
GC_I = GaussComplex(0, 1)


class ExtScalar:
    """Element c0 + c1*B of the quadratic extension with B**2 = modulus.

    ``modulus`` must be a positive rational; B is taken as the positive
    square root when converting to float.  Mixing two ExtScalars with
    different moduli is a KindMismatch.
    """

    __slots__ = ("c0", "c1", "modulus")

    def __init__(self, c0, c1=0, modulus: RationalLike = None):
        if modulus is None:
            raise KindMismatch("ExtScalar requires an explicit modulus")
        if isinstance(c0, ExtScalar):
            if not is_zero(c0.c1):
                raise KindMismatch("nested ExtScalar with a B-part")
            c0 = c0.c0
        object.__setattr__(self, "c0", _gc(c0))
        object.__setattr__(self, "c1", _gc(c1))
        object.__setattr__(self, "modulus", _as_fraction(modulus))

    def __setattr__(self, *a):
        raise AttributeError("ExtScalar is immutable")

    def is_zero(self) -> bool:
        return self.c0.is_zero() and self.c1.is_zero()

    def conj(self) -> "ExtScalar":
        return ExtScalar(self.c0.conj(), self.c1.conj(), self.modulus)

    def real_part(self) -> "ExtScalar":
        # B itself is real, so Re(c0 + c1 B) = Re(c0) + Re(c1) B.
        return ExtScalar(self.c0.real_part(), self.c1.real_part(), self.modulus)

    def imag_part(self) -> "ExtScalar":
        return ExtScalar(self.c0.imag_part(), self.c1.imag_part(), self.modulus)

    def _coerce(self, x):
        if isinstance(x, ExtScalar):
            if x.modulus != self.modulus and not (x.is_zero() or self.is_zero()):
                raise KindMismatch("ExtScalar moduli differ")
            m = self.modulus if not self.is_zero() else x.modulus
            if x.modulus != m:
                return ExtScalar(x.c0, x.c1, m)
            return x
        if isinstance(x, (int, Fraction, GaussComplex)):
            return ExtScalar(_gc(x), 0, self.modulus)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExtScalar(self.c0 + o.c0, self.c1 + o.c1, self.modulus)

    __radd__ = __add__

    def __neg__(self):
        return ExtScalar(-self.c0, -self.c1, self.modulus)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExtScalar(self.c0 - o.c0, self.c1 - o.c1, self.modulus)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExtScalar(
            self.c0 * o.c0 + self.c1 * o.c1 * self.modulus,
            self.c0 * o.c1 + self.c1 * o.c0,
            self.modulus,
        )

    __rmul__ = __mul__

    def inverse(self) -> "ExtScalar":
        # (c0 + c1 B)(c0 - c1 B) = c0^2 - c1^2 m lies in the Gaussian field.
        n = self.c0 * self.c0 - self.c1 * self.c1 * self.modulus
        if n.is_zero():
            if self.is_zero():
                raise DivideByZero("division by zero ExtScalar")
            raise DivideByZero("non-invertible ExtScalar (norm vanishes)")
        return ExtScalar(self.c0 / n, -self.c1 / n, self.modulus)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = ExtScalar(1, 0, self.modulus)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except KindMismatch:
            return False
        if o is None:
            return NotImplemented
        return self.c0 == o.c0 and self.c1 == o.c1

    def __hash__(self):
        return hash((self.c0, self.c1, self.modulus))

    def __complex__(self):
        root = float(self.modulus) ** 0.5
        return complex(self.c0) + complex(self.c1) * root

    def __reduce__(self):
        return (ExtScalar, (self.c0, self.c1, self.modulus))

    def __repr__(self):
        return f"ExtScalar({self.c0!r}, {self.c1!r}, modulus={self.modulus!r})"

    def __str__(self):
        return format_scalar(self)


class KappaGraded:
    """value * kappa**grade with kappa purely symbolic.

    Addition insists on equal grades (exact zeros are grade-agnostic), which
    turns every verified identity into a homogeneity check for free.
    """

    __slots__ = ("value", "grade")

    def __init__(self, value: ExtScalar, grade: int = 0):
        if not isinstance(value, ExtScalar):
            raise KindMismatch("KappaGraded wraps an ExtScalar")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "grade", int(grade))

    def __setattr__(self, *a):
        raise AttributeError("KappaGraded is immutable")

    def is_zero(self) -> bool:
        return self.value.is_zero()

    def conj(self) -> "KappaGraded":
        return KappaGraded(self.value.conj(), self.grade)

    def real_part(self) -> "KappaGraded":
        return KappaGraded(self.value.real_part(), self.grade)

    def imag_part(self) -> "KappaGraded":
        return KappaGraded(self.value.imag_part(), self.grade)

    def _coerce(self, x):
        if isinstance(x, KappaGraded):
            return x
        if isinstance(x, (int, Fraction, GaussComplex, ExtScalar)):
            v = self.value._coerce(x)
            return KappaGraded(v, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero():
            return o
        if o.is_zero():
            return self
        if self.grade != o.grade:
            raise MixedKappaGrade(
                f"kappa grades differ: {self.grade} vs {o.grade}"
            )
        return KappaGraded(self.value + o.value, self.grade)

    __radd__ = __add__

    def __neg__(self):
        return KappaGraded(-self.value, self.grade)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return KappaGraded(self.value * o.value, self.grade + o.grade)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return KappaGraded(self.value / o.value, self.grade - o.grade)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero() and o.is_zero():
            return True
        return self.grade == o.grade and self.value == o.value

    def __hash__(self):
        return hash((self.value, self.grade))

    def to_complex(self, kappa: float) -> complex:
        return complex(self.value) * kappa**self.grade

    def __reduce__(self):
        return (KappaGraded, (self.value, self.grade))

    def __repr__(self):
        return f"KappaGraded({self.value!r}, grade={self.grade})"

    def __str__(self):
        return format_scalar(self)


def _gc(x) -> GaussComplex:
    if isinstance(x, GaussComplex):
        return x
    return GaussComplex(_as_fraction(x))


def kappa_unit(modulus: RationalLike) -> KappaGraded:
    """kappa itself: unit value at grade one, tied to the given B-modulus."""
    return KappaGraded(ExtScalar(1, 0, modulus), grade=1)


def conj(x):
    """Complex conjugate across the tower (and plain complex)."""
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, (GaussComplex, ExtScalar, KappaGraded)):
        return x.conj()
    return x.conjugate()


def real_part(x):
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, (GaussComplex, ExtScalar, KappaGraded)):
        return x.real_part()
    return complex(x).real


def imag_part(x):
    if isinstance(x, (int, Fraction)):
        return 0 * x
    if isinstance(x, (GaussComplex, ExtScalar, KappaGraded)):
        return x.imag_part()
    return complex(x).imag


def is_zero(x) -> bool:
    if isinstance(x, (GaussComplex, ExtScalar, KappaGraded)):
        return x.is_zero()
    return x == 0


def to_complex(x, kappa: float = None) -> complex:
    """Float view of any tower scalar; kappa needed for graded values."""
    if isinstance(x, KappaGraded):
        if x.grade != 0 and not x.is_zero() and kappa is None:
            raise KindMismatch("graded scalar needs a kappa value")
        return x.to_complex(1.0 if kappa is None else kappa)
    if isinstance(x, (GaussComplex, ExtScalar)):
        return complex(x)
    return complex(x)


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


class Poly:
    """Univariate polynomial; coefficients from the exact tower or complex.

    Coefficient index = power of the variable.  Trailing zeros are trimmed,
    so ``degree`` is len-1 for nonzero polynomials and -1 for the zero one.
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Sequence, var: str = "y"):
        cs = list(coeffs)
        while cs and is_zero(cs[-1]):
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "var", var)

    def __setattr__(self, *a):
        raise AttributeError("Poly is immutable")

    @classmethod
    def zero(cls, var: str = "y") -> "Poly":
        return cls([], var)

    @classmethod
    def monomial(cls, k: int, coeff=1, var: str = "y") -> "Poly":
        return cls([0] * k + [coeff], var)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    def __add__(self, other):
        o = other if isinstance(other, Poly) else Poly([other], self.var)
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly(
            [self.coeff(k) + o.coeff(k) for k in range(n)], self.var
        )

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        o = other if isinstance(other, Poly) else Poly([other], self.var)
        return self + (-o)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs], self.var)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1 or 1)
        for i, a in enumerate(self.coeffs):
            if is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out, self.var)

    def __rmul__(self, other):
        return Poly([other * c for c in self.coeffs], self.var)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        if len(self.coeffs) != len(other.coeffs):
            return False
        return all(
            is_zero(a - b) for a, b in zip(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash(self.coeffs)

    def deriv(self) -> "Poly":
        return Poly(
            [k * c for k, c in enumerate(self.coeffs)][1:], self.var
        )

    def eval(self, y0):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * y0 + c
        return acc

    def conj(self) -> "Poly":
        # The variable is real, so conjugation acts on coefficients only.
        return Poly([conj(c) for c in self.coeffs], self.var)

    def real_part(self) -> "Poly":
        return Poly([real_part(c) for c in self.coeffs], self.var)

    def truncate(self, degree: int) -> "Poly":
        return Poly(self.coeffs[: degree + 1], self.var)

    def to_complex_coeffs(self, kappa: float = None) -> list:
        return [to_complex(c, kappa) for c in self.coeffs]

    def __reduce__(self):
        return (Poly, (list(self.coeffs), self.var))

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r}, var={self.var!r})"

    def __str__(self):
        return format_poly(self)


def binomial_coefficient(gamma, k: int):
    """Generalized C(gamma, k) = gamma (gamma-1) ... (gamma-k+1) / k!."""
    num = 1
    for j in range(k):
        num = num * (gamma - j)
    den = 1
    for j in range(2, k + 1):
        den *= j
    return num * Fraction(1, den)


def binomial_series(gamma, u: Poly, order: int) -> Poly:
    """Truncated expansion of (1 + u)**gamma to the given polynomial order.

    ``u`` must have zero constant term so the expansion is a finite sum of
    u-powers up to ``order``.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if not is_zero(u.coeff(0)):
        raise ValueError("binomial_series needs a zero constant term in u")
    acc = Poly([1], u.var)
    upow = Poly([1], u.var)
    for k in range(1, order + 1):
        upow = (upow * u).truncate(order)
        if upow.is_zero():
            break
        acc = acc + binomial_coefficient(gamma, k) * upow
    return acc.truncate(order)


# ---------------------------------------------------------------------------
# textual dump / parse
# ---------------------------------------------------------------------------
#
# Scalars print as "a/b + (c/d)i [+ (e/f + (g/h)i) b] [k^n]", polynomials as
# "+"-joined "coef * y^k" terms.  parse_poly(format_poly(P)) round-trips.


def _fmt_frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _fmt_gc(g: GaussComplex) -> str:
    return f"{_fmt_frac(g.re)} + ({_fmt_frac(g.im)})i"


def format_scalar(x) -> str:
    if isinstance(x, (int, Fraction)):
        return _fmt_frac(_as_fraction(x))
    if isinstance(x, GaussComplex):
        return _fmt_gc(x)
    if isinstance(x, ExtScalar):
        return f"{_fmt_gc(x.c0)} + ({_fmt_gc(x.c1)}) b"
    if isinstance(x, KappaGraded):
        return f"{format_scalar(x.value)} k^{x.grade}"
    raise KindMismatch(f"cannot format {type(x).__name__}")


def format_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    terms = []
    for k, c in enumerate(p.coeffs):
        if is_zero(c):
            continue
        terms.append(f"[{format_scalar(c)}] * {p.var}^{k}")
    return " + ".join(terms)


import re as _re

_FRAC = r"(-?\d+)/(\d+)"
_GC = rf"{_FRAC} \+ \({_FRAC}\)i"
_SCALAR_RE = _re.compile(
    rf"^(?P<c0>{_GC})(?: \+ \((?P<c1>{_GC})\) b)?(?: k\^(?P<grade>-?\d+))?$"
)
_GC_RE = _re.compile(rf"^{_GC}$")


def _parse_gc(s: str) -> GaussComplex:
    m = _GC_RE.match(s.strip())
    if not m:
        raise ValueError(f"bad GaussComplex literal: {s!r}")
    a, b, c, d = (int(g) for g in m.groups())
    return GaussComplex(Fraction(a, b), Fraction(c, d))


def parse_scalar(s: str, modulus: Fraction = None):
    m = _SCALAR_RE.match(s.strip())
    if not m:
        raise ValueError(f"bad scalar literal: {s!r}")
    c0 = _parse_gc(m.group("c0"))
    c1 = _parse_gc(m.group("c1")) if m.group("c1") else None
    grade = m.group("grade")
    if c1 is None and grade is None and modulus is None:
        return c0
    if modulus is None:
        raise ValueError("extension literal needs a modulus to parse")
    ext = ExtScalar(c0, c1 if c1 is not None else 0, modulus)
    if grade is None:
        return ext
    return KappaGraded(ext, int(grade))


def parse_poly(s: str, modulus: Fraction = None, var: str = "y") -> Poly:
    s = s.strip()
    if s == "0":
        return Poly.zero(var)
    coeffs: dict[int, object] = {}
    for term in s.split(" + ["):
        term = term.strip()
        if term.startswith("["):
            term = term[1:]
        body, _, power = term.rpartition(f"* {var}^")
        body = body.strip()
        if not body.endswith("]"):
            raise ValueError(f"bad poly term: {term!r}")
        k = int(power)
        coeffs[k] = parse_scalar(body[:-1], modulus=modulus)
    n = max(coeffs) + 1
    return Poly([coeffs.get(k, 0) for k in range(n)], var)
