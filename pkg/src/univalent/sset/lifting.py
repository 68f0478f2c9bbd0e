"""Lifting problems and Kan fibration checks by exhaustive search."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from ..fincat import DomainError, FamilySearch, PresheafMap, SearchStats
from .simplex import TruncatedSSet, horn, standard_simplex


@dataclass
class Lift:
    """Outcome of a lifting search; ``lift`` is ``None`` when none exists."""

    lift: PresheafMap | None
    stats: SearchStats

    @property
    def found(self) -> bool:
        return self.lift is not None

    @property
    def certified(self) -> bool:
        """A negative answer is backed by an exhausted candidate space."""
        return self.found or (self.stats.solutions == 0 and self.stats.complete)


def _check_square(i: PresheafMap, q: PresheafMap, top: PresheafMap, bottom: PresheafMap) -> None:
    if top.source is not i.source or top.target is not q.source:
        raise DomainError("top map does not go from the source of i to the source of q")
    if bottom.source is not i.target or bottom.target is not q.target:
        raise DomainError("bottom map does not go from the target of i to the target of q")
    for n, xs in i.source.at.items():
        for a in xs:
            if q.comp[n][top.comp[n][a]] != bottom.comp[n][i.comp[n][a]]:
                raise DomainError(f"square does not commute on the {n}-simplex {a!r}")


def _lift_candidates(i, q, top, bottom):
    fib = q.fibers()
    fixed: dict = {}
    clash = object()
    for n, xs in i.source.at.items():
        for a in xs:
            key = (n, i.comp[n][a])
            val = top.comp[n][a]
            if fixed.get(key, val) != val:
                fixed[key] = clash
            else:
                fixed[key] = val

    def candidates(n, x):
        over = fib[n].get(bottom.comp[n][x], ())
        if (n, x) in fixed:
            v = fixed[(n, x)]
            return [v] if v is not clash and v in over else []
        return over
    return candidates


def has_lifting(i: PresheafMap, q: PresheafMap, top: PresheafMap, bottom: PresheafMap) -> Lift:
    """Search for ``l: X -> E`` with ``l . i = top`` and ``q . l = bottom``.

    The search visits candidates in the stored element order, so the first
    lift returned is reproducible.
    """
    _check_square(i, q, top, bottom)
    x, e = i.target, q.source
    search = FamilySearch(x.category, x.at, lambda m, s: x.act[m][s], e, _lift_candidates(i, q, top, bottom))
    stats = SearchStats()
    for sol in search.run(stats):
        comps = {n: {} for n in x.at}
        for (n, s), v in sol.items():
            comps[n][s] = v
        return Lift(PresheafMap(x, e, comps, name="lift"), stats)
    return Lift(None, stats)


@dataclass
class FibrationReport:
    """Horn-by-horn record of a Kan fibration check."""

    maxdim: int
    counts: dict = field(default_factory=dict)  # (n, k) -> [tested, filled]
    witness: dict | None = None

    @property
    def failures(self) -> int:
        return sum(t - f for t, f in self.counts.values())

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def as_dict(self) -> dict:
        return {
            "verdict": "pass" if self.passed else "fail",
            "maxdim": self.maxdim,
            "horns": [
                {"n": n, "k": k, "tested": t, "filled": f} for (n, k), (t, f) in sorted(self.counts.items())
            ],
            "witness": self.witness,
        }

    def lines(self) -> list[str]:
        out = [f"verdict: {'pass' if self.passed else 'fail'} (horns up to dimension {self.maxdim})"]
        for (n, k), (t, f) in sorted(self.counts.items()):
            out.append(f"horn {n},{k}: tested {t} filled {f}")
        if self.witness:
            out.append(f"witness horn {self.witness['n']},{self.witness['k']}")
            out.append(f"  base simplex: {self.witness['base']!r}")
            for level, row in self.witness["horn_map"]:
                out.append(f"  {level}: {row}")
        return out


class _HornSquares:
    """Enumerates commuting squares from one horn inclusion into ``q``."""

    def __init__(self, n: int, k: int, q: PresheafMap):
        e = q.source
        top = e.N
        self.n, self.k, self.q = n, k, q
        self.horn, self.incl = horn(n, k, top)
        self.simplex = standard_simplex(n, top)
        hz = self.horn
        self.horn_search = FamilySearch(hz.category, hz.at, lambda m, s: hz.act[m][s], e)
        sx = self.simplex
        self.fill_search = FamilySearch(sx.category, sx.at, lambda m, s: sx.act[m][s], e)
        self.fib = q.fibers()

    def squares(self, b) -> Iterator[dict]:
        """Horn maps over the base ``n``-simplex ``b``."""
        base = self.q.target
        fib = self.fib
        n = self.n
        self.horn_search.set_candidates(lambda m, s: fib[m].get(base.act[(m, n, s)][b], ()))
        return self.horn_search.run()

    def fill(self, b, horn_map: dict) -> tuple[dict | None, SearchStats]:
        base = self.q.target
        fib = self.fib
        n = self.n

        def candidates(m, s):
            if (m, s) in horn_map:
                return [horn_map[(m, s)]]
            return fib[m].get(base.act[(m, n, s)][b], ())

        self.fill_search.set_candidates(candidates)
        stats = SearchStats()
        for sol in self.fill_search.run(stats):
            return sol, stats
        return None, stats


def is_kan_fibration(q: PresheafMap, maxdim: int, stop_at_first: bool = False) -> FibrationReport:
    """Check the horn-filling condition for ``q`` against every horn up to ``maxdim``."""
    e = q.source
    if not isinstance(e, TruncatedSSet) or not isinstance(q.target, TruncatedSSet):
        raise DomainError("is_kan_fibration expects a map of truncated simplicial sets")
    if maxdim > e.N:
        raise DomainError(f"maxdim {maxdim} exceeds truncation level {e.N}")
    report = FibrationReport(maxdim)
    for n in range(1, maxdim + 1):
        for k in range(n + 1):
            sq = _HornSquares(n, k, q)
            tested = filled = 0
            for b in q.target.at[n]:
                for horn_map in sq.squares(b):
                    tested += 1
                    sol, _ = sq.fill(b, horn_map)
                    if sol is not None:
                        filled += 1
                    elif report.witness is None:
                        report.witness = {
                            "n": n,
                            "k": k,
                            "base": b,
                            "horn_map": [
                                (level, [repr(horn_map[(level, s)]) for s in sq.horn.at[level]])
                                for level in range(min(n, e.N) + 1)
                            ],
                        }
                    if stop_at_first and report.witness is not None:
                        report.counts[(n, k)] = [tested, filled]
                        return report
            report.counts[(n, k)] = [tested, filled]
    return report


def is_kan_complex(x: TruncatedSSet, maxdim: int) -> FibrationReport:
    from .simplex import to_point

    return is_kan_fibration(to_point(x), maxdim)
