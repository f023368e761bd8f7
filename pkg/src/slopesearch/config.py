"""``key = value`` config files with ``[section]`` headers.

Analysis files::

    [geometry]
    height = 5          # m
    beta_deg = 26.56

    [layer 1]           # topmost layer; top_elevation defaults to height
    c = 9.8             # kPa
    phi_deg = 10
    gamma = 17.64       # kN/m3

    [layer 2]           # optional further layers, top to bottom
    top_elevation = 2
    ...

    [search]            # all keys optional
    algorithm = hi      # hi | fi | fs
    n_slices = 25
    n_xin = 3           # grid overrides (hi: coarse grid, fi: fine grid)
    n_xout = 4
    delta_spacing_deg = 5
    tol_F = 1e-8
    max_iter = 100

Sweep files hold a single ``[sweep]`` section whose keys ``height``,
``beta_deg``, ``gamma``, ``c``, ``phi_deg`` take comma-separated lists, plus
optional ``algorithms`` and ``n_slices``. Lines starting with ``#`` or ``;``
and trailing ``#`` comments are ignored.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from slopesearch.bench import SWEEP_TABLE
from slopesearch.bishop import SolverOptions
from slopesearch.search import ALGORITHMS, COARSE_GRID, FINE_GRID, GridSpec
from slopesearch.slope_model import Material, SlopeCase


class ConfigError(ValueError):
    def __init__(self, message: str, path: str = "<config>", line: Optional[int] = None):
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}")


class _Source:
    """Parsed file plus the line number of every section header and key."""

    def __init__(self, path: str, text: str):
        self.path = path
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
        parser.optionxform = str.lower
        try:
            parser.read_string(text, source=path)
        except configparser.MissingSectionHeaderError as exc:
            raise ConfigError("expected a [section] header before the first key", path, exc.lineno) from exc
        except configparser.ParsingError as exc:
            lineno = exc.errors[0][0] if exc.errors else None
            raise ConfigError("malformed line, expected 'key = value'", path, lineno) from exc
        except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
            raise ConfigError(exc.message.split(": ", 1)[-1], path, exc.lineno) from exc
        self.parser = parser
        self.lines: Dict[Tuple[str, Optional[str]], int] = {}
        section = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            stripped = raw.strip()
            m = re.match(r"\[([^\]]+)\]", stripped)
            if m:
                section = m.group(1).strip()
                self.lines[(section, None)] = lineno
                continue
            m = re.match(r"([^=:#;\s][^=:]*?)\s*[=:]", stripped)
            if m and section is not None:
                self.lines.setdefault((section, m.group(1).strip().lower()), lineno)

    def error(self, message: str, section: str, key: Optional[str] = None) -> ConfigError:
        line = self.lines.get((section, key), self.lines.get((section, None)))
        return ConfigError(message, self.path, line)

    def number(self, section: str, key: str, default: Optional[float] = None, kind=float):
        sect = self.parser[section]
        if key not in sect:
            if default is None:
                raise self.error(f"missing required key '{key}' in [{section}]", section)
            return default
        try:
            return kind(sect[key])
        except ValueError:
            raise self.error(f"'{key}' must be a {kind.__name__}, got {sect[key]!r}", section, key) from None

    def numbers(self, section: str, key: str, default=None) -> Tuple[float, ...]:
        sect = self.parser[section]
        if key not in sect:
            if default is None:
                raise self.error(f"missing required key '{key}' in [{section}]", section)
            return tuple(default)
        try:
            values = tuple(float(v) for v in sect[key].split(",") if v.strip())
        except ValueError:
            raise self.error(f"'{key}' must be a comma-separated list of numbers", section, key) from None
        if not values:
            raise self.error(f"'{key}' is empty", section, key)
        return values


def _read(path: str) -> _Source:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from exc
    return _Source(str(path), text)


@dataclass
class AnalysisConfig:
    slope: SlopeCase
    algorithm: str = "hi"
    n_slices: int = 25
    grid: Optional[GridSpec] = None
    solver: SolverOptions = field(default_factory=SolverOptions)


def _layer_sections(src: _Source) -> List[str]:
    names = [s for s in src.parser.sections() if re.fullmatch(r"layer\s*\d*", s.strip().lower())]
    if not names:
        raise ConfigError("at least one [layer N] section is required", src.path)

    def order(name):
        digits = re.sub(r"\D", "", name)
        return int(digits) if digits else 0

    return sorted(names, key=order)


def parse_analysis(path: str) -> AnalysisConfig:
    src = _read(path)
    if not src.parser.has_section("geometry"):
        raise ConfigError("missing [geometry] section", src.path)
    height = src.number("geometry", "height")
    beta = src.number("geometry", "beta_deg")
    if not height > 0:
        raise src.error("height must be > 0", "geometry", "height")
    if not 0 < beta <= 90:
        raise src.error("inclination must be in (0, 90]", "geometry", "beta_deg")

    layers = []
    for i, name in enumerate(_layer_sections(src)):
        top = src.number(name, "top_elevation", height if i == 0 else None)
        c = src.number(name, "c")
        phi = src.number(name, "phi_deg")
        gamma = src.number(name, "gamma")
        try:
            layers.append((top, Material.from_degrees(c, phi, gamma)))
        except ValueError as exc:
            raise src.error(str(exc), name) from None
    try:
        slope = SlopeCase.from_degrees(height, beta, layers)
    except ValueError as exc:
        raise src.error(str(exc), _layer_sections(src)[0]) from None

    cfg = AnalysisConfig(slope)
    if src.parser.has_section("search"):
        sect = src.parser["search"]
        alg = sect.get("algorithm", "hi").strip().lower()
        if alg.upper() not in ALGORITHMS:
            raise src.error(f"algorithm must be one of hi, fi, fs; got {alg!r}", "search", "algorithm")
        cfg.algorithm = alg
        cfg.n_slices = src.number("search", "n_slices", 25, int)
        if cfg.n_slices < 1:
            raise src.error("n_slices must be >= 1", "search", "n_slices")
        if any(k in sect for k in ("n_xin", "n_xout", "delta_spacing_deg")):
            base = FINE_GRID if alg == "fi" else COARSE_GRID
            try:
                cfg.grid = GridSpec(
                    src.number("search", "n_xin", base.n_xin, int),
                    src.number("search", "n_xout", base.n_xout, int),
                    src.number("search", "delta_spacing_deg", base.delta_spacing),
                )
            except ValueError as exc:
                raise src.error(str(exc), "search") from None
        try:
            cfg.solver = SolverOptions(
                tol_F=src.number("search", "tol_F", 1e-8),
                max_iter=src.number("search", "max_iter", 100, int),
            )
        except ValueError as exc:
            raise src.error(str(exc), "search") from None
    return cfg


@dataclass
class SweepConfig:
    table: Dict[str, Tuple[float, ...]]
    algorithms: Tuple[str, ...] = ALGORITHMS
    n_slices: int = 25


def parse_sweep(path: Optional[str]) -> SweepConfig:
    """Sweep table from ``path``; ``None`` gives the built-in 225-case grid."""
    if path is None:
        return SweepConfig(dict(SWEEP_TABLE))
    src = _read(path)
    if not src.parser.has_section("sweep"):
        raise ConfigError("missing [sweep] section", src.path)
    table = {key: src.numbers("sweep", key, SWEEP_TABLE[key]) for key in SWEEP_TABLE}
    for b in table["beta_deg"]:
        if not 0 < b <= 90:
            raise src.error("inclination must be in (0, 90]", "sweep", "beta_deg")
    sect = src.parser["sweep"]
    algs = tuple(a.strip().upper() for a in sect.get("algorithms", "hi, fi, fs").split(",") if a.strip())
    for a in algs:
        if a not in ALGORITHMS:
            raise src.error(f"unknown algorithm {a.lower()!r}", "sweep", "algorithms")
    return SweepConfig(table, algs, src.number("sweep", "n_slices", 25, int))
