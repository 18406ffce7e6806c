"""Spectroscopic line-list database: domain types, CSV parser, serializer.

The on-disk format stores SI-ready values (Hz, Hz m^2 per molecule), so no
wavenumber or column-density conversion happens in-core.  Upstream catalog
data (HITRAN-style cm^-1 / cm^2 units) must be converted by a preprocessing
step before ingestion:

    fc0_hz       = nu [cm^-1]                  * 100 * c0
    S            = S  [cm^-1 / (molec cm^-2)]  * 100 * c0 * 1e-4
    delta_hz     = delta [cm^-1/atm]           * 100 * c0
    alpha_*_hz   = gamma [cm^-1/atm]           * 100 * c0

CSV header: gas,isotope,fc0_hz,S,delta_hz,alpha_air_hz,alpha_gas_hz,gamma
Lines starting with '#' are comments; fields are base-10 decimals, exponent
notation allowed.  Serialization emits 17 significant digits so that a
parse -> serialize -> parse round trip is the identity.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

from ..errors import LineListError

CSV_HEADER = "gas,isotope,fc0_hz,S,delta_hz,alpha_air_hz,alpha_gas_hz,gamma"
_FIELDS = CSV_HEADER.split(",")


@dataclass(frozen=True)
class AbsorptionLine:
    """One spectroscopic line (center at reference pressure, SI units)."""

    gas_id: int
    isotope_id: int
    fc0_hz: float          # resonant frequency at reference pressure [Hz]
    intensity: float       # line intensity [Hz m^2 / molecule]
    delta_hz: float        # linear pressure shift [Hz at p0]
    alpha_air_hz: float    # air-broadening half width [Hz at (T0, p0)]
    alpha_gas_hz: float    # self-broadening half width [Hz at (T0, p0)]
    gamma: float           # temperature-broadening exponent

    def __post_init__(self):
        if self.fc0_hz <= 0:
            raise LineListError("fc0_hz must be > 0", field="fc0_hz")
        if self.alpha_air_hz <= 0:
            raise LineListError("alpha_air_hz must be > 0", field="alpha_air_hz")
        if self.alpha_gas_hz <= 0:
            raise LineListError("alpha_gas_hz must be > 0", field="alpha_gas_hz")
        if self.intensity < 0:
            raise LineListError("S must be >= 0", field="S")


@dataclass(frozen=True)
class LineDatabase:
    """Ordered, read-only collection of absorption lines.

    Canonical order is ascending resonant frequency; safe to share across
    concurrent evaluators once constructed.
    """

    lines: tuple[AbsorptionLine, ...]
    source_label: str = ""

    def __post_init__(self):
        object.__setattr__(
            self, "lines", tuple(sorted(self.lines, key=lambda l: l.fc0_hz))
        )

    def __len__(self):
        return len(self.lines)

    def gases(self) -> list[int]:
        """Distinct gas ids present, ascending."""
        return sorted({l.gas_id for l in self.lines})

    def for_gases(self, gas_ids) -> "LineDatabase":
        wanted = set(gas_ids)
        return LineDatabase(
            lines=tuple(l for l in self.lines if l.gas_id in wanted),
            source_label=self.source_label,
        )


@dataclass(frozen=True)
class Medium:
    """Gas mixture with state variables entering the absorption coefficient.

    species: list of (gas_id, isotope_id, mixing_ratio).  An entry with
    isotope_id = 0 applies its ratio to every isotope of that gas present in
    the database.
    """

    temperature: float                 # [K]
    pressure: float                    # [atm]
    reference_temperature: float = 296.0   # T0 [K]
    reference_pressure: float = 1.0        # p0 [atm]
    species: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0 K")
        if self.pressure <= 0:
            raise ValueError("pressure must be > 0 atm")
        total = 0.0
        for gas_id, isotope_id, q in self.species:
            if not 0.0 <= q <= 1.0:
                raise ValueError(
                    f"mixing ratio for gas {gas_id}.{isotope_id} out of [0, 1]: {q}"
                )
            total += q
        if total > 1.0 + 1e-9:
            raise ValueError(f"mixing ratios sum to {total} > 1")
        object.__setattr__(self, "species", tuple(self.species))

    def mixing_ratio(self, gas_id: int, isotope_id: int) -> float:
        """Ratio for a (gas, isotope) pair; isotope-0 entries act as wildcard."""
        wildcard = 0.0
        for g, i, q in self.species:
            if g == gas_id and i == isotope_id:
                return q
            if g == gas_id and i == 0:
                wildcard = q
        return wildcard


def parse_linelist(stream, source_label: str = "") -> LineDatabase:
    """Parse the documented CSV format into a sorted LineDatabase.

    Accepts a text stream, bytes, or str.  Raises LineListError with the
    offending line number and field on malformed input; duplicate
    (gas, isotope, fc0) triples are rejected.
    """
    if isinstance(stream, bytes):
        stream = io.StringIO(stream.decode("utf-8"))
    elif isinstance(stream, str):
        stream = io.StringIO(stream)

    lines: list[AbsorptionLine] = []
    seen: set[tuple] = set()
    header_seen = False
    for lineno, raw in enumerate(stream, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        if not header_seen:
            if text != CSV_HEADER:
                raise LineListError(
                    f"expected header '{CSV_HEADER}', got '{text}'", line_number=lineno
                )
            header_seen = True
            continue
        parts = text.split(",")
        if len(parts) != len(_FIELDS):
            raise LineListError(
                f"expected {len(_FIELDS)} fields, got {len(parts)}", line_number=lineno
            )
        values = {}
        for name, part in zip(_FIELDS, parts):
            part = part.strip()
            try:
                values[name] = int(part) if name in ("gas", "isotope") else float(part)
            except ValueError:
                raise LineListError(
                    f"non-numeric value '{part}'", line_number=lineno, field=name
                ) from None
        key = (values["gas"], values["isotope"], values["fc0_hz"])
        if key in seen:
            raise LineListError(
                f"duplicate line (gas={key[0]}, isotope={key[1]}, fc0={key[2]!r})",
                line_number=lineno,
            )
        seen.add(key)
        try:
            line = AbsorptionLine(
                gas_id=values["gas"],
                isotope_id=values["isotope"],
                fc0_hz=values["fc0_hz"],
                intensity=values["S"],
                delta_hz=values["delta_hz"],
                alpha_air_hz=values["alpha_air_hz"],
                alpha_gas_hz=values["alpha_gas_hz"],
                gamma=values["gamma"],
            )
        except LineListError as exc:
            raise LineListError(str(exc.args[0]).split(": ")[-1],
                                line_number=lineno, field=exc.field) from None
        lines.append(line)

    if not header_seen:
        raise LineListError(f"missing header '{CSV_HEADER}'", line_number=0)
    return LineDatabase(lines=tuple(lines), source_label=source_label)


def serialize_linelist(db: LineDatabase) -> str:
    """Emit the canonical CSV form (17 significant digits, LF endings)."""
    out = [CSV_HEADER]
    for l in db.lines:
        out.append(
            f"{l.gas_id},{l.isotope_id},{l.fc0_hz:.17g},{l.intensity:.17g},"
            f"{l.delta_hz:.17g},{l.alpha_air_hz:.17g},{l.alpha_gas_hz:.17g},"
            f"{l.gamma:.17g}"
        )
    return "\n".join(out) + "\n"


def load_linelist(path) -> LineDatabase:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_linelist(fh, source_label=str(path))
