"""
Configuration Module.

Parses run configuration documents::

    # classical example game, symmetric case 3
    [game]
    resource_value = 50
    injury_cost = -100
    display_cost = -10

    [state]
    squared_moduli = [0.5, 0.16666666666666666, 0.16666666666666666, 0.16666666666666666]
    policy = "renormalize"

Grammar: ``[section]`` headers, ``key = value`` lines, ``#`` comments
outside strings, blank lines ignored. Values are numbers, ``true`` /
``false``, double-quoted strings, or arrays ``[v, v]`` nesting at most once.
"""

import math
import re
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from qhd_system.core.classical import BimatrixGame2x2, HawkDoveParams, build_hawk_dove
from qhd_system.core.dynamics import (
    DEFAULT_EPSILON, DEFAULT_EXTINCTION_THRESHOLD, DEFAULT_GENERATIONS, DEFAULT_STEP_SIZE,
)
from qhd_system.core.errors import (
    ConfigDomainError, ConfigError, ConfigSyntaxError, MissingSectionError,
    NormalizationError, UnknownKeyError, ValidationError,
)
from qhd_system.core.quantum import (
    MODULI_NAMES, InitialState, NormalizationPolicy, TacticProfile, make_initial_state,
)
from qhd_system.core.sweep import SweepSettings

OUTPUT_FORMATS = ("text", "csv", "json")

AMPLITUDE_KEYS = ("hh", "dd", "hd", "dh")

SCHEMA: Dict[str, Tuple[str, ...]] = {
    "game": ("resource_value", "injury_cost", "display_cost", "losing_cost", "strict_signs"),
    "state": AMPLITUDE_KEYS + ("squared_moduli", "policy"),
    "tactics": ("p", "q"),
    "simulation": ("incumbent", "mutant", "epsilon", "generations", "step_size", "extinction_threshold"),
    "sweep": ("axes", "resolution", "split", "workers"),
    "output": ("format", "path"),
}

STRICT_SIGN_RANGES = {
    "resource_value": "(0, inf)",
    "injury_cost": "(-inf, 0)",
    "display_cost": "(-inf, 0)",
}


@dataclass(frozen=True)
class Entry:
    value: Any
    line: int


@dataclass(frozen=True)
class GameSection:
    resource_value: float
    injury_cost: float
    display_cost: float
    losing_cost: float = 0.0
    strict_signs: Optional[bool] = None

    def params(self) -> HawkDoveParams:
        return HawkDoveParams(self.resource_value, self.injury_cost, self.display_cost, self.losing_cost)

    def game(self) -> BimatrixGame2x2:
        return build_hawk_dove(self.params(), bool(self.strict_signs))


@dataclass(frozen=True)
class SimulationSection:
    """Invasion settings. Strategies are (p, q) pairs; a bare number s means (s, s)."""
    incumbent: Tuple[float, float] = (1.0, 1.0)
    mutant: Tuple[float, float] = (0.0, 0.0)
    epsilon: float = DEFAULT_EPSILON
    generations: int = DEFAULT_GENERATIONS
    step_size: float = DEFAULT_STEP_SIZE
    extinction_threshold: float = DEFAULT_EXTINCTION_THRESHOLD


@dataclass(frozen=True)
class OutputSection:
    format: Optional[str] = None
    path: str = ""


@dataclass
class RunConfig:
    """A validated configuration document.

    ``game`` is None only when the document was parsed without requiring
    the game section; the command line then supplies it from flags.
    """
    game: Optional[GameSection] = None
    state: InitialState = field(default_factory=lambda: InitialState(1, 0, 0, 0))
    policy: NormalizationPolicy = NormalizationPolicy.REJECT
    tactics: TacticProfile = field(default_factory=lambda: TacticProfile(1.0, 1.0))
    simulation: SimulationSection = field(default_factory=SimulationSection)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    output: OutputSection = field(default_factory=OutputSection)


class _ValueReader:
    """Recursive-descent reader for one value."""

    NUMBER_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
    BOOL_RE = re.compile(r"(true|false)\b")

    def __init__(self, text: str, line: int, column_offset: int):
        self.text = text
        self.line = line
        self.column_offset = column_offset
        self.pos = 0

    def error(self, message: str) -> ConfigSyntaxError:
        return ConfigSyntaxError(message, self.line, self.column_offset + self.pos + 1)

    def skip_whitespace(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def read_document_value(self) -> Any:
        value = self.read(depth=0)
        self.skip_whitespace()
        if self.pos < len(self.text):
            raise self.error(f"unexpected text after value: {self.text[self.pos:]!r}")
        return value

    def read(self, depth: int) -> Any:
        self.skip_whitespace()
        if self.pos >= len(self.text):
            raise self.error("missing value")

        ch = self.text[self.pos]
        if ch == "[":
            if depth >= 2:
                raise self.error("arrays may nest only once")
            return self.read_array(depth + 1)
        if ch == '"':
            return self.read_string()

        match = self.BOOL_RE.match(self.text, self.pos)
        if match:
            self.pos = match.end()
            return match.group(1) == "true"
        match = self.NUMBER_RE.match(self.text, self.pos)
        if match:
            self.pos = match.end()
            token = match.group(0)
            if any(c in token for c in ".eE"):
                return float(token)
            try:
                number = int(token)
            except ValueError:
                raise self.error("integer literal too long")
            if abs(number) > sys.float_info.max:
                raise self.error("integer literal out of range")
            return number
        raise self.error(f"unexpected character {ch!r}")

    def read_array(self, depth: int) -> List[Any]:
        self.pos += 1
        items = []
        self.skip_whitespace()
        if self.pos < len(self.text) and self.text[self.pos] == "]":
            self.pos += 1
            return items
        while True:
            items.append(self.read(depth))
            self.skip_whitespace()
            if self.pos < len(self.text) and self.text[self.pos] == ",":
                self.pos += 1
                continue
            if self.pos < len(self.text) and self.text[self.pos] == "]":
                self.pos += 1
                return items
            raise self.error("expected ',' or ']'")

    def read_string(self) -> str:
        end = self.text.find('"', self.pos + 1)
        if end == -1:
            raise self.error("unterminated string")
        value = self.text[self.pos + 1:end]
        self.pos = end + 1
        return value


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


class ConfigParser:
    """Parser for run configuration documents."""

    SECTION_RE = re.compile(r"\[\s*([A-Za-z_][A-Za-z0-9_]*)\s*\]")
    KEY_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*=\s*")

    def __init__(self):
        self.sections: Dict[str, Dict[str, Entry]] = {}
        self.section_lines: Dict[str, int] = {}

    @staticmethod
    def strip_comment(line: str) -> str:
        in_string = False
        for i, ch in enumerate(line):
            if ch == '"':
                in_string = not in_string
            elif ch == "#" and not in_string:
                return line[:i]
        return line

    def tokenize(self, text: str) -> Dict[str, Dict[str, Entry]]:
        """Split a document into sections of raw values.

        Args:
            text: The configuration document

        Returns:
            Section name -> key -> Entry

        Raises:
            ConfigSyntaxError: For malformed lines, values or duplicates
            UnknownKeyError: For sections or keys outside the schema
        """
        self.sections = {}
        self.section_lines = {}
        current = None

        for line_no, raw in enumerate(text.splitlines(), start=1):
            content = self.strip_comment(raw).rstrip()
            stripped = content.lstrip()
            if not stripped:
                continue
            lead = len(content) - len(stripped)

            if stripped.startswith("["):
                match = self.SECTION_RE.fullmatch(stripped)
                if not match:
                    raise ConfigSyntaxError("malformed section header", line_no, lead + 1)
                current = match.group(1)
                if current not in SCHEMA:
                    raise UnknownKeyError(f"unknown section [{current}]", line_no, lead + 1)
                if current in self.sections:
                    raise ConfigSyntaxError(f"duplicate section [{current}]", line_no, lead + 1)
                self.sections[current] = {}
                self.section_lines[current] = line_no
                continue

            match = self.KEY_RE.match(stripped)
            if not match:
                raise ConfigSyntaxError("expected 'key = value'", line_no, lead + 1)
            key = match.group(1)
            if current is None:
                raise ConfigSyntaxError(f"key '{key}' appears before any section", line_no, lead + 1)
            if key not in SCHEMA[current]:
                raise UnknownKeyError(f"unknown key '{key}' in [{current}]", line_no, lead + 1)
            if key in self.sections[current]:
                raise ConfigSyntaxError(f"duplicate key '{key}' in [{current}]", line_no, lead + 1)

            reader = _ValueReader(stripped[match.end():], line_no, lead + match.end())
            self.sections[current][key] = Entry(reader.read_document_value(), line_no)

        return self.sections

    def parse(self, text: str, require_game: bool = True) -> RunConfig:
        """Parse and validate a document, applying defaults for absent keys.

        Raises:
            ConfigError: Any syntax, schema or domain problem
        """
        self.tokenize(text)
        if require_game and "game" not in self.sections:
            raise MissingSectionError("missing required section [game]")

        state, policy = self._state()
        return RunConfig(
            game=self._game() if "game" in self.sections else None,
            state=state,
            policy=policy,
            tactics=self._tactics(),
            simulation=self._simulation(),
            sweep=self._sweep(),
            output=self._output(),
        )

    # Typed accessors

    def _entry(self, section: str, key: str) -> Optional[Entry]:
        return self.sections.get(section, {}).get(key)

    def _fail(self, section: str, key: str, value: Any, allowed: str) -> ConfigDomainError:
        entry = self._entry(section, key)
        line = entry.line if entry else self.section_lines.get(section)
        return ConfigDomainError(f"{section}.{key}", value, allowed, line)

    def _number(self, section: str, key: str, default: Optional[float] = None,
                low: float = -math.inf, high: float = math.inf,
                low_open: bool = False, high_open: bool = False) -> float:
        entry = self._entry(section, key)
        if entry is None:
            if default is None:
                raise MissingSectionError(f"missing required key '{key}' in [{section}]",
                                          self.section_lines.get(section))
            return default
        value = entry.value
        allowed = f"{'(' if low_open else '['}{low:g}, {high:g}{')' if high_open else ']'}"
        if not _is_number(value) or not math.isfinite(value):
            raise self._fail(section, key, value, "a finite number" if math.isinf(low) else allowed)
        too_low = value <= low if low_open else value < low
        too_high = value >= high if high_open else value > high
        if too_low or too_high:
            raise self._fail(section, key, value, allowed)
        return float(value)

    def _integer(self, section: str, key: str, default: int, low: int) -> int:
        entry = self._entry(section, key)
        if entry is None:
            return default
        if not isinstance(entry.value, int) or isinstance(entry.value, bool) or entry.value < low:
            raise self._fail(section, key, entry.value, f"an integer >= {low}")
        return entry.value

    def _bool(self, section: str, key: str, default: Optional[bool]) -> Optional[bool]:
        entry = self._entry(section, key)
        if entry is None:
            return default
        if not isinstance(entry.value, bool):
            raise self._fail(section, key, entry.value, "true | false")
        return entry.value

    def _choice(self, section: str, key: str, default: Optional[str], choices: Tuple[str, ...]) -> Optional[str]:
        entry = self._entry(section, key)
        if entry is None:
            return default
        if entry.value not in choices:
            raise self._fail(section, key, entry.value, " | ".join(f'"{c}"' for c in choices))
        return entry.value

    def _string(self, section: str, key: str, default: str) -> str:
        entry = self._entry(section, key)
        if entry is None:
            return default
        if not isinstance(entry.value, str):
            raise self._fail(section, key, entry.value, "a quoted string")
        return entry.value

    def _amplitude(self, key: str) -> complex:
        value = self._entry("state", key).value
        if _is_number(value):
            parts = [value, 0]
        elif isinstance(value, list) and len(value) == 2 and all(_is_number(v) for v in value):
            parts = value
        else:
            raise self._fail("state", key, value, "a real number or [re, im]")
        if not all(math.isfinite(v) for v in parts):
            raise self._fail("state", key, value, "finite components")
        return complex(parts[0], parts[1])

    def _strategy(self, key: str, default: Tuple[float, float]) -> Tuple[float, float]:
        entry = self._entry("simulation", key)
        if entry is None:
            return default
        value = entry.value
        pair = [value, value] if _is_number(value) else value
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(_is_number(v) and 0.0 <= v <= 1.0 for v in pair)):
            raise self._fail("simulation", key, value, "a number in [0, 1] or [p, q]")
        return (float(pair[0]), float(pair[1]))

    # Sections

    def _game(self) -> GameSection:
        section = GameSection(
            resource_value=self._number("game", "resource_value"),
            injury_cost=self._number("game", "injury_cost"),
            display_cost=self._number("game", "display_cost"),
            losing_cost=self._number("game", "losing_cost", 0.0),
            strict_signs=self._bool("game", "strict_signs", None),
        )
        try:
            section.params().validate(bool(section.strict_signs))
        except ValidationError as e:
            raise self._fail("game", e.field, getattr(section, e.field),
                             STRICT_SIGN_RANGES.get(e.field, "a finite number"))
        return section

    def _state(self) -> Tuple[InitialState, NormalizationPolicy]:
        policy = NormalizationPolicy(self._choice("state", "policy", "reject", ("reject", "renormalize")))
        present = [k for k in AMPLITUDE_KEYS if self._entry("state", k) is not None]
        moduli = self._entry("state", "squared_moduli")

        if moduli is not None and present:
            raise self._fail("state", "squared_moduli", moduli.value, "either squared_moduli or hh/dd/hd/dh, not both")
        if moduli is not None:
            value = moduli.value
            if (not isinstance(value, list) or len(value) != 4
                    or not all(_is_number(v) and math.isfinite(v) and v >= 0 for v in value)):
                raise self._fail("state", "squared_moduli", value, "[a2, b2, c2, d2] of non-negative numbers")
            amps = [math.sqrt(v) for v in value]
        elif present:
            amps = [self._amplitude(k) if k in present else 0j for k in AMPLITUDE_KEYS]
        else:
            amps = [1, 0, 0, 0]

        try:
            return make_initial_state(amps, policy), policy
        except NormalizationError as e:
            key = "squared_moduli" if moduli is not None else (present[0] if present else "hh")
            raise self._fail("state", key, e.norm_squared,
                             f"squared amplitudes summing to 1 (policy \"{policy.value}\")")

    def _tactics(self) -> TacticProfile:
        return TacticProfile(self._number("tactics", "p", 1.0, 0.0, 1.0),
                             self._number("tactics", "q", 1.0, 0.0, 1.0))

    def _simulation(self) -> SimulationSection:
        defaults = SimulationSection()
        incumbent = self._strategy("incumbent", defaults.incumbent)
        mutant = self._strategy("mutant", defaults.mutant)
        if incumbent == mutant:
            raise self._fail("simulation", "mutant", list(mutant), "a strategy different from the incumbent")
        return SimulationSection(
            incumbent=incumbent,
            mutant=mutant,
            epsilon=self._number("simulation", "epsilon", DEFAULT_EPSILON, 0.0, 1.0, True, True),
            generations=self._integer("simulation", "generations", DEFAULT_GENERATIONS, 1),
            step_size=self._number("simulation", "step_size", DEFAULT_STEP_SIZE, 0.0, 1.0, low_open=True),
            extinction_threshold=self._number("simulation", "extinction_threshold",
                                              DEFAULT_EXTINCTION_THRESHOLD, 0.0, 0.5, True, True),
        )

    def _sweep(self) -> SweepSettings:
        defaults = SweepSettings()
        axes = defaults.axes
        entry = self._entry("sweep", "axes")
        if entry is not None:
            value = entry.value
            if (not isinstance(value, list) or len(value) != 2 or value[0] == value[1]
                    or any(v not in MODULI_NAMES for v in value)):
                raise self._fail("sweep", "axes", value, f"two distinct names from {list(MODULI_NAMES)}")
            axes = (value[0], value[1])
        return SweepSettings(
            axes=axes,
            resolution=self._integer("sweep", "resolution", defaults.resolution, 2),
            split=self._number("sweep", "split", defaults.split, 0.0, 1.0),
            workers=self._integer("sweep", "workers", defaults.workers, 1),
        )

    def _output(self) -> OutputSection:
        return OutputSection(
            format=self._choice("output", "format", None, OUTPUT_FORMATS),
            path=self._string("output", "path", ""),
        )


def parse_config(text: str, require_game: bool = True) -> RunConfig:
    """Parse a configuration document into a validated RunConfig.

    Args:
        text: Document contents
        require_game: Raise MissingSectionError when [game] is absent

    Returns:
        RunConfig with defaults applied

    Raises:
        ConfigError: Syntax error (line, column), unknown key (line) or
            domain violation (field, value, allowed range)
    """
    return ConfigParser().parse(text, require_game)


def load_config(path: str, require_game: bool = True) -> RunConfig:
    """Read and parse a configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read configuration file {path}: {e.strerror}")
    return parse_config(text, require_game)
