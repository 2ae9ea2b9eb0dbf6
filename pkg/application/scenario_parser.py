"""Scenario file parser: JSON documents to games, schedules and run settings"""

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from application.channel import (
    Band,
    ChannelSet,
    SisoScenario,
    band_levels,
    random_mimo_channels,
    random_siso_scenario,
    symmetric_distances,
)
from application.constraints import ConstraintSpec, UserConstraints, steering_vector
from application.engine import Schedule, ScheduleKind, make_schedule
from application.errors import InfeasibleBudgetError, ScenarioParseError, SimulationError
from application.game import GameSpec, GameVariant, build_game
from application.translations import TRANSLATIONS
from application.waterfilling import gap_factor

SECTIONS = ("channels", "constraints", "game", "schedule", "run")
CHANNEL_KINDS = ("explicit", "random", "siso")
EXPLICIT_KEYS = ("links", "noise", "distances")
RANDOM_KEYS = ("seed", "users", "antennas", "distances", "pathloss", "noise_power")
SISO_KEYS = ("bins", "responses", "random", "noise", "bands", "distances", "pathloss")
SISO_RANDOM_KEYS = ("seed", "users", "taps")
BAND_KEYS = ("label", "start", "stop")
LEVEL_KEYS = ("default", "bands")
CONSTRAINT_KEYS = ("power", "null", "shaping", "average_power", "peak_power", "masks", "gap")
STEERING_KEYS = ("steering_deg", "spacing")
GAP_KEYS = ("family", "error_probability")
GAME_KEYS = ("variant", "alpha")
SCHEDULE_KEYS = ("kind", "p_update", "D", "seed")
RUN_KEYS = ("max_iter", "tol", "init", "workers")


def decode_complex(value: Any) -> complex:
    """A number or an {"re": x, "im": y} object"""
    if isinstance(value, dict):
        if "re" not in value or set(value) - {"re", "im"}:
            raise ValueError(f"complex entries need exactly the keys re and im, got {sorted(value)}")
        parts = (value["re"], value.get("im", 0.0))
        if any(isinstance(p, bool) or not isinstance(p, (int, float)) for p in parts):
            raise ValueError(f"complex parts must be numbers, got {value}")
        return complex(float(parts[0]), float(parts[1]))
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"expected a number, got {value!r}")
    return complex(value)


def decode_array(value: Any) -> np.ndarray:
    """Nested JSON lists of complex entries to a complex array"""

    def walk(item: Any) -> Any:
        return [walk(x) for x in item] if isinstance(item, list) else decode_complex(item)

    if not isinstance(value, list):
        raise ValueError(f"expected a list, got {type(value).__name__}")
    return np.array(walk(value), dtype=complex)


def encode_array(a: np.ndarray) -> Any:
    """Complex array to nested lists of {"re", "im"} objects"""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return {"re": float(a.real), "im": float(a.imag)}
    return [encode_array(x) for x in a]


def encode_levels(a: np.ndarray) -> List[Optional[float]]:
    """Real vector with infinite entries written as null"""
    return [None if math.isinf(x) else float(x) for x in np.asarray(a, dtype=float)]


@dataclass(frozen=True)
class ScheduleSettings:
    kind: str = ScheduleKind.SEQUENTIAL.value
    update_probability: float = 1.0
    max_delay: int = 0
    seed: int = 0

    def build(self, user_count: int) -> Schedule:
        return make_schedule(self.kind, user_count, self.update_probability, self.max_delay, self.seed)


@dataclass(frozen=True)
class RunSettings:
    """Run options found in the scenario; None means not given there"""

    max_iter: Optional[int] = None
    tol: Optional[float] = None
    init: str = "zero"
    workers: Optional[int] = None


@dataclass(frozen=True, eq=False)
class RandomChannelSettings:
    """Recipe of a random MIMO channel set, kept so sweeps can redraw it"""

    seed: int
    users: int
    antennas: Union[int, Tuple[int, ...]]
    distances: Optional[np.ndarray]
    pathloss: float
    noise_power: float

    def build(
        self,
        seed: Optional[int] = None,
        antennas: Optional[Union[int, Tuple[int, ...]]] = None,
        distances: Optional[np.ndarray] = None,
    ) -> ChannelSet:
        return random_mimo_channels(
            self.seed if seed is None else seed,
            self.users,
            self.antennas if antennas is None else antennas,
            self.distances if distances is None else distances,
            self.pathloss,
            self.noise_power,
        )


@dataclass(frozen=True, eq=False)
class Scenario:
    game: GameSpec
    schedule: ScheduleSettings
    run: RunSettings
    random_channels: Optional[RandomChannelSettings] = None


class ScenarioParser:
    """Parser for JSON scenario files"""

    def __init__(self, language: str = "EN"):
        """
        Initialize parser

        Args:
            language: Language code ("UA" or "EN") for error messages
        """
        self.language = language
        self.t = TRANSLATIONS.get(language, TRANSLATIONS["EN"])

    def _msg(self, message_key: str, fallback: str, /, **kwargs: Any) -> str:
        return self.t.get(message_key, fallback).format(**kwargs)

    def parse(self, path: Path, seed: Optional[int] = None) -> Scenario:
        """
        Parse a scenario file

        Args:
            path: Path to the JSON scenario
            seed: overrides every seed found in the file (random channels and schedule)

        Returns:
            Scenario

        Raises:
            ScenarioParseError: with every problem found in the file
            InfeasibleBudgetError: when spectral masks cannot carry a power budget
        """
        if not path.exists():
            raise ScenarioParseError([self._msg("scenario_not_found", "Scenario file not found: {path}", path=path)])
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ScenarioParseError(
                [self._msg("scenario_read_error", "Cannot read scenario {path}: {error}", path=path, error=exc)]
            ) from exc
        return self.parse_document(document, seed)

    def parse_document(self, document: Any, seed: Optional[int] = None) -> Scenario:
        """Build a Scenario from an already decoded JSON document"""
        errors: List[str] = []
        if not isinstance(document, dict):
            raise ScenarioParseError([self._msg("scenario_not_object", "Scenario must be a JSON object")])
        self._check_keys(document, SECTIONS, "scenario", errors)
        for section in ("channels", "constraints", "game"):
            if section not in document:
                errors.append(self._msg("missing_section", "Missing section: {section}", section=section))

        variant, alpha = self._parse_game(document.get("game", {}), errors)
        channels, siso, random_settings = self._parse_channels(document.get("channels", {}), seed, errors)
        constraints = self._parse_constraints(document.get("constraints", []), channels, siso, errors)
        schedule = self._parse_schedule(document.get("schedule", {}), seed, errors)
        run = self._parse_run(document.get("run", {}), errors)
        has_channels = channels is not None or siso is not None
        if variant is not None and has_channels and (variant is GameVariant.SISO) != (siso is not None):
            errors.append(
                self._msg("variant_channel_mismatch", "Game {variant} does not match the channel section", variant=variant.value)
            )
        if errors:
            raise ScenarioParseError(errors)

        try:
            game = build_game(variant, constraints, channels, siso, alpha)
        except InfeasibleBudgetError:
            raise
        except (SimulationError, ValueError) as exc:
            raise ScenarioParseError([self._msg("invalid_game", "Invalid game: {error}", error=exc)]) from exc
        return Scenario(game, schedule, run, random_settings)

    def _check_keys(self, section: Dict, allowed: Sequence[str], where: str, errors: List[str]) -> None:
        for key in section:
            if key not in allowed:
                errors.append(self._msg("unknown_key", "Unknown key '{key}' in {where}", key=key, where=where))

    def _object(self, value: Any, allowed: Sequence[str], where: str, errors: List[str]) -> Dict:
        if not isinstance(value, dict):
            errors.append(self._msg("expected_object", "{where} must be an object", where=where))
            return {}
        self._check_keys(value, allowed, where, errors)
        return value

    def _number(
        self,
        section: Dict,
        key: str,
        where: str,
        errors: List[str],
        default: Optional[float] = None,
        minimum: Optional[float] = None,
        integer: bool = False,
    ) -> Optional[float]:
        if key not in section or section[key] is None:
            return default
        value = section[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)) or (integer and not float(value).is_integer()):
            kind = "integer" if integer else "number"
            errors.append(
                self._msg("expected_number", "{where}.{key} must be a {kind}", where=where, key=key, kind=kind)
            )
            return default
        if minimum is not None and value < minimum:
            errors.append(
                self._msg("below_minimum", "{where}.{key} must be at least {minimum}", where=where, key=key, minimum=minimum)
            )
            return default
        return int(value) if integer else float(value)

    def _array(self, value: Any, where: str, errors: List[str], real: bool = False) -> Optional[np.ndarray]:
        try:
            a = decode_array(value)
        except ValueError as exc:
            errors.append(self._msg("invalid_array", "{where}: {error}", where=where, error=exc))
            return None
        if real:
            if np.any(a.imag != 0):
                errors.append(self._msg("expected_real", "{where} must be real", where=where))
                return None
            return a.real.copy()
        return a

    def _distances(self, value: Any, users: Optional[int], where: str, errors: List[str]) -> Optional[np.ndarray]:
        if value is None:
            return None
        if isinstance(value, dict):
            section = self._object(value, ("direct", "cross"), where, errors)
            direct = self._number(section, "direct", where, errors, 1.0)
            cross = self._number(section, "cross", where, errors, 1.0)
            if users is None:
                return None
            return symmetric_distances(users, direct, cross)
        return self._array(value, where, errors, real=True)

    def _parse_game(self, value: Any, errors: List[str]) -> Tuple[Optional[GameVariant], float]:
        section = self._object(value, GAME_KEYS, "game", errors)
        alpha = self._number(section, "alpha", "game", errors, 0.0, minimum=0.0)
        try:
            return GameVariant(section.get("variant")), alpha
        except ValueError:
            errors.append(
                self._msg(
                    "unknown_variant",
                    "Unknown game variant {variant!r}; expected one of {choices}",
                    variant=section.get("variant"),
                    choices=", ".join(v.value for v in GameVariant),
                )
            )
            return None, alpha

    def _parse_channels(
        self, value: Any, seed: Optional[int], errors: List[str]
    ) -> Tuple[Optional[ChannelSet], Optional[SisoScenario], Optional[RandomChannelSettings]]:
        section = self._object(value, CHANNEL_KINDS, "channels", errors)
        kinds = [kind for kind in CHANNEL_KINDS if kind in section]
        if len(kinds) != 1:
            if section:
                errors.append(
                    self._msg("channel_kind", "channels needs exactly one of: {choices}", choices=", ".join(CHANNEL_KINDS))
                )
            return None, None, None
        kind = kinds[0]
        try:
            if kind == "explicit":
                return self._explicit_channels(section[kind], errors), None, None
            if kind == "random":
                settings = self._random_settings(section[kind], seed, errors)
                return (settings.build() if settings else None), None, settings
            return None, self._siso_scenario(section[kind], seed, errors), None
        except (SimulationError, ValueError, KeyError) as exc:
            errors.append(self._msg("invalid_channels", "Invalid channels: {error}", error=exc))
            return None, None, None

    def _explicit_channels(self, value: Any, errors: List[str]) -> Optional[ChannelSet]:
        where = "channels.explicit"
        section = self._object(value, EXPLICIT_KEYS, where, errors)
        links_value = section.get("links")
        noise_value = section.get("noise")
        if not isinstance(links_value, list) or not isinstance(noise_value, list):
            errors.append(self._msg("explicit_lists", "{where} needs 'links' and 'noise' lists", where=where))
            return None
        before = len(errors)
        if not all(isinstance(row, list) for row in links_value):
            errors.append(self._msg("explicit_lists", "{where} needs 'links' and 'noise' lists", where=where))
            return None
        links = [
            [self._array(m, f"{where}.links[{r}][{q}]", errors) for q, m in enumerate(row)]
            for r, row in enumerate(links_value)
        ]
        noise = [self._array(m, f"{where}.noise[{q}]", errors) for q, m in enumerate(noise_value)]
        distances = self._distances(section.get("distances"), len(links), f"{where}.distances", errors)
        if len(errors) > before:
            return None
        return ChannelSet(tuple(tuple(row) for row in links), tuple(noise), distances)

    def _random_settings(self, value: Any, seed: Optional[int], errors: List[str]) -> Optional[RandomChannelSettings]:
        where = "channels.random"
        section = self._object(value, RANDOM_KEYS, where, errors)
        before = len(errors)
        users = self._number(section, "users", where, errors, minimum=1, integer=True)
        if users is None:
            errors.append(self._msg("missing_key", "{where} needs '{key}'", where=where, key="users"))
        file_seed = self._number(section, "seed", where, errors, 0, minimum=0, integer=True)
        antennas: Union[int, Tuple[int, ...], None] = None
        raw = section.get("antennas")
        if isinstance(raw, list) and all(isinstance(a, int) and not isinstance(a, bool) and a >= 1 for a in raw):
            antennas = tuple(raw)
        elif isinstance(raw, int) and not isinstance(raw, bool) and raw >= 1:
            antennas = raw
        else:
            errors.append(self._msg("invalid_antennas", "{where}.antennas must be a positive integer or a list of them", where=where))
        distances = self._distances(section.get("distances"), users, f"{where}.distances", errors)
        pathloss = self._number(section, "pathloss", where, errors, 2.0, minimum=0.0)
        noise_power = self._number(section, "noise_power", where, errors, 1.0)
        if noise_power is not None and not noise_power > 0:
            errors.append(self._msg("positive_noise", "{where}.noise_power must be positive", where=where))
        if len(errors) > before:
            return None
        return RandomChannelSettings(
            file_seed if seed is None else seed, users, antennas, distances, pathloss, noise_power
        )

    def _levels(
        self, value: Any, bands: Sequence[Band], bins: int, default: float, where: str, errors: List[str]
    ) -> Optional[np.ndarray]:
        """A per-bin vector given as a list (null for infinity) or as band levels"""
        if isinstance(value, dict):
            section = self._object(value, LEVEL_KEYS, where, errors)
            base = section.get("default", default)
            base = math.inf if base is None else base
            levels = section.get("bands", {})
            if not isinstance(levels, dict) or not all(isinstance(v, (int, float)) for v in levels.values()):
                errors.append(self._msg("invalid_levels", "{where}.bands must map band labels to numbers", where=where))
                return None
            try:
                return band_levels(bands, bins, levels, base)
            except KeyError as exc:
                errors.append(self._msg("unknown_band", "{where}: unknown band {label}", where=where, label=exc))
                return None
        if isinstance(value, list):
            entries = [math.inf if v is None else v for v in value]
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entries):
                errors.append(self._msg("invalid_levels_list", "{where} must be a list of numbers", where=where))
                return None
            return np.array(entries, dtype=float)
        errors.append(self._msg("invalid_levels_list", "{where} must be a list of numbers", where=where))
        return None

    def _siso_scenario(self, value: Any, seed: Optional[int], errors: List[str]) -> Optional[SisoScenario]:
        where = "channels.siso"
        section = self._object(value, SISO_KEYS, where, errors)
        before = len(errors)
        bins = self._number(section, "bins", where, errors, minimum=1, integer=True)
        if bins is None:
            errors.append(self._msg("missing_key", "{where} needs '{key}'", where=where, key="bins"))
            return None
        bands: List[Band] = []
        for i, raw in enumerate(section.get("bands", [])):
            band = self._object(raw, BAND_KEYS, f"{where}.bands[{i}]", errors)
            start = self._number(band, "start", f"{where}.bands[{i}]", errors, integer=True)
            stop = self._number(band, "stop", f"{where}.bands[{i}]", errors, integer=True)
            if not isinstance(band.get("label"), str) or start is None or stop is None:
                errors.append(self._msg("invalid_band", "{where}.bands[{i}] needs label, start and stop", where=where, i=i))
                continue
            bands.append(Band(band["label"], start, stop))

        pathloss = self._number(section, "pathloss", where, errors, 1.0, minimum=0.0)
        noise_value = section.get("noise", 1.0)
        if isinstance(noise_value, (int, float)) and not isinstance(noise_value, bool):
            noise: Any = float(noise_value)
        elif isinstance(noise_value, list) and noise_value and isinstance(noise_value[0], list):
            noise = self._array(noise_value, f"{where}.noise", errors, real=True)
        else:
            noise = self._levels(noise_value, bands, bins, 1.0, f"{where}.noise", errors)

        if ("responses" in section) == ("random" in section):
            errors.append(self._msg("siso_source", "{where} needs exactly one of 'responses' and 'random'", where=where))
            return None
        if "responses" in section:
            responses = self._array(section["responses"], f"{where}.responses", errors)
            users = None if responses is None else responses.shape[0]
            distances = self._distances(section.get("distances"), users, f"{where}.distances", errors)
            if len(errors) > before:
                return None
            if responses.ndim != 3 or responses.shape[2] != bins:
                errors.append(self._msg("siso_shape", "{where}.responses must have shape (Q, Q, {bins})", where=where, bins=bins))
                return None
            return SisoScenario(responses, noise, tuple(bands), distances, pathloss)

        rand_where = f"{where}.random"
        rand = self._object(section["random"], SISO_RANDOM_KEYS, rand_where, errors)
        users = self._number(rand, "users", rand_where, errors, minimum=1, integer=True)
        if users is None:
            errors.append(self._msg("missing_key", "{where} needs '{key}'", where=rand_where, key="users"))
        file_seed = self._number(rand, "seed", rand_where, errors, 0, minimum=0, integer=True)
        taps = self._number(rand, "taps", rand_where, errors, 4, minimum=1, integer=True)
        distances = self._distances(section.get("distances"), users, f"{where}.distances", errors)
        if len(errors) > before:
            return None
        return random_siso_scenario(
            file_seed if seed is None else seed, users, bins, taps, distances, pathloss, noise, tuple(bands)
        )

    def _null_matrix(self, value: Any, tx_dim: Optional[int], where: str, errors: List[str]) -> Optional[np.ndarray]:
        if isinstance(value, dict):
            section = self._object(value, STEERING_KEYS, where, errors)
            angles = section.get("steering_deg")
            spacing = self._number(section, "spacing", where, errors, 0.5)
            if not isinstance(angles, list) or not angles or not all(isinstance(a, (int, float)) for a in angles):
                errors.append(self._msg("invalid_steering", "{where}.steering_deg must be a list of angles", where=where))
                return None
            if tx_dim is None:
                return None
            return np.hstack([steering_vector(math.radians(a), tx_dim, spacing) for a in angles])
        return self._array(value, where, errors)

    def _parse_constraints(
        self, value: Any, channels: Optional[ChannelSet], siso: Optional[SisoScenario], errors: List[str]
    ) -> Optional[ConstraintSpec]:
        if not isinstance(value, list) or not value:
            errors.append(self._msg("constraints_list", "constraints must be a non-empty list, one entry per user"))
            return None
        count = channels.user_count if channels is not None else (siso.user_count if siso is not None else None)
        if count is not None and len(value) != count:
            errors.append(
                self._msg("constraints_count", "{found} constraint entries for {count} users", found=len(value), count=count)
            )
        bands = siso.bands if siso is not None else ()
        bins = siso.bin_count if siso is not None else None
        users: List[UserConstraints] = []
        for q, raw in enumerate(value):
            where = f"constraints[{q}]"
            section = self._object(raw, CONSTRAINT_KEYS, where, errors)
            before = len(errors)
            tx_dim = channels.tx_dim(q) if channels is not None and q < channels.user_count else None
            fields: Dict[str, Any] = {
                "power_budget": self._number(section, "power", where, errors),
                "average_power": self._number(section, "average_power", where, errors),
                "peak_power": self._number(section, "peak_power", where, errors, math.inf),
            }
            if "null" in section:
                fields["null_matrix"] = self._null_matrix(section["null"], tx_dim, f"{where}.null", errors)
            if "shaping" in section:
                fields["shaping_matrix"] = self._array(section["shaping"], f"{where}.shaping", errors)
            if "masks" in section:
                if isinstance(section["masks"], dict) and bins is None:
                    errors.append(self._msg("masks_need_bands", "{where}.masks by band needs a SISO channel", where=where))
                else:
                    fields["masks"] = self._levels(section["masks"], bands, bins or 0, math.inf, f"{where}.masks", errors)
            gap = section.get("gap", 1.0)
            if isinstance(gap, dict):
                gap_section = self._object(gap, GAP_KEYS, f"{where}.gap", errors)
                try:
                    fields["gap"] = gap_factor(
                        gap_section.get("family", "qam"), float(gap_section.get("error_probability", 1e-6))
                    )
                except (SimulationError, TypeError, ValueError) as exc:
                    errors.append(self._msg("invalid_gap", "{where}.gap: {error}", where=where, error=exc))
            else:
                fields["gap"] = self._number(section, "gap", where, errors, 1.0)
            if len(errors) > before:
                continue
            try:
                users.append(UserConstraints(**fields))
            except InfeasibleBudgetError as exc:
                raise InfeasibleBudgetError(exc.budget, exc.capacity, q) from exc
            except (SimulationError, ValueError) as exc:
                errors.append(self._msg("invalid_constraints", "{where}: {error}", where=where, error=exc))
        return ConstraintSpec(tuple(users)) if len(users) == len(value) else None

    def _parse_schedule(self, value: Any, seed: Optional[int], errors: List[str]) -> ScheduleSettings:
        section = self._object(value, SCHEDULE_KEYS, "schedule", errors)
        kind = section.get("kind", ScheduleKind.SEQUENTIAL.value)
        if kind not in [k.value for k in ScheduleKind]:
            errors.append(self._msg("unknown_schedule", "Unknown schedule kind {kind!r}", kind=kind))
            kind = ScheduleKind.SEQUENTIAL.value
        p_update = self._number(section, "p_update", "schedule", errors, 1.0)
        if not 0.0 < p_update <= 1.0:
            errors.append(self._msg("invalid_p_update", "schedule.p_update must lie in (0, 1]"))
        max_delay = self._number(section, "D", "schedule", errors, 0, minimum=0, integer=True)
        file_seed = self._number(section, "seed", "schedule", errors, 0, minimum=0, integer=True)
        return ScheduleSettings(kind, p_update, max_delay, file_seed if seed is None else seed)

    def _parse_run(self, value: Any, errors: List[str]) -> RunSettings:
        section = self._object(value, RUN_KEYS, "run", errors)
        init = section.get("init", "zero")
        if init not in ("zero", "uniform_projected"):
            errors.append(self._msg("unknown_init", "Unknown init preset {init!r}", init=init))
        tol = self._number(section, "tol", "run", errors)
        if tol is not None and not tol > 0:
            errors.append(self._msg("positive_tol", "run.tol must be positive"))
        return RunSettings(
            self._number(section, "max_iter", "run", errors, minimum=1, integer=True),
            tol,
            init,
            self._number(section, "workers", "run", errors, minimum=1, integer=True),
        )


class ScenarioSerializer:
    """Writes a Scenario back as an explicit JSON document"""

    @staticmethod
    def to_document(scenario: Scenario) -> Dict[str, Any]:
        """
        Explicit form of a scenario: channel matrices, masks and gaps as numbers

        Args:
            scenario: parsed scenario

        Returns:
            JSON-ready dictionary that parses back to the same game
        """
        game = scenario.game
        if game.is_siso:
            s = game.siso
            channels: Dict[str, Any] = {
                "siso": {
                    "bins": s.bin_count,
                    "responses": encode_array(s.responses),
                    "noise": [[float(x) for x in row] for row in s.noise_powers],
                    "bands": [{"label": b.label, "start": b.start, "stop": b.stop} for b in s.bands],
                    "distances": [[float(x) for x in row] for row in s.distances],
                    "pathloss": s.pathloss_exponent,
                }
            }
        else:
            ch = game.channels
            explicit: Dict[str, Any] = {
                "links": [[encode_array(h) for h in row] for row in ch.links],
                "noise": [encode_array(r) for r in ch.noise],
            }
            if ch.distances is not None:
                explicit["distances"] = [[float(x) for x in row] for row in ch.distances]
            channels = {"explicit": explicit}

        constraints = []
        for uc in game.constraints.users:
            entry: Dict[str, Any] = {}
            if uc.power_budget is not None:
                entry["power"] = uc.power_budget
            if uc.null_matrix is not None:
                entry["null"] = encode_array(uc.null_matrix)
            if uc.shaping_matrix is not None:
                entry["shaping"] = encode_array(uc.shaping_matrix)
            if uc.average_power is not None:
                entry["average_power"] = uc.average_power
            if math.isfinite(uc.peak_power):
                entry["peak_power"] = uc.peak_power
            if uc.masks is not None:
                entry["masks"] = encode_levels(uc.masks)
            if uc.gap != 1.0:
                entry["gap"] = uc.gap
            constraints.append(entry)

        schedule = scenario.schedule
        run = {"init": scenario.run.init}
        for key in ("max_iter", "tol", "workers"):
            if getattr(scenario.run, key) is not None:
                run[key] = getattr(scenario.run, key)
        return {
            "channels": channels,
            "constraints": constraints,
            "game": {"variant": game.variant.value, "alpha": game.alpha},
            "schedule": {
                "kind": schedule.kind,
                "p_update": schedule.update_probability,
                "D": schedule.max_delay,
                "seed": schedule.seed,
            },
            "run": run,
        }

    @staticmethod
    def write(scenario: Scenario, path: Path) -> Optional[str]:
        """
        Write the explicit document to ``path``

        Returns:
            Error message if any, None otherwise
        """
        try:
            path.write_text(json.dumps(ScenarioSerializer.to_document(scenario), indent=2) + "\n", encoding="utf-8")
        except (OSError, TypeError, ValueError) as exc:
            return str(exc)
        return None
