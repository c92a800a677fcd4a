import os
import re
import warnings
import configparser

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from wigdil import (
    ParseError,
    UnknownBathType,
    InvalidPath,
    PhysicsError,
    WigDilWarning
)
from wigdil.bath import BathSpec, SpectralPreset
from wigdil.gaussian import SystemInit
from wigdil.ancilla import AncillaConfig
from wigdil.constants import (
    DEFAULT_RTOL,
    DEFAULT_ATOL,
    DEFAULT_N_POINTS,
    DEFAULT_K,
    BATH_TIM,
    BATH_DISCRETE,
    BATH_SPECTRAL,
    BATH_TYPES,
    CSV_COLUMNS
)

def get_val_default(val, default = None, coerce = None):
    '''
    If val is empty (None or empty iterable), return default.
    '''
    if coerce is not None and val is not None:
        try:
            val = coerce(val)
        except ValueError:
            pass
    if val == 0: return val
    elif val: return val
    else: return default

def parse_multiline_pairs(s: str, kv_sep: str = ':'):
    '''
    Converts raw '<k1><kv_sep><v1>\n<k2><kv_sep><v2>' string into [('<k1>', '<v1>'), ('<k2>', '<v2>')].
    Unlike a dict, repeated keys are kept.
    '''
    return [tuple(part.strip() for part in line.split(kv_sep, 1))
            for line in s.split('\n') if line.strip()]

#################
##  SCENARIOS  ##
#################

@dataclass(frozen = True)
class TimBath:
    kappa: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise PhysicsError(f"kappa must be positive (got {self.kappa}).")

Bath = Union[TimBath, BathSpec, SpectralPreset]

@dataclass(frozen = True)
class TimeConfig:
    t_max: float
    n_points: int = DEFAULT_N_POINTS

@dataclass(frozen = True)
class IntegratorConfig:
    rtol: float = DEFAULT_RTOL
    atol: float = DEFAULT_ATOL

@dataclass(frozen = True)
class OutputConfig:
    path: Optional[str] = None
    columns: Tuple[str, ...] = CSV_COLUMNS

@dataclass(frozen = True)
class Scenario:
    """
    One fully-defaulted run: initial system state, exactly one bath, time grid,
    optional ancilla, integrator tolerances and output selection.
    """
    system: SystemInit
    bath: Bath
    time: TimeConfig
    ancilla: Optional[AncillaConfig] = None
    integrator: IntegratorConfig = field(default_factory = IntegratorConfig)
    output: OutputConfig = field(default_factory = OutputConfig)

    @property
    def bath_type(self) -> str:
        if isinstance(self.bath, TimBath): return BATH_TIM
        elif isinstance(self.bath, BathSpec): return BATH_DISCRETE
        else: return BATH_SPECTRAL

    def describe(self) -> str:
        lines = [f"system:\tmu={self.system.mu}, N={self.system.N}, M={self.system.M}",
                 f"bath:\t{self.bath_type} {self.bath}",
                 f"time:\tt_max={self.time.t_max}, n_points={self.time.n_points}",
                 f"ancilla:\t{'disabled' if self.ancilla is None else f'z={self.ancilla.z}'}",
                 f"integrator:\trtol={self.integrator.rtol}, atol={self.integrator.atol}",
                 f"output:\t{self.output.path or 'stdout'} ({','.join(self.output.columns)})"]
        return '\n'.join(lines)

###############
##  PARSING  ##
###############

_FIELDS = {"system": {"mu", "N", "M", "nbar", "r", "theta"},
           "time": {"t_max", "n_points"},
           "ancilla": {"enabled", "z"},
           "integrator": {"rtol", "atol"},
           "output": {"path", "columns"},
           f"bath.{BATH_TIM}": {"kappa"},
           f"bath.{BATH_DISCRETE}": {"omega", "modes"},
           f"bath.{BATH_SPECTRAL}": {"shape", "omega", "kappa", "amplitude", "center",
                                     "width", "cutoff", "band", "K"}}

_SECTION_RE = re.compile(r"^\s*\[([^\]]*)\]")
_KEY_RE = re.compile(r"^([^\s=:;#][^=:]*?)\s*[=:]")

def _locate(text: str):
    '''
    Line numbers (1-based) of section headers and of the first line of each key.
    '''
    sections, keys = {}, {}
    section = None
    for i, line in enumerate(text.splitlines(), 1):
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1).strip()
            sections.setdefault(section, i)
            continue
        m = _KEY_RE.match(line)
        if m and section is not None:
            keys.setdefault((section, m.group(1).strip()), i)
    return sections, keys

def _read(text: str) -> configparser.ConfigParser:
    conf = configparser.ConfigParser(interpolation = None, strict = True,
                                     comment_prefixes = ('#', ';'), inline_comment_prefixes = ('#',))
    conf.optionxform = str ## keys are case-sensitive (N vs n)
    try:
        conf.read_string(text)
    except configparser.MissingSectionHeaderError as e:
        raise ParseError("Entry outside of any section.", line = e.lineno)
    except configparser.DuplicateSectionError as e:
        raise ParseError(f"Duplicate section '{e.section}'.", line = e.lineno, field = e.section)
    except configparser.DuplicateOptionError as e:
        raise ParseError(f"Duplicate key '{e.option}'.", line = e.lineno, field = f"{e.section}.{e.option}")
    except configparser.ParsingError as e:
        lineno = e.errors[0][0] if e.errors else None
        raise ParseError("Malformed line.", line = lineno)
    except configparser.Error as e:
        raise ParseError(str(e))
    return conf

class _Section():
    '''
    Typed access to one section with line-aware errors.
    '''
    def __init__(self, conf, name, sections, keys):
        self.name = name
        self._conf = conf
        self._keys = keys
        self.line = sections.get(name)

    def __contains__(self, key):
        return self._conf.has_section(self.name) and self._conf.has_option(self.name, key)

    def _error(self, key, message):
        return ParseError(message, line = self._keys.get((self.name, key), self.line),
                          field = f"{self.name}.{key}")

    def get(self, key, type = str, default = None, required = False):
        if key not in self:
            if required:
                raise ParseError(f"Missing required key '{key}'.", line = self.line,
                                 field = f"{self.name}.{key}")
            return default
        raw = self._conf.get(self.name, key).strip()
        try:
            if type is bool:
                if raw.lower() not in configparser.ConfigParser.BOOLEAN_STATES:
                    raise ValueError(raw)
                return configparser.ConfigParser.BOOLEAN_STATES[raw.lower()]
            elif type is complex:
                val = complex(raw.replace(' ', ''))
            elif type is int:
                val = int(raw)
            elif type is float:
                val = float(raw)
            else:
                return raw
        except (ValueError, TypeError, OverflowError):
            raise self._error(key, f"Cannot read '{raw}' as {type.__name__}.")
        if not np.isfinite(val):
            raise self._error(key, f"Value must be finite (got '{raw}').")
        return val

    def wrap(self, key, e: PhysicsError):
        '''Re-raise a constructor complaint as a ParseError at this section.'''
        return ParseError(e.message, line = self._keys.get((self.name, key), self.line),
                          field = f"{self.name}.{key}" if key else self.name)

def _parse_system(sec: _Section) -> SystemInit:
    mu = sec.get("mu", complex, default = 0j)
    standard = any(k in sec for k in ("N", "M"))
    squeezed = any(k in sec for k in ("nbar", "r", "theta"))
    if standard and squeezed:
        raise ParseError("Give either (N, M) or (nbar, r, theta), not both.",
                         line = sec.line, field = "system")
    if squeezed:
        nbar = sec.get("nbar", float, default = 0.)
        return SystemInit.from_squeezed_thermal(mu = mu, nbar = nbar, r = sec.get("r", float, default = 0.),
                                                theta = sec.get("theta", float, default = 0.))
    ## UnphysicalInit propagates
    return SystemInit(mu = mu, N = sec.get("N", float, default = 0.), M = sec.get("M", complex, default = 0j))

def _parse_band(sec: _Section):
    raw = sec.get("band")
    if raw is None: return None
    parts = [p for p in re.split(r"[,\s]+", raw.strip()) if p]
    try:
        lo, hi = (float(p) for p in parts)
    except ValueError:
        raise sec._error("band", f"band must be two numbers 'lo, hi' (got '{raw}').")
    return (lo, hi)

def _parse_bath(sec: _Section, bath_type: str) -> Bath:
    try:
        if bath_type == BATH_TIM:
            return TimBath(sec.get("kappa", float, required = True))
        elif bath_type == BATH_DISCRETE:
            raw = sec.get("modes", required = True)
            modes = []
            for pair in parse_multiline_pairs(raw):
                try:
                    Omega, gamma = (float(v) for v in pair)
                except ValueError:
                    raise sec._error("modes", f"Each mode must read 'Omega:gamma' (got '{':'.join(pair)}').")
                modes.append((Omega, gamma))
            return BathSpec(sec.get("omega", float, default = 0.), tuple(modes))
        else:
            shape = sec.get("shape", required = True)
            kwargs = {k: sec.get(k, float) for k in ("kappa", "amplitude", "center", "width", "cutoff")}
            return SpectralPreset(shape = shape, omega = sec.get("omega", float, default = 0.),
                                  band = _parse_band(sec), K = sec.get("K", int, default = DEFAULT_K),
                                  **{k: v for k, v in kwargs.items() if v is not None})
    except ParseError:
        raise
    except PhysicsError as e:
        raise sec.wrap(None, e)

def parse_scenario(text: str, params = None) -> Scenario:
    '''
    Parse scenario INI text into a fully-defaulted Scenario.

    ``params`` (a Params object) supplies package-wide defaults for n_points,
    rtol and atol; otherwise the built-in defaults apply.

    Raises
    ------
    ParseError
        Malformed text, unknown section or key, bad value, or missing field
    UnknownBathType
        Section 'bath.<x>' with an unrecognised <x>
    UnphysicalInit
        |M|² > N(N+1)
    '''
    if not isinstance(text, str):
        raise ParseError("Scenario text must be a string.")
    conf = _read(text)
    sections, keys = _locate(text)
    bath_sections = []
    for name in conf.sections():
        if name.startswith("bath."):
            bath_type = name[len("bath."):]
            if bath_type not in BATH_TYPES:
                raise UnknownBathType(bath_type, line = sections.get(name))
            bath_sections.append((name, bath_type))
        elif name not in _FIELDS:
            raise ParseError(f"Unknown section '{name}'.", line = sections.get(name), field = name)
        for key in conf.options(name):
            if key not in _FIELDS[name]:
                raise ParseError(f"Unknown key '{key}'.", line = keys.get((name, key), sections.get(name)),
                                 field = f"{name}.{key}")
    if len(bath_sections) != 1:
        raise ParseError(f"Exactly one bath section is required (found {len(bath_sections)}).",
                         line = sections.get(bath_sections[1][0]) if len(bath_sections) > 1 else None,
                         field = "bath")
    for required in ("system", "time"):
        if not conf.has_section(required):
            raise ParseError(f"Missing required section '{required}'.", field = required)
    section = lambda name: _Section(conf, name, sections, keys)

    system = _parse_system(section("system"))
    bath_name, bath_type = bath_sections[0]
    bath = _parse_bath(section(bath_name), bath_type)

    default = lambda param, fallback: fallback if params is None else getattr(params, param).default
    sec = section("time")
    t_max = sec.get("t_max", float, required = True)
    if not t_max > 0:
        raise sec._error("t_max", f"t_max must be positive (got {t_max}).")
    n_points = sec.get("n_points", int, default = default("n_points", DEFAULT_N_POINTS))
    if n_points < 2:
        raise sec._error("n_points", f"n_points must be at least 2 (got {n_points}).")
    time = TimeConfig(t_max, n_points)

    sec = section("ancilla")
    ancilla = None
    if sec.get("enabled", bool, default = False):
        z = sec.get("z", float)
        if z is None:
            ancilla = AncillaConfig.from_occupation(system.N)
        else:
            try:
                ancilla = AncillaConfig(z)
            except PhysicsError as e:
                raise sec.wrap("z", e)
            if not np.isclose(ancilla.N, system.N, rtol = 1e-9, atol = 1e-12):
                warnings.warn(f"Ancilla occupation sinh²z = {ancilla.N:.6g} differs from system N = {system.N:.6g}.",
                              WigDilWarning)
    elif "z" in sec:
        sec.get("z", float)

    sec = section("integrator")
    integrator = IntegratorConfig(sec.get("rtol", float, default = default("rtol", DEFAULT_RTOL)),
                                  sec.get("atol", float, default = default("atol", DEFAULT_ATOL)))
    for key in ("rtol", "atol"):
        if not getattr(integrator, key) > 0:
            raise sec._error(key, f"{key} must be positive.")

    sec = section("output")
    columns = CSV_COLUMNS
    raw = sec.get("columns")
    if raw is not None:
        wanted = [c.strip() for c in raw.replace('\n', ',').split(',') if c.strip()]
        unknown = [c for c in wanted if c not in CSV_COLUMNS]
        if unknown or not wanted:
            raise sec._error("columns", f"Unknown column(s): {', '.join(unknown) or '(none given)'}.")
        columns = tuple(c for c in CSV_COLUMNS if c in wanted)
    output = OutputConfig(get_val_default(sec.get("path"), default = None), columns)

    return Scenario(system, bath, time, ancilla, integrator, output)

def read_scenario(path: str, params = None) -> Scenario:
    if not os.path.isfile(path):
        raise InvalidPath(path)
    try:
        with open(path, 'r', encoding = "utf-8") as f:
            text = f.read()
    except UnicodeDecodeError as e:
        raise ParseError(f"Scenario file '{path}' is not valid UTF-8 ({e.reason} at byte {e.start}).")
    except OSError as e:
        raise ParseError(f"Cannot read scenario file '{path}': {e.strerror or e}.")
    return parse_scenario(text, params = params)

####################
##  CLI DEFAULTS  ##
####################

## parameters defaults
class Param():
    ## names: some (non-generator) iterable
    def __init__(self, default, *names, description = None, **kwargs):
        self.default = default
        self.names = names
        self.description = description
        self.options = kwargs

    ## generate [default, *names] list for use in typer.Option
    def __call__(self, *default):
        default = self.default if not default else default[0]
        return [default] + list(self.names)

    def help(self):
        return self.options.get("help", self.custom_default())

    def custom_default(self):
        return f"[default: {self.default}]"

    def format_log(self, val):
        output = f"{'|'.join(self.names)}:\t{val}"
        if val == self.default:
            output += " (default)"
        return output

    @property
    def long(self):
        longest_len = max(len(name) for name in self.names)
        return [name for name in self.names if len(name) == longest_len][0]

## parameter names namespace
class Params():
    """
    Package-wide CLI defaults, read from the file named by $WIGDIL_CONFIG if set.
    """
    def __init__(self, config_file = None):

        ## read config file
        if config_file and os.path.exists(config_file):
            self.config_file = config_file
            conf = configparser.ConfigParser()
            try:
                conf.read(self.config_file, encoding = "utf-8")
            except (configparser.Error, UnicodeDecodeError) as e:
                raise ParseError(f"Cannot parse package config '{config_file}': {e}")
            def conf_get(*args, type = str, **kwargs):
                if not conf.has_option(*args[:2]) or not conf.get(*args[:2]).strip(): return None
                if type is str: get = conf.get
                elif type is bool: get = conf.getboolean
                elif type is int: get = conf.getint
                elif type is float: get = conf.getfloat
                try:
                    return get(*args, **kwargs)
                except ValueError:
                    raise ParseError(f"Bad value in package config '{config_file}'.", field = '.'.join(args[:2]))
        elif config_file and not os.path.exists(config_file):
            raise InvalidPath(config_file)
        else:
            self.config_file = None
            def conf_get(*args, **kwargs):
                return None

        ## general
        section_general = "general"
        get_general = lambda x, **kwargs: conf_get(section_general, x, **kwargs)
        self.version = Param(None, "-v", "--version")
        self.quiet = Param(get_val_default(get_general("quiet", type = bool), default = False),
                           "--quiet/--verbose", help = "suppress progress and info messages")
        self.threads = Param(get_val_default(get_general("threads", type = int), default = None),
                             "--threads",
                             help = ("worker processes for per-time-point evaluation;"
                                     " 0 means all CPUs [default: $WIGNER_DILATION_THREADS, else all CPUs]"))
        self.log = Param(get_val_default(get_general("log"), default = None), "--log",
                         help = "path to log file")

        ## scenario defaults
        section_scenario = "scenario"
        get_scenario = lambda x, **kwargs: conf_get(section_scenario, x, **kwargs)
        self.n_points = Param(get_val_default(get_scenario("n points", type = int), default = DEFAULT_N_POINTS),
                              "--n-points", help = "number of time-grid points")
        self.rtol = Param(get_val_default(get_scenario("rtol", type = float), default = DEFAULT_RTOL),
                          "--rtol", help = "integrator relative tolerance")
        self.atol = Param(get_val_default(get_scenario("atol", type = float), default = DEFAULT_ATOL),
                          "--atol", help = "integrator absolute tolerance")

        ## verbs
        self.config = Param(None, "config", help = "scenario INI file")
        self.output = Param(None, "-o", "--output", help = "CSV output path [default: [output] path, else stdout]")
        self.N = Param(1., "--N", help = "thermal occupation N of the initial system state")
        self.ancilla = Param(True, "--ancilla/--no-ancilla", help = "include the ancilla columns")
