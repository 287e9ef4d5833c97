"""INI-style scenario files.

Example::

    [domain]
    dim = 1
    lengths = 1.0
    cells = 128

    [time]
    T = 1.0
    N = 64

    [kernel]
    kind = gaussian
    amplitude = 1.0
    width = 0.1

    [nonlinearity]
    beta_3 = 1.0
    pi_b = 0.5
    pi_c = 0.0

    [forcing]
    profile = constant
    offset = 1.0

    [initial]
    theta0 = cos
    theta0_amplitude = 0.5

    [study]
    N_list = 64, 128, 256
    N_ref = 4096

Keys are case sensitive.  Missing keys take the defaults below; unknown
sections or keys are errors.
"""
import configparser
import re
from dataclasses import dataclass

from .grid import Grid
from .kernel import KernelError, KernelSpec
from .resolvent import InadmissibleStepError, Nonlinearity, admissible_h
from .scheme import FieldPreset, Forcing, Scenario

__all__ = ('ConfigError', 'Study', 'load_config', 'parse_config',
           'parse_config_text', 'scenario_to_config')

PRESET_KEYS = ('amplitude', 'offset', 'mode', 'width', 'values')
FIELDS = ('theta0', 'phi0', 'v0')

ALLOWED = {
    'domain': {'dim', 'lengths', 'cells'},
    'time': {'T', 'N'},
    'kernel': {'kind', 'value', 'amplitude', 'width', 'samples'},
    'nonlinearity': {'pi_b', 'pi_c'},
    'forcing': {'profile', 'temporal', 'coeffs', 'omega'} | set(PRESET_KEYS),
    'initial': set(FIELDS) | {'{}_{}'.format(f, k) for f in FIELDS
                              for k in PRESET_KEYS},
    'study': {'N_list', 'N_ref'},
}
REQUIRED_SECTIONS = ('domain', 'time')
_BETA_KEY = re.compile(r'^beta_(-?\d+)$')


class ConfigError(ValueError):
    """Invalid configuration; ``line`` is the 1-based line, when known."""

    def __init__(self, msg, line=None):
        super().__init__(msg if line is None
                         else 'line {}: {}'.format(line, msg))
        self.line = line


@dataclass(frozen=True)
class Study:
    N_list: tuple
    N_ref: int


def _key_lines(text):
    lines, section = {}, None
    for i, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s or s[0] in '#;':
            continue
        m = re.match(r'^\[(.+)\]$', s)
        if m:
            section = m.group(1).strip()
            lines[(section, None)] = i
            continue
        m = re.match(r'^([^=:]+?)\s*[=:]', s)
        if m and section is not None:
            lines[(section, m.group(1))] = i
    return lines


class _Reader:
    def __init__(self, cp, lines):
        self.cp, self.lines = cp, lines

    def line(self, section, key=None):
        return self.lines.get((section, key), self.lines.get((section, None)))

    def get(self, section, key, conv, default):
        if not self.cp.has_option(section, key):
            return default
        raw = self.cp.get(section, key)
        try:
            val = conv(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError('[{}] {} = {!r}: {}'.format(section, key, raw,
                                                          exc),
                              self.line(section, key)) from None
        return val


def _float(raw):
    val = float(raw)
    if val != val or val in (float('inf'), float('-inf')):
        raise ValueError('not finite')
    return val


def _int(raw):
    val = _float(raw)
    if val != int(val):
        raise ValueError('not an integer')
    return int(val)


def _list(conv):
    def parse(raw):
        items = [x for x in re.split(r'[,\s]+', raw.strip()) if x]
        return tuple(conv(x) for x in items)
    return parse


def _preset(r, section, prefix, default_kind='zero'):
    def key(k):
        return '{}_{}'.format(prefix, k) if prefix else k
    kind = r.get(section, prefix or 'profile', str.strip, default_kind)
    try:
        return FieldPreset(
            kind=kind,
            amplitude=r.get(section, key('amplitude'), _float, 0.0),
            offset=r.get(section, key('offset'), _float, 0.0),
            mode=r.get(section, key('mode'), _int, 1),
            width=r.get(section, key('width'), _float, 0.1),
            values=r.get(section, key('values'), _list(_float), ()))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError('[{}] {}: {}'.format(section, prefix or 'profile',
                                               exc),
                          r.line(section, prefix or 'profile')) from None


def parse_config_text(text):
    """Parse config text into ``(Scenario, Study or None)``."""
    cp = configparser.ConfigParser(interpolation=None,
                                   inline_comment_prefixes=('#', ';'))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError('parse error: {}'.format(exc),
                          getattr(exc, 'lineno', None)) from None
    lines = _key_lines(text)
    r = _Reader(cp, lines)

    for section in cp.sections():
        if section not in ALLOWED:
            raise ConfigError('unknown section [{}]'.format(section),
                              r.line(section))
        for key in cp.options(section):
            if key in ALLOWED[section]:
                continue
            if section == 'nonlinearity' and _BETA_KEY.match(key):
                continue
            raise ConfigError('unknown key {!r} in [{}]'.format(key, section),
                              r.line(section, key))
    for section in REQUIRED_SECTIONS:
        if not cp.has_section(section):
            raise ConfigError('missing section [{}]'.format(section))

    dim = r.get('domain', 'dim', _int, 1)
    lengths = r.get('domain', 'lengths', _list(_float), (1.0,) * dim)
    cells = r.get('domain', 'cells', _list(_int), (64,) * dim)
    if len(lengths) != dim or len(cells) != dim:
        raise ConfigError('[domain] lengths and cells need {} entries'
                          .format(dim), r.line('domain'))
    try:
        grid = Grid(lengths, cells)
    except ValueError as exc:
        raise ConfigError('[domain] {}'.format(exc), r.line('domain')) \
            from None

    T = r.get('time', 'T', _float, 1.0)
    N = r.get('time', 'N', _int, 64)

    try:
        kernel = KernelSpec(
            kind=r.get('kernel', 'kind', str.strip, 'gaussian'),
            value=r.get('kernel', 'value', _float, 0.0),
            amplitude=r.get('kernel', 'amplitude', _float, 1.0),
            width=r.get('kernel', 'width', _float, 0.1),
            samples=r.get('kernel', 'samples', _list(_float), ()))
        kernel.table(grid)
    except KernelError as exc:
        raise ConfigError('[kernel] {}'.format(exc), r.line('kernel')) \
            from None

    beta = []
    if cp.has_section('nonlinearity'):
        for key in cp.options('nonlinearity'):
            m = _BETA_KEY.match(key)
            if m:
                beta.append((int(m.group(1)),
                             r.get('nonlinearity', key, _float, 0.0)))
    try:
        nl = Nonlinearity(beta=tuple(beta) if beta else ((3, 1.0),),
                          pi_b=r.get('nonlinearity', 'pi_b', _float, 0.0),
                          pi_c=r.get('nonlinearity', 'pi_c', _float, 0.0))
    except ValueError as exc:
        raise ConfigError('[nonlinearity] {}'.format(exc),
                          r.line('nonlinearity')) from None

    forcing = Forcing(
        spatial=_preset(r, 'forcing', None, 'zero'),
        temporal=r.get('forcing', 'temporal', str.strip, 'poly'),
        coeffs=r.get('forcing', 'coeffs', _list(_float), (1.0,)),
        omega=r.get('forcing', 'omega', _float, 1.0)) \
        if cp.has_section('forcing') else Forcing.constant(0.0)
    initial = {f: _preset(r, 'initial', f) for f in FIELDS}

    h_max = admissible_h(nl).h_max
    if not T / N < h_max:
        raise ConfigError(
            "time step h = T/N = {:g} violates h < min{{1, 1/|pi'|}} = {:g}"
            .format(T / N, h_max), r.line('time', 'N'))
    try:
        scenario = Scenario(grid=grid, T=T, N=N, kernel=kernel, nl=nl,
                            forcing=forcing, **initial)
    except InadmissibleStepError as exc:
        raise ConfigError(str(exc), r.line('time', 'N')) from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    study = None
    if cp.has_section('study'):
        N_list = r.get('study', 'N_list', _list(_int), ())
        N_ref = r.get('study', 'N_ref', _int, None)
        if not N_list or N_ref is None:
            raise ConfigError('[study] needs N_list and N_ref',
                              r.line('study'))
        study = Study(tuple(N_list), N_ref)
    return scenario, study


def load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError('cannot read {}: {}'.format(path, exc)) from None
    return parse_config_text(text)


def parse_config(path):
    """Read and validate a scenario file."""
    return load_config(path)[0]


def _fmt(x):
    return repr(float(x))


def _preset_lines(p, prefix):
    def key(k):
        return '{}_{}'.format(prefix, k) if prefix else k
    out = ['{} = {}'.format(prefix or 'profile', p.kind),
           '{} = {}'.format(key('amplitude'), _fmt(p.amplitude)),
           '{} = {}'.format(key('offset'), _fmt(p.offset)),
           '{} = {}'.format(key('mode'), p.mode),
           '{} = {}'.format(key('width'), _fmt(p.width))]
    if p.values:
        out.append('{} = {}'.format(key('values'),
                                    ', '.join(map(_fmt, p.values))))
    return out


def scenario_to_config(s, study=None):
    """Canonical config text; ``parse_config_text`` inverts it exactly."""
    g = s.grid
    out = ['[domain]', 'dim = {}'.format(g.dim),
           'lengths = {}'.format(', '.join(map(_fmt, g.lengths))),
           'cells = {}'.format(', '.join(map(str, g.cells))), '',
           '[time]', 'T = {}'.format(_fmt(s.T)), 'N = {}'.format(s.N), '',
           '[kernel]', 'kind = {}'.format(s.kernel.kind),
           'value = {}'.format(_fmt(s.kernel.value)),
           'amplitude = {}'.format(_fmt(s.kernel.amplitude)),
           'width = {}'.format(_fmt(s.kernel.width))]
    if s.kernel.samples:
        out.append('samples = {}'.format(
            ', '.join(map(_fmt, s.kernel.samples))))
    out += ['', '[nonlinearity]']
    out += ['beta_{} = {}'.format(p, _fmt(c)) for p, c in s.nl.beta]
    out += ['pi_b = {}'.format(_fmt(s.nl.pi_b)),
            'pi_c = {}'.format(_fmt(s.nl.pi_c)), '', '[forcing]']
    out += _preset_lines(s.forcing.spatial, None)
    out += ['temporal = {}'.format(s.forcing.temporal),
            'coeffs = {}'.format(', '.join(map(_fmt, s.forcing.coeffs))),
            'omega = {}'.format(_fmt(s.forcing.omega)), '', '[initial]']
    for f in FIELDS:
        out += _preset_lines(getattr(s, f), f)
    if study is not None:
        out += ['', '[study]',
                'N_list = {}'.format(', '.join(map(str, study.N_list))),
                'N_ref = {}'.format(study.N_ref)]
    return '\n'.join(out) + '\n'
