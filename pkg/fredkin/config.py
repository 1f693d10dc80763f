import json
import os


class InvalidConfigError(Exception):
    pass


class CapExceeded(Exception):
    pass


class InvalidArgument(ValueError):
    """A caller-supplied size, cut, count or option is out of range."""


CAP_ENV_VAR = 'FREDKIN_CAP_BITS'

_FIELDS = (
    'enumeration_cap_bits',
    'basis_cap_bits',
    'dense_cap_bits',
    'kernel_tol',
    'eigen_tol',
    'cluster_tol',
    'seed',
    'phase_magnitudes',
)


def _load_json_file(name, config_dir=None):
    if not config_dir:
        config_dir = os.path.join(os.path.dirname(__file__), 'configs')

    with open(os.path.join(config_dir, name)) as config:
        return json.load(config)


class Config(object):
    """Caps and tolerances shared by every computation.

    Values come from configs/defaults.json, then the FREDKIN_CAP_BITS
    environment variable (enumeration cap only), then keyword overrides.
    """
    def __init__(self, config_dir=None, environ=None, **overrides):
        values = _load_json_file('defaults.json', config_dir)

        if environ is None:
            environ = os.environ
        env_cap = environ.get(CAP_ENV_VAR)
        if env_cap:
            try:
                values['enumeration_cap_bits'] = int(env_cap)
            except ValueError:
                raise InvalidConfigError(
                    '%s must be an integer, got %r' % (CAP_ENV_VAR, env_cap))

        for name, value in overrides.items():
            if name not in _FIELDS:
                raise InvalidConfigError('unknown config field %r' % name)
            if value is not None:
                values[name] = value

        for name in _FIELDS:
            setattr(self, name, values[name])
        self.validate()

    def validate(self):
        for name in ('enumeration_cap_bits', 'basis_cap_bits', 'dense_cap_bits'):
            value = getattr(self, name)
            if not isinstance(value, int) or value <= 0:
                raise InvalidConfigError(
                    '%s must be a positive integer, got %r' % (name, value))
        for name in ('kernel_tol', 'eigen_tol', 'cluster_tol'):
            if not getattr(self, name) > 0:
                raise InvalidConfigError('%s must be positive' % name)
        if not self.phase_magnitudes or any(m <= 0 for m in self.phase_magnitudes):
            raise InvalidConfigError('phase_magnitudes must be positive')

    @property
    def dense_cap(self):
        return 1 << self.dense_cap_bits

    def check_enumeration(self, n_sites):
        if n_sites > self.enumeration_cap_bits:
            raise CapExceeded(
                'enumerating %d-site words exceeds the cap of %d sites'
                % (n_sites, self.enumeration_cap_bits))

    def check_basis(self, dim, what='basis'):
        if dim > (1 << self.basis_cap_bits):
            raise CapExceeded(
                '%s of dimension %d exceeds the cap of 2^%d states'
                % (what, dim, self.basis_cap_bits))

    def as_dict(self):
        return {name: getattr(self, name) for name in _FIELDS}


_default = None


def default_config():
    global _default
    if _default is None:
        _default = Config()
    return _default


def resolve(config):
    return config if config is not None else default_config()
